#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

#include "persmod/interleave.hpp"
#include "persmod/module.hpp"

namespace pm {

// The gadget G on {0,...,4}^2; axis 0 is the horizontal coordinate.
GridModule module_G(const Field& F = Field());

// Lattice hyper-rectangle [a_0, b_0] x ... x [a_{n-1}, b_{n-1}] in (delta Z)^n.
// A missing bound stands for -inf (lo) or +inf (hi).
struct HyperRectangle {
  Rational delta;
  std::vector<std::optional<Rational>> lo, hi;

  static HyperRectangle box(const Rational& delta, const Point& a, const Point& b);

  std::size_t n() const { return lo.size(); }
  bool on_lattice(const Point& x) const;
  bool contains(const Point& x) const;
  // S^up = [a, b + delta], S^down = [a - delta, b].
  HyperRectangle up() const;
  HyperRectangle down() const;
  bool in_boundary_up(const Point& x) const;
  bool in_boundary_down(const Point& x) const;
  bool in_boundary(const Point& x) const;
  bool in_closure(const Point& x) const;
  // a <= x < b + delta on every axis: the cells of S in R^n.
  bool in_extension(const Point& x) const;
  // The same region as a box; all bounds must be finite.
  Box extension() const;
  // a - delta, a and b + delta on each axis (finite ones only).
  std::vector<std::vector<Rational>> closure_coords() const;
};

// The module equal to N on S and to M off S. N lives on a grid U that covers
// the closure of S and holds a - delta, a, b + delta on every axis; M and N
// must agree on U minus S. Both are read as lattice modules via extension.
GridModule modify_on_rectangle(const GridModule& M, const HyperRectangle& S, const GridModule& N);
// Second half of the indecomposability transfer test: every summand of N is
// nonzero somewhere in U minus S.
bool summands_meet_boundary(const HyperRectangle& S, const GridModule& N);

// First grid vertex r (flat order) with A(r) = k and A(s) = 0 for all s < r.
std::optional<Point> has_thin_corner(const GridModule& A);
// Axis-aligned antenna over (eps Z)^n at r: A(r) = k, A(r - j eps e_axis) = 0
// for j >= 1 and A(r) -> A(r + eps e_i) zero for i != axis. Axes count from 0.
bool is_antenna(const GridModule& A, const Point& r, std::size_t axis, const Rational& eps);
std::optional<Point> has_antenna(const GridModule& A, std::size_t axis, const Rational& eps);

// Output of one local construction. The certificate runs input -> module.
struct Construction {
  GridModule module;
  InterleavingCertificate certificate;
  TrivialRegion region;
  Point vertex;  // thin corner or antenna
  std::size_t axis = 0;
};

// With check_input false the input is not tested for indecomposability and
// the certificate is left to the caller to verify (tack verifies the chain).
// Outputs are always certified indecomposable.
Construction add_thin_corner(const GridModule& A, const Rational& eps, bool check_input = true);
Construction add_antenna(const GridModule& A, const Rational& eps, bool check_input = true);
// A has an axis-0 antenna at r (searched for when not given); the result has
// an antenna at s along axis 0 for n even and axis n-1 for n odd.
Construction move_antenna(const GridModule& A, const Rational& eps, const Point& s,
                          std::optional<Point> r = std::nullopt, bool check_input = true);
// A and B carry axis-l antennas at r and r - eps e_l' with (l, l') = (0, 1) for
// n even and (n-1, n-2) for n odd. The certificate runs A + B -> module at 5 eps.
Construction tack_pair(const GridModule& A, const GridModule& B, const Rational& eps,
                       const Point& r, bool check_input = true);

// Region and eps of one local construction.
struct LocalChange {
  TrivialRegion region;
  Rational eps;
};

struct TackResult {
  GridModule module;
  InterleavingCertificate certificate;  // A + B -> module
  Rational eps0;
  // A+B -> A1+B1 -> A2+B2 -> A3+B3 -> module
  std::vector<InterleavingCertificate> stages;
  // A1, B1, A2, B2, A3, B3 and the final pair
  std::vector<LocalChange> changes;
};

// Largest tau with every grid coordinate of the modules in tau Z (1 if all are 0).
Rational common_pitch(const std::vector<GridModule>& mods);

TackResult tack(const GridModule& A, const GridModule& B, const Rational& delta,
                std::optional<Rational> tau = std::nullopt, bool check_input = true);

struct Approximation {
  GridModule module;
  InterleavingCertificate certificate;  // N -> module
  std::vector<GridModule> summands;     // of the snapped module
  // Certificate eps after the snap and after each tacking step.
  std::vector<Rational> accumulated;
};

// Called with (steps done, steps total) during the tacking fold.
using Progress = std::function<void(std::size_t, std::size_t)>;

Approximation approximate_indecomposable(const GridModule& N, const Rational& eps,
                                         std::uint64_t seed = 0, const Progress& progress = {});

}  // namespace pm
