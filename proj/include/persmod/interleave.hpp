#pragma once

#include <optional>
#include <string>
#include <vector>

#include "persmod/module.hpp"

namespace pm {

// Half-open box [lo, hi) in Q^n.
struct Box {
  Point lo, hi;
  bool contains(const Point& x) const;
  bool empty() const;
};

// Finite union of half-open boxes.
struct TrivialRegion {
  std::vector<Box> boxes;

  bool contains(const Point& x) const;
  // U and U + eps are disjoint.
  bool is_eps_trivial(const Rational& eps) const;
  // Box corners per axis, for refining grids so that cells are inside or outside.
  std::vector<std::vector<Rational>> corners(std::size_t n) const;
  TrivialRegion& add(const TrivialRegion& o);
};

// An eps-interleaving between the extensions of M and N. The morphisms are
// stored at the vertices of `grid`: f[v] : M(x) -> N(x + eps) and
// g[v] : N(x) -> M(x + eps) with x the point of vertex v. The grid contains
// the axes of M and N and their translates by -eps, so at any point the
// components equal those at the grid floor.
struct InterleavingCertificate {
  GridModule M, N;
  Rational eps;
  Grid grid;
  std::vector<Matrix> f, g;

  // Component at an arbitrary point.
  Matrix f_at(const Point& x) const;
  Matrix g_at(const Point& x) const;
};

struct CertificateCheck {
  bool ok = true;
  std::string message;
  explicit operator bool() const { return ok; }
};

CertificateCheck verify_certificate(const InterleavingCertificate& c);
// Throws VerificationError when the check fails.
void require_verified(const InterleavingCertificate& c, const std::string& what);

// Grid carrying certificate components for the pair (M, N) at eps.
Grid certificate_grid(const GridModule& M, const GridModule& N, const Rational& eps,
                      const std::vector<std::vector<Rational>>& extra = {});

// f = g = id at eps = 0; M is paired with itself.
InterleavingCertificate identity_certificate(const GridModule& M);
// eps = 0 from an isomorphism M -> N on a common grid.
InterleavingCertificate iso_certificate(const ModuleMorphism& phi);
// X against the zero module at eps. Valid exactly when X is 2 eps-trivial.
InterleavingCertificate zero_certificate(const GridModule& X, const Rational& eps);
// X against X[s] at eps >= |s|.
InterleavingCertificate shift_certificate(const GridModule& X, const Rational& s,
                                          const Rational& eps);
// N against its snap to the lattice (hZ + offset)^n, at eps = h. The snapped
// module is stored in the certificate's N.
InterleavingCertificate snap_certificate(const GridModule& N, const Rational& h,
                                         const Rational& offset = 0);
GridModule snap(const GridModule& N, const Rational& h, const Rational& offset = 0);

InterleavingCertificate reverse(const InterleavingCertificate& c);
// Composite along c1 : M ~ N, c2 : N ~ L; the two middle modules must have the
// same extension.
InterleavingCertificate compose_certificates(const InterleavingCertificate& c1,
                                             const InterleavingCertificate& c2);
// (A + X, B + X) from (A, B), extended by eta^X_eps.
InterleavingCertificate sum_certificates(const InterleavingCertificate& c, const GridModule& X);
// (M1 + M2, N1 + N2) from two certificates at the same eps.
InterleavingCertificate block_sum(const InterleavingCertificate& c1,
                                  const InterleavingCertificate& c2);
// The same interleaving viewed at a larger eps.
InterleavingCertificate weaken(const InterleavingCertificate& c, const Rational& eps);
// Same pair of extensions, with M or N replaced by an equal-extension copy.
InterleavingCertificate relabel(const InterleavingCertificate& c, const GridModule& M,
                                const GridModule& N);

// Certificate for two modules that agree outside an eps-trivial region U.
// The agreement is always checked; verify = false skips the final check.
InterleavingCertificate local_change_certificate(const GridModule& M, const GridModule& Mp,
                                                 const TrivialRegion& U, const Rational& eps,
                                                 bool verify = true);

// Infimum eps > 0 with M eps-trivial; nullopt when no such eps exists.
std::optional<Rational> triviality_radius(const GridModule& M);
bool is_eps_trivial(const GridModule& M, const Rational& eps);
bool is_strictly_eps_trivial(const GridModule& M, const Rational& eps);

// Largest delta in a finite sweep with a rank obstruction to delta' < delta
// interleavings; 0 if none is found.
Rational rank_lower_bound(const GridModule& M, const GridModule& N);

struct GridFactorization {
  Grid grid;                 // P together with P - beta
  GridModule source;         // L_{P+r}[r] on grid
  GridModule target;         // L_P[beta] on grid
  ModuleMorphism m;          // source -> target
  ModuleMorphism eta_P;      // eta^{L_P}_beta
  ModuleMorphism eta_r_P;    // (eta^L_r)_P
};

// The factorization of eta^{L_P}_beta through (eta^L_r)_P for a window P
// whose mesh widths lie in [alpha, beta] and that covers L's coordinates.
GridFactorization factor_through_grid(const GridModule& L, const Grid& P, const Rational& r,
                                      const Rational& alpha, const Rational& beta);
// Checks naturality of m and the square eta_P = m o eta_r_P.
bool verify_factorization(const GridFactorization& fz);

}  // namespace pm
