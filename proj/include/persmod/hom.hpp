#pragma once

#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

#include "persmod/module.hpp"

namespace pm {

using SparseRow = std::vector<std::pair<std::size_t, Elem>>;  // sorted by column

// Incremental row echelon form over F_p for sparse systems A x = 0.
class SparseEchelon {
 public:
  SparseEchelon(const Field& F, std::size_t ncols);
  // Reduces the row against the current pivots and keeps it if nonzero.
  bool add_row(SparseRow row);
  std::size_t rank() const { return nrows_; }
  std::size_t ncols() const { return ncols_; }
  std::vector<std::size_t> free_columns() const;
  // One null vector per free column, with 1 there and 0 at the other free columns.
  std::vector<std::vector<Elem>> null_basis() const;

 private:
  Field F_;
  std::size_t ncols_;
  std::size_t nrows_ = 0;
  std::vector<SparseRow> pivot_row_;  // indexed by pivot column; empty if none
};

// Hom(M, N) for modules on one grid. Vertices joined by steps that are
// isomorphisms in both modules form components; a morphism is determined by
// its blocks at the component roots, and those blocks are the unknowns.
class HomSpace {
 public:
  HomSpace(const GridModule& M, const GridModule& N);

  const GridModule& source() const { return M_; }
  const GridModule& target() const { return N_; }
  std::size_t dim() const { return basis_.size(); }
  std::size_t num_unknowns() const { return nunk_; }
  std::size_t num_components() const { return roots_.size(); }

  // Basis elements as unknown vectors (root blocks, row-major, in root order).
  const std::vector<std::vector<Elem>>& basis_vectors() const { return basis_; }
  ModuleMorphism basis_morphism(std::size_t i) const { return materialize(basis_[i]); }
  std::vector<ModuleMorphism> basis() const;
  std::vector<Elem> combine(const std::vector<Elem>& coeffs) const;
  ModuleMorphism materialize(const std::vector<Elem>& x) const;
  // Root blocks of an unknown vector.
  Matrix root_block(const std::vector<Elem>& x, std::size_t c) const;
  // Coordinates in the basis of an element given as an unknown vector.
  std::vector<Elem> coordinates(const std::vector<Elem>& x) const;
  // Unknown vector of a natural transformation M -> N.
  std::vector<Elem> unknowns_of(const ModuleMorphism& f) const;

  std::size_t root(std::size_t c) const { return roots_[c]; }
  std::size_t component(std::size_t v) const { return comp_[v]; }
  std::size_t offset(std::size_t c) const { return offset_[c]; }

  static constexpr std::size_t kNone = static_cast<std::size_t>(-1);

 private:
  GridModule M_, N_;
  std::vector<std::size_t> comp_;
  std::vector<std::size_t> roots_;
  std::vector<std::size_t> offset_;
  std::vector<Matrix> tm_inv_, tn_;  // per vertex: M(v) -> M(root), N(root) -> N(v)
  std::size_t nunk_ = 0;
  std::vector<std::vector<Elem>> basis_;
  std::vector<std::size_t> free_;
};

std::vector<ModuleMorphism> hom_space(const GridModule& M, const GridModule& N);

enum class IsoVerdict { Isomorphic, NotIsomorphic, ProbablyNotIsomorphic };

struct IsoResult {
  IsoVerdict verdict = IsoVerdict::NotIsomorphic;
  std::optional<ModuleMorphism> witness;  // on the common refinement grid
  explicit operator bool() const { return verdict == IsoVerdict::Isomorphic; }
};

IsoResult is_isomorphic(const GridModule& M, const GridModule& N, std::uint64_t seed = 0,
                        int trials = 64);

}  // namespace pm
