#pragma once

#include <cstdint>
#include <memory>
#include <vector>

#include "persmod/hom.hpp"
#include "persmod/module.hpp"

namespace pm {

using Vec = std::vector<Elem>;

// Finite-dimensional associative unital algebra over F_p given by structure
// constants: b_i * b_j = sum_k mult[i][j][k] b_k.
class FiniteAlgebra {
 public:
  FiniteAlgebra(Field F, std::vector<std::vector<Vec>> mult, Vec unit);
  // Subalgebra of n x n matrices spanned by the given (closed, unital) basis.
  static FiniteAlgebra from_matrices(const Field& F, const std::vector<Matrix>& basis);

  const Field& field() const { return F_; }
  std::size_t dim() const { return unit_.size(); }
  const Vec& unit() const { return unit_; }
  const std::vector<std::vector<Vec>>& mult() const { return mult_; }

  Vec multiply(const Vec& a, const Vec& b) const;
  Vec power(const Vec& a, std::uint64_t e) const;
  Vec add(const Vec& a, const Vec& b) const;
  Vec sub(const Vec& a, const Vec& b) const;
  Vec scale(Elem c, const Vec& a) const;
  Vec basis_vector(std::size_t i) const;
  // Matrix of x -> a x in the basis.
  Matrix left_mult(const Vec& a) const;
  bool is_commutative() const;

 private:
  Field F_;
  std::vector<std::vector<Vec>> mult_;
  Vec unit_;
};

// Basis (as rows) of the Jacobson radical. Uses the trace form when p > dim
// and the lifted-trace ideal chain otherwise; the result is checked to be a
// nilpotent two-sided ideal.
Matrix radical(const FiniteAlgebra& A);

// A / rad(A) together with the maps between coordinates.
struct Quotient {
  FiniteAlgebra algebra;
  Matrix lift;     // dim(B) x dim(A): row j is a preimage of basis element j
  Matrix project;  // dim(A) x dim(B): coordinates of a in B are a * project
};
Quotient semisimple_quotient(const FiniteAlgebra& A, const Matrix& rad);

// Number of simple factors of a commutative semisimple algebra (Berlekamp).
std::size_t frobenius_fixed_dim(const FiniteAlgebra& B);
// B / rad(B) is a field, i.e. A is local.
bool is_local(const FiniteAlgebra& A);
struct IdempotentStats {
  int stage = 0;           // 1: centre of A/rad, 2: random commutative subalgebra
  int lift_iterations = 0;  // Newton steps needed to lift from A/rad to A
};

// Nontrivial idempotent of a non-local algebra; throws PreconditionError when
// A is local and SearchExhausted when the random stage runs out of trials.
Vec find_idempotent(const FiniteAlgebra& A, std::uint64_t seed = 0, int max_trials = 256,
                    IdempotentStats* stats = nullptr);

class EndAlgebra {
 public:
  explicit EndAlgebra(const GridModule& M);

  const GridModule& module() const { return hom_->source(); }
  std::size_t dim() const { return alg_->dim(); }
  bool degenerate() const { return dim() == 0; }
  const FiniteAlgebra& algebra() const { return *alg_; }
  const HomSpace& hom() const { return *hom_; }
  ModuleMorphism basis_morphism(std::size_t i) const { return hom_->basis_morphism(i); }
  std::vector<ModuleMorphism> basis() const { return hom_->basis(); }
  ModuleMorphism morphism(const Vec& coords) const;
  Vec coordinates(const ModuleMorphism& f) const;
  const Vec& unit() const { return alg_->unit(); }

 private:
  std::shared_ptr<HomSpace> hom_;
  std::shared_ptr<FiniteAlgebra> alg_;
};

Matrix radical(const EndAlgebra& A);
bool is_indecomposable(const GridModule& M);
ModuleMorphism find_idempotent(const EndAlgebra& A, std::uint64_t seed = 0, int max_trials = 256,
                               IdempotentStats* stats = nullptr);

struct Split {
  GridModule first, second;
  ModuleMorphism witness;  // M -> direct_sum(first, second), invertible
};

Split split_by_idempotent(const GridModule& M, const ModuleMorphism& e);
// (ker phi^D, im phi^D) with D the total dimension.
Split fitting_split(const GridModule& M, const ModuleMorphism& phi);

struct Decomposition {
  std::vector<GridModule> summands;  // sorted by total dimension, then dims
  ModuleMorphism witness;            // M -> direct_sum(summands), invertible
};

Decomposition decompose(const GridModule& M, std::uint64_t seed = 0);

}  // namespace pm
