#include <algorithm>

#include "doctest.h"
#include "oracles.hpp"
#include "persmod/construct.hpp"
#include "persmod/decomp.hpp"
#include "persmod/hom.hpp"
#include "persmod/kan.hpp"
#include "persmod/random.hpp"

using namespace pm;

namespace {

Rational q(long a, long b = 1) {
  Rational r(a, b);
  r.canonicalize();
  return r;
}

Matrix E(std::size_t n, std::size_t i, std::size_t j) {
  Matrix m(n, n);
  m(i, j) = 1;
  return m;
}

// Upper triangular n x n matrices.
FiniteAlgebra upper(const Field& F, std::size_t n) {
  std::vector<Matrix> b;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i; j < n; ++j) b.push_back(E(n, i, j));
  return FiniteAlgebra::from_matrices(F, b);
}

FiniteAlgebra full_matrices(const Field& F, std::size_t n) {
  std::vector<Matrix> b;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) b.push_back(E(n, i, j));
  return FiniteAlgebra::from_matrices(F, b);
}

// Group algebra of the cyclic group of order n in its regular representation.
FiniteAlgebra cyclic_group_algebra(const Field& F, std::size_t n) {
  std::vector<Matrix> b;
  for (std::size_t s = 0; s < n; ++s) {
    Matrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m((i + s) % n, i) = 1;
    b.push_back(m);
  }
  return FiniteAlgebra::from_matrices(F, b);
}

// F_p[t] / (t^2 - c) for a non-square c: the field with p^2 elements.
FiniteAlgebra quadratic_field(const Field& F, Elem c) {
  return FiniteAlgebra::from_matrices(F, {Matrix::identity(2), Matrix(2, 2, {0, c, 1, 0})});
}

bool is_zero_vec(const Vec& v) {
  return std::all_of(v.begin(), v.end(), [](Elem x) { return x == 0; });
}

void check_idempotent(const FiniteAlgebra& A, const Vec& e) {
  CHECK(A.multiply(e, e) == e);
  CHECK_FALSE(is_zero_vec(e));
  CHECK(e != A.unit());
}

// k on [a, b) of the line {0, 1, 2}.
GridModule line_interval(long a, long b) {
  Grid line({{q(0), q(1), q(2)}});
  ModuleBuilder mb(line, Field());
  for (long v = a; v < b; ++v) mb.set_dim(v, 1);
  for (long v = a; v + 1 < b; ++v) mb.set_step(0, v, Matrix::identity(1));
  return mb.build();
}

bool same_multiset(std::vector<GridModule> a, std::vector<GridModule> b) {
  if (a.size() != b.size()) return false;
  std::vector<bool> used(b.size(), false);
  for (const auto& x : a) {
    bool found = false;
    for (std::size_t j = 0; j < b.size() && !found; ++j)
      if (!used[j] && is_isomorphic(x, b[j])) used[j] = found = true;
    if (!found) return false;
  }
  return true;
}

}  // namespace

TEST_CASE("radicals of small matrix algebras") {
  Field F(5);
  CHECK(radical(upper(F, 2)).rows() == 1);
  CHECK(radical(upper(F, 3)).rows() == 3);
  CHECK(radical(full_matrices(F, 2)).rows() == 0);
  CHECK(radical(quadratic_field(F, 2)).rows() == 0);
  // F_5[C_5] = F_5[x]/(x-1)^5
  CHECK(radical(cyclic_group_algebra(F, 5)).rows() == 4);
  CHECK(radical(cyclic_group_algebra(F, 4)).rows() == 0);
}

TEST_CASE("radicals in small characteristic") {
  Field F2(2), F3(3);
  CHECK(radical(full_matrices(F2, 2)).rows() == 0);
  CHECK(radical(full_matrices(F2, 3)).rows() == 0);
  CHECK(radical(upper(F2, 3)).rows() == 3);
  CHECK(radical(upper(F3, 3)).rows() == 3);
  CHECK(radical(cyclic_group_algebra(F2, 4)).rows() == 3);
  CHECK(radical(cyclic_group_algebra(F2, 3)).rows() == 0);
  CHECK(radical(cyclic_group_algebra(F3, 6)).rows() == 4);
  CHECK(radical(quadratic_field(F3, 2)).rows() == 0);
}

TEST_CASE("local algebras") {
  Field F(7);
  CHECK(is_local(quadratic_field(F, 3)));
  CHECK(is_local(cyclic_group_algebra(F, 7)));
  CHECK_FALSE(is_local(full_matrices(F, 2)));
  CHECK_FALSE(is_local(upper(F, 2)));
  CHECK_FALSE(is_local(cyclic_group_algebra(F, 3)));
  // x^4 - 1 = (x - 1)(x + 1)(x^2 + 1) over F_7
  CHECK(frobenius_fixed_dim(cyclic_group_algebra(F, 4)) == 3);
  CHECK_THROWS_AS(find_idempotent(quadratic_field(F, 3)), PreconditionError);
}

TEST_CASE("idempotents of small algebras") {
  for (Elem p : {2u, 3u, 5u, 65521u}) {
    Field F(p);
    for (std::uint64_t s = 0; s < 4; ++s) {
      IdempotentStats st;
      auto M2 = full_matrices(F, 2);
      check_idempotent(M2, find_idempotent(M2, s, 256, &st));
      CHECK(st.stage == 2);
      auto U3 = upper(F, 3);
      check_idempotent(U3, find_idempotent(U3, s, 256, &st));
      CHECK(st.stage == 1);
      auto M3 = full_matrices(F, 3);
      check_idempotent(M3, find_idempotent(M3, s));
    }
  }
  // idempotent of the quotient whose lift needs Newton steps
  Field F(5);
  auto A = FiniteAlgebra::from_matrices(
      F, {add(F, E(3, 0, 0), E(3, 1, 2)), add(F, E(3, 1, 1), E(3, 0, 2)),
          add(F, E(3, 2, 2), E(3, 0, 1)), E(3, 0, 1), E(3, 0, 2), E(3, 1, 2)});
  int lifted = 0;
  for (std::uint64_t s = 0; s < 8; ++s) {
    IdempotentStats st;
    check_idempotent(A, find_idempotent(A, s, 256, &st));
    lifted += st.lift_iterations > 0;
  }
  CHECK(lifted > 0);
}

TEST_CASE("end algebras") {
  GridModule G = module_G();
  EndAlgebra A(G);
  CHECK(A.dim() == 1);
  CHECK(radical(A).rows() == 0);
  CHECK(A.morphism(A.unit()).mats == identity_morphism(G).mats);
  CHECK(EndAlgebra(GridModule::zero(G.grid())).degenerate());

  // summands with disjoint supports: End is a product of two fields
  GridModule I = interval_module({q(-3), q(-3)}, {q(-2), q(-2)});
  auto [Gr, Ir] = common_refinement(G, I);
  GridModule X = direct_sum(Gr, Ir);
  EndAlgebra AX(X);
  CHECK(AX.dim() == 2);
  CHECK(AX.dim() == oracle::end_basis(X).size());
  CHECK(radical(AX).rows() == 0);
  CHECK(AX.algebra().is_commutative());
  IdempotentStats st;
  ModuleMorphism e = find_idempotent(AX, 0, 256, &st);
  CHECK(st.stage == 1);
  Split sp = split_by_idempotent(X, e);
  CHECK(same_multiset({sp.first, sp.second}, {Gr, Ir}));

  // structure constants agree with composition of basis morphisms
  GridModule R = random_basis_change(direct_sum(line_interval(0, 3), line_interval(1, 3)), 2);
  EndAlgebra AR(R);
  CHECK(AR.dim() == 3);
  auto B = AR.basis();
  for (std::size_t i = 0; i < B.size(); ++i)
    for (std::size_t j = 0; j < B.size(); ++j)
      CHECK(AR.coordinates(compose(B[i], B[j])) == AR.algebra().mult()[i][j]);
  Matrix rad = radical(AR);
  REQUIRE(rad.rows() == 1);
  ModuleMorphism nil = AR.morphism(Vec(rad.data().begin(), rad.data().end()));
  CHECK_FALSE(nil.mats[1].is_zero());
  CHECK(compose(nil, nil).mats == zero_morphism(R, R).mats);
}

TEST_CASE("indecomposability") {
  GridModule G = module_G();
  CHECK(is_indecomposable(G));
  CHECK_FALSE(is_indecomposable(direct_sum(G, G)));
  CHECK(is_indecomposable(random_basis_change(G, 1)));
  CHECK(is_indecomposable(line_interval(0, 3)));
  CHECK_FALSE(is_indecomposable(direct_sum(line_interval(0, 3), line_interval(1, 3))));
  CHECK_THROWS_AS(is_indecomposable(GridModule::zero(G.grid())), PreconditionError);
  CHECK(is_indecomposable(module_G(Field(2))));
  CHECK(is_indecomposable(module_G(Field(3))));
}

TEST_CASE("indecomposability agrees with exhaustive idempotent search") {
  int tested = 0;
  for (Elem p : {2u, 3u}) {
    Field F(p);
    for (std::uint64_t s = 0; s < 150; ++s) {
      GridModule M = random_module(1 + s % 2, 3, 2, s, F);
      if (M.is_zero()) continue;
      std::size_t d = oracle::end_basis(M).size();
      if (d > 4) continue;
      ++tested;
      CHECK(EndAlgebra(M).dim() == d);
      CHECK(is_indecomposable(M) == !oracle::has_nontrivial_idempotent(M));
    }
  }
  CHECK(tested > 100);
}

TEST_CASE("G plus G splits evenly") {
  GridModule G = module_G();
  GridModule GG = random_basis_change(direct_sum(G, G), 5);
  EndAlgebra A(GG);
  CHECK(A.dim() == 4);
  IdempotentStats st;
  ModuleMorphism e = find_idempotent(A, 0, 256, &st);
  CHECK(st.stage == 2);
  Split sp = split_by_idempotent(GG, e);
  CHECK(sp.first.total_dim() == 25);
  CHECK(sp.second.total_dim() == 25);
  CHECK(is_isomorphic(sp.first, G));
  CHECK(is_isomorphic(sp.second, G));
  CHECK(check_natural(sp.witness).empty());
  CHECK(is_iso(sp.witness));
}

TEST_CASE("splitting by idempotents") {
  GridModule G = module_G();
  Split t = split_by_idempotent(G, identity_morphism(G));
  CHECK(t.first == G);
  CHECK(t.second.is_zero());
  ModuleMorphism bad = scale(2, identity_morphism(G));
  CHECK_THROWS_AS(split_by_idempotent(G, bad), PreconditionError);
  ModuleMorphism unnatural = identity_morphism(G);
  unnatural.mats[G.grid().index({2, 2})] = Matrix(2, 2, {1, 0, 0, 0});
  CHECK_THROWS_AS(split_by_idempotent(G, unnatural), PreconditionError);

  for (std::uint64_t s = 0; s < 10; ++s) {
    GridModule I = interval_module({q(0), q(1)}, {q(2), q(3)});
    GridModule J = free_module(Grid::regular(2, 0, 4), 5);
    auto [Ir, Jr] = common_refinement(I, J);
    GridModule M = random_basis_change(direct_sum(direct_sum(Ir, Jr), Ir), s);
    ModuleMorphism e = find_idempotent(EndAlgebra(M), s);
    Split sp = split_by_idempotent(M, e);
    CHECK_FALSE(sp.first.is_zero());
    CHECK_FALSE(sp.second.is_zero());
    CHECK(is_iso(sp.witness));
    CHECK(sp.witness.target == direct_sum(sp.first, sp.second));
  }
}

TEST_CASE("fitting splits") {
  GridModule G = module_G();
  GridModule I = interval_module({q(0), q(0)}, {q(1), q(1)});
  auto [Gr, Ir] = common_refinement(G, I);
  GridModule X = direct_sum(Gr, Ir);
  Split inv = fitting_split(X, scale(3, identity_morphism(X)));
  CHECK(inv.first.is_zero());
  CHECK(inv.second == X);
  Split nil = fitting_split(X, zero_morphism(X, X));
  CHECK(nil.first == X);
  CHECK(nil.second.is_zero());
  bool nontrivial = false;
  for (const auto& b : EndAlgebra(X).basis()) {
    Split s = fitting_split(X, b);
    CHECK(is_iso(s.witness));
    if (!s.first.is_zero() && !s.second.is_zero()) {
      nontrivial = true;
      CHECK(same_multiset({s.first, s.second}, {Gr, Ir}));
    }
  }
  CHECK(nontrivial);
}

TEST_CASE("decompose") {
  GridModule G = module_G();
  CHECK(decompose(GridModule::zero(G.grid())).summands.empty());

  Decomposition d1 = decompose(G);
  REQUIRE(d1.summands.size() == 1);
  CHECK(d1.summands[0] == G);
  CHECK(d1.witness.mats == identity_morphism(G).mats);

  GridModule K = interval_module({q(0), q(0)}, {q(1), q(1)});
  auto [Gr, Kr] = common_refinement(G, K);
  GridModule M = random_basis_change(direct_sum(direct_sum(Gr, Gr), Kr), 11);
  Decomposition d = decompose(M);
  REQUIRE(d.summands.size() == 3);
  CHECK(d.summands[0].total_dim() == Kr.total_dim());
  CHECK(same_multiset(d.summands, {Gr, Gr, Kr}));
  CHECK(is_iso(d.witness));
  for (const auto& s : d.summands) CHECK(is_indecomposable(s));
}

TEST_CASE("decompositions are unique up to isomorphism") {
  for (std::uint64_t s = 0; s < 25; ++s) {
    GridModule M = random_module(2, 3, 3, s);
    Decomposition a = decompose(M, s), b = decompose(random_basis_change(M, s + 1), s + 2);
    CHECK(same_multiset(a.summands, b.summands));
    std::vector<std::size_t> sum(M.grid().size(), 0);
    for (const auto& x : a.summands)
      for (std::size_t v = 0; v < sum.size(); ++v) sum[v] += x.dim(v);
    CHECK(sum == M.dims());
    for (std::size_t i = 0; i + 1 < a.summands.size(); ++i)
      CHECK(a.summands[i].total_dim() <= a.summands[i + 1].total_dim());
    for (const auto& x : a.summands) {
      Decomposition again = decompose(x);
      REQUIRE(again.summands.size() == 1);
      CHECK(again.summands[0] == x);
    }
  }
}
