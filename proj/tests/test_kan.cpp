#include <random>

#include "doctest.h"
#include "oracles.hpp"
#include "persmod/construct.hpp"
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

Grid random_grid(std::size_t n, std::mt19937_64& rng, long lo, long hi, long den) {
  std::vector<std::vector<Rational>> ax(n);
  for (auto& a : ax) {
    for (long i = lo * den; i <= hi * den; ++i)
      if (rng() % 3 == 0) a.push_back(q(i, den));
    if (a.empty()) a.push_back(q(lo));
  }
  return Grid(ax);
}

}  // namespace

TEST_CASE("restriction of G to its corners") {
  GridModule G = module_G();
  GridModule R = restrict(G, Grid::uniform(2, {q(0), q(4)}));
  CHECK(R.dims() == std::vector<std::size_t>{0, 1, 1, 1});
  CHECK(restrict(G, G.grid()) == G);
  CHECK_THROWS_AS(restrict(G, Grid::uniform(2, {q(1, 2)})), PreconditionError);
}

TEST_CASE("restriction_extension matches the extension pointwise") {
  std::mt19937_64 rng(1);
  for (std::uint64_t s = 0; s < 30; ++s) {
    GridModule M = random_module(2, 3, 2, s);
    Grid P = random_grid(2, rng, -1, 4, 2);
    GridModule MP = restriction_extension(M, P);
    CHECK(validate(MP).ok);
    for (std::size_t v = 0; v < P.size(); ++v) CHECK(MP.dim(v) == oracle::ext_dim(M, P.point(v)));
    // idempotent on a fixed grid
    CHECK(restriction_extension(MP, P) == MP);
  }
}

TEST_CASE("refinement preserves the isomorphism class") {
  std::mt19937_64 rng(2);
  for (std::uint64_t s = 0; s < 20; ++s) {
    GridModule M = random_module(2, 3, 2, s);
    Grid P = grid_with(M.grid(), {{q(1, 2), q(5, 2)}, {q(3, 2)}});
    GridModule MP = restriction_extension(M, P);
    CHECK(restrict(MP, M.grid()) == M);
    CHECK(HomSpace(MP, MP).dim() == HomSpace(M, M).dim());
    GridModule N = random_module(2, 3, 2, s + 77);
    auto [a, b] = common_refinement(M, shift(N, q(1, 3)));
    CHECK(a.grid() == b.grid());
    CHECK(same_extension(a, M));
    GridModule C = compress(MP);
    CHECK(is_isomorphic(restriction_extension(C, M.grid()), M));
  }
  GridModule I = interval_module({q(0), q(0)}, {q(1), q(1)});
  CHECK(restriction_extension(I, Grid::uniform(2, {q(-3), q(-2)})).is_zero());
  GridModule square = interval_module({q(0), q(0)}, {q(1), q(1)});
  GridModule snapped = restriction_extension(square, Grid::regular(2, -2, 5, q(1, 2)));
  CHECK(same_extension(snapped, square));
}

TEST_CASE("direct sums commute with restriction") {
  for (std::uint64_t s = 0; s < 10; ++s) {
    GridModule A = random_module(2, 4, 2, s), B = random_module(2, 4, 2, s + 9);
    Grid Q({{q(0), q(2), q(3)}, {q(1), q(3)}});
    CHECK(restrict(direct_sum(A, B), Q) == direct_sum(restrict(A, Q), restrict(B, Q)));
  }
}

TEST_CASE("shifts") {
  GridModule M = random_module(2, 3, 2, 5);
  CHECK(shift(M, 0) == M);
  CHECK(shift(shift(M, q(1, 3)), q(1, 2)) == shift(M, q(5, 6)));
  ModuleMorphism eta0 = shift_unit(M, 0);
  CHECK(eta0.mats == identity_morphism(M).mats);
  for (std::uint64_t s = 0; s < 10; ++s) {
    GridModule X = random_module(2, 3, 2, s);
    Rational e = q(1, 2);
    auto eta = shift_unit(X, e);
    CHECK(check_natural(eta).empty());
    auto eta2 = shift_unit(X, 2 * e);
    // eta^M_{2e} = eta^{M[e]}_e o eta^M_e, read at the points of eta2's grid
    const Grid& P = eta2.source.grid();
    GridModule Xe = shift(X, e);
    for (std::size_t v = 0; v < P.size(); ++v) {
      Point x = P.point(v);
      Matrix composite = mul(X.field(), Xe.map_at(x, add(x, e)), X.map_at(x, add(x, e)));
      CHECK(composite == eta2.mats[v]);
    }
  }
}

TEST_CASE("restriction-extension of morphisms is functorial") {
  std::mt19937_64 rng(11);
  for (std::uint64_t s = 0; s < 20; ++s) {
    GridModule A = random_module(2, 3, 2, s), B = random_module(2, 3, 2, s + 1),
               C = random_module(2, 3, 2, s + 2);
    auto hab = hom_space(A, B), hbc = hom_space(B, C);
    if (hab.empty() || hbc.empty()) continue;
    ModuleMorphism f = hab[rng() % hab.size()], g = hbc[rng() % hbc.size()];
    Grid P = random_grid(2, rng, -1, 3, 2);
    auto lhs = morphism_restriction_extension(compose(g, f), P);
    auto rhs = compose(morphism_restriction_extension(g, P), morphism_restriction_extension(f, P));
    CHECK(lhs.mats == rhs.mats);
    CHECK(check_natural(lhs).empty());
    auto id = morphism_restriction_extension(identity_morphism(A), P);
    CHECK(id.mats == identity_morphism(id.source).mats);
  }
}

TEST_CASE("shifted restriction-extension identity") {
  // M_{P+r}[s] = M[s]_{P+(r-s)}
  std::mt19937_64 rng(3);
  for (std::uint64_t s = 0; s < 10; ++s) {
    GridModule M = random_module(2, 3, 2, s);
    Grid P = random_grid(2, rng, -1, 3, 2);
    Rational r = q(1, 3), sh = q(1, 2);
    GridModule lhs = shift(restriction_extension(M, P.translated(r)), sh);
    GridModule rhs = restriction_extension(shift(M, sh), P.translated(r - sh));
    CHECK(lhs == rhs);
  }
}
