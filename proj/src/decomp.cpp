#include "persmod/decomp.hpp"

#include <algorithm>
#include <random>
#include <string>

namespace pm {

namespace {

Matrix row(const Vec& v) { return Matrix(1, v.size(), v); }

Vec row_of(const Matrix& M, std::size_t i) {
  return Vec(M.data().begin() + i * M.cols(), M.data().begin() + (i + 1) * M.cols());
}

// Coefficients c with c * S = y for the independent rows S, if y lies in their span.
std::optional<Vec> in_span(const Field& F, const Matrix& S, const Vec& y) {
  auto c = solve(F, S.transpose(), Matrix(y.size(), 1, y));
  if (!c) return std::nullopt;
  return c->data();
}

// Row-reduced basis of the row space.
Matrix row_basis(const Field& F, const Matrix& S) {
  Echelon e = row_reduce(F, S);
  return e.rref.block(0, 0, e.pivots.size(), S.cols());
}

}  // namespace

FiniteAlgebra::FiniteAlgebra(Field F, std::vector<std::vector<Vec>> mult, Vec unit)
    : F_(F), mult_(std::move(mult)), unit_(std::move(unit)) {
  std::size_t n = unit_.size();
  if (mult_.size() != n) throw std::invalid_argument("structure constants have the wrong shape");
  for (const auto& r : mult_) {
    if (r.size() != n) throw std::invalid_argument("structure constants have the wrong shape");
    for (const auto& v : r)
      if (v.size() != n) throw std::invalid_argument("structure constants have the wrong shape");
  }
}

FiniteAlgebra FiniteAlgebra::from_matrices(const Field& F, const std::vector<Matrix>& basis) {
  std::size_t m = basis.size();
  if (m == 0) return FiniteAlgebra(F, {}, {});
  std::size_t d = basis[0].rows();
  Matrix S(m, d * d);
  for (std::size_t i = 0; i < m; ++i) S.set_block(i, 0, row(basis[i].data()));
  if (rank(F, S) != m) throw PreconditionError("matrix basis is not linearly independent");
  std::vector<std::vector<Vec>> mult(m, std::vector<Vec>(m));
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < m; ++j) {
      auto c = in_span(F, S, mul(F, basis[i], basis[j]).data());
      if (!c) throw PreconditionError("matrix basis is not closed under multiplication");
      mult[i][j] = *c;
    }
  auto u = in_span(F, S, Matrix::identity(d).data());
  if (!u) throw PreconditionError("matrix span does not contain the identity");
  return FiniteAlgebra(F, std::move(mult), *u);
}

Vec FiniteAlgebra::multiply(const Vec& a, const Vec& b) const {
  std::size_t n = dim();
  std::vector<std::uint64_t> acc(n, 0);
  const std::uint64_t p = F_.p();
  for (std::size_t i = 0; i < n; ++i) {
    if (!a[i]) continue;
    for (std::size_t j = 0; j < n; ++j) {
      if (!b[j]) continue;
      std::uint64_t c = std::uint64_t(a[i]) * b[j] % p;
      const Vec& m = mult_[i][j];
      for (std::size_t k = 0; k < n; ++k)
        if (m[k]) acc[k] = (acc[k] + c * m[k]) % p;
    }
  }
  return Vec(acc.begin(), acc.end());
}

Vec FiniteAlgebra::power(const Vec& a, std::uint64_t e) const {
  Vec r = unit_, b = a;
  while (e) {
    if (e & 1) r = multiply(r, b);
    e >>= 1;
    if (e) b = multiply(b, b);
  }
  return r;
}

Vec FiniteAlgebra::add(const Vec& a, const Vec& b) const {
  Vec r(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) r[i] = F_.add(a[i], b[i]);
  return r;
}

Vec FiniteAlgebra::sub(const Vec& a, const Vec& b) const {
  Vec r(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) r[i] = F_.sub(a[i], b[i]);
  return r;
}

Vec FiniteAlgebra::scale(Elem c, const Vec& a) const {
  Vec r(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) r[i] = F_.mul(c, a[i]);
  return r;
}

Vec FiniteAlgebra::basis_vector(std::size_t i) const {
  Vec v(dim(), 0);
  v[i] = 1;
  return v;
}

Matrix FiniteAlgebra::left_mult(const Vec& a) const {
  std::size_t n = dim();
  Matrix L(n, n);
  for (std::size_t j = 0; j < n; ++j) {
    Vec c = multiply(a, basis_vector(j));
    for (std::size_t k = 0; k < n; ++k) L(k, j) = c[k];
  }
  return L;
}

bool FiniteAlgebra::is_commutative() const {
  for (std::size_t i = 0; i < dim(); ++i)
    for (std::size_t j = i + 1; j < dim(); ++j)
      if (mult_[i][j] != mult_[j][i]) return false;
  return true;
}

namespace {

using U64Mat = std::vector<std::uint64_t>;

U64Mat mulmod(const U64Mat& A, const U64Mat& B, std::size_t n, std::uint64_t q) {
  U64Mat C(n * n, 0);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t k = 0; k < n; ++k) {
      std::uint64_t a = A[i * n + k];
      if (!a) continue;
      for (std::size_t j = 0; j < n; ++j) C[i * n + j] = (C[i * n + j] + a * B[k * n + j]) % q;
    }
  return C;
}

// (trace(L~^(p^i)) mod p^(i+1)) / p^i for the integer lift L~ of L.
Elem lifted_trace(const Matrix& L, std::uint64_t p, unsigned i) {
  std::size_t n = L.rows();
  std::uint64_t pi = 1;
  for (unsigned t = 0; t < i; ++t) pi *= p;
  std::uint64_t q = pi * p;
  U64Mat X(L.data().begin(), L.data().end());
  U64Mat R(n * n, 0);
  for (std::size_t k = 0; k < n; ++k) R[k * n + k] = 1 % q;
  for (std::uint64_t e = pi; e; e >>= 1) {
    if (e & 1) R = mulmod(R, X, n, q);
    if (e > 1) X = mulmod(X, X, n, q);
  }
  std::uint64_t tr = 0;
  for (std::size_t k = 0; k < n; ++k) tr = (tr + R[k * n + k]) % q;
  if (tr % pi) throw VerificationError("lifted trace is not divisible by p^i");
  return static_cast<Elem>(tr / pi);
}

// Right multiplication x -> x r as a matrix acting on row vectors.
Matrix right_mult(const FiniteAlgebra& A, const Vec& r) {
  std::size_t n = A.dim();
  Matrix R(n, n);
  for (std::size_t i = 0; i < n; ++i) R.set_block(i, 0, row(A.multiply(A.basis_vector(i), r)));
  return R;
}

void check_nilpotent_ideal(const FiniteAlgebra& A, const Matrix& rad) {
  const Field& F = A.field();
  std::size_t n = A.dim(), k = rad.rows();
  if (k == 0) return;
  std::vector<Matrix> rm;
  for (std::size_t i = 0; i < k; ++i) rm.push_back(right_mult(A, row_of(rad, i)));
  for (std::size_t i = 0; i < k; ++i) {
    Vec r = row_of(rad, i);
    for (std::size_t j = 0; j < n; ++j) {
      Vec b = A.basis_vector(j);
      if (!in_span(F, rad, A.multiply(b, r)) || !in_span(F, rad, A.multiply(r, b)))
        throw VerificationError("radical candidate is not a two-sided ideal");
    }
  }
  Matrix P = rad;
  for (std::size_t step = 0; step <= n && P.rows() > 0; ++step) {
    Matrix next(0, n);
    for (const auto& R : rm) next = vstack(next, mul(F, P, R));
    P = row_basis(F, next);
  }
  if (P.rows() > 0) throw VerificationError("radical candidate is not nilpotent");
}

}  // namespace

Matrix radical(const FiniteAlgebra& A) {
  const Field& F = A.field();
  std::size_t n = A.dim();
  if (n == 0) return Matrix(0, 0);
  const auto& m = A.mult();
  Matrix rad;
  if (F.p() > n) {
    Vec t(n, 0);
    for (std::size_t k = 0; k < n; ++k)
      for (std::size_t j = 0; j < n; ++j) t[k] = F.add(t[k], m[k][j][j]);
    Matrix T(n, n);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) {
        Elem s = 0;
        for (std::size_t k = 0; k < n; ++k) s = F.add(s, F.mul(m[i][j][k], t[k]));
        T(i, j) = s;
      }
    rad = row_basis(F, left_nullspace(F, T));
  } else {
    // Small characteristic: ideal chain cut out by traces of p^i-th powers of
    // integer lifts, i = 0 .. floor(log_p n).
    unsigned l = 0;
    for (std::uint64_t pw = F.p(); pw <= n; pw *= F.p()) ++l;
    Matrix I = Matrix::identity(n);
    for (unsigned i = 0; i <= l && I.rows() > 0; ++i) {
      Matrix G(I.rows(), n);
      for (std::size_t u = 0; u < I.rows(); ++u) {
        Vec a = row_of(I, u);
        for (std::size_t j = 0; j < n; ++j)
          G(u, j) = lifted_trace(A.left_mult(A.multiply(a, A.basis_vector(j))), F.p(), i);
      }
      Matrix C = left_nullspace(F, G);
      I = C.rows() ? row_basis(F, mul(F, C, I)) : Matrix(0, n);
    }
    rad = I;
  }
  check_nilpotent_ideal(A, rad);
  return rad;
}

Quotient semisimple_quotient(const FiniteAlgebra& A, const Matrix& rad) {
  const Field& F = A.field();
  std::size_t n = A.dim();
  Echelon e = row_reduce(F, rad);
  std::size_t k = e.pivots.size();
  std::vector<bool> piv(n, false);
  for (auto c : e.pivots) piv[c] = true;
  Matrix lift(n - k, n);
  for (std::size_t c = 0, r = 0; c < n; ++c)
    if (!piv[c]) lift(r++, c) = 1;
  Matrix S = vstack(e.rref.block(0, 0, k, n), lift);
  Matrix Sinv = *inverse(F, S);
  Matrix project = Sinv.block(0, k, n, n - k);
  std::size_t m = n - k;
  std::vector<std::vector<Vec>> mult(m, std::vector<Vec>(m));
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < m; ++j)
      mult[i][j] = mul(F, row(A.multiply(row_of(lift, i), row_of(lift, j))), project).data();
  Vec unit = m ? mul(F, row(A.unit()), project).data() : Vec{};
  return Quotient{FiniteAlgebra(F, std::move(mult), std::move(unit)), lift, project};
}

namespace {

// Rows (in coordinates of B) spanning {x in span S : x^p = x}; S spans a
// commutative subalgebra of B containing 1.
Matrix frobenius_fixed(const FiniteAlgebra& B, const Matrix& S) {
  const Field& F = B.field();
  std::size_t m = S.rows();
  Matrix Phi(m, m);
  for (std::size_t i = 0; i < m; ++i) {
    auto c = in_span(F, S, B.power(row_of(S, i), F.p()));
    if (!c) throw VerificationError("Frobenius image left the subalgebra");
    Phi.set_block(i, 0, row(*c));
  }
  Matrix K = left_nullspace(F, sub(F, Phi, Matrix::identity(m)));
  return K.rows() ? mul(F, K, S) : Matrix(0, B.dim());
}

bool is_scalar(const FiniteAlgebra& B, const Vec& w) {
  return rank(B.field(), vstack(row(B.unit()), row(w))) < 2;
}

// Nontrivial idempotent from a non-scalar w with w^p = w.
std::optional<Vec> split_semisimple(const FiniteAlgebra& B, const Vec& w, std::mt19937_64& rng,
                                    int trials) {
  const Field& F = B.field();
  if (F.p() == 2) return w;
  Elem half = F.inv(2);
  for (int t = 0; t < trials; ++t) {
    Elem a = static_cast<Elem>(rng() % F.p());
    Vec u = B.power(B.add(w, B.scale(a, B.unit())), (F.p() - 1) / 2);
    Vec e = B.scale(half, B.add(B.multiply(u, u), u));
    if (std::any_of(e.begin(), e.end(), [](Elem x) { return x != 0; }) && e != B.unit()) return e;
  }
  return std::nullopt;
}

std::optional<Vec> from_fixed_space(const FiniteAlgebra& B, const Matrix& fixed,
                                    std::mt19937_64& rng, int trials) {
  if (fixed.rows() < 2) return std::nullopt;
  for (std::size_t i = 0; i < fixed.rows(); ++i) {
    Vec w = row_of(fixed, i);
    if (!is_scalar(B, w)) return split_semisimple(B, w, rng, trials);
  }
  return std::nullopt;
}

Matrix centre(const FiniteAlgebra& B) {
  const Field& F = B.field();
  std::size_t m = B.dim();
  const auto& mu = B.mult();
  Matrix C(m, m * m);
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < m; ++j)
      for (std::size_t k = 0; k < m; ++k) C(i, j * m + k) = F.sub(mu[i][j][k], mu[j][i][k]);
  return row_basis(F, left_nullspace(F, C));
}

// Span of 1, b, b^2, ... as independent rows.
Matrix powers_span(const FiniteAlgebra& B, const Vec& b) {
  const Field& F = B.field();
  Matrix S = row(B.unit());
  Vec x = B.unit();
  for (std::size_t k = 1; k < B.dim(); ++k) {
    x = B.multiply(x, b);
    Matrix T = vstack(S, row(x));
    if (rank(F, T) == S.rows()) break;
    S = T;
  }
  return S;
}

}  // namespace

std::size_t frobenius_fixed_dim(const FiniteAlgebra& B) {
  if (!B.is_commutative()) throw PreconditionError("Frobenius count needs a commutative algebra");
  return frobenius_fixed(B, Matrix::identity(B.dim())).rows();
}

bool is_local(const FiniteAlgebra& A) {
  if (A.dim() == 0) throw PreconditionError("the zero algebra is not local");
  Quotient Q = semisimple_quotient(A, radical(A));
  const FiniteAlgebra& B = Q.algebra;
  return B.is_commutative() && frobenius_fixed_dim(B) == 1;
}

Vec find_idempotent(const FiniteAlgebra& A, std::uint64_t seed, int max_trials,
                    IdempotentStats* stats) {
  if (A.dim() == 0) throw PreconditionError("the zero algebra has no nontrivial idempotent");
  const Field& F = A.field();
  Quotient Q = semisimple_quotient(A, radical(A));
  const FiniteAlgebra& B = Q.algebra;
  std::mt19937_64 rng(seed);
  IdempotentStats st;

  std::optional<Vec> eb;
  Matrix Z = centre(B);
  Matrix fixed = frobenius_fixed(B, Z);
  if (B.is_commutative() && fixed.rows() == 1) throw PreconditionError("algebra is local");
  eb = from_fixed_space(B, fixed, rng, max_trials);
  st.stage = 1;
  for (int t = 0; !eb && t < max_trials; ++t) {
    Vec b(B.dim());
    for (auto& x : b) x = static_cast<Elem>(rng() % F.p());
    Matrix C = powers_span(B, b);
    eb = from_fixed_space(B, frobenius_fixed(B, C), rng, 8);
    st.stage = 2;
  }
  if (!eb)
    throw SearchExhausted("no idempotent found after " + std::to_string(max_trials) +
                          " random elements (seed " + std::to_string(seed) +
                          "); retry with another seed");

  Vec e = mul(F, row(*eb), Q.lift).data();
  for (int it = 0; it < 64; ++it) {
    Vec e2 = A.multiply(e, e);
    if (e2 == e) break;
    Vec e3 = A.multiply(e2, e);
    e = A.sub(A.scale(3, e2), A.scale(2, e3));
    ++st.lift_iterations;
  }
  bool zero = std::all_of(e.begin(), e.end(), [](Elem x) { return x == 0; });
  if (A.multiply(e, e) != e || zero || e == A.unit())
    throw VerificationError("idempotent lifting failed");
  if (stats) *stats = st;
  return e;
}

EndAlgebra::EndAlgebra(const GridModule& M) : hom_(std::make_shared<HomSpace>(M, M)) {
  const Field& F = M.field();
  const HomSpace& H = *hom_;
  std::size_t n = H.dim(), nc = H.num_components();
  std::vector<std::vector<Matrix>> blocks(n, std::vector<Matrix>(nc));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t c = 0; c < nc; ++c) blocks[i][c] = H.root_block(H.basis_vectors()[i], c);
  auto assemble = [&](auto&& block_of) {
    Vec x(H.num_unknowns(), 0);
    for (std::size_t c = 0; c < nc; ++c) {
      Matrix b = block_of(c);
      std::copy(b.data().begin(), b.data().end(), x.begin() + H.offset(c));
    }
    return H.coordinates(x);
  };
  std::vector<std::vector<Vec>> mult(n, std::vector<Vec>(n));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      mult[i][j] = assemble([&](std::size_t c) { return mul(F, blocks[i][c], blocks[j][c]); });
  Vec unit = n ? assemble([&](std::size_t c) { return Matrix::identity(M.dim(H.root(c))); }) : Vec{};
  alg_ = std::make_shared<FiniteAlgebra>(F, std::move(mult), std::move(unit));
}

ModuleMorphism EndAlgebra::morphism(const Vec& coords) const {
  return hom_->materialize(hom_->combine(coords));
}

Vec EndAlgebra::coordinates(const ModuleMorphism& f) const {
  return hom_->coordinates(hom_->unknowns_of(f));
}

Matrix radical(const EndAlgebra& A) { return radical(A.algebra()); }

bool is_indecomposable(const GridModule& M) {
  if (M.is_zero()) throw PreconditionError("the zero module is not indecomposable");
  return is_local(EndAlgebra(M).algebra());
}

ModuleMorphism find_idempotent(const EndAlgebra& A, std::uint64_t seed, int max_trials,
                               IdempotentStats* stats) {
  ModuleMorphism e = A.morphism(find_idempotent(A.algebra(), seed, max_trials, stats));
  if (!check_natural(e).empty() || compose(e, e).mats != e.mats)
    throw VerificationError("idempotent endomorphism failed verification");
  return e;
}

namespace {

// Re-bases M along per-vertex splittings M(v) = U(v) + W(v), which must be
// preserved by every step.
Split split_by_bases(const GridModule& M, const std::vector<Matrix>& U, const std::vector<Matrix>& W) {
  const Field& F = M.field();
  const Grid& g = M.grid();
  std::size_t N = g.size();
  std::vector<Matrix> Pinv(N);
  std::vector<std::size_t> d1(N), d2(N);
  for (std::size_t v = 0; v < N; ++v) {
    d1[v] = U[v].cols();
    d2[v] = W[v].cols();
    auto inv = inverse(F, hstack(U[v], W[v]));
    if (!inv) throw VerificationError("subspaces are not complementary");
    Pinv[v] = *inv;
  }
  std::vector<std::vector<Matrix>> s1(M.n(), std::vector<Matrix>(N)), s2 = s1;
  for (std::size_t k = 0; k < M.n(); ++k)
    for (std::size_t v = 0; v < N; ++v) {
      if (!g.has_successor(v, k)) continue;
      std::size_t w = v + g.stride(k);
      Matrix C = mul(F, mul(F, Pinv[w], M.step(k, v)), hstack(U[v], W[v]));
      if (!C.block(0, d1[v], d1[w], d2[v]).is_zero() || !C.block(d1[w], 0, d2[w], d1[v]).is_zero())
        throw VerificationError("splitting is not preserved by the structure maps");
      s1[k][v] = C.block(0, 0, d1[w], d1[v]);
      s2[k][v] = C.block(d1[w], d1[v], d2[w], d2[v]);
    }
  GridModule M1(g, F, d1, std::move(s1)), M2(g, F, d2, std::move(s2));
  ModuleMorphism wit{M, direct_sum(M1, M2), std::move(Pinv)};
  return Split{M1, M2, std::move(wit)};
}

void require_endomorphism(const GridModule& M, const ModuleMorphism& f) {
  if (!(f.source == M) || !(f.target == M))
    throw PreconditionError("morphism is not an endomorphism of the module");
  std::string why = check_natural(f);
  if (!why.empty()) throw PreconditionError("endomorphism is not natural: " + why);
}

Matrix matrix_power(const Field& F, Matrix A, std::uint64_t e) {
  Matrix R = Matrix::identity(A.rows());
  while (e) {
    if (e & 1) R = mul(F, R, A);
    e >>= 1;
    if (e) A = mul(F, A, A);
  }
  return R;
}

}  // namespace

Split split_by_idempotent(const GridModule& M, const ModuleMorphism& e) {
  require_endomorphism(M, e);
  const Field& F = M.field();
  std::size_t N = M.grid().size();
  std::vector<Matrix> U(N), W(N);
  for (std::size_t v = 0; v < N; ++v) {
    const Matrix& ev = e.mats[v];
    if (mul(F, ev, ev) != ev) throw PreconditionError("endomorphism is not idempotent");
    U[v] = column_basis(F, ev);
    W[v] = column_basis(F, sub(F, Matrix::identity(ev.rows()), ev));
  }
  return split_by_bases(M, U, W);
}

Split fitting_split(const GridModule& M, const ModuleMorphism& phi) {
  require_endomorphism(M, phi);
  const Field& F = M.field();
  std::size_t N = M.grid().size(), D = M.total_dim();
  std::vector<Matrix> U(N), W(N);
  for (std::size_t v = 0; v < N; ++v) {
    Matrix P = matrix_power(F, phi.mats[v], D);
    U[v] = nullspace(F, P);
    W[v] = column_basis(F, P);
  }
  return split_by_bases(M, U, W);
}

namespace {

struct Piece {
  GridModule module;
  std::vector<Matrix> proj;  // M(v) -> piece(v)
};

void decompose_into(const GridModule& X, const std::vector<Matrix>& to_x, std::uint64_t seed,
                    std::vector<Piece>& out) {
  if (X.is_zero()) return;
  EndAlgebra A(X);
  if (is_local(A.algebra())) {
    out.push_back(Piece{X, to_x});
    return;
  }
  ModuleMorphism e = find_idempotent(A, seed);
  Split s = split_by_idempotent(X, e);
  const Field& F = X.field();
  std::size_t N = X.grid().size();
  std::vector<Matrix> p1(N), p2(N);
  for (std::size_t v = 0; v < N; ++v) {
    const Matrix& w = s.witness.mats[v];
    std::size_t a = s.first.dim(v), b = s.second.dim(v);
    p1[v] = mul(F, w.block(0, 0, a, w.cols()), to_x[v]);
    p2[v] = mul(F, w.block(a, 0, b, w.cols()), to_x[v]);
  }
  bool first_small = s.first.total_dim() <= s.second.total_dim();
  if (first_small) {
    decompose_into(s.first, p1, seed * 2 + 1, out);
    decompose_into(s.second, p2, seed * 2 + 2, out);
  } else {
    decompose_into(s.second, p2, seed * 2 + 2, out);
    decompose_into(s.first, p1, seed * 2 + 1, out);
  }
}

}  // namespace

Decomposition decompose(const GridModule& M, std::uint64_t seed) {
  std::vector<Piece> pieces;
  decompose_into(M, identity_morphism(M).mats, seed, pieces);
  std::stable_sort(pieces.begin(), pieces.end(), [](const Piece& a, const Piece& b) {
    std::size_t ta = a.module.total_dim(), tb = b.module.total_dim();
    if (ta != tb) return ta < tb;
    return a.module.dims() < b.module.dims();
  });
  const Grid& g = M.grid();
  Decomposition d;
  std::vector<Matrix> mats(g.size());
  for (std::size_t v = 0; v < g.size(); ++v) {
    Matrix m(0, M.dim(v));
    for (const auto& p : pieces) m = vstack(m, p.proj[v]);
    mats[v] = m;
  }
  for (auto& p : pieces) d.summands.push_back(p.module);
  d.witness = ModuleMorphism{M, direct_sum(d.summands, g, M.field()), std::move(mats)};
  if (!check_natural(d.witness).empty() || !is_iso(d.witness))
    throw VerificationError("decomposition witness failed verification");
  return d;
}

}  // namespace pm
