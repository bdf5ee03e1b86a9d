#include "persmod/interleave.hpp"

#include <algorithm>
#include <cstdint>
#include <functional>
#include <sstream>

#include "persmod/kan.hpp"

namespace pm {

namespace {

std::string point_str(const Point& x) {
  std::string s = "(";
  for (std::size_t i = 0; i < x.size(); ++i) s += (i ? "," : "") + to_string(x[i]);
  return s + ")";
}

std::vector<std::vector<Rational>> shifted_axes(const Grid& g, const Rational& r) {
  std::vector<std::vector<Rational>> ax = g.axes();
  for (auto& a : ax)
    for (auto& c : a) c += r;
  return ax;
}

GridModule direct_sum_refined(const GridModule& A, const GridModule& B) {
  if (A.grid() == B.grid()) return direct_sum(A, B);
  auto [a, b] = common_refinement(A, B);
  return direct_sum(a, b);
}

Rational lattice_floor(const Rational& y, const Rational& h, const Rational& o) {
  Rational t = (y - o) / h;
  mpz_class fl;
  mpz_fdiv_q(fl.get_mpz_t(), t.get_num_mpz_t(), t.get_den_mpz_t());
  Rational r = Rational(fl) * h + o;
  r.canonicalize();
  return r;
}

Rational lattice_ceil(const Rational& y, const Rational& h, const Rational& o) {
  Rational t = (y - o) / h;
  mpz_class cl;
  mpz_cdiv_q(cl.get_mpz_t(), t.get_num_mpz_t(), t.get_den_mpz_t());
  Rational r = Rational(cl) * h + o;
  r.canonicalize();
  return r;
}

Matrix component(const Grid& grid, const std::vector<Matrix>& mats, const GridModule& dst,
                 const Rational& eps, const Point& x) {
  auto v = grid.floor(x);
  if (!v) return Matrix(dst.dim_at(add(x, eps)), 0);
  return mats[*v];
}

}  // namespace

bool Box::contains(const Point& x) const {
  for (std::size_t k = 0; k < x.size(); ++k)
    if (x[k] < lo[k] || x[k] >= hi[k]) return false;
  return true;
}

bool Box::empty() const {
  for (std::size_t k = 0; k < lo.size(); ++k)
    if (lo[k] >= hi[k]) return true;
  return false;
}

bool TrivialRegion::contains(const Point& x) const {
  for (const auto& b : boxes)
    if (b.contains(x)) return true;
  return false;
}

bool TrivialRegion::is_eps_trivial(const Rational& eps) const {
  for (const auto& a : boxes) {
    if (a.empty()) continue;
    for (const auto& b : boxes) {
      if (b.empty()) continue;
      bool disjoint = false;
      for (std::size_t k = 0; k < a.lo.size() && !disjoint; ++k) {
        Rational lo = std::max<Rational>(a.lo[k], b.lo[k] + eps);
        Rational hi = std::min<Rational>(a.hi[k], b.hi[k] + eps);
        if (lo >= hi) disjoint = true;
      }
      if (!disjoint) return false;
    }
  }
  return true;
}

std::vector<std::vector<Rational>> TrivialRegion::corners(std::size_t n) const {
  std::vector<std::vector<Rational>> c(n);
  for (const auto& b : boxes) {
    if (b.empty()) continue;
    for (std::size_t k = 0; k < n; ++k) {
      c[k].push_back(b.lo[k]);
      c[k].push_back(b.hi[k]);
    }
  }
  return c;
}

TrivialRegion& TrivialRegion::add(const TrivialRegion& o) {
  boxes.insert(boxes.end(), o.boxes.begin(), o.boxes.end());
  return *this;
}

Matrix InterleavingCertificate::f_at(const Point& x) const {
  return component(grid, f, N, eps, x);
}

Matrix InterleavingCertificate::g_at(const Point& x) const {
  return component(grid, g, M, eps, x);
}

Grid certificate_grid(const GridModule& M, const GridModule& N, const Rational& eps,
                      const std::vector<std::vector<Rational>>& extra) {
  Grid C = grid_union(M.grid(), N.grid());
  C = grid_with(C, shifted_axes(M.grid(), -eps));
  C = grid_with(C, shifted_axes(N.grid(), -eps));
  if (!extra.empty()) C = grid_with(C, extra);
  return C;
}

namespace {

// Floors in G of the vertices of C after a per-coordinate transform; one
// lookup table per axis, so a vertex costs n table reads.
class Locator {
 public:
  using Transform = std::function<Rational(const Rational&)>;
  Locator(const Grid& C, const Grid& G, const Transform& tf, bool) : C_(&C), G_(&G), idx_(C.n()) {
    for (std::size_t k = 0; k < C.n(); ++k)
      for (const auto& c : C.axis(k)) {
        auto i = G.floor_index(k, tf(c));
        idx_[k].push_back(i ? static_cast<long>(*i) : -1);
      }
  }
  Locator(const Grid& C, const Grid& G, const Rational& s)
      : Locator(C, G, [&](const Rational& c) { return Rational(c + s); }, true) {}

  std::optional<std::size_t> operator()(std::size_t v) const {
    std::size_t f = 0;
    for (std::size_t k = 0; k < idx_.size(); ++k) {
      long i = idx_[k][C_->coord_index(v, k)];
      if (i < 0) return std::nullopt;
      f += static_cast<std::size_t>(i) * G_->stride(k);
    }
    return f;
  }

 private:
  const Grid* C_;
  const Grid* G_;
  std::vector<std::vector<long>> idx_;
};

std::size_t dim_of(const GridModule& X, std::optional<std::size_t> a) { return a ? X.dim(*a) : 0; }

// Same conventions as GridModule::map_at.
Matrix map_between(const GridModule& X, std::optional<std::size_t> a, std::optional<std::size_t> b) {
  if (!b) return Matrix(0, 0);
  if (!a) return Matrix(X.dim(*b), 0);
  return X.structure_map(*a, *b);
}

// X(x + s) -> X(x + t) for the vertices x of C.
struct MapLookup {
  const GridModule* X;
  Locator a, b;
  MapLookup(const Grid& C, const GridModule& X_, const Rational& s, const Rational& t)
      : X(&X_), a(C, X_.grid(), s), b(C, X_.grid(), t) {}
  Matrix operator()(std::size_t v) const { return map_between(*X, a(v), b(v)); }
};

// The f or g component of c at x + s for the vertices x of C.
struct ComponentLookup {
  const std::vector<Matrix>* mats;
  const GridModule* dst;
  Locator at, rows;
  ComponentLookup(const Grid& C, const InterleavingCertificate& c, bool f, const Rational& s)
      : mats(f ? &c.f : &c.g),
        dst(f ? &c.N : &c.M),
        at(C, c.grid, s),
        rows(C, (f ? c.N : c.M).grid(), Rational(s + c.eps)) {}
  Matrix operator()(std::size_t v) const {
    auto i = at(v);
    if (!i) return Matrix(dim_of(*dst, rows(v)), 0);
    return (*mats)[*i];
  }
};

// inside[v] for the vertices of C.
std::vector<char> region_mask(const Grid& C, const TrivialRegion& U) {
  std::vector<char> inside(C.size(), 0);
  for (const auto& b : U.boxes) {
    std::vector<std::vector<char>> ok(C.n());
    for (std::size_t k = 0; k < C.n(); ++k)
      for (const auto& c : C.axis(k)) ok[k].push_back(b.lo[k] <= c && c < b.hi[k]);
    for (std::size_t v = 0; v < C.size(); ++v) {
      if (inside[v]) continue;
      bool in = true;
      for (std::size_t k = 0; k < C.n() && in; ++k) in = ok[k][C.coord_index(v, k)];
      inside[v] = in;
    }
  }
  return inside;
}

}  // namespace

CertificateCheck verify_certificate(const InterleavingCertificate& c) {
  CertificateCheck res;
  auto fail = [&](const std::string& m) {
    res.ok = false;
    res.message = m;
    return res;
  };
  const GridModule& M = c.M;
  const GridModule& N = c.N;
  if (M.n() != N.n() || !(M.field() == N.field())) return fail("modules are incompatible");
  if (c.eps < 0) return fail("negative eps");
  const Grid& C = c.grid;
  if (C.n() != M.n()) return fail("certificate grid has wrong dimension");
  if (!C.contains_axes_of(M.grid()) || !C.contains_axes_of(N.grid()) ||
      !C.contains_axes_of(M.grid().translated(-c.eps)) ||
      !C.contains_axes_of(N.grid().translated(-c.eps)))
    return fail("certificate grid does not refine the modules and their eps-translates");
  if (c.f.size() != C.size() || c.g.size() != C.size()) return fail("wrong number of components");
  const Field& F = M.field();

  Locator M0(C, M.grid(), 0), Me(C, M.grid(), c.eps), N0(C, N.grid(), 0), Ne(C, N.grid(), c.eps);
  std::vector<std::optional<std::size_t>> m0(C.size()), me(C.size()), n0(C.size()), ne(C.size());
  for (std::size_t v = 0; v < C.size(); ++v) {
    m0[v] = M0(v);
    me[v] = Me(v);
    n0[v] = N0(v);
    ne[v] = Ne(v);
    if (c.f[v].rows() != dim_of(N, ne[v]) || c.f[v].cols() != dim_of(M, m0[v]))
      return fail("f has wrong shape at " + point_str(C.point(v)));
    if (c.g[v].rows() != dim_of(M, me[v]) || c.g[v].cols() != dim_of(N, n0[v]))
      return fail("g has wrong shape at " + point_str(C.point(v)));
  }
  // naturality on grid edges
  for (std::size_t k = 0; k < C.n(); ++k) {
    for (std::size_t v = 0; v < C.size(); ++v) {
      if (!C.has_successor(v, k)) continue;
      std::size_t w = v + C.stride(k);
      if (mul(F, map_between(N, ne[v], ne[w]), c.f[v]) != mul(F, c.f[w], map_between(M, m0[v], m0[w])))
        return fail("f is not natural at " + point_str(C.point(v)) + " along axis " + std::to_string(k));
      if (mul(F, map_between(M, me[v], me[w]), c.g[v]) != mul(F, c.g[w], map_between(N, n0[v], n0[w])))
        return fail("g is not natural at " + point_str(C.point(v)) + " along axis " + std::to_string(k));
    }
  }
  // triangle identities on a grid where every term is constant on cells
  Grid D = grid_with(C, shifted_axes(C, -c.eps));
  D = grid_with(D, shifted_axes(M.grid(), -2 * c.eps));
  D = grid_with(D, shifted_axes(N.grid(), -2 * c.eps));
  const Rational e2 = 2 * c.eps;
  ComponentLookup f0(D, c, true, 0), fe(D, c, true, c.eps), g0(D, c, false, 0), ge(D, c, false, c.eps);
  MapLookup etaM(D, M, 0, e2), etaN(D, N, 0, e2);
  for (std::size_t v = 0; v < D.size(); ++v) {
    if (dim_of(M, etaM.a(v)) > 0 && mul(F, ge(v), f0(v)) != etaM(v))
      return fail("g[eps] o f != eta^M_2eps at " + point_str(D.point(v)));
    if (dim_of(N, etaN.a(v)) > 0 && mul(F, fe(v), g0(v)) != etaN(v))
      return fail("f[eps] o g != eta^N_2eps at " + point_str(D.point(v)));
  }
  return res;
}

void require_verified(const InterleavingCertificate& c, const std::string& what) {
  auto r = verify_certificate(c);
  if (!r) throw VerificationError(what + ": " + r.message);
}

namespace {

// Fill f and g by evaluating functions at every vertex index of the grid.
template <class FF, class GF>
InterleavingCertificate tabulate(GridModule M, GridModule N, Rational eps, Grid grid, FF fx, GF gx) {
  InterleavingCertificate c{std::move(M), std::move(N), std::move(eps), std::move(grid), {}, {}};
  c.f.reserve(c.grid.size());
  c.g.reserve(c.grid.size());
  for (std::size_t v = 0; v < c.grid.size(); ++v) {
    c.f.push_back(fx(v));
    c.g.push_back(gx(v));
  }
  return c;
}

}  // namespace

InterleavingCertificate identity_certificate(const GridModule& M) {
  auto id = identity_morphism(M);
  return InterleavingCertificate{M, M, 0, M.grid(), id.mats, id.mats};
}

InterleavingCertificate iso_certificate(const ModuleMorphism& phi) {
  const Field& F = phi.source.field();
  InterleavingCertificate c{phi.source, phi.target, 0, phi.source.grid(), phi.mats, {}};
  for (const auto& m : phi.mats) {
    auto inv = inverse(F, m);
    if (!inv) throw PreconditionError("iso_certificate: morphism is not invertible");
    c.g.push_back(*inv);
  }
  return c;
}

InterleavingCertificate zero_certificate(const GridModule& X, const Rational& eps) {
  GridModule Z = GridModule::zero(X.grid(), X.field());
  Grid C = certificate_grid(X, Z, eps);
  Locator x0(C, X.grid(), 0), xe(C, X.grid(), eps);
  return tabulate(
      X, Z, eps, C, [&](std::size_t v) { return Matrix(0, dim_of(X, x0(v))); },
      [&](std::size_t v) { return Matrix(dim_of(X, xe(v)), 0); });
}

InterleavingCertificate shift_certificate(const GridModule& X, const Rational& s,
                                          const Rational& eps) {
  if (abs(s) > eps) throw PreconditionError("shift_certificate needs |s| <= eps");
  GridModule Xs = shift(X, s);
  Grid C = certificate_grid(X, Xs, eps);
  MapLookup f(C, X, 0, eps + s), g(C, X, s, eps);
  return tabulate(X, Xs, eps, C, f, g);
}

GridModule snap(const GridModule& N, const Rational& h, const Rational& offset) {
  if (h <= 0) throw PreconditionError("snap needs a positive pitch");
  std::vector<std::vector<Rational>> ax(N.n());
  for (std::size_t k = 0; k < N.n(); ++k) {
    for (const auto& c : N.grid().axis(k)) ax[k].push_back(lattice_ceil(c, h, offset));
    ax[k].erase(std::unique(ax[k].begin(), ax[k].end()), ax[k].end());
  }
  return restriction_extension(N, Grid(std::move(ax)));
}

InterleavingCertificate snap_certificate(const GridModule& N, const Rational& h,
                                         const Rational& offset) {
  GridModule L = snap(N, h, offset);
  Grid C = certificate_grid(N, L, h);
  const Grid& G = N.grid();
  Locator x0(C, G, 0), xh(C, G, h);
  Locator fl_xh(C, G, [&](const Rational& c) { return lattice_floor(Rational(c + h), h, offset); }, true);
  Locator fl_x(C, G, [&](const Rational& c) { return lattice_floor(c, h, offset); }, true);
  return tabulate(
      N, L, h, C, [&](std::size_t v) { return map_between(N, x0(v), fl_xh(v)); },
      [&](std::size_t v) { return map_between(N, fl_x(v), xh(v)); });
}

InterleavingCertificate reverse(const InterleavingCertificate& c) {
  return InterleavingCertificate{c.N, c.M, c.eps, c.grid, c.g, c.f};
}

InterleavingCertificate compose_certificates(const InterleavingCertificate& c1,
                                             const InterleavingCertificate& c2) {
  if (!same_extension(c1.N, c2.M))
    throw PreconditionError("compose_certificates: middle modules differ");
  const Field& F = c1.M.field();
  Rational eps = c1.eps + c2.eps;
  Grid C = certificate_grid(c1.M, c2.N, eps);
  ComponentLookup f1(C, c1, true, 0), f2(C, c2, true, c1.eps);
  ComponentLookup g2(C, c2, false, 0), g1(C, c1, false, c2.eps);
  return tabulate(
      c1.M, c2.N, eps, C, [&](std::size_t v) { return mul(F, f2(v), f1(v)); },
      [&](std::size_t v) { return mul(F, g1(v), g2(v)); });
}

InterleavingCertificate sum_certificates(const InterleavingCertificate& c, const GridModule& X) {
  GridModule A = direct_sum_refined(c.M, X);
  GridModule B = direct_sum_refined(c.N, X);
  Grid C = certificate_grid(A, B, c.eps);
  ComponentLookup f(C, c, true, 0), g(C, c, false, 0);
  MapLookup eta(C, X, 0, c.eps);
  return tabulate(
      A, B, c.eps, C, [&](std::size_t v) { return block_diag(f(v), eta(v)); },
      [&](std::size_t v) { return block_diag(g(v), eta(v)); });
}

InterleavingCertificate block_sum(const InterleavingCertificate& c1,
                                  const InterleavingCertificate& c2) {
  if (c1.eps != c2.eps) throw PreconditionError("block_sum needs equal eps");
  GridModule A = direct_sum_refined(c1.M, c2.M);
  GridModule B = direct_sum_refined(c1.N, c2.N);
  Grid C = certificate_grid(A, B, c1.eps);
  ComponentLookup f1(C, c1, true, 0), f2(C, c2, true, 0), g1(C, c1, false, 0), g2(C, c2, false, 0);
  return tabulate(
      A, B, c1.eps, C, [&](std::size_t v) { return block_diag(f1(v), f2(v)); },
      [&](std::size_t v) { return block_diag(g1(v), g2(v)); });
}

InterleavingCertificate weaken(const InterleavingCertificate& c, const Rational& eps) {
  if (eps < c.eps) throw PreconditionError("weaken needs a larger eps");
  const Field& F = c.M.field();
  Grid C = certificate_grid(c.M, c.N, eps);
  ComponentLookup f(C, c, true, 0), g(C, c, false, 0);
  MapLookup etaN(C, c.N, c.eps, eps), etaM(C, c.M, c.eps, eps);
  return tabulate(
      c.M, c.N, eps, C, [&](std::size_t v) { return mul(F, etaN(v), f(v)); },
      [&](std::size_t v) { return mul(F, etaM(v), g(v)); });
}

InterleavingCertificate relabel(const InterleavingCertificate& c, const GridModule& M,
                                const GridModule& N) {
  if (!same_extension(c.M, M) || !same_extension(c.N, N))
    throw PreconditionError("relabel: modules have different extensions");
  Grid C = certificate_grid(M, N, c.eps);
  ComponentLookup f(C, c, true, 0), g(C, c, false, 0);
  return tabulate(M, N, c.eps, C, f, g);
}

InterleavingCertificate local_change_certificate(const GridModule& M, const GridModule& Mp,
                                                 const TrivialRegion& U, const Rational& eps,
                                                 bool verify) {
  if (eps <= 0) throw PreconditionError("local_change_certificate needs eps > 0");
  if (!U.is_eps_trivial(eps)) throw PreconditionError("region is not eps-trivial");
  Grid C = certificate_grid(M, Mp, eps, U.corners(M.n()));
  std::vector<char> inside = region_mask(C, U);
  Locator m0(C, M.grid(), 0), p0(C, Mp.grid(), 0);
  for (std::size_t v = 0; v < C.size(); ++v) {
    if (inside[v]) continue;
    auto a = m0(v), b = p0(v);
    if (dim_of(M, a) != dim_of(Mp, b))
      throw PreconditionError("modules disagree outside the region at " + point_str(C.point(v)));
    for (std::size_t k = 0; k < C.n(); ++k) {
      if (!C.has_successor(v, k)) continue;
      std::size_t w = v + C.stride(k);
      if (inside[w]) continue;
      if (map_between(M, a, m0(w)) != map_between(Mp, b, p0(w)))
        throw PreconditionError("modules disagree outside the region at " + point_str(C.point(v)));
    }
  }
  MapLookup etaM(C, M, 0, eps), etaP(C, Mp, 0, eps);
  auto c = tabulate(
      M, Mp, eps, C, [&](std::size_t v) { return inside[v] ? etaM(v) : etaP(v); },
      [&](std::size_t v) { return inside[v] ? etaP(v) : etaM(v); });
  if (verify) require_verified(c, "local_change_certificate");
  return c;
}

std::optional<Rational> triviality_radius(const GridModule& M) {
  const Grid& G = M.grid();
  Rational radius = 0;
  for (std::size_t p = 0; p < G.size(); ++p) {
    if (M.dim(p) == 0) continue;
    Point x = G.point(p);
    std::vector<Rational> cand;
    for (std::size_t k = 0; k < G.n(); ++k)
      for (std::size_t i = G.coord_index(p, k) + 1; i < G.axis_size(k); ++i)
        cand.push_back(G.axis(k)[i] - x[k]);
    std::sort(cand.begin(), cand.end());
    cand.erase(std::unique(cand.begin(), cand.end()), cand.end());
    auto zero_at = [&](const Rational& e) {
      return M.structure_map(p, *G.floor(add(x, e))).is_zero();
    };
    // The top candidate reaches the grid maximum; beyond it nothing changes.
    if (cand.empty() || !zero_at(cand.back())) return std::nullopt;
    std::size_t lo = 0, hi = cand.size() - 1;
    while (lo < hi) {
      std::size_t mid = (lo + hi) / 2;
      if (zero_at(cand[mid])) hi = mid;
      else lo = mid + 1;
    }
    if (cand[lo] > radius) radius = cand[lo];
  }
  return radius;
}

bool is_eps_trivial(const GridModule& M, const Rational& eps) {
  if (eps <= 0) throw PreconditionError("is_eps_trivial needs eps > 0");
  auto r = triviality_radius(M);
  return r && *r <= eps;
}

bool is_strictly_eps_trivial(const GridModule& M, const Rational& eps) {
  if (eps <= 0) throw PreconditionError("is_strictly_eps_trivial needs eps > 0");
  auto r = triviality_radius(M);
  return r && *r < eps;
}

namespace {

// Maps out of a fixed source toward targets that only move up, accumulated
// step by step instead of from the source each time.
class RankWalk {
 public:
  RankWalk(const GridModule& X, std::optional<std::size_t> src) : X_(&X), cur_(src) {
    if (src && X.dim(*src) > 0) map_ = Matrix::identity(X.dim(*src));
    else dead_ = true;
  }
  // Rank of X(src) -> X(t); targets must be nondecreasing.
  std::size_t rank_to(std::optional<std::size_t> t) {
    if (dead_ || !t) return 0;
    if (*t != *cur_) {
      map_ = mul(X_->field(), X_->structure_map(*cur_, *t), map_);
      cur_ = t;
      rank_ = rank(X_->field(), map_);
      if (rank_ == 0) dead_ = true;
    } else if (!rank_) {
      rank_ = map_.rows();
    }
    return dead_ ? 0 : *rank_;
  }

 private:
  const GridModule* X_;
  std::optional<std::size_t> cur_;
  Matrix map_;
  std::optional<std::size_t> rank_;
  bool dead_ = false;
};

// Grid axes in some exact number type, for floors along the diagonal.
template <class T>
struct Axes {
  const Grid* grid;
  std::vector<std::vector<T>> ax;

  // Largest vertex <= (strict: <) a + t(1, ..., 1).
  std::optional<std::size_t> floor(const std::vector<T>& a, const T& t, bool strict) const {
    std::size_t f = 0;
    for (std::size_t k = 0; k < ax.size(); ++k) {
      T x = a[k] + t;
      auto it = strict ? std::lower_bound(ax[k].begin(), ax[k].end(), x)
                       : std::upper_bound(ax[k].begin(), ax[k].end(), x);
      if (it == ax[k].begin()) return std::nullopt;
      f += static_cast<std::size_t>(it - ax[k].begin() - 1) * grid->stride(k);
    }
    return f;
  }
  std::vector<T> point(std::size_t v) const {
    std::vector<T> p(ax.size());
    for (std::size_t k = 0; k < ax.size(); ++k) p[k] = ax[k][grid->coord_index(v, k)];
    return p;
  }
};

// Some window [a, a+g) with rank_X > rank of Y on [a+delta, a+g-delta], g >= 2 delta.
template <class T>
bool rank_violation(const GridModule& X, const Axes<T>& AX, const GridModule& Y, const Axes<T>& AY,
                    const T& delta, const std::vector<std::vector<T>>& coords) {
  const T two = delta + delta;
  std::vector<T> gaps;
  for (std::size_t v = 0; v < X.grid().size(); ++v) {
    if (X.dim(v) == 0) continue;
    std::vector<T> a = AX.point(v);
    RankWalk wx(X, v), wy(Y, AY.floor(a, delta, true));
    if (wx.rank_to(AX.floor(a, two, true)) == 0) continue;
    gaps.assign(1, two);
    for (std::size_t k = 0; k < a.size(); ++k)
      for (const auto& c : coords[k]) {
        T d = c - a[k];
        if (d >= two) gaps.push_back(d);
        if (d + delta >= two) gaps.push_back(d + delta);
      }
    std::sort(gaps.begin(), gaps.end());
    gaps.erase(std::unique(gaps.begin(), gaps.end()), gaps.end());
    std::size_t ng = gaps.size();
    for (std::size_t i = 0; i + 1 < ng; ++i) gaps.push_back((gaps[i] + gaps[i + 1]) / 2);
    std::sort(gaps.begin(), gaps.end());
    for (const auto& g : gaps) {
      // ranks only drop as the window grows
      std::size_t rx = wx.rank_to(AX.floor(a, g, true));
      if (rx == 0) break;
      if (rx > wy.rank_to(AY.floor(a, g - delta, false))) return true;
    }
  }
  return false;
}

// Largest candidate delta with a violation, or 0.
template <class T>
T last_violation(const GridModule& M, const GridModule& N, const std::function<T(const Rational&)>& conv) {
  auto axes = [&](const GridModule& X) {
    Axes<T> A{&X.grid(), {}};
    for (const auto& ax : X.grid().axes()) {
      A.ax.emplace_back();
      for (const auto& c : ax) A.ax.back().push_back(conv(c));
    }
    return A;
  };
  Axes<T> AM = axes(M), AN = axes(N);
  std::vector<std::vector<T>> coords(M.n());
  for (std::size_t k = 0; k < M.n(); ++k) {
    coords[k] = AM.ax[k];
    coords[k].insert(coords[k].end(), AN.ax[k].begin(), AN.ax[k].end());
    std::sort(coords[k].begin(), coords[k].end());
    coords[k].erase(std::unique(coords[k].begin(), coords[k].end()), coords[k].end());
  }
  std::vector<T> cand;
  for (std::size_t k = 0; k < M.n(); ++k)
    for (std::size_t i = 0; i < coords[k].size(); ++i)
      for (std::size_t j = i + 1; j < coords[k].size(); ++j) {
        T d = coords[k][j] - coords[k][i];
        cand.push_back(d);
        cand.push_back(d / 2);
      }
  std::sort(cand.begin(), cand.end());
  cand.erase(std::unique(cand.begin(), cand.end()), cand.end());
  auto violated = [&](const T& d) {
    return rank_violation(M, AM, N, AN, d, coords) || rank_violation(N, AN, M, AM, d, coords);
  };
  // Violations persist as delta decreases, so search for the last violated candidate.
  long lo = -1, hi = static_cast<long>(cand.size());
  while (hi - lo > 1) {
    long mid = (lo + hi) / 2;
    if (violated(cand[mid])) lo = mid;
    else hi = mid;
  }
  return lo < 0 ? T(0) : cand[lo];
}

}  // namespace

Rational rank_lower_bound(const GridModule& M0, const GridModule& N0) {
  GridModule M = compress(M0), N = compress(N0);
  if (M.n() != N.n()) throw std::invalid_argument("rank_lower_bound dimension mismatch");
  // Exact integers after scaling by 4 lcm(denominators), so halves of
  // halves stay integral; rationals when that could overflow.
  mpz_class den = 1, top = 0;
  for (const GridModule* X : {&M, &N})
    for (const auto& ax : X->grid().axes())
      for (const auto& c : ax) {
        den = lcm(den, c.get_den());
        top = std::max(top, mpz_class(abs(c.get_num()) / c.get_den() + 1));
      }
  mpz_class scale = 4 * den;
  mpz_class bound = mpz_class(1) << 58;
  if (scale * top * 4 < bound) {
    auto conv = [&](const Rational& c) -> std::int64_t {
      mpz_class v = c.get_num() * (scale / c.get_den());
      return v.get_si();
    };
    Rational r(mpz_class(last_violation<std::int64_t>(M, N, conv)), scale);
    r.canonicalize();
    return r;
  }
  return last_violation<Rational>(M, N, [](const Rational& c) { return c; });
}

GridFactorization factor_through_grid(const GridModule& L, const Grid& P, const Rational& r,
                                      const Rational& alpha, const Rational& beta) {
  if (!(r > 0 && r <= alpha && alpha <= beta))
    throw PreconditionError("factor_through_grid needs 0 < r <= alpha <= beta");
  for (std::size_t k = 0; k < P.n(); ++k) {
    for (const auto& w : P.mesh_widths(k))
      if (w < alpha || w > beta) throw PreconditionError("mesh width outside [alpha, beta]");
    if (L.grid().axis(k).back() > P.axis(k).back() || L.grid().axis(k).front() < P.axis(k).front())
      throw PreconditionError("window does not cover the module's coordinates");
  }
  const Field& F = L.field();
  const Grid& LG = L.grid();
  GridModule LP = restriction_extension(L, P);
  GridModule LPr = shift(restriction_extension(L, P.translated(r)), r);
  Grid Q = grid_with(P, shifted_axes(P, -beta));
  GridFactorization fz;
  fz.grid = Q;
  fz.source = restriction_extension(LPr, Q);
  fz.target = restriction_extension(shift(LP, beta), Q);
  fz.m = ModuleMorphism{fz.source, fz.target, {}};
  GridModule LPQ = restriction_extension(LP, Q);
  fz.eta_P = ModuleMorphism{LPQ, fz.target, {}};
  fz.eta_r_P = ModuleMorphism{LPQ, fz.source, {}};
  for (std::size_t v = 0; v < Q.size(); ++v) {
    Point x = Q.point(v);
    auto s0v = P.floor(x);
    if (!s0v) {
      fz.m.mats.emplace_back(fz.target.dim(v), fz.source.dim(v));
      fz.eta_P.mats.emplace_back(fz.target.dim(v), LPQ.dim(v));
      fz.eta_r_P.mats.emplace_back(fz.source.dim(v), LPQ.dim(v));
      continue;
    }
    Point s0 = P.point(*s0v), s1 = s0;
    for (std::size_t k = 0; k < P.n(); ++k) {
      auto i = P.coord_index(*s0v, k);
      if (i + 1 < P.axis_size(k)) s1[k] = P.axis(k)[i + 1];
    }
    Point t = P.point(*P.floor(add(x, beta)));
    Point s0r = add(s0, r);
    // m_x = phi(s1 -> t) o phi(s0 + r -> s1), read at the floors in L's grid.
    auto fl = [&](const Point& y) { return LG.floor(y); };
    auto lmap = [&](const Point& a, const Point& b) {
      auto fa = fl(a), fb = fl(b);
      if (!fb) return Matrix(0, 0);
      if (!fa) return Matrix(L.dim(*fb), 0);
      return L.structure_map(*fa, *fb);
    };
    Point mid = s1;
    for (std::size_t k = 0; k < P.n(); ++k)
      if (mid[k] < s0r[k]) mid[k] = s0r[k];  // top of the window: s1 = s0
    fz.m.mats.push_back(mul(F, lmap(mid, t), lmap(s0r, mid)));
    fz.eta_P.mats.push_back(lmap(s0, t));
    fz.eta_r_P.mats.push_back(lmap(s0, s0r));
  }
  return fz;
}

bool verify_factorization(const GridFactorization& fz) {
  if (!check_natural(fz.m).empty()) return false;
  if (!check_natural(fz.eta_P).empty() || !check_natural(fz.eta_r_P).empty()) return false;
  const Field& F = fz.source.field();
  for (std::size_t v = 0; v < fz.grid.size(); ++v)
    if (mul(F, fz.m.mats[v], fz.eta_r_P.mats[v]) != fz.eta_P.mats[v]) return false;
  return true;
}

}  // namespace pm
