#include "persmod/construct.hpp"

#include <algorithm>

#include "persmod/decomp.hpp"
#include "persmod/kan.hpp"

namespace pm {

namespace {

Rational canon(Rational q) {
  q.canonicalize();
  return q;
}

bool is_multiple(const Rational& x, const Rational& h) {
  Rational t = x / h;
  t.canonicalize();
  return t.get_den() == 1;
}

void require_lattice(const GridModule& A, const Rational& eps, const char* what) {
  if (eps <= 0) throw PreconditionError(std::string(what) + ": eps must be positive");
  for (const auto& ax : A.grid().axes())
    for (const auto& c : ax)
      if (!is_multiple(c, eps))
        throw PreconditionError(std::string(what) + ": module is not a lattice extension at this pitch");
}

GridModule refine(const GridModule& M, const std::vector<std::vector<Rational>>& extra) {
  return restriction_extension(M, grid_with(M.grid(), extra));
}

Point unit_shift(Point x, std::size_t k, const Rational& t) {
  x[k] += t;
  return x;
}

// below[v]: some vertex strictly below v carries a nonzero space.
std::vector<char> nonzero_below(const GridModule& A) {
  const Grid& g = A.grid();
  std::vector<char> below(g.size(), 0);
  for (std::size_t v = 0; v < g.size(); ++v)
    for (std::size_t k = 0; k < g.n(); ++k) {
      if (g.coord_index(v, k) == 0) continue;
      std::size_t u = v - g.stride(k);
      if (below[u] || A.dim(u) > 0) {
        below[v] = 1;
        break;
      }
    }
  return below;
}

void certify_indecomposable(const GridModule& M, const char* what) {
  if (!is_indecomposable(M))
    throw VerificationError(std::string(what) + ": output is not indecomposable");
}

void require_indecomposable(const GridModule& M, const char* what) {
  if (M.is_zero() || !is_indecomposable(M))
    throw PreconditionError(std::string(what) + ": input must be nonzero and indecomposable");
}

// Smallest coordinate along `axis` of a vertex with nonzero space.
std::optional<Rational> min_support(const GridModule& M, std::size_t axis) {
  std::optional<Rational> m;
  for (std::size_t v = 0; v < M.grid().size(); ++v)
    if (M.dim(v) > 0 && (!m || M.grid().coord(v, axis) < *m)) m = M.grid().coord(v, axis);
  return m;
}

// M with the constant module k on the cells of the rectangles; maps are the
// identity between those cells and into `anchor`, zero everywhere else.
GridModule attach_path(const GridModule& M, const std::vector<HyperRectangle>& path,
                       const Point& anchor) {
  std::vector<std::vector<Rational>> extra(M.n());
  for (const auto& S : path) {
    auto cc = S.closure_coords();
    for (std::size_t k = 0; k < M.n(); ++k) extra[k].insert(extra[k].end(), cc[k].begin(), cc[k].end());
  }
  for (std::size_t k = 0; k < M.n(); ++k) extra[k].push_back(anchor[k]);
  GridModule R = refine(M, extra);
  const Grid& g = R.grid();
  auto a = g.find(anchor);
  if (!a || R.dim(*a) != 1) throw PreconditionError("attach_path: anchor must carry k");
  std::vector<char> inside(g.size(), 0);
  for (std::size_t v = 0; v < g.size(); ++v) {
    if (v == *a) continue;
    Point x = g.point(v);
    for (const auto& S : path)
      if (S.in_extension(x)) inside[v] = 1;
    if (inside[v] && R.dim(v) != 0) throw PreconditionError("attach_path: path meets the support");
  }
  ModuleBuilder b(R);
  for (std::size_t v = 0; v < g.size(); ++v)
    if (inside[v]) b.set_dim(v, 1);
  for (std::size_t v = 0; v < g.size(); ++v) {
    if (!inside[v]) continue;
    for (std::size_t k = 0; k < g.n(); ++k) {
      if (!g.has_successor(v, k)) continue;
      std::size_t w = v + g.stride(k);
      if (inside[w] || w == *a) b.set_step(k, v, Matrix::identity(1));
    }
  }
  return b.build();
}

// The grid of all lattice points a + i h, i = lo..hi, per axis.
std::vector<Rational> lattice_run(const Rational& a, const Rational& h, long lo, long hi) {
  std::vector<Rational> out;
  for (long i = lo; i <= hi; ++i) out.push_back(canon(a + i * h));
  return out;
}

// (l, l') used when tacking.
std::pair<std::size_t, std::size_t> tack_axes(std::size_t n) {
  if (n % 2 == 0) return {0, 1};
  return {n - 1, n - 2};
}

// G spliced into the (ax, ay) slice with G(0,0) at origin; the rectangle S
// covers G coordinates [0, last]^2 and the other coordinates stay at origin.
// N is M on the lattice box of half-width one around S, with G on S. Maps out
// of the slice go through G(4,4); maps into S from the row below are identities.
struct Splice {
  HyperRectangle S;
  GridModule N;
};

Splice splice_G(const GridModule& M, const Point& origin, std::size_t ax, std::size_t ay,
                const Rational& h, long last) {
  const std::size_t n = M.n();
  std::vector<std::vector<Rational>> U(n);
  for (std::size_t k = 0; k < n; ++k)
    U[k] = (k == ax || k == ay) ? lattice_run(origin[k], h, -1, last + 1) : lattice_run(origin[k], h, -1, 1);
  Grid Ug(U);
  GridModule base = restriction_extension(M, Ug);
  GridModule G = module_G(M.field());
  const Grid& gg = G.grid();

  Point hi = origin;
  hi[ax] = canon(origin[ax] + last * h);
  hi[ay] = canon(origin[ay] + last * h);
  HyperRectangle S = HyperRectangle::box(h, origin, hi);

  auto gpos = [&](std::size_t v) -> std::optional<std::pair<long, long>> {
    for (std::size_t k = 0; k < n; ++k)
      if (k != ax && k != ay && Ug.coord(v, k) != origin[k]) return std::nullopt;
    Rational x = (Ug.coord(v, ax) - origin[ax]) / h, y = (Ug.coord(v, ay) - origin[ay]) / h;
    x.canonicalize();
    y.canonicalize();
    return std::make_pair(x.get_num().get_si(), y.get_num().get_si());
  };
  auto gidx = [&](long x, long y) { return gg.index({std::size_t(x), std::size_t(y)}); };
  std::vector<char> inS(Ug.size());
  for (std::size_t v = 0; v < Ug.size(); ++v) inS[v] = S.contains(Ug.point(v));

  ModuleBuilder b(base);
  for (std::size_t v = 0; v < Ug.size(); ++v)
    if (inS[v]) {
      auto [x, y] = *gpos(v);
      b.set_dim(v, G.dim(gidx(x, y)));
    }
  for (std::size_t v = 0; v < Ug.size(); ++v)
    for (std::size_t k = 0; k < n; ++k) {
      if (!Ug.has_successor(v, k)) continue;
      std::size_t w = v + Ug.stride(k);
      if ((!inS[v] && !inS[w]) || b.dim(v) == 0 || b.dim(w) == 0) continue;
      auto p = gpos(v);
      if (!p) continue;
      auto [x, y] = *p;
      if (!gpos(w)) b.set_step(k, v, G.structure_map(gidx(x, y), gidx(4, 4)));
      else if (x < 0 || y < 0) b.set_step(k, v, Matrix::identity(1));
      else b.set_step(k, v, G.step(k == ax ? 0 : 1, gidx(x, y)));
    }
  return {S, b.build()};
}

}  // namespace

// ---------------------------------------------------------------- rectangles

HyperRectangle HyperRectangle::box(const Rational& delta, const Point& a, const Point& b) {
  if (a.size() != b.size()) throw PreconditionError("hyper-rectangle bounds differ in length");
  HyperRectangle S{delta, {}, {}};
  for (std::size_t k = 0; k < a.size(); ++k) {
    if (b[k] < a[k]) throw PreconditionError("hyper-rectangle needs a <= b");
    if (!is_multiple(a[k], delta) || !is_multiple(b[k], delta))
      throw PreconditionError("hyper-rectangle corners must lie on the lattice");
    S.lo.push_back(a[k]);
    S.hi.push_back(b[k]);
  }
  return S;
}

bool HyperRectangle::on_lattice(const Point& x) const {
  if (x.size() != n()) return false;
  for (const auto& c : x)
    if (!is_multiple(c, delta)) return false;
  return true;
}

bool HyperRectangle::contains(const Point& x) const {
  if (!on_lattice(x)) return false;
  for (std::size_t k = 0; k < n(); ++k) {
    if (lo[k] && x[k] < *lo[k]) return false;
    if (hi[k] && x[k] > *hi[k]) return false;
  }
  return true;
}

HyperRectangle HyperRectangle::up() const {
  HyperRectangle S = *this;
  for (auto& h : S.hi)
    if (h) h = canon(*h + delta);
  return S;
}

HyperRectangle HyperRectangle::down() const {
  HyperRectangle S = *this;
  for (auto& l : S.lo)
    if (l) l = canon(*l - delta);
  return S;
}

bool HyperRectangle::in_boundary_up(const Point& x) const { return up().contains(x) && !contains(x); }
bool HyperRectangle::in_boundary_down(const Point& x) const {
  return down().contains(x) && !contains(x);
}
bool HyperRectangle::in_boundary(const Point& x) const {
  return in_boundary_up(x) || in_boundary_down(x);
}
bool HyperRectangle::in_closure(const Point& x) const { return contains(x) || in_boundary(x); }

bool HyperRectangle::in_extension(const Point& x) const {
  for (std::size_t k = 0; k < n(); ++k) {
    if (lo[k] && x[k] < *lo[k]) return false;
    if (hi[k] && x[k] >= *hi[k] + delta) return false;
  }
  return true;
}

Box HyperRectangle::extension() const {
  Box B;
  for (std::size_t k = 0; k < n(); ++k) {
    if (!lo[k] || !hi[k]) throw PreconditionError("extension of an unbounded hyper-rectangle");
    B.lo.push_back(*lo[k]);
    B.hi.push_back(canon(*hi[k] + delta));
  }
  return B;
}

std::vector<std::vector<Rational>> HyperRectangle::closure_coords() const {
  std::vector<std::vector<Rational>> out(n());
  for (std::size_t k = 0; k < n(); ++k) {
    if (lo[k]) {
      out[k].push_back(canon(*lo[k] - delta));
      out[k].push_back(*lo[k]);
    }
    if (hi[k]) out[k].push_back(canon(*hi[k] + delta));
  }
  return out;
}

GridModule modify_on_rectangle(const GridModule& M, const HyperRectangle& S, const GridModule& N) {
  const std::size_t n = M.n();
  if (S.n() != n || N.n() != n) throw PreconditionError("modify_on_rectangle: dimension mismatch");
  if (!(M.field() == N.field())) throw PreconditionError("modify_on_rectangle: fields differ");
  if (S.delta <= 0) throw PreconditionError("modify_on_rectangle: pitch must be positive");
  for (std::size_t k = 0; k < n; ++k) {
    if ((S.lo[k] && !is_multiple(*S.lo[k], S.delta)) || (S.hi[k] && !is_multiple(*S.hi[k], S.delta)))
      throw PreconditionError("modify_on_rectangle: rectangle is off the lattice");
    if (S.lo[k] && S.hi[k] && *S.hi[k] < *S.lo[k])
      throw PreconditionError("modify_on_rectangle: empty rectangle");
  }
  const Grid& U = N.grid();
  auto cc = S.closure_coords();
  for (std::size_t k = 0; k < n; ++k)
    for (const auto& c : cc[k])
      if (!U.find_index(k, c)) throw PreconditionError("modify_on_rectangle: U does not cover the closure of S");

  Grid Lg = grid_union(M.grid(), U);
  GridModule Mr = restriction_extension(M, Lg);
  auto in_U = [&](const Point& x) {
    for (std::size_t k = 0; k < n; ++k)
      if (x[k] < U.axis(k).front() || x[k] > U.axis(k).back()) return false;
    return true;
  };
  std::vector<char> inS(Lg.size()), inU(Lg.size());
  for (std::size_t v = 0; v < Lg.size(); ++v) {
    Point x = Lg.point(v);
    inS[v] = S.in_extension(x);
    inU[v] = in_U(x);
    if (inS[v] && !inU[v]) throw PreconditionError("modify_on_rectangle: S leaves U");
  }
  // agreement on U minus S
  for (std::size_t v = 0; v < Lg.size(); ++v) {
    if (!inU[v] || inS[v]) continue;
    Point x = Lg.point(v);
    if (N.dim_at(x) != Mr.dim(v))
      throw PreconditionError("modify_on_rectangle: M and N disagree off S");
    for (std::size_t k = 0; k < n; ++k) {
      if (!Lg.has_successor(v, k)) continue;
      std::size_t w = v + Lg.stride(k);
      if (!inU[w] || inS[w]) continue;
      if (N.map_at(x, Lg.point(w)) != Mr.step(k, v))
        throw PreconditionError("modify_on_rectangle: M and N disagree off S");
    }
  }
  ModuleBuilder b(Mr);
  for (std::size_t v = 0; v < Lg.size(); ++v)
    if (inS[v]) b.set_dim(v, N.dim_at(Lg.point(v)));
  for (std::size_t v = 0; v < Lg.size(); ++v)
    for (std::size_t k = 0; k < n; ++k) {
      if (!Lg.has_successor(v, k)) continue;
      std::size_t w = v + Lg.stride(k);
      if (!inS[v] && !inS[w]) continue;
      b.set_step(k, v, N.map_at(Lg.point(v), Lg.point(w)));
    }
  return b.build();
}

bool summands_meet_boundary(const HyperRectangle& S, const GridModule& N) {
  for (const auto& X : decompose(N).summands) {
    bool meets = false;
    for (std::size_t v = 0; v < X.grid().size() && !meets; ++v)
      meets = X.dim(v) > 0 && !S.in_extension(X.grid().point(v));
    if (!meets) return false;
  }
  return true;
}

// ---------------------------------------------------------------- corners and antennas

std::optional<Point> has_thin_corner(const GridModule& A) {
  auto below = nonzero_below(A);
  for (std::size_t v = 0; v < A.grid().size(); ++v)
    if (A.dim(v) == 1 && !below[v]) return A.grid().point(v);
  return std::nullopt;
}

bool is_antenna(const GridModule& A, const Point& r, std::size_t axis, const Rational& eps) {
  const Grid& g = A.grid();
  if (r.size() != A.n() || axis >= A.n() || eps <= 0) return false;
  for (const auto& c : r)
    if (!is_multiple(c, eps)) return false;
  if (A.dim_at(r) != 1) return false;
  // everything below r along the axis: the floors of r - j eps e_axis
  auto v = g.floor(r);
  if (!v) return false;
  std::size_t i = g.coord_index(*v, axis);
  // the cell of r must start at r along the axis
  if (g.axis(axis)[i] != r[axis]) return false;
  for (std::size_t t = 1; t <= i; ++t)
    if (A.dim(*v - t * g.stride(axis)) != 0) return false;
  for (std::size_t j = 0; j < A.n(); ++j) {
    if (j == axis) continue;
    if (!A.map_at(r, unit_shift(r, j, eps)).is_zero()) return false;
  }
  return true;
}

std::optional<Point> has_antenna(const GridModule& A, std::size_t axis, const Rational& eps) {
  const Grid& g = A.grid();
  if (axis >= A.n() || eps <= 0) return std::nullopt;
  for (std::size_t v = 0; v < g.size(); ++v) {
    if (A.dim(v) != 1) continue;
    // within the cell of v only the last eps-step before the next coordinate can
    // leave the cell along the other axes
    Point r = g.point(v);
    bool ok = true;
    for (std::size_t j = 0; j < A.n() && ok; ++j) {
      if (j == axis) continue;
      if (!g.has_successor(v, j)) {
        ok = false;
        break;
      }
      Rational cand = canon(g.axis(j)[g.coord_index(v, j) + 1] - eps);
      if (cand > r[j]) r[j] = cand;
    }
    if (ok && is_antenna(A, r, axis, eps)) return r;
  }
  return std::nullopt;
}

// ---------------------------------------------------------------- local constructions

Construction add_thin_corner(const GridModule& A, const Rational& eps, bool check_input) {
  require_lattice(A, eps, "add_thin_corner");
  if (check_input) require_indecomposable(A, "add_thin_corner");
  if (A.is_zero()) throw PreconditionError("add_thin_corner: zero module");
  const Grid& g = A.grid();
  auto below = nonzero_below(A);
  std::size_t v0 = 0;
  while (A.dim(v0) == 0 || below[v0]) ++v0;
  Point r = g.point(v0);
  Rational h = canon(eps / 2);

  // iota picks a coordinate that survives some outgoing step
  std::size_t d = A.dim(v0), col = 0;
  bool found = false;
  for (std::size_t k = 0; k < g.n() && !found; ++k) {
    if (!g.has_successor(v0, k)) continue;
    const Matrix& s = A.step(k, v0);
    for (std::size_t j = 0; j < d && !found; ++j)
      for (std::size_t i = 0; i < s.rows(); ++i)
        if (s(i, j) != 0) {
          col = j;
          found = true;
          break;
        }
  }
  Matrix iota(d, 1);
  iota(col, 0) = 1;

  std::vector<std::vector<Rational>> extra(g.n());
  for (std::size_t k = 0; k < g.n(); ++k) extra[k].push_back(canon(r[k] + h));
  GridModule R = refine(A, extra);
  std::size_t vr = *R.grid().find(r);
  ModuleBuilder b(R);
  std::vector<Matrix> out(g.n());
  for (std::size_t k = 0; k < g.n(); ++k)
    if (R.grid().has_successor(vr, k)) out[k] = mul(A.field(), R.step(k, vr), iota);
  b.set_dim(vr, 1);
  for (std::size_t k = 0; k < g.n(); ++k)
    if (R.grid().has_successor(vr, k)) b.set_step(k, vr, out[k]);
  GridModule Ap = simplify(b.build());

  Box cell;
  cell.lo = r;
  for (std::size_t k = 0; k < g.n(); ++k) cell.hi.push_back(canon(r[k] + h));
  TrivialRegion U{{cell}};
  auto cert = local_change_certificate(A, Ap, U, h, check_input);
  certify_indecomposable(Ap, "add_thin_corner");
  return {Ap, cert, U, r, 0};
}

Construction add_antenna(const GridModule& A, const Rational& eps, bool check_input) {
  if (A.n() < 2) throw PreconditionError("add_antenna needs n >= 2");
  require_lattice(A, eps, "add_antenna");
  if (check_input) require_indecomposable(A, "add_antenna");
  auto rc = has_thin_corner(A);
  if (!rc) throw PreconditionError("add_antenna: no thin corner");
  Point r = *rc;
  Rational h = canon(eps / 5);
  auto sp = splice_G(A, r, 0, 1, h, 3);
  GridModule Ap = simplify(modify_on_rectangle(A, sp.S, sp.N));

  Point tip = unit_shift(r, 1, canon(3 * h));
  if (!is_antenna(Ap, tip, 0, h)) throw VerificationError("add_antenna: no antenna at the tip");
  Box box;
  box.lo = r;
  for (std::size_t k = 0; k < A.n(); ++k) box.hi.push_back(canon(r[k] + 4 * h));
  TrivialRegion U{{box}};
  auto cert = local_change_certificate(A, Ap, U, eps, check_input);
  certify_indecomposable(Ap, "add_antenna");
  return {Ap, cert, U, tip, 0};
}

Construction move_antenna(const GridModule& A, const Rational& eps, const Point& s,
                          std::optional<Point> r, bool check_input) {
  const std::size_t n = A.n();
  if (n < 2) throw PreconditionError("move_antenna needs n >= 2");
  require_lattice(A, eps, "move_antenna");
  if (s.size() != n) throw PreconditionError("move_antenna: target has the wrong length");
  for (const auto& c : s)
    if (!is_multiple(c, eps)) throw PreconditionError("move_antenna: target is off the lattice");
  if (!r) r = has_antenna(A, 0, eps);
  if (!r || !is_antenna(A, *r, 0, eps)) throw PreconditionError("move_antenna: no axis-0 antenna");
  for (std::size_t k = 0; k < n; ++k) {
    if (k % 2 == 0 && !(s[k] < (*r)[k]))
      throw PreconditionError("move_antenna: target must lie below r on even axes");
    if (k % 2 == 1 && !(s[k] > (*r)[k]))
      throw PreconditionError("move_antenna: target must lie above r on odd axes");
  }
  for (std::size_t v = 0; v < A.grid().size(); ++v)
    if (A.dim(v) > 0 && A.grid().coord(v, 0) <= s[0])
      throw PreconditionError("move_antenna: module is nonzero left of the target");
  if (check_input) require_indecomposable(A, "move_antenna");

  std::vector<HyperRectangle> path;
  TrivialRegion T;
  for (std::size_t k = 0; k < n; ++k) {
    Point a(n), b(n);
    for (std::size_t i = 0; i < n; ++i) {
      if (i < k) a[i] = b[i] = s[i];
      else if (i > k) a[i] = b[i] = (*r)[i];
    }
    if (k % 2 == 0) {
      a[k] = s[k];
      b[k] = canon((*r)[k] - eps);
    } else {
      a[k] = canon((*r)[k] + eps);
      b[k] = s[k];
    }
    path.push_back(HyperRectangle::box(eps, a, b));
    T.boxes.push_back(path.back().extension());
  }
  GridModule Ap = simplify(attach_path(A, path, *r));
  std::size_t l = n % 2 == 0 ? 0 : n - 1;
  if (!is_antenna(Ap, s, l, eps)) throw VerificationError("move_antenna: no antenna at the target");
  auto cert = local_change_certificate(A, Ap, T, eps, check_input);
  certify_indecomposable(Ap, "move_antenna");
  return {Ap, cert, T, s, l};
}

Construction tack_pair(const GridModule& A, const GridModule& B, const Rational& eps,
                       const Point& r, bool check_input) {
  const std::size_t n = A.n();
  if (n < 2 || B.n() != n) throw PreconditionError("tack_pair needs two modules with n >= 2");
  require_lattice(A, eps, "tack_pair");
  require_lattice(B, eps, "tack_pair");
  auto [l, lp] = tack_axes(n);
  Point rb = unit_shift(r, lp, -eps);
  if (!is_antenna(A, r, l, eps) || !is_antenna(B, rb, l, eps))
    throw PreconditionError("tack_pair: antennas missing");
  if (check_input) {
    require_indecomposable(A, "tack_pair");
    require_indecomposable(B, "tack_pair");
  }
  Rational lo = std::min(*min_support(A, l), *min_support(B, l));
  Rational a = canon(lo - eps);
  // b = r + eps would leave the A-side vertical connector empty
  Rational b = canon(r[lp] + 2 * eps);

  auto rect = [&](const Rational& x0, const Rational& x1, const Rational& y0, const Rational& y1) {
    Point p = r, q = r;
    p[l] = x0;
    q[l] = x1;
    p[lp] = y0;
    q[lp] = y1;
    return HyperRectangle::box(eps, p, q);
  };
  auto e = [&](long i) { return canon(i * eps); };
  HyperRectangle Sg = rect(a - e(5), a - e(1), b, b + e(4));
  HyperRectangle ShA = rect(a - e(1), r[l], r[lp], r[lp]);
  HyperRectangle ShB = rect(a - e(2), r[l], r[lp] - e(1), r[lp] - e(1));
  HyperRectangle SvA = rect(a - e(1), a - e(1), r[lp] + e(1), b - e(1));
  HyperRectangle SvB = rect(a - e(2), a - e(2), r[lp], b - e(1));
  TrivialRegion T;
  for (const auto* S : {&Sg, &ShA, &ShB, &SvA, &SvB}) T.boxes.push_back(S->extension());

  // the horizontal connectors end at the antenna itself, which stays as it is
  GridModule Ap = attach_path(A, {rect(a - e(1), r[l] - e(1), r[lp], r[lp]), SvA}, r);
  GridModule Bp = attach_path(B, {rect(a - e(2), r[l] - e(1), r[lp] - e(1), r[lp] - e(1)), SvB}, rb);
  auto [Ar, Br] = common_refinement(A, B);
  GridModule sum = direct_sum(Ar, Br);
  auto [Apr, Bpr] = common_refinement(Ap, Bp);
  GridModule Z = direct_sum(Apr, Bpr);

  Point origin = r;
  origin[l] = canon(a - e(5));
  origin[lp] = b;
  auto sp = splice_G(Z, origin, l, lp, eps, 4);
  GridModule M = simplify(modify_on_rectangle(Z, sp.S, sp.N));

  auto cert = local_change_certificate(sum, M, T, canon(5 * eps), check_input);
  certify_indecomposable(M, "tack_pair");
  return {M, cert, T, r, l};
}

// ---------------------------------------------------------------- tacking

Rational common_pitch(const std::vector<GridModule>& mods) {
  mpz_class num = 0, den = 1;
  for (const auto& M : mods)
    for (const auto& ax : M.grid().axes())
      for (const auto& c : ax) {
        mpz_class l;
        mpz_lcm(l.get_mpz_t(), den.get_mpz_t(), c.get_den().get_mpz_t());
        num *= l / den;
        den = l;
        mpz_class cn = c.get_num() * (den / c.get_den());
        mpz_gcd(num.get_mpz_t(), num.get_mpz_t(), cn.get_mpz_t());
      }
  if (num == 0) return 1;
  return canon(Rational(num, den));
}

TackResult tack(const GridModule& A, const GridModule& B, const Rational& delta,
                std::optional<Rational> tau, bool check_input) {
  const std::size_t n = A.n();
  if (n < 2 || B.n() != n) throw PreconditionError("tack needs two modules with n >= 2");
  if (delta <= 0) throw PreconditionError("tack needs delta > 0");
  if (!tau) tau = common_pitch({A, B});
  require_lattice(A, *tau, "tack");
  require_lattice(B, *tau, "tack");
  if (check_input) {
    require_indecomposable(A, "tack");
    require_indecomposable(B, "tack");
  }
  // smallest m with tau / m < delta / 4
  Rational ratio = 4 * *tau / delta;
  mpz_class fl;
  mpz_fdiv_q(fl.get_mpz_t(), ratio.get_num_mpz_t(), ratio.get_den_mpz_t());
  Rational eps0 = canon(*tau / Rational(fl + 1));
  Rational h = canon(eps0 / 10);

  auto A1 = add_thin_corner(A, eps0, false);
  auto B1 = add_thin_corner(B, eps0, false);
  auto A2 = add_antenna(A1.module, canon(eps0 / 2), false);
  auto B2 = add_antenna(B1.module, canon(eps0 / 2), false);
  const Point& al = A2.vertex;
  const Point& be = B2.vertex;

  Point u(n);
  for (std::size_t k = 0; k < n; ++k)
    u[k] = k % 2 == 0 ? canon(std::min(al[k], be[k]) - 2 * h) : canon(std::max(al[k], be[k]) + 2 * h);
  Rational lo = std::min(*min_support(A2.module, 0), *min_support(B2.module, 0));
  if (u[0] >= lo) u[0] = canon(lo - h);
  auto [l, lp] = tack_axes(n);
  (void)l;
  Point r = unit_shift(u, lp, h);

  auto A3 = move_antenna(A2.module, h, r, al, false);
  auto B3 = move_antenna(B2.module, h, u, be, false);
  auto P = tack_pair(A3.module, B3.module, h, r, false);

  TackResult res;
  res.module = P.module;
  res.eps0 = eps0;
  res.stages.push_back(block_sum(A1.certificate, B1.certificate));
  res.stages.push_back(block_sum(A2.certificate, B2.certificate));
  res.stages.push_back(block_sum(A3.certificate, B3.certificate));
  res.stages.push_back(P.certificate);
  for (const auto* c : {&A1, &B1, &A2, &B2, &A3, &B3, &P})
    res.changes.push_back({c->region, c->certificate.eps});
  InterleavingCertificate c = res.stages[0];
  for (std::size_t i = 1; i < res.stages.size(); ++i) c = compose_certificates(c, res.stages[i]);
  require_verified(c, "tack");
  if (!(c.eps < delta)) throw VerificationError("tack: certificate exceeds delta");
  res.certificate = std::move(c);
  return res;
}

Approximation approximate_indecomposable(const GridModule& N, const Rational& eps,
                                         std::uint64_t seed, const Progress& progress) {
  const std::size_t n = N.n();
  if (n < 2) throw PreconditionError("approximate_indecomposable needs n >= 2");
  if (eps <= 0) throw PreconditionError("approximate_indecomposable needs eps > 0");
  Rational h = canon(eps / 2);
  bool aligned = true;
  for (const auto& ax : N.grid().axes())
    for (const auto& c : ax) aligned = aligned && is_multiple(c, h);
  InterleavingCertificate snapc = aligned ? identity_certificate(N) : snap_certificate(N, h);
  const GridModule& L = snapc.N;

  Approximation res;
  res.accumulated.push_back(snapc.eps);
  if (L.is_zero()) {
    Point a(n, Rational(0)), b(n, eps);
    GridModule cube = interval_module(a, b, N.field());
    auto zc = reverse(zero_certificate(cube, h));
    res.module = cube;
    res.certificate = compose_certificates(snapc, zc);
    res.accumulated.push_back(res.certificate.eps);
    require_verified(res.certificate, "approximate_indecomposable");
    return res;
  }

  Decomposition d = decompose(L, seed);
  res.summands = d.summands;
  const std::size_t k = d.summands.size();
  InterleavingCertificate c = compose_certificates(snapc, iso_certificate(d.witness));
  GridModule M = d.summands[0];
  InterleavingCertificate fold = identity_certificate(M);
  Rational delta = canon(eps / (2 * Rational(k)));
  for (std::size_t i = 1; i < k; ++i) {
    if (progress) progress(i - 1, k - 1);
    const GridModule& X = d.summands[i];
    TackResult t = tack(M, X, delta, std::nullopt, false);
    fold = compose_certificates(sum_certificates(fold, X), t.certificate);
    M = t.module;
    res.accumulated.push_back(canon(snapc.eps + fold.eps));
  }
  if (progress && k > 1) progress(k - 1, k - 1);
  c = compose_certificates(c, fold);
  require_verified(c, "approximate_indecomposable");
  if (c.eps > eps) throw VerificationError("approximate_indecomposable: certificate exceeds eps");
  res.module = M;
  res.certificate = std::move(c);
  return res;
}

}  // namespace pm
