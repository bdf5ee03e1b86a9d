#include "persmod/kan.hpp"

namespace pm {

namespace {

// Per-axis floor indices of P's coordinates inside M's grid; -1 means none.
std::vector<std::vector<long>> axis_floors(const Grid& from, const Grid& P) {
  std::vector<std::vector<long>> fl(P.n());
  for (std::size_t k = 0; k < P.n(); ++k) {
    fl[k].resize(P.axis_size(k));
    for (std::size_t i = 0; i < P.axis_size(k); ++i) {
      auto f = from.floor_index(k, P.axis(k)[i]);
      fl[k][i] = f ? static_cast<long>(*f) : -1;
    }
  }
  return fl;
}

std::vector<long> vertex_floors(const Grid& from, const Grid& P,
                                const std::vector<std::vector<long>>& fl) {
  std::vector<long> out(P.size());
  for (std::size_t q = 0; q < P.size(); ++q) {
    long f = 0;
    for (std::size_t k = 0; k < P.n() && f >= 0; ++k) {
      long i = fl[k][P.coord_index(q, k)];
      if (i < 0) f = -1;
      else f += i * static_cast<long>(from.stride(k));
    }
    out[q] = f;
  }
  return out;
}

}  // namespace

GridModule restriction_extension(const GridModule& M, const Grid& P) {
  if (P.n() != M.n()) throw std::invalid_argument("restriction_extension dimension mismatch");
  const Grid& G = M.grid();
  const Field& F = M.field();
  auto fl = axis_floors(G, P);
  auto vf = vertex_floors(G, P, fl);
  std::vector<std::size_t> dims(P.size());
  for (std::size_t q = 0; q < P.size(); ++q) dims[q] = vf[q] < 0 ? 0 : M.dim(vf[q]);
  std::vector<std::vector<Matrix>> steps(P.n(), std::vector<Matrix>(P.size()));
  for (std::size_t k = 0; k < P.n(); ++k) {
    for (std::size_t q = 0; q < P.size(); ++q) {
      if (!P.has_successor(q, k)) continue;
      std::size_t w = q + P.stride(k);
      if (vf[q] < 0 || vf[w] < 0) {
        steps[k][q] = Matrix(dims[w], dims[q]);
      } else if (vf[q] == vf[w]) {
        steps[k][q] = Matrix::identity(dims[q]);
      } else {
        std::size_t v = vf[q];
        Matrix cur = Matrix::identity(M.dim(v));
        while (v != static_cast<std::size_t>(vf[w])) {
          cur = mul(F, M.step(k, v), cur);
          v += G.stride(k);
        }
        steps[k][q] = std::move(cur);
      }
    }
  }
  return GridModule(P, F, std::move(dims), std::move(steps));
}

GridModule restrict(const GridModule& M, const Grid& Q) {
  if (!M.grid().contains_axes_of(Q)) throw PreconditionError("restrict: Q is not a subgrid");
  return restriction_extension(M, Q);
}

ModuleMorphism morphism_restriction_extension(const ModuleMorphism& f, const Grid& P) {
  GridModule MP = restriction_extension(f.source, P);
  GridModule NP = restriction_extension(f.target, P);
  auto fl = axis_floors(f.source.grid(), P);
  auto vf = vertex_floors(f.source.grid(), P, fl);
  ModuleMorphism out{MP, NP, {}};
  out.mats.reserve(P.size());
  for (std::size_t q = 0; q < P.size(); ++q)
    out.mats.push_back(vf[q] < 0 ? Matrix(NP.dim(q), MP.dim(q)) : f.mats[vf[q]]);
  return out;
}

GridModule shift(const GridModule& M, const Rational& r) {
  return GridModule(M.grid().translated(-r), M.field(), M.dims(), M.steps());
}

ModuleMorphism shift_unit(const GridModule& M, const Rational& r) {
  if (r < 0) throw PreconditionError("shift_unit needs r >= 0");
  GridModule Mr = shift(M, r);
  Grid C = grid_union(M.grid(), Mr.grid());
  GridModule A = restriction_extension(M, C);
  GridModule B = restriction_extension(Mr, C);
  ModuleMorphism eta{A, B, {}};
  eta.mats.reserve(C.size());
  for (std::size_t v = 0; v < C.size(); ++v) {
    Point x = C.point(v);
    eta.mats.push_back(M.map_at(x, add(x, r)));
  }
  return eta;
}

std::pair<GridModule, GridModule> common_refinement(const GridModule& M, const GridModule& N) {
  Grid C = grid_union(M.grid(), N.grid());
  return {restriction_extension(M, C), restriction_extension(N, C)};
}

GridModule compress(const GridModule& M) {
  const Grid& G = M.grid();
  const Field& F = M.field();
  std::vector<std::vector<Rational>> keep(G.n());
  for (std::size_t k = 0; k < G.n(); ++k) {
    std::size_t na = G.axis_size(k);
    // slice_all[i]: every step from index i-1 to i along k is an iso (for i >= 1)
    std::vector<bool> iso(na, true), zero_slice(na, true);
    for (std::size_t v = 0; v < G.size(); ++v) {
      std::size_t i = G.coord_index(v, k);
      if (M.dim(v) != 0) zero_slice[i] = false;
      if (i + 1 < na && iso[i + 1]) {
        const Matrix& s = M.step(k, v);
        if (!s.square() || (s.rows() > 0 && !is_invertible(F, s))) iso[i + 1] = false;
      }
    }
    std::size_t start = 0;
    while (start + 1 < na && zero_slice[start]) ++start;
    keep[k].push_back(G.axis(k)[start]);
    for (std::size_t i = start + 1; i < na; ++i)
      if (!iso[i]) keep[k].push_back(G.axis(k)[i]);
  }
  return restriction_extension(M, Grid(std::move(keep)));
}

GridModule simplify(const GridModule& M) {
  const Grid& G = M.grid();
  std::vector<std::vector<Rational>> keep(G.n());
  for (std::size_t k = 0; k < G.n(); ++k) {
    std::size_t na = G.axis_size(k);
    std::vector<bool> ident(na, true), zero_slice(na, true);
    for (std::size_t v = 0; v < G.size(); ++v) {
      std::size_t i = G.coord_index(v, k);
      if (M.dim(v) != 0) zero_slice[i] = false;
      if (i + 1 < na && ident[i + 1] && !M.step(k, v).is_identity()) ident[i + 1] = false;
    }
    std::size_t start = 0;
    while (start + 1 < na && zero_slice[start]) ++start;
    keep[k].push_back(G.axis(k)[start]);
    for (std::size_t i = start + 1; i < na; ++i)
      if (!ident[i]) keep[k].push_back(G.axis(k)[i]);
  }
  return restriction_extension(M, Grid(std::move(keep)));
}

bool same_extension(const GridModule& M, const GridModule& N) {
  if (M.n() != N.n() || !(M.field() == N.field())) return false;
  if (M.grid() == N.grid()) return M == N;
  auto [a, b] = common_refinement(M, N);
  return a == b;
}

}  // namespace pm
