#include "persmod/hom.hpp"

#include <algorithm>
#include <deque>
#include <random>

#include "persmod/kan.hpp"

namespace pm {

SparseEchelon::SparseEchelon(const Field& F, std::size_t ncols)
    : F_(F), ncols_(ncols), pivot_row_(ncols) {}

bool SparseEchelon::add_row(SparseRow row) {
  SparseRow tmp;
  while (!row.empty()) {
    std::size_t c = row.front().first;
    const SparseRow& piv = pivot_row_[c];
    if (piv.empty()) {
      Elem iv = F_.inv(row.front().second);
      for (auto& e : row) e.second = F_.mul(e.second, iv);
      pivot_row_[c] = std::move(row);
      ++nrows_;
      return true;
    }
    // row -= row[0] * piv; piv has leading entry 1 at column c.
    Elem f = row.front().second;
    tmp.clear();
    std::size_t i = 1, j = 1;
    while (i < row.size() || j < piv.size()) {
      if (j >= piv.size() || (i < row.size() && row[i].first < piv[j].first)) {
        tmp.push_back(row[i++]);
      } else if (i >= row.size() || piv[j].first < row[i].first) {
        tmp.emplace_back(piv[j].first, F_.neg(F_.mul(f, piv[j].second)));
        ++j;
      } else {
        Elem v = F_.sub(row[i].second, F_.mul(f, piv[j].second));
        if (v) tmp.emplace_back(row[i].first, v);
        ++i;
        ++j;
      }
    }
    row.swap(tmp);
  }
  return false;
}

std::vector<std::size_t> SparseEchelon::free_columns() const {
  std::vector<std::size_t> out;
  for (std::size_t c = 0; c < ncols_; ++c)
    if (pivot_row_[c].empty()) out.push_back(c);
  return out;
}

std::vector<std::vector<Elem>> SparseEchelon::null_basis() const {
  auto free = free_columns();
  std::size_t h = free.size();
  std::vector<Elem> X(ncols_ * h, 0);
  for (std::size_t j = 0; j < h; ++j) X[free[j] * h + j] = 1;
  for (std::size_t c = ncols_; c-- > 0;) {
    const SparseRow& r = pivot_row_[c];
    if (r.empty()) continue;
    for (std::size_t t = 1; t < r.size(); ++t) {
      std::size_t cc = r[t].first;
      Elem v = r[t].second;
      for (std::size_t j = 0; j < h; ++j)
        if (X[cc * h + j]) X[c * h + j] = F_.sub(X[c * h + j], F_.mul(v, X[cc * h + j]));
    }
  }
  std::vector<std::vector<Elem>> out(h, std::vector<Elem>(ncols_));
  for (std::size_t c = 0; c < ncols_; ++c)
    for (std::size_t j = 0; j < h; ++j) out[j][c] = X[c * h + j];
  return out;
}

namespace {

bool step_is_iso(const Field& F, const Matrix& s) {
  return s.square() && (s.rows() == 0 || is_invertible(F, s));
}

}  // namespace

HomSpace::HomSpace(const GridModule& M, const GridModule& N) : M_(M), N_(N) {
  if (M.grid() != N.grid()) throw std::invalid_argument("hom_space needs modules on the same grid");
  if (!(M.field() == N.field())) throw std::invalid_argument("hom_space field mismatch");
  const Grid& G = M.grid();
  const Field& F = M.field();
  const std::size_t nv = G.size(), n = G.n();

  comp_.assign(nv, kNone);
  tm_inv_.assign(nv, Matrix());
  tn_.assign(nv, Matrix());
  std::vector<std::vector<char>> tree(n, std::vector<char>(nv, 0));
  auto active = [&](std::size_t v) { return M.dim(v) > 0 && N.dim(v) > 0; };
  auto edge_iso = [&](std::size_t k, std::size_t v) {
    return step_is_iso(F, M.step(k, v)) && step_is_iso(F, N.step(k, v));
  };

  std::deque<std::size_t> queue;
  for (std::size_t s = 0; s < nv; ++s) {
    if (!active(s) || comp_[s] != kNone) continue;
    std::size_t c = roots_.size();
    roots_.push_back(s);
    offset_.push_back(nunk_);
    nunk_ += M.dim(s) * N.dim(s);
    comp_[s] = c;
    tm_inv_[s] = Matrix::identity(M.dim(s));
    tn_[s] = Matrix::identity(N.dim(s));
    queue.push_back(s);
    while (!queue.empty()) {
      std::size_t v = queue.front();
      queue.pop_front();
      for (std::size_t k = 0; k < n; ++k) {
        if (G.has_successor(v, k)) {
          std::size_t w = v + G.stride(k);
          if (comp_[w] == kNone && active(w) && edge_iso(k, v)) {
            comp_[w] = c;
            tn_[w] = mul(F, N.step(k, v), tn_[v]);
            tm_inv_[w] = mul(F, tm_inv_[v], *inverse(F, M.step(k, v)));
            tree[k][v] = 1;
            queue.push_back(w);
          }
        }
        if (G.coord_index(v, k) > 0) {
          std::size_t u = v - G.stride(k);
          if (comp_[u] == kNone && active(u) && edge_iso(k, u)) {
            comp_[u] = c;
            tn_[u] = mul(F, *inverse(F, N.step(k, u)), tn_[v]);
            tm_inv_[u] = mul(F, tm_inv_[v], M.step(k, u));
            tree[k][u] = 1;
            queue.push_back(u);
          }
        }
      }
    }
  }

  SparseEchelon ech(F, nunk_);
  SparseRow row;
  for (std::size_t k = 0; k < n; ++k) {
    for (std::size_t v = 0; v < nv; ++v) {
      if (!G.has_successor(v, k) || tree[k][v]) continue;
      std::size_t w = v + G.stride(k);
      std::size_t rn = N.dim(w), cm = M.dim(v);
      if (rn == 0 || cm == 0) continue;
      std::size_t cv = comp_[v], cw = comp_[w];
      if (cv == kNone && cw == kNone) continue;
      Matrix L1, R1, L2, R2;
      if (cv != kNone) {
        L1 = mul(F, N.step(k, v), tn_[v]);
        R1 = tm_inv_[v];
      }
      if (cw != kNone) {
        L2 = tn_[w];
        R2 = mul(F, tm_inv_[w], M.step(k, v));
      }
      for (std::size_t i = 0; i < rn; ++i) {
        for (std::size_t j = 0; j < cm; ++j) {
          row.clear();
          auto emit = [&](std::size_t base, const Matrix& L, const Matrix& R, bool negate) {
            for (std::size_t a = 0; a < L.cols(); ++a) {
              Elem la = L(i, a);
              if (!la) continue;
              for (std::size_t b = 0; b < R.rows(); ++b) {
                Elem rb = R(b, j);
                if (!rb) continue;
                Elem val = F.mul(la, rb);
                row.emplace_back(base + a * R.rows() + b, negate ? F.neg(val) : val);
              }
            }
          };
          if (cv != kNone) emit(offset_[cv], L1, R1, false);
          if (cw != kNone) emit(offset_[cw], L2, R2, true);
          std::sort(row.begin(), row.end());
          SparseRow merged;
          for (auto& e : row) {
            if (!merged.empty() && merged.back().first == e.first)
              merged.back().second = F.add(merged.back().second, e.second);
            else
              merged.push_back(e);
          }
          merged.erase(std::remove_if(merged.begin(), merged.end(),
                                      [](const auto& e) { return e.second == 0; }),
                       merged.end());
          if (!merged.empty()) ech.add_row(std::move(merged));
        }
      }
    }
  }
  free_ = ech.free_columns();
  basis_ = ech.null_basis();
}

std::vector<ModuleMorphism> HomSpace::basis() const {
  std::vector<ModuleMorphism> out;
  for (std::size_t i = 0; i < basis_.size(); ++i) out.push_back(basis_morphism(i));
  return out;
}

std::vector<Elem> HomSpace::combine(const std::vector<Elem>& coeffs) const {
  const Field& F = M_.field();
  std::vector<Elem> x(nunk_, 0);
  for (std::size_t i = 0; i < basis_.size(); ++i) {
    if (!coeffs[i]) continue;
    for (std::size_t u = 0; u < nunk_; ++u)
      if (basis_[i][u]) x[u] = F.add(x[u], F.mul(coeffs[i], basis_[i][u]));
  }
  return x;
}

Matrix HomSpace::root_block(const std::vector<Elem>& x, std::size_t c) const {
  std::size_t r = roots_[c];
  std::size_t rn = N_.dim(r), cm = M_.dim(r);
  Matrix X(rn, cm);
  std::copy(x.begin() + offset_[c], x.begin() + offset_[c] + rn * cm, X.data().begin());
  return X;
}

ModuleMorphism HomSpace::materialize(const std::vector<Elem>& x) const {
  const Field& F = M_.field();
  std::vector<Matrix> blocks(roots_.size());
  for (std::size_t c = 0; c < roots_.size(); ++c) blocks[c] = root_block(x, c);
  ModuleMorphism f{M_, N_, {}};
  f.mats.reserve(M_.grid().size());
  for (std::size_t v = 0; v < M_.grid().size(); ++v) {
    std::size_t c = comp_[v];
    if (c == kNone) f.mats.emplace_back(N_.dim(v), M_.dim(v));
    else if (roots_[c] == v) f.mats.push_back(blocks[c]);
    else f.mats.push_back(mul(F, mul(F, tn_[v], blocks[c]), tm_inv_[v]));
  }
  return f;
}

std::vector<Elem> HomSpace::coordinates(const std::vector<Elem>& x) const {
  std::vector<Elem> c(free_.size());
  for (std::size_t j = 0; j < free_.size(); ++j) c[j] = x[free_[j]];
  return c;
}

std::vector<Elem> HomSpace::unknowns_of(const ModuleMorphism& f) const {
  std::vector<Elem> x(nunk_, 0);
  for (std::size_t c = 0; c < roots_.size(); ++c) {
    const Matrix& b = f.mats[roots_[c]];
    std::copy(b.data().begin(), b.data().end(), x.begin() + offset_[c]);
  }
  return x;
}

std::vector<ModuleMorphism> hom_space(const GridModule& M, const GridModule& N) {
  return HomSpace(M, N).basis();
}

namespace {

bool roots_invertible(const HomSpace& H, const std::vector<Elem>& x) {
  const Field& F = H.source().field();
  for (std::size_t c = 0; c < H.num_components(); ++c)
    if (!is_invertible(F, H.root_block(x, c))) return false;
  return true;
}

std::optional<ModuleMorphism> accept(const HomSpace& H, const std::vector<Elem>& x) {
  if (!roots_invertible(H, x)) return std::nullopt;
  ModuleMorphism f = H.materialize(x);
  if (!check_natural(f).empty() || !is_iso(f)) return std::nullopt;
  return f;
}

}  // namespace

IsoResult is_isomorphic(const GridModule& M0, const GridModule& N0, std::uint64_t seed, int trials) {
  IsoResult res;
  if (M0.n() != N0.n() || !(M0.field() == N0.field())) return res;
  GridModule M = M0, N = N0;
  if (M.grid() != N.grid()) std::tie(M, N) = common_refinement(M0, N0);
  if (M.dims() != N.dims()) return res;
  HomSpace H(M, N);
  const Field& F = M.field();
  const std::size_t h = H.dim();
  if (M.is_zero()) {
    res.verdict = IsoVerdict::Isomorphic;
    res.witness = zero_morphism(M, N);
    return res;
  }
  if (h == 0) return res;

  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<Elem> coef(0, F.p() - 1);
  std::vector<Elem> c(h);
  for (int t = 0; t < trials; ++t) {
    for (auto& v : c) v = coef(rng);
    if (auto f = accept(H, H.combine(c))) {
      res.verdict = IsoVerdict::Isomorphic;
      res.witness = std::move(f);
      return res;
    }
  }
  // Deterministic fallback: exhaust F_p^h when small, else the {0,1}^h sub-lattice prefix.
  double space = 1;
  for (std::size_t i = 0; i < h && space <= 1e6; ++i) space *= F.p();
  bool exhaustive = space <= 65536;
  Elem base = exhaustive ? F.p() : 2;
  std::size_t budget = exhaustive ? static_cast<std::size_t>(space) : (std::size_t(1) << std::min<std::size_t>(h, 12));
  std::fill(c.begin(), c.end(), 0);
  for (std::size_t it = 0; it < budget; ++it) {
    if (auto f = accept(H, H.combine(c))) {
      res.verdict = IsoVerdict::Isomorphic;
      res.witness = std::move(f);
      return res;
    }
    for (std::size_t i = 0; i < h; ++i) {
      if (++c[i] < base) break;
      c[i] = 0;
    }
  }
  res.verdict = exhaustive ? IsoVerdict::NotIsomorphic : IsoVerdict::ProbablyNotIsomorphic;
  return res;
}

}  // namespace pm
