#include "persmod/match.hpp"

#include <algorithm>
#include <deque>
#include <functional>
#include <limits>

#include "persmod/construct.hpp"
#include "persmod/errors.hpp"
#include "persmod/hom.hpp"
#include "persmod/kan.hpp"

namespace pm {

EpsIndecomposability is_eps_indecomposable(const GridModule& M, const Rational& eps,
                                           std::uint64_t seed) {
  if (eps <= 0) throw PreconditionError("is_eps_indecomposable needs eps > 0");
  EpsIndecomposability res;
  Decomposition d = decompose(M, seed);
  res.summands = d.summands;
  if (d.summands.empty()) {
    res.zero_module = true;
    return res;
  }
  std::vector<std::size_t> big;
  for (std::size_t i = 0; i < d.summands.size(); ++i)
    if (!is_strictly_eps_trivial(d.summands[i], eps)) big.push_back(i);
  if (big.size() > 1) return res;
  // with no large summand any one of them serves as the indecomposable part
  std::size_t pick = big.empty() ? d.summands.size() - 1 : big[0];
  res.holds = true;
  res.indecomposable = d.summands[pick];
  for (std::size_t i = 0; i < d.summands.size(); ++i)
    if (i != pick) res.trivial.push_back(d.summands[i]);
  return res;
}

std::vector<std::optional<std::size_t>> hopcroft_karp(
    std::size_t nleft, std::size_t nright, const std::vector<std::vector<std::size_t>>& adj) {
  constexpr std::size_t kInf = std::numeric_limits<std::size_t>::max();
  std::vector<std::size_t> matchL(nleft, kInf), matchR(nright, kInf), dist(nleft);
  auto bfs = [&] {
    std::deque<std::size_t> q;
    bool found = false;
    for (std::size_t u = 0; u < nleft; ++u) {
      dist[u] = matchL[u] == kInf ? 0 : kInf;
      if (dist[u] == 0) q.push_back(u);
    }
    while (!q.empty()) {
      std::size_t u = q.front();
      q.pop_front();
      for (std::size_t w : adj[u]) {
        std::size_t u2 = matchR[w];
        if (u2 == kInf) found = true;
        else if (dist[u2] == kInf) {
          dist[u2] = dist[u] + 1;
          q.push_back(u2);
        }
      }
    }
    return found;
  };
  std::function<bool(std::size_t)> dfs = [&](std::size_t u) {
    for (std::size_t w : adj[u]) {
      std::size_t u2 = matchR[w];
      if (u2 == kInf || (dist[u2] == dist[u] + 1 && dfs(u2))) {
        matchL[u] = w;
        matchR[w] = u;
        return true;
      }
    }
    dist[u] = kInf;
    return false;
  };
  while (bfs())
    for (std::size_t u = 0; u < nleft; ++u)
      if (matchL[u] == kInf) dfs(u);
  std::vector<std::optional<std::size_t>> out(nleft);
  for (std::size_t u = 0; u < nleft; ++u)
    if (matchL[u] != kInf) out[u] = matchL[u];
  return out;
}

namespace {

std::optional<InterleavingCertificate> verified(InterleavingCertificate c) {
  if (!verify_certificate(c)) return std::nullopt;
  return c;
}

InterleavingCertificate iso_between(const GridModule& X, const GridModule& Y, const ModuleMorphism& w) {
  return relabel(iso_certificate(w), X, Y);
}

// Certificate toolbox for a pair of summands, cheapest first.
std::optional<MatchEdge> find_edge(const GridModule& X, const GridModule& Y, const Rational& eps,
                                   std::uint64_t seed) {
  if (auto r = is_isomorphic(X, Y, seed)) {
    if (auto c = verified(iso_between(X, Y, *r.witness))) return MatchEdge{0, 0, "iso", *c};
  }
  if (eps == 0) return std::nullopt;
  GridModule sx = simplify(X), sy = simplify(Y);
  // X[s] has its support moved by -s
  Rational s = sx.grid().axis(0).front() - sy.grid().axis(0).front();
  if (s != 0 && abs(s) <= eps) {
    GridModule Xs = shift(X, s);
    if (auto r = is_isomorphic(Xs, Y, seed)) {
      auto c = compose_certificates(shift_certificate(X, s, eps), iso_between(Xs, Y, *r.witness));
      if (auto v = verified(c)) return MatchEdge{0, 0, "shift", *v};
    }
  }
  Rational h = eps / 2;
  h.canonicalize();
  auto cx = snap_certificate(X, h), cy = snap_certificate(Y, h);
  if (auto r = is_isomorphic(cx.N, cy.N, seed)) {
    auto c = compose_certificates(compose_certificates(cx, iso_between(cx.N, cy.N, *r.witness)),
                                  reverse(cy));
    if (auto v = verified(c)) return MatchEdge{0, 0, "snap", *v};
  }
  return std::nullopt;
}

std::optional<InterleavingCertificate> zero_edge(const GridModule& X, const Rational& eps) {
  if (eps == 0) return std::nullopt;
  auto r = triviality_radius(X);
  if (!r || *r > 2 * eps) return std::nullopt;
  return verified(zero_certificate(X, eps));
}

// direct_sum(parts) -> direct_sum(parts in the given order), all on one grid.
ModuleMorphism permutation_iso(const std::vector<GridModule>& parts,
                               const std::vector<std::size_t>& order, const Grid& grid,
                               const Field& F) {
  std::vector<GridModule> perm;
  for (std::size_t i : order) perm.push_back(parts[i]);
  ModuleMorphism P{direct_sum(parts, grid, F), direct_sum(perm, grid, F), {}};
  for (std::size_t v = 0; v < grid.size(); ++v) {
    std::vector<std::size_t> off(parts.size() + 1, 0);
    for (std::size_t i = 0; i < parts.size(); ++i) off[i + 1] = off[i] + parts[i].dim(v);
    Matrix m(off.back(), off.back());
    std::size_t row = 0;
    for (std::size_t i : order)
      for (std::size_t r = 0; r < parts[i].dim(v); ++r) m(row++, off[i] + r) = 1;
    P.mats.push_back(std::move(m));
  }
  return P;
}

}  // namespace

MatchResult bottleneck_upper_bound(const GridModule& M, const GridModule& N, const Rational& eps,
                                   std::uint64_t seed) {
  if (eps < 0) throw PreconditionError("bottleneck_upper_bound needs eps >= 0");
  if (M.n() != N.n()) throw PreconditionError("bottleneck_upper_bound needs equal n");
  MatchResult res;
  res.eps = eps;
  Decomposition dM = decompose(M, seed), dN = decompose(N, seed);
  res.left = dM.summands;
  res.right = dN.summands;
  const std::size_t m = res.left.size(), n = res.right.size(), tot = m + n;

  std::vector<std::vector<std::size_t>> adj(tot);
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      if (auto e = find_edge(res.left[i], res.right[j], eps, seed + i * n + j)) {
        e->left = i;
        e->right = j;
        res.edges.push_back(std::move(*e));
        adj[i].push_back(j);
      } else {
        Rational b = rank_lower_bound(res.left[i], res.right[j]);
        if (b > eps) res.obstructions.push_back({i, j, b});
      }
    }
  for (std::size_t i = 0; i < m; ++i)
    if (auto c = zero_edge(res.left[i], eps)) {
      res.edges.push_back({i, n + i, "zero", *c});
      for (std::size_t j = n; j < tot; ++j) adj[i].push_back(j);
    }
  for (std::size_t j = 0; j < n; ++j)
    if (auto c = zero_edge(res.right[j], eps)) {
      res.edges.push_back({m + j, j, "zero", reverse(*c)});
      for (std::size_t i = m; i < tot; ++i) adj[i].push_back(j);
    }
  for (std::size_t i = m; i < tot; ++i)
    for (std::size_t j = n; j < tot; ++j) adj[i].push_back(j);

  auto match = hopcroft_karp(tot, tot, adj);
  for (const auto& w : match)
    if (!w) return res;
  res.matched = true;

  // Assemble: M ~ sum X (+ 0) ~ sum of partners ~ N, in M's summand order.
  auto edge_cert = [&](std::size_t i, std::size_t j) -> const InterleavingCertificate& {
    for (const auto& e : res.edges)
      if ((e.left == i && e.right == j) || (e.kind == "zero" && i < m && e.left == i && j >= n) ||
          (e.kind == "zero" && j < n && e.right == j && i >= m))
        return e.certificate;
    throw VerificationError("matched pair without a certificate");
  };
  std::vector<InterleavingCertificate> blocks;
  std::vector<std::size_t> order;
  for (std::size_t i = 0; i < m; ++i) {
    std::size_t j = *match[i];
    res.pairs.push_back({i, j < n ? std::optional<std::size_t>(j) : std::nullopt});
    blocks.push_back(edge_cert(i, j));
    if (j < n) order.push_back(j);
  }
  for (std::size_t i = m; i < tot; ++i) {
    std::size_t j = *match[i];
    if (j >= n) continue;
    res.pairs.push_back({std::nullopt, j});
    blocks.push_back(edge_cert(i, j));
    order.push_back(j);
  }
  InterleavingCertificate mid;
  if (blocks.empty()) {
    mid = relabel(zero_certificate(GridModule::zero(M.grid(), M.field()), eps),
                  dM.witness.target, dN.witness.target);
  } else {
    mid = weaken(blocks[0], eps);
    for (std::size_t b = 1; b < blocks.size(); ++b) mid = block_sum(mid, weaken(blocks[b], eps));
  }
  auto cM = iso_certificate(dM.witness);
  auto perm = permutation_iso(dN.summands, order, N.grid(), N.field());
  auto cN = compose_certificates(iso_certificate(dN.witness), iso_certificate(perm));
  auto full = compose_certificates(compose_certificates(cM, mid), reverse(cN));
  require_verified(full, "bottleneck_upper_bound");
  res.certificate = std::move(full);
  return res;
}

InstabilityReport instability_demo(const GridModule& M, const Rational& delta, std::uint64_t seed) {
  if (delta <= 0) throw PreconditionError("instability_demo needs delta > 0");
  InstabilityReport rep;
  rep.summands = decompose(M, seed).summands;
  std::size_t large = 0;
  for (const auto& X : rep.summands) {
    rep.zero_bounds.push_back(rank_lower_bound(X, GridModule::zero(X.grid(), X.field())));
    if (rep.zero_bounds.back() > 0) ++large;
  }
  if (large < 2) throw PreconditionError("instability_demo needs two summands far from zero");

  auto a = approximate_indecomposable(M, delta, seed);
  rep.N = a.module;
  rep.certificate = a.certificate;
  if (!(rep.certificate.eps < delta)) throw VerificationError("instability_demo: certificate not below delta");

  // N is indecomposable, so a matching pairs at most one summand of M with N
  // and the others with zero. Pairing everything with zero is no cheaper.
  const std::size_t k = rep.summands.size();
  std::optional<Rational> best;
  for (std::size_t i = 0; i < k; ++i) {
    Rational worst = 0;
    for (std::size_t j = 0; j < k; ++j)
      if (j != i) worst = std::max(worst, rep.zero_bounds[j]);
    if (!best || worst < *best) best = worst;
  }
  rep.bottleneck_lower = *best;
  rep.gap = rep.certificate.eps > 0 ? Rational(rep.bottleneck_lower / rep.certificate.eps) : Rational(0);
  rep.gap.canonicalize();
  return rep;
}

}  // namespace pm
