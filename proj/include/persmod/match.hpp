#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "persmod/decomp.hpp"
#include "persmod/interleave.hpp"
#include "persmod/module.hpp"

namespace pm {

struct EpsIndecomposability {
  bool holds = false;
  // M = 0: there is no indecomposable summand, so holds is false.
  bool zero_module = false;
  std::optional<GridModule> indecomposable;
  std::vector<GridModule> trivial;  // strictly eps-trivial rest
  std::vector<GridModule> summands;
};

EpsIndecomposability is_eps_indecomposable(const GridModule& M, const Rational& eps,
                                           std::uint64_t seed = 0);

// Candidate pair with a verified certificate. Slots index the padded lists:
// left = summands of M then |N| zero slots, right = summands of N then |M|.
struct MatchEdge {
  std::size_t left, right;
  std::string kind;  // "iso", "shift", "snap", "zero"
  InterleavingCertificate certificate;
};

// Pair of real summands ruled out by a rank obstruction above eps.
struct MatchObstruction {
  std::size_t left, right;
  Rational bound;
};

struct MatchResult {
  bool matched = false;
  Rational eps;
  std::vector<GridModule> left, right;  // summands of M and N
  std::vector<MatchEdge> edges;
  std::vector<MatchObstruction> obstructions;
  // Matched pairs of real summands; nullopt on one side means a zero slot.
  std::vector<std::pair<std::optional<std::size_t>, std::optional<std::size_t>>> pairs;
  // The matching summed into an eps-interleaving M ~ N.
  std::optional<InterleavingCertificate> certificate;
};

// A maximum matching on the bipartite graph given by adjacency lists; returns
// the partner on the right of each left vertex.
std::vector<std::optional<std::size_t>> hopcroft_karp(
    std::size_t nleft, std::size_t nright, const std::vector<std::vector<std::size_t>>& adj);

// matched certifies d_B(M, N) <= eps; a failed search is not a lower bound.
MatchResult bottleneck_upper_bound(const GridModule& M, const GridModule& N, const Rational& eps,
                                   std::uint64_t seed = 0);

struct InstabilityReport {
  std::vector<GridModule> summands;  // of M
  GridModule N;                      // indecomposable
  InterleavingCertificate certificate;  // M -> N
  // rank_lower_bound(X, 0) per summand X of M
  std::vector<Rational> zero_bounds;
  // Every eps-matching between M and N has eps >= this.
  Rational bottleneck_lower;
  Rational gap;  // bottleneck_lower / certificate eps
};

InstabilityReport instability_demo(const GridModule& M, const Rational& delta,
                                   std::uint64_t seed = 0);

}  // namespace pm
