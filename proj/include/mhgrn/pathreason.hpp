#pragma once

#include <algorithm>
#include <cstdint>
#include <limits>
#include <optional>
#include <set>
#include <vector>

#include "mhgrn/attention.hpp"
#include "mhgrn/encoder.hpp"
#include "mhgrn/error.hpp"
#include "mhgrn/graph.hpp"
#include "mhgrn/matrix.hpp"
#include "mhgrn/path.hpp"

namespace mhgrn {

/// Enumerates every path (walk) of length 1..K, optionally restricted to
/// source and/or target node sets, in the canonical (length, source, rels,
/// intermediates, target) order. Intended as an oracle and for desk-scale
/// graphs; the result grows exponentially in K.
inline std::vector<ReasoningPath> enumerate_paths(
    const MultiRelGraph& g, int K,
    const std::optional<std::set<int>>& src_filter = std::nullopt,
    const std::optional<std::set<int>>& dst_filter = std::nullopt) {
  if (K < 1) throw IndexOutOfRange("enumerate_paths: K must be >= 1");
  for (const auto& filter : {src_filter, dst_filter})
    if (filter)
      for (int v : *filter)
        if (v < 0 || v >= g.n())
          throw IndexOutOfRange("enumerate_paths: filter node " +
                                std::to_string(v) + " out of range");
  std::vector<ReasoningPath> out;
  std::vector<int> rels, nodes;  // nodes excludes the source
  auto dfs = [&](auto&& self, int src, int v, int depth) -> void {
    if (depth >= 1 && (!dst_filter || dst_filter->count(v))) {
      ReasoningPath p;
      p.source = src;
      p.rels = rels;
      p.intermediates.assign(nodes.begin(), nodes.end() - 1);
      p.target = v;
      out.push_back(std::move(p));
    }
    if (depth == K) return;
    for (const auto& e : g.out_edges(v)) {
      rels.push_back(e.rel);
      nodes.push_back(e.dst);
      self(self, src, e.dst, depth + 1);
      rels.pop_back();
      nodes.pop_back();
    }
  };
  for (int j = 0; j < g.n(); ++j) {
    if (src_filter && !src_filter->count(j)) continue;
    dfs(dfs, j, j, 0);
  }
  std::sort(out.begin(), out.end(), path_less);
  return out;
}

/// Exact number of length-k walks for k = 1..K, counting parallel edges of
/// different relations separately. Computed by iterating the multiplicity
/// adjacency against an all-ones vector in unsigned 64-bit arithmetic;
/// throws Overflow as soon as any partial sum leaves the 64-bit range.
inline std::vector<std::uint64_t> count_paths(const MultiRelGraph& g, int K) {
  if (K < 1) throw IndexOutOfRange("count_paths: K must be >= 1");
  const int n = g.n();
  // mult[i][j]: number of edges j -> i across all relations.
  std::vector<std::vector<std::uint64_t>> mult(n,
                                               std::vector<std::uint64_t>(n));
  for (const auto& e : g.edges()) ++mult[e.dst][e.src];
  std::vector<std::uint64_t> v(n, 1), counts;
  for (int k = 1; k <= K; ++k) {
    std::vector<std::uint64_t> next(n, 0);
    for (int i = 0; i < n; ++i) {
      std::uint64_t acc = 0;
      for (int j = 0; j < n; ++j) {
        if (mult[i][j] == 0 || v[j] == 0) continue;
        std::uint64_t term;
        if (__builtin_mul_overflow(mult[i][j], v[j], &term) ||
            __builtin_add_overflow(acc, term, &acc))
          throw Overflow("count_paths: 64-bit overflow at k=" +
                         std::to_string(k));
      }
      next[i] = acc;
    }
    std::uint64_t total = 0;
    for (std::uint64_t x : next)
      if (__builtin_add_overflow(total, x, &total))
        throw Overflow("count_paths: 64-bit overflow at k=" +
                       std::to_string(k));
    counts.push_back(total);
    v = std::move(next);
  }
  return counts;
}

/// Literal path-sum evaluation of the hop-k aggregate: enumerates every
/// k-hop path, scores it with alpha_path, pushes the source features through
/// the per-hop relation matrices and the padding chain, and normalizes per
/// target node. Returns the n x d aggregate and the per-node weight sums.
/// This is the brute-force oracle the dynamic program is checked against.
inline std::pair<DenseMatrix, std::vector<double>> brute_force_zk(
    const MultiRelGraph& g, const DenseMatrix& X, const std::vector<double>& s,
    const ModelParams& params, int k, int K) {
  const int n = g.n();
  const int d = params.dims.d;
  if (k < 1 || k > K || K > params.dims.K)
    throw DimMismatch("brute_force_zk: bad hop counts");
  if (X.rows() != static_cast<std::size_t>(n) ||
      X.cols() != static_cast<std::size_t>(d))
    throw DimMismatch("brute_force_zk: X must be n x d");
  DenseMatrix Z(n, d);
  std::vector<double> dsum(n, 0.0);
  auto paths = enumerate_paths(g, k);
  for (const auto& p : paths) {
    if (p.k() != k) continue;
    double alpha = alpha_path(p, g, s, params.att);
    std::vector<double> v(X.row(p.source), X.row(p.source) + d);
    for (int t = 1; t <= k; ++t) v = matvec(params.W[t - 1][p.rels[t - 1]], v);
    for (int t = k + 1; t <= K; ++t) v = matvec(params.W[t - 1][0], v);
    double* zi = Z.row(p.target);
    for (int c = 0; c < d; ++c) zi[c] += alpha * v[c];
    dsum[p.target] += alpha;
  }
  for (int i = 0; i < n; ++i) {
    double* zi = Z.row(i);
    if (dsum[i] == 0.0) {
      for (int c = 0; c < d; ++c) zi[c] = 0.0;
    } else {
      for (int c = 0; c < d; ++c) zi[c] /= dsum[i];
    }
  }
  return {std::move(Z), std::move(dsum)};
}

namespace detail {

/// Backpointer cell of the decode DP.
struct ViterbiCell {
  double score = -std::numeric_limits<double>::infinity();
  int prev_node = -1;  // node the last hop came from (the source at t == 1)
  int prev_rel = 0;    // relation of the previous hop (0 at t == 1)
};

/// Reconstructs the prefix of the path ending in state (v, r) at step t.
inline ReasoningPath reconstruct(
    const std::vector<std::vector<std::vector<ViterbiCell>>>& dp, int t, int v,
    int r) {
  ReasoningPath p;
  p.target = v;
  std::vector<int> rels, nodes;
  int cv = v, cr = r;
  for (int step = t; step >= 1; --step) {
    const auto& cell = dp[step][cv][cr];
    rels.push_back(cr);
    if (step > 1) nodes.push_back(cell.prev_node);
    cv = cell.prev_node;
    cr = cell.prev_rel;
  }
  p.source = cv;
  std::reverse(rels.begin(), rels.end());
  std::reverse(nodes.begin(), nodes.end());
  p.rels = std::move(rels);
  p.intermediates = std::move(nodes);
  return p;
}

}  // namespace detail

/// Decodes the highest-weight reasoning path behind an encoder output:
/// picks the answer node with the largest pooling weight, that node's
/// strongest unmasked hop count k*, and then the alpha-maximal k*-hop path
/// into it by a max-product (Viterbi) pass over (node, last relation)
/// states. Exact ties at any step resolve to the canonical path order.
/// The returned score is the path's alpha weight.
inline ReasoningPath decode_path(const MultiRelGraph& g,
                                 const EncoderOutput& output,
                                 const std::vector<double>& s,
                                 const ModelParams& params) {
  const int n = g.n();
  const int K = static_cast<int>(output.Z.size());
  if (static_cast<int>(output.pool_weights.size()) != n)
    throw DimMismatch("decode_path: output does not match graph");

  int best_node = -1;
  for (int i = 0; i < n; ++i)
    if (best_node < 0 || output.pool_weights[i] > output.pool_weights[best_node])
      best_node = i;
  if (best_node < 0 || output.pool_weights[best_node] <= 0.0)
    throw NoPath("decode_path: no pooled answer node");

  int best_k = 0;
  for (int k = 1; k <= K; ++k) {
    if (output.d_norm[k - 1][best_node] <= 0.0) continue;
    if (best_k == 0 ||
        output.hop_weights(best_node, k - 1) >
            output.hop_weights(best_node, best_k - 1))
      best_k = k;
  }
  if (best_k == 0)
    throw NoPath("decode_path: every hop of node " +
                 std::to_string(best_node) + " is masked");

  // Forward max-product DP in log space. dp[t][v][r] is the best
  // f(source type) + sum of delta/tau terms over any t-hop prefix reaching
  // node v with last relation r. The target-side g term is common to all
  // candidates and can be ignored for the argmax.
  const int m = params.dims.m;
  std::vector<double> delta(m + 1, 0.0);
  for (int r = 1; r <= m; ++r) delta[r] = delta_score(r, s, params.att);
  std::vector<double> fscore(3);
  for (int t = 0; t < 3; ++t)
    fscore[t] = f_score(static_cast<NodeType>(t), s, params.att);

  const double ninf = -std::numeric_limits<double>::infinity();
  std::vector<std::vector<std::vector<detail::ViterbiCell>>> dp(
      best_k + 1, std::vector<std::vector<detail::ViterbiCell>>(
                      n, std::vector<detail::ViterbiCell>(m + 1)));

  auto consider = [&](int t, int v, int r, double score, int prev_node,
                      int prev_rel) {
    auto& cell = dp[t][v][r];
    if (score < cell.score) return;
    if (score > cell.score) {
      cell = {score, prev_node, prev_rel};
      return;
    }
    // Exact tie: keep whichever prefix enumerates first. Prefix order is
    // consistent with full-path order among continuations of this state.
    detail::ViterbiCell cand{score, prev_node, prev_rel};
    auto& saved = cell;
    detail::ViterbiCell backup = saved;
    saved = cand;
    ReasoningPath with_cand = detail::reconstruct(dp, t, v, r);
    saved = backup;
    ReasoningPath with_cur = detail::reconstruct(dp, t, v, r);
    if (path_less(with_cand, with_cur)) saved = cand;
  };

  for (const auto& e : g.edges())
    consider(1, e.dst, e.rel,
             fscore[static_cast<std::size_t>(g.phi()[e.src])] + delta[e.rel],
             e.src, 0);
  for (int t = 2; t <= best_k; ++t) {
    for (int v = 0; v < n; ++v) {
      for (int r = 1; r <= m; ++r) {
        if (dp[t - 1][v][r].score == ninf) continue;
        const double base = dp[t - 1][v][r].score;
        for (const auto& e : g.out_edges(v)) {
          double score =
              (base + tau_score(r, e.rel, params.att)) + delta[e.rel];
          consider(t, e.dst, e.rel, score, v, r);
        }
      }
    }
  }

  int best_rel = 0;
  ReasoningPath best_path;
  for (int r = 1; r <= m; ++r) {
    const auto& cell = dp[best_k][best_node][r];
    if (cell.score == ninf) continue;
    ReasoningPath cand = detail::reconstruct(dp, best_k, best_node, r);
    bool better = false;
    if (best_rel == 0) {
      better = true;
    } else if (cell.score > dp[best_k][best_node][best_rel].score) {
      better = true;
    } else if (cell.score == dp[best_k][best_node][best_rel].score &&
               path_less(cand, best_path)) {
      better = true;
    }
    if (better) {
      best_rel = r;
      best_path = std::move(cand);
    }
  }
  if (best_rel == 0)
    throw NoPath("decode_path: no " + std::to_string(best_k) +
                 "-hop path reaches node " + std::to_string(best_node));
  best_path.score = alpha_path(best_path, g, s, params.att);
  return best_path;
}

}  // namespace mhgrn
