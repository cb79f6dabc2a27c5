// Tests for path reasoning: exhaustive path enumeration in canonical order,
// overflow-checked path counting, and decoding the highest-weight path
// behind an encoder output with deterministic tie-breaking.

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <vector>

#include "mhgrn/encoder.hpp"
#include "mhgrn/error.hpp"
#include "mhgrn/graph.hpp"
#include "mhgrn/path.hpp"
#include "mhgrn/pathreason.hpp"
#include "mhgrn/synthetic.hpp"

namespace {

// Attention stack whose scoring functions are constants, so every path of
// the same length has exactly the same weight.
mhgrn::AttentionParams constant_attention(int m, int d_s) {
  mhgrn::AttentionParams att;
  att.m = m;
  att.d_s = d_s;
  att.f_mlp.w1 = mhgrn::DenseMatrix(1, 3 + d_s);
  att.f_mlp.b1 = {0.0};
  att.f_mlp.w2 = mhgrn::DenseMatrix(1, 1);
  att.f_mlp.b2 = {0.0};
  att.g_mlp = att.f_mlp;
  att.delta_mlp.w1 = mhgrn::DenseMatrix(1, m + d_s);
  att.delta_mlp.b1 = {0.0};
  att.delta_mlp.w2 = mhgrn::DenseMatrix(1, 1);
  att.delta_mlp.b2 = {0.0};
  att.tau = mhgrn::DenseMatrix(m, m);
  return att;
}

// MLP that returns vals[t] exactly for node type t (tanh(+/-40) rounds to
// +/-1, so the hidden layer recovers the one-hot bit without error).
mhgrn::Mlp type_selector_mlp(const std::vector<double>& vals, int d_s) {
  mhgrn::Mlp mlp;
  mlp.w1 = mhgrn::DenseMatrix(3, 3 + d_s);
  for (int j = 0; j < 3; ++j) mlp.w1(j, j) = 40.0;
  mlp.b1.assign(3, 0.0);
  mlp.w2 = mhgrn::DenseMatrix(1, 3);
  for (int j = 0; j < 3; ++j) mlp.w2(0, j) = vals[j];
  mlp.b2 = {0.0};
  return mlp;
}

bool same_path(const mhgrn::ReasoningPath& a, const mhgrn::ReasoningPath& b) {
  return a.source == b.source && a.rels == b.rels &&
         a.intermediates == b.intermediates && a.target == b.target;
}

}  // namespace

TEST(EnumeratePaths, CompleteDigraphCountsAndCanonicalOrder) {
  auto g = mhgrn::complete_digraph(4);
  auto paths = mhgrn::enumerate_paths(g, 3);
  // n * (n-1)^k walks of length k: 12 + 36 + 108.
  ASSERT_EQ(paths.size(), 156u);
  std::vector<int> by_k(4, 0);
  for (const auto& p : paths) {
    ++by_k[p.k()];
    EXPECT_NO_THROW(mhgrn::validate_path(p, g));
  }
  EXPECT_EQ(by_k[1], 12);
  EXPECT_EQ(by_k[2], 36);
  EXPECT_EQ(by_k[3], 108);
  // Canonical order: strictly increasing, so every path is distinct.
  for (std::size_t i = 1; i < paths.size(); ++i)
    EXPECT_TRUE(mhgrn::path_less(paths[i - 1], paths[i]));
  // First element: the 1-hop path 0 -> 1.
  EXPECT_EQ(paths[0].source, 0);
  EXPECT_EQ(paths[0].rels, std::vector<int>{1});
  EXPECT_TRUE(paths[0].intermediates.empty());
  EXPECT_EQ(paths[0].target, 1);
}

TEST(EnumeratePaths, SourceAndTargetFilters) {
  auto g = mhgrn::complete_digraph(4);
  auto from2 = mhgrn::enumerate_paths(g, 3, std::set<int>{2});
  EXPECT_EQ(from2.size(), 39u);  // 3 + 9 + 27
  for (const auto& p : from2) EXPECT_EQ(p.source, 2);
  auto into1 = mhgrn::enumerate_paths(g, 3, std::nullopt, std::set<int>{1});
  EXPECT_EQ(into1.size(), 39u);
  for (const auto& p : into1) EXPECT_EQ(p.target, 1);
  // 0 -> 2 directly, plus 0 -> v -> 2 for v in {1, 3}.
  auto both =
      mhgrn::enumerate_paths(g, 2, std::set<int>{0}, std::set<int>{2});
  EXPECT_EQ(both.size(), 3u);
  // Multi-node filters union their members; an empty set matches nothing.
  auto from02 = mhgrn::enumerate_paths(g, 2, std::set<int>{0, 2});
  EXPECT_EQ(from02.size(), 24u);  // 2 * (3 + 9)
  for (const auto& p : from02) EXPECT_TRUE(p.source == 0 || p.source == 2);
  EXPECT_TRUE(mhgrn::enumerate_paths(g, 2, std::set<int>{}).empty());
  EXPECT_THROW(mhgrn::enumerate_paths(g, 0), mhgrn::IndexOutOfRange);
  EXPECT_THROW(mhgrn::enumerate_paths(g, 2, std::set<int>{9}),
               mhgrn::IndexOutOfRange);
}

TEST(CountPaths, MatchesEnumerationOnRandomGraph) {
  auto g = mhgrn::erdos_graph(7, 2.0, 3, 5);
  auto counts = mhgrn::count_paths(g, 3);
  auto paths = mhgrn::enumerate_paths(g, 3);
  std::vector<std::uint64_t> by_k(4, 0);
  for (const auto& p : paths) ++by_k[p.k()];
  ASSERT_EQ(counts.size(), 3u);
  EXPECT_EQ(counts[0], by_k[1]);
  EXPECT_EQ(counts[1], by_k[2]);
  EXPECT_EQ(counts[2], by_k[3]);
}

TEST(CountPaths, ClosedFormsAndEdgeCases) {
  // Complete digraph: count(k) = n * (n-1)^k, so consecutive ratios are 5.
  auto g6 = mhgrn::complete_digraph(6);
  auto c6 = mhgrn::count_paths(g6, 4);
  EXPECT_EQ(c6[0], 30u);
  for (std::size_t k = 1; k < c6.size(); ++k) EXPECT_EQ(c6[k], 5 * c6[k - 1]);
  // Two-relation chain on 3 nodes: 4, 6, 8 walks.
  auto c3 = mhgrn::count_paths(mhgrn::chain_graph(3), 3);
  EXPECT_EQ(c3, (std::vector<std::uint64_t>{4, 6, 8}));
  // Edgeless graph: all counts zero.
  auto lonely = mhgrn::make_graph(2,
                                  {mhgrn::NodeType::Question,
                                   mhgrn::NodeType::Answer},
                                  {}, {}, 1);
  EXPECT_EQ(mhgrn::count_paths(lonely, 3),
            (std::vector<std::uint64_t>{0, 0, 0}));
  EXPECT_TRUE(mhgrn::enumerate_paths(lonely, 3).empty());
}

TEST(CountPaths, ThrowsOn64BitOverflow) {
  // 26 * 25^k fits k <= 12 and overflows at k = 13.
  auto g = mhgrn::complete_digraph(26);
  auto c = mhgrn::count_paths(g, 12);
  EXPECT_EQ(c.back(), 1549720764160156250ULL);
  EXPECT_THROW(mhgrn::count_paths(g, 13), mhgrn::Overflow);
}

TEST(BruteForceZk, RejectsBadArguments) {
  auto g = mhgrn::complete_digraph(3);
  mhgrn::ModelDims dims;
  dims.d_in = 2;
  dims.d = 2;
  dims.d_out = 2;
  dims.d_s = 2;
  dims.K = 2;
  dims.m = 1;
  dims.h_att = 2;
  auto params = mhgrn::make_params(dims, 4);
  mhgrn::DenseMatrix X(3, 2);
  std::vector<double> s = {0.1, 0.2};
  EXPECT_THROW(mhgrn::brute_force_zk(g, X, s, params, 0, 2),
               mhgrn::DimMismatch);
  EXPECT_THROW(mhgrn::brute_force_zk(g, X, s, params, 3, 3),
               mhgrn::DimMismatch);
  EXPECT_THROW(
      mhgrn::brute_force_zk(g, mhgrn::DenseMatrix(3, 5), s, params, 1, 2),
      mhgrn::DimMismatch);
}

TEST(DecodePath, ConstantScoresPickTheCanonicalPath) {
  // All path weights of a given length are exactly equal, so the decoder
  // must fall back to canonical order at every tie.
  auto g = mhgrn::complete_digraph(4);  // node 0 question, node 3 answer
  mhgrn::ModelDims dims;
  dims.d_in = 3;
  dims.d = 3;
  dims.d_out = 3;
  dims.d_s = 2;
  dims.K = 2;
  dims.m = 1;
  dims.h_att = 2;
  auto params = mhgrn::make_params(dims, 11);
  params.att = constant_attention(1, 2);
  params.B_hop = mhgrn::DenseMatrix(2, 3);  // hop scores tie -> lowest k wins
  mhgrn::Rng rng(21);
  mhgrn::DenseMatrix H(4, 3);
  for (auto& v : H.data()) v = rng.uniform(-1.0, 1.0);
  std::vector<double> s = {0.3, -0.2};

  auto out = mhgrn::encode(g, H, s, params);
  auto dec = mhgrn::decode_path(g, out, s, params);
  // Only answer node is 3; tied hop weights resolve to k = 1; the canonical
  // first 1-hop path into 3 starts at node 0.
  EXPECT_EQ(dec.source, 0);
  EXPECT_EQ(dec.rels, std::vector<int>{1});
  EXPECT_TRUE(dec.intermediates.empty());
  EXPECT_EQ(dec.target, 3);
  EXPECT_EQ(dec.score, mhgrn::alpha_path(dec, g, s, params.att));
}

TEST(DecodePath, MaskedFirstHopForcesTwoHopPath) {
  // q0 -r1-> o1 -r2-> a2 with f(Other) fully masked: the only weighted path
  // into the answer is the 2-hop one from the question node.
  auto g = mhgrn::make_graph(
      3,
      {mhgrn::NodeType::Question, mhgrn::NodeType::Other,
       mhgrn::NodeType::Answer},
      {}, {{0, 1, 1}, {1, 2, 2}}, 2);
  mhgrn::ModelDims dims;
  dims.d_in = 2;
  dims.d = 2;
  dims.d_out = 2;
  dims.d_s = 2;
  dims.K = 2;
  dims.m = 2;
  dims.h_att = 2;
  auto params = mhgrn::make_params(dims, 17);
  params.att.f_mlp = type_selector_mlp({0.0, 0.0, -1e30}, 2);
  mhgrn::Rng rng(22);
  mhgrn::DenseMatrix H(3, 2);
  for (auto& v : H.data()) v = rng.uniform(-1.0, 1.0);
  std::vector<double> s = {0.5, 0.1};

  auto out = mhgrn::encode(g, H, s, params);
  EXPECT_EQ(out.d_norm[0][2], 0.0);  // 1-hop source is masked
  EXPECT_GT(out.d_norm[1][2], 0.0);
  EXPECT_EQ(out.hop_weights(2, 0), 0.0);
  EXPECT_EQ(out.hop_weights(2, 1), 1.0);

  auto dec = mhgrn::decode_path(g, out, s, params);
  EXPECT_EQ(dec.source, 0);
  EXPECT_EQ(dec.rels, (std::vector<int>{1, 2}));
  EXPECT_EQ(dec.intermediates, std::vector<int>{1});
  EXPECT_EQ(dec.target, 2);
}

TEST(DecodePath, AgreesWithExhaustiveSearch) {
  for (std::uint64_t seed : {2u, 9u, 31u}) {
    auto g = mhgrn::erdos_graph(8, 2.2, 4, seed);
    mhgrn::ModelDims dims;
    dims.d_in = 4;
    dims.d = 3;
    dims.d_out = 3;
    dims.d_s = 3;
    dims.K = 3;
    dims.m = 4;
    dims.h_att = 4;
    auto params = mhgrn::make_params(dims, seed + 100);
    mhgrn::Rng rng(seed + 200);
    mhgrn::DenseMatrix H(8, 4);
    for (auto& v : H.data()) v = rng.uniform(-1.0, 1.0);
    std::vector<double> s(3);
    for (auto& v : s) v = rng.uniform(-1.0, 1.0);

    auto out = mhgrn::encode(g, H, s, params);
    mhgrn::ReasoningPath dec;
    try {
      dec = mhgrn::decode_path(g, out, s, params);
    } catch (const mhgrn::NoPath&) {
      // Legal when the pooled answer node is unreachable; nothing to check.
      continue;
    }
    EXPECT_NO_THROW(mhgrn::validate_path(dec, g));
    // The decoded path must attain the maximum weight over all paths of its
    // length into its target.
    auto rivals = mhgrn::enumerate_paths(g, dec.k(), std::nullopt,
                                         std::set<int>{dec.target});
    double best = 0.0;
    bool found = false;
    for (const auto& p : rivals) {
      if (p.k() != dec.k()) continue;
      best = std::max(best, mhgrn::alpha_path(p, g, s, params.att));
      found = found || same_path(p, dec);
    }
    EXPECT_TRUE(found);
    EXPECT_EQ(dec.score, mhgrn::alpha_path(dec, g, s, params.att));
    EXPECT_NEAR(dec.score, best, 1e-12 * best);
    // Determinism: decoding twice yields the identical path.
    auto again = mhgrn::decode_path(g, out, s, params);
    EXPECT_TRUE(same_path(dec, again));
  }
}

TEST(DecodePath, ThrowsWhenAnswerIsUnreachable) {
  // The only answer node has an outgoing edge but nothing pointing at it.
  auto g = mhgrn::make_graph(
      2, {mhgrn::NodeType::Question, mhgrn::NodeType::Answer}, {},
      {{1, 1, 0}}, 1);
  mhgrn::ModelDims dims;
  dims.d_in = 2;
  dims.d = 2;
  dims.d_out = 2;
  dims.d_s = 2;
  dims.K = 2;
  dims.m = 1;
  dims.h_att = 2;
  auto params = mhgrn::make_params(dims, 6);
  mhgrn::DenseMatrix H(2, 2);
  H(0, 0) = 0.4;
  H(1, 1) = -0.7;
  std::vector<double> s = {0.2, 0.3};
  auto out = mhgrn::encode(g, H, s, params);
  EXPECT_THROW(mhgrn::decode_path(g, out, s, params), mhgrn::NoPath);
}
