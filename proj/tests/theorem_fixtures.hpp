#pragma once

// Random instances for the encoder-reproduces-K-hop-relation-network
// equivalence: a chain of K question nodes feeding every answer guarantees a
// question-sourced path of every length 1..K per answer, which the K-hop
// relation network requires. Shared by the unit tests and the acceptance
// gate.

#include <cstdint>
#include <vector>

#include "mhgrn/baselines.hpp"
#include "mhgrn/graph.hpp"
#include "mhgrn/rng.hpp"

namespace theorem {

struct TheoremInstance {
  mhgrn::MultiRelGraph g;
  mhgrn::RnParams rn;
  int K;
};

inline TheoremInstance random_theorem_instance(std::uint64_t seed,
                                               int force_d2 = -1) {
  mhgrn::Rng rng(seed);
  const int K = 1 + static_cast<int>(rng.next_below(3));
  const int d1 = 2 + static_cast<int>(rng.next_below(3));
  const int d2 =
      force_d2 >= 0 ? force_d2 : 1 + static_cast<int>(rng.next_below(3));
  const int d3 = 2 + static_cast<int>(rng.next_below(2));
  const int m = 2 + static_cast<int>(rng.next_below(3));
  const int n_ans = 1 + static_cast<int>(rng.next_below(2));
  const int n_other = static_cast<int>(rng.next_below(3));
  const int n = K + n_ans + n_other;

  std::vector<mhgrn::NodeType> phi(n, mhgrn::NodeType::Other);
  for (int i = 0; i < K; ++i) phi[i] = mhgrn::NodeType::Question;
  for (int i = K; i < K + n_ans; ++i) phi[i] = mhgrn::NodeType::Answer;

  auto rel = [&] { return 1 + static_cast<int>(rng.next_below(m)); };
  std::vector<mhgrn::Edge> edges;
  // Question chain q_{K-1} -> ... -> q_0, then q_0 into every answer, which
  // guarantees a question-sourced path of every length 1..K per answer.
  for (int t = 1; t < K; ++t) edges.push_back({t, rel(), t - 1});
  for (int a = K; a < K + n_ans; ++a) edges.push_back({0, rel(), a});
  const int extras = static_cast<int>(rng.next_below(6));
  for (int e = 0; e < extras; ++e) {
    int src = static_cast<int>(rng.next_below(n));
    int dst = static_cast<int>(rng.next_below(n));
    if (src == dst) continue;
    edges.push_back({src, rel(), dst});
  }
  TheoremInstance inst{
      mhgrn::make_graph(n, std::move(phi), {}, std::move(edges), m),
      mhgrn::make_rn_params(n, d1, d2, d3, m, seed + 5000), K};
  return inst;
}

}  // namespace theorem
