#pragma once

#include <cmath>
#include <cstddef>
#include <string>
#include <vector>

#include "mhgrn/error.hpp"
#include "mhgrn/graph.hpp"
#include "mhgrn/matrix.hpp"
#include "mhgrn/mlp.hpp"
#include "mhgrn/path.hpp"
#include "mhgrn/rng.hpp"

namespace mhgrn {

/// Parameters of the structured relational attention. The weight of a k-hop
/// path factors as
///   alpha(path) = beta(rels, s) * gamma(type(source), type(target), s)
///   beta  = exp( sum_t delta(rels[t], s) + sum_t tau(rels[t] -> rels[t+1]) )
///   gamma = exp( f(type(source), s) + g(type(target), s) )
/// f and g score node types on (one-hot(type) ++ s); delta scores relations
/// on (one-hot(rel) ++ s); tau is a statement-independent m x m transition
/// table with tau(r -> r') at entry (r-1, r'-1). One-hot node-type slots are
/// ordered Question, Answer, Other.
struct AttentionParams {
  Mlp f_mlp;        // in: 3 + d_s
  Mlp g_mlp;        // in: 3 + d_s
  Mlp delta_mlp;    // in: m + d_s
  DenseMatrix tau;  // m x m
  int m = 0;
  int d_s = 0;
};

/// Glorot-initialized attention stack with h_att hidden units per MLP.
inline AttentionParams make_attention_params(int m, int d_s, int h_att,
                                             Rng& rng) {
  AttentionParams att;
  att.m = m;
  att.d_s = d_s;
  att.f_mlp = make_mlp(3 + d_s, h_att, 1, rng);
  att.g_mlp = make_mlp(3 + d_s, h_att, 1, rng);
  att.delta_mlp = make_mlp(m + d_s, h_att, 1, rng);
  att.tau = glorot(m, m, rng);
  return att;
}

namespace detail {

inline std::vector<double> type_input(NodeType t, const std::vector<double>& s,
                                      int d_s) {
  if (static_cast<int>(s.size()) != d_s)
    throw DimMismatch("attention: statement vector of " +
                      std::to_string(s.size()) + ", expected " +
                      std::to_string(d_s));
  std::vector<double> x(3 + s.size(), 0.0);
  x[static_cast<std::size_t>(t)] = 1.0;
  std::copy(s.begin(), s.end(), x.begin() + 3);
  return x;
}

inline std::vector<double> rel_input(int r, const std::vector<double>& s,
                                     int m, int d_s) {
  if (r < 1 || r > m)
    throw BadRelationId("attention: relation id " + std::to_string(r) +
                        " outside 1.." + std::to_string(m));
  if (static_cast<int>(s.size()) != d_s)
    throw DimMismatch("attention: statement vector of " +
                      std::to_string(s.size()) + ", expected " +
                      std::to_string(d_s));
  std::vector<double> x(m + s.size(), 0.0);
  x[r - 1] = 1.0;
  std::copy(s.begin(), s.end(), x.begin() + m);
  return x;
}

}  // namespace detail

/// Source-node type score f(type, s).
inline double f_score(NodeType t, const std::vector<double>& s,
                      const AttentionParams& p) {
  return p.f_mlp.scalar(detail::type_input(t, s, p.d_s));
}

/// Target-node type score g(type, s).
inline double g_score(NodeType t, const std::vector<double>& s,
                      const AttentionParams& p) {
  return p.g_mlp.scalar(detail::type_input(t, s, p.d_s));
}

/// Relation score delta(r, s).
inline double delta_score(int r, const std::vector<double>& s,
                          const AttentionParams& p) {
  return p.delta_mlp.scalar(detail::rel_input(r, s, p.m, p.d_s));
}

/// Transition score tau(r -> r_next).
inline double tau_score(int r, int r_next, const AttentionParams& p) {
  if (r < 1 || r > p.m || r_next < 1 || r_next > p.m)
    throw BadRelationId("tau_score: ids " + std::to_string(r) + ", " +
                        std::to_string(r_next));
  return p.tau(r - 1, r_next - 1);
}

/// Relation-sequence factor beta(rels, s): strictly positive.
inline double beta_score(const std::vector<int>& rels,
                         const std::vector<double>& s,
                         const AttentionParams& p) {
  if (rels.empty()) throw InvalidPath("beta_score: empty relation sequence");
  double acc = 0.0;
  for (std::size_t t = 0; t < rels.size(); ++t) {
    acc += delta_score(rels[t], s, p);
    if (t + 1 < rels.size()) acc += tau_score(rels[t], rels[t + 1], p);
  }
  return std::exp(acc);
}

/// Endpoint-type factor gamma(type_src, type_dst, s): strictly positive.
inline double gamma_score(NodeType t_src, NodeType t_dst,
                          const std::vector<double>& s,
                          const AttentionParams& p) {
  return std::exp(f_score(t_src, s, p) + g_score(t_dst, s, p));
}

/// Full path weight alpha = beta * gamma. Validates the path against g.
inline double alpha_path(const ReasoningPath& path, const MultiRelGraph& g,
                         const std::vector<double>& s,
                         const AttentionParams& p) {
  validate_path(path, g);
  return beta_score(path.rels, s, p) *
         gamma_score(g.phi()[path.source], g.phi()[path.target], s, p);
}

}  // namespace mhgrn
