#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "mhgrn/encoder.hpp"
#include "mhgrn/error.hpp"
#include "mhgrn/graph.hpp"
#include "mhgrn/matrix.hpp"
#include "mhgrn/mlp.hpp"
#include "mhgrn/pathreason.hpp"
#include "mhgrn/rng.hpp"

namespace mhgrn {

/// One graph-convolution layer with a weight matrix per relation:
///   h'_i = sigma( (sum_r |N_i^r|)^-1 * sum_r sum_{j in N_i^r} W_r h_j )
/// where N_i^r is the set of relation-r in-neighbors of i. Nodes without
/// in-neighbors output sigma(0).
inline DenseMatrix rgcn_layer(const DenseMatrix& H, const MultiRelGraph& g,
                              const std::vector<DenseMatrix>& W_per_rel,
                              const std::string& sigma) {
  const int n = g.n();
  const std::size_t d = H.cols();
  if (H.rows() != static_cast<std::size_t>(n))
    throw DimMismatch("rgcn_layer: feature rows != node count");
  if (static_cast<int>(W_per_rel.size()) != g.m())
    throw DimMismatch("rgcn_layer: need one weight matrix per relation");
  for (const auto& w : W_per_rel)
    if (w.rows() != d || w.cols() != d)
      throw DimMismatch("rgcn_layer: weight matrices must be d x d");

  DenseMatrix acc(n, d);
  std::vector<int> indeg(n, 0);
  for (int r = 1; r <= g.m(); ++r) {
    // Pool relation-r in-neighbors, then push through that relation's
    // transform (row convention: rows times W^T).
    DenseMatrix pooled(n, d);
    bool used = false;
    for (const auto& e : g.edges_of_relation(r)) {
      const double* src = H.row(e.src);
      double* dst = pooled.row(e.dst);
      for (std::size_t c = 0; c < d; ++c) dst[c] += src[c];
      ++indeg[e.dst];
      used = true;
    }
    if (!used) continue;
    DenseMatrix moved = matmul_transb(pooled, W_per_rel[r - 1]);
    for (std::size_t idx = 0; idx < acc.data().size(); ++idx)
      acc.data()[idx] += moved.data()[idx];
  }
  for (int i = 0; i < n; ++i) {
    if (indeg[i] == 0) continue;
    double* row = acc.row(i);
    for (std::size_t c = 0; c < d; ++c) row[c] /= indeg[i];
  }
  apply_activation(acc, sigma);
  return acc;
}

/// Single-hop relation network: mean over all question-to-answer edges
/// (j, r, i) of MLP(h_j ++ e_r ++ h_i). rel_emb holds one row per relation
/// id, row r-1 for relation r.
inline std::vector<double> rn_encode(const MultiRelGraph& g,
                                     const DenseMatrix& H,
                                     const DenseMatrix& rel_emb,
                                     const Mlp& mlp) {
  const std::size_t d1 = H.cols();
  const std::size_t d2 = rel_emb.cols();
  if (H.rows() != static_cast<std::size_t>(g.n()))
    throw DimMismatch("rn_encode: feature rows != node count");
  if (rel_emb.rows() < static_cast<std::size_t>(g.m()))
    throw DimMismatch("rn_encode: embedding rows < relation count");
  if (mlp.w1.cols() != d1 + d2 + d1)
    throw DimMismatch("rn_encode: MLP input width != d1 + d2 + d1");

  std::vector<double> out(mlp.w2.rows(), 0.0);
  int count = 0;
  std::vector<double> in(d1 + d2 + d1);
  for (const auto& e : g.edges()) {
    if (g.phi()[e.src] != NodeType::Question) continue;
    if (g.phi()[e.dst] != NodeType::Answer) continue;
    const double* hj = H.row(e.src);
    const double* er = rel_emb.row(e.rel - 1);
    const double* hi = H.row(e.dst);
    std::copy(hj, hj + d1, in.begin());
    std::copy(er, er + d2, in.begin() + d1);
    std::copy(hi, hi + d1, in.begin() + d1 + d2);
    auto y = mlp.forward(in);
    for (std::size_t c = 0; c < out.size(); ++c) out[c] += y[c];
    ++count;
  }
  if (count == 0)
    throw NoTriples("rn_encode: no question-to-answer edges to pool");
  for (auto& v : out) v /= count;
  return out;
}

/// Parameters of a K-hop relation network: a projection over the
/// concatenation (source features ++ composed relation embedding ++ target
/// features), partitioned W_tilde = [W1 | W2 | W3] with widths
/// (d1, d2, d1), plus relation embeddings (row r-1 for relation r) and node
/// features.
struct RnParams {
  DenseMatrix W_tilde;  // d3 x (d1 + d2 + d1)
  DenseMatrix E_tilde;  // m x d2
  DenseMatrix H_tilde;  // n x d1
};

/// Deterministic random RnParams, drawn in the order W, E, H.
inline RnParams make_rn_params(int n, int d1, int d2, int d3, int m,
                               std::uint64_t seed) {
  if (n < 1 || d1 < 1 || d2 < 0 || d3 < 1 || m < 1)
    throw DimMismatch("make_rn_params: bad dimensions");
  Rng rng(seed);
  RnParams rn;
  rn.W_tilde = glorot(d3, d1 + d2 + d1, rng);
  rn.E_tilde = glorot(m, d2, rng);
  rn.H_tilde = DenseMatrix(n, d1);
  for (auto& v : rn.H_tilde.data()) v = rng.uniform(-1.0, 1.0);
  return rn;
}

namespace detail {

inline void check_rn_params(const MultiRelGraph& g, const RnParams& rn) {
  const std::size_t d1 = rn.H_tilde.cols();
  const std::size_t d2 = rn.E_tilde.cols();
  if (rn.H_tilde.rows() != static_cast<std::size_t>(g.n()))
    throw DimMismatch("khop_rn: H rows != node count");
  if (rn.E_tilde.rows() < static_cast<std::size_t>(g.m()))
    throw DimMismatch("khop_rn: embedding rows < relation count");
  if (rn.W_tilde.cols() != d1 + d2 + d1)
    throw DimMismatch("khop_rn: W columns != d1 + d2 + d1");
}

}  // namespace detail

/// K-hop relation network, evaluated by direct path enumeration (an oracle
/// for small graphs). Sums, over every path of length k <= K from a question
/// node j to an answer node i,
///   beta~ * W_tilde (h~_j ++ (e~_{r_1} o ... o e~_{r_k}) ++ h~_i)
/// with elementwise product o and pooling weight
///   beta~ = 1 / (K * |A| * #{length-k question-sourced paths into i}).
/// Throws NoPath if any (answer, k) pair has no question-sourced path, since
/// its pooling weight would be undefined.
inline std::vector<double> khop_rn(const MultiRelGraph& g, const RnParams& rn,
                                   int K) {
  detail::check_rn_params(g, rn);
  if (K < 1) throw IndexOutOfRange("khop_rn: K must be >= 1");
  const std::size_t d1 = rn.H_tilde.cols();
  const std::size_t d2 = rn.E_tilde.cols();
  auto answers = g.answer_nodes();
  if (answers.empty()) throw NoAnswerNodes("khop_rn: no answer nodes");

  auto paths = enumerate_paths(g, K);
  // Question-sourced path counts per (target, length).
  std::vector<std::vector<int>> cnt(g.n(), std::vector<int>(K + 1, 0));
  for (const auto& p : paths)
    if (g.phi()[p.source] == NodeType::Question) ++cnt[p.target][p.k()];
  for (int i : answers)
    for (int k = 1; k <= K; ++k)
      if (cnt[i][k] == 0)
        throw NoPath("khop_rn: no " + std::to_string(k) +
                     "-hop question path into answer node " +
                     std::to_string(i));

  std::vector<double> out(rn.W_tilde.rows(), 0.0);
  std::vector<double> in(d1 + d2 + d1);
  for (const auto& p : paths) {
    if (g.phi()[p.source] != NodeType::Question) continue;
    if (g.phi()[p.target] != NodeType::Answer) continue;
    const double beta =
        1.0 / (static_cast<double>(K) * static_cast<double>(answers.size()) *
               static_cast<double>(cnt[p.target][p.k()]));
    std::vector<double> prod(d2, 1.0);
    for (int r : p.rels)
      for (std::size_t c = 0; c < d2; ++c) prod[c] *= rn.E_tilde(r - 1, c);
    const double* hj = rn.H_tilde.row(p.source);
    const double* hi = rn.H_tilde.row(p.target);
    std::copy(hj, hj + d1, in.begin());
    std::copy(prod.begin(), prod.end(), in.begin() + d1);
    std::copy(hi, hi + d1, in.begin() + d1 + d2);
    auto y = matvec(rn.W_tilde, in);
    for (std::size_t c = 0; c < out.size(); ++c) out[c] += beta * y[c];
  }
  return out;
}

namespace detail {

/// MLP returning vals[t] exactly for node type t: the first layer recovers
/// the type one-hot through saturated tanh (tanh(40) rounds to 1.0), the
/// second selects the value. Independent of the statement entries.
inline Mlp exact_type_mlp(const std::vector<double>& vals, int d_s) {
  Mlp mlp;
  mlp.w1 = DenseMatrix(3, 3 + d_s);
  for (int j = 0; j < 3; ++j) mlp.w1(j, j) = 40.0;
  mlp.b1.assign(3, 0.0);
  mlp.w2 = DenseMatrix(1, 3);
  for (int j = 0; j < 3; ++j) mlp.w2(0, j) = vals[j];
  mlp.b2 = {0.0};
  return mlp;
}

}  // namespace detail

/// Builds encoder parameters under which the encoder computes exactly the
/// K-hop relation network over any graph (paired with rn.H_tilde as the
/// feature matrix and any statement vector):
///   - inputs are lifted to (h ++ 1) so the relation transforms
///     diag(1 ++ e~_r) compose relation embeddings by elementwise product,
///   - padding transforms are the identity,
///   - V and V' split W_tilde back into its three blocks,
///   - relation scores are neutral and node scores pass messages only from
///     question nodes to answer nodes (exact -1e30 masking),
///   - hop attention and answer pooling are uniform, sigma is the identity.
inline std::pair<ModelParams, EncoderConfig> construct_equiv_params(
    const RnParams& rn, int K) {
  if (K < 1) throw IndexOutOfRange("construct_equiv_params: K must be >= 1");
  const int d1 = static_cast<int>(rn.H_tilde.cols());
  const int d2 = static_cast<int>(rn.E_tilde.cols());
  const int d3 = static_cast<int>(rn.W_tilde.rows());
  const int m = static_cast<int>(rn.E_tilde.rows());
  if (rn.W_tilde.cols() != static_cast<std::size_t>(d1 + d2 + d1))
    throw DimMismatch("construct_equiv_params: W columns != d1 + d2 + d1");

  ModelParams p;
  p.dims.d_in = d1;
  p.dims.d = d1 + d2;
  p.dims.d_out = d3;
  p.dims.d_s = 1;
  p.dims.K = K;
  p.dims.m = m;
  p.dims.h_att = 3;
  p.dims.rho_hidden = 1;
  p.dims.activation = "identity";

  DenseMatrix lift(d1 + d2, d1);  // [I; 0]
  for (int c = 0; c < d1; ++c) lift(c, c) = 1.0;
  std::vector<double> bias(d1 + d2, 0.0);  // [0; 1]
  for (int c = d1; c < d1 + d2; ++c) bias[c] = 1.0;
  p.U = {lift, lift, lift};
  p.b = {bias, bias, bias};

  p.W.resize(K);
  for (int t = 0; t < K; ++t) {
    p.W[t].push_back(DenseMatrix::identity(d1 + d2));  // padding
    for (int r = 1; r <= m; ++r) {
      DenseMatrix w(d1 + d2, d1 + d2);  // diag(1 ++ e~_r)
      for (int c = 0; c < d1; ++c) w(c, c) = 1.0;
      for (int c = 0; c < d2; ++c) w(d1 + c, d1 + c) = rn.E_tilde(r - 1, c);
      p.W[t].push_back(std::move(w));
    }
  }

  // W_tilde = [W1 | W2 | W3]: the shortcut takes W3, the aggregate [W1, W2].
  p.V = DenseMatrix(d3, d1);
  p.Vp = DenseMatrix(d3, d1 + d2);
  for (int rr = 0; rr < d3; ++rr) {
    for (int c = 0; c < d1 + d2; ++c) p.Vp(rr, c) = rn.W_tilde(rr, c);
    for (int c = 0; c < d1; ++c) p.V(rr, c) = rn.W_tilde(rr, d1 + d2 + c);
  }

  p.att.m = m;
  p.att.d_s = 1;
  p.att.f_mlp = detail::exact_type_mlp({0.0, -1e30, -1e30}, 1);
  p.att.g_mlp = detail::exact_type_mlp({-1e30, 0.0, -1e30}, 1);
  p.att.delta_mlp = detail::exact_type_mlp({0.0, 0.0, 0.0}, 1);
  p.att.delta_mlp.w1 = DenseMatrix(3, m + 1);
  p.att.tau = DenseMatrix(m, m);
  p.B_hop = DenseMatrix(1, d1 + d2);
  p.P_pool = DenseMatrix(1, d3);
  p.rho = Mlp{DenseMatrix(1, 1 + d3), {0.0}, DenseMatrix(1, 1), {0.0}};

  EncoderConfig config;
  config.K = K;
  config.use_rel_attention = false;
  config.activation = "identity";
  return {std::move(p), config};
}

}  // namespace mhgrn
