#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "mhgrn/attention.hpp"
#include "mhgrn/error.hpp"
#include "mhgrn/graph.hpp"
#include "mhgrn/matrix.hpp"
#include "mhgrn/mlp.hpp"
#include "mhgrn/rng.hpp"

namespace mhgrn {

/// Model hyper-parameters. Relation ids run 1..m; id 0 is the padding
/// relation whose per-hop matrices extend paths shorter than K.
struct ModelDims {
  int d_in = 32;    // input node feature width
  int d = 32;       // message width
  int d_out = 32;   // output node width
  int d_s = 16;     // statement vector width
  int K = 2;        // maximum hop count
  int m = 34;       // relation ids 1..m
  int h_att = 16;   // hidden width of the attention MLPs
  int rho_hidden = 32;  // hidden width of the plausibility MLP
  std::string activation = "tanh";  // "tanh" | "identity" | "relu"
};

/// All learned tensors of the encoder plus the plausibility head.
struct ModelParams {
  ModelDims dims;
  std::uint64_t seed = 0;  // seed the tensors were drawn from

  std::vector<DenseMatrix> U;          // 3 type transforms, each d x d_in
  std::vector<std::vector<double>> b;  // 3 type biases, each d
  // W[t][r]: hop t+1 (t in 0..K-1), relation r in 0..m; each d x d.
  // r == 0 is the padding matrix for that hop.
  std::vector<std::vector<DenseMatrix>> W;
  DenseMatrix V;   // d_out x d_in (shortcut)
  DenseMatrix Vp;  // d_out x d   (aggregate)
  AttentionParams att;
  DenseMatrix B_hop;   // d_s x d   (hop-attention bilinear form)
  DenseMatrix P_pool;  // d_s x d_out (answer-pooling bilinear form)
  Mlp rho;             // plausibility head on (s ++ g_vec)
};

/// Deterministic parameter init: glorot weights, zero biases, drawn from a
/// single seeded stream in a fixed order (U, W, V, V', attention, B_hop,
/// P_pool, rho).
inline ModelParams make_params(const ModelDims& dims, std::uint64_t seed) {
  if (dims.d_in < 1 || dims.d < 1 || dims.d_out < 1 || dims.d_s < 1 ||
      dims.K < 1 || dims.m < 1 || dims.h_att < 1 || dims.rho_hidden < 1)
    throw DimMismatch("make_params: all dimensions must be positive");
  ModelParams p;
  p.dims = dims;
  p.seed = seed;
  Rng rng(seed);
  for (int t = 0; t < 3; ++t) p.U.push_back(glorot(dims.d, dims.d_in, rng));
  for (int t = 0; t < 3; ++t) p.b.emplace_back(dims.d, 0.0);
  p.W.resize(dims.K);
  for (int t = 0; t < dims.K; ++t)
    for (int r = 0; r <= dims.m; ++r)
      p.W[t].push_back(glorot(dims.d, dims.d, rng));
  p.V = glorot(dims.d_out, dims.d_in, rng);
  p.Vp = glorot(dims.d_out, dims.d, rng);
  p.att = make_attention_params(dims.m, dims.d_s, dims.h_att, rng);
  p.B_hop = glorot(dims.d_s, dims.d, rng);
  p.P_pool = glorot(dims.d_s, dims.d_out, rng);
  p.rho = make_mlp(dims.d_s + dims.d_out, dims.rho_hidden, 1, rng);
  return p;
}

/// Encoder switches. K == 0 and an empty activation mean "use the values
/// recorded in the params". Disabling a block substitutes its neutral
/// element (shared type transform; zero relation scores; zero node scores)
/// rather than branching the computation.
struct EncoderConfig {
  int K = 0;
  bool use_type_transform = true;
  bool use_rel_attention = true;
  bool use_node_attention = true;
  std::string activation;
};

/// Everything the encoder computes for one (graph, features, statement).
struct EncoderOutput {
  DenseMatrix X;                            // n x d transformed features
  std::vector<DenseMatrix> Z;               // K matrices n x d (normalized)
  std::vector<std::vector<double>> d_norm;  // K per-node normalizers
  DenseMatrix hop_weights;                  // n x K (rows sum to 1 or 0)
  DenseMatrix Zbar;                         // n x d hop-attended aggregate
  DenseMatrix Hprime;                       // n x d_out activated output
  std::vector<double> pool_weights;         // n (supported on answer nodes)
  std::vector<double> g_vec;                // d_out pooled graph vector
};

namespace detail {

inline void zero_mlp(Mlp& mlp) {
  mlp.w1.fill(0.0);
  mlp.w2.fill(0.0);
  std::fill(mlp.b1.begin(), mlp.b1.end(), 0.0);
  std::fill(mlp.b2.begin(), mlp.b2.end(), 0.0);
}

inline int resolve_k(const ModelParams& p, const EncoderConfig& c) {
  int k = c.K == 0 ? p.dims.K : c.K;
  if (k < 1 || k > p.dims.K)
    throw DimMismatch("encode: config K=" + std::to_string(k) +
                      " outside 1.." + std::to_string(p.dims.K));
  return k;
}

inline std::string resolve_activation(const ModelParams& p,
                                      const EncoderConfig& c) {
  return c.activation.empty() ? p.dims.activation : c.activation;
}

}  // namespace detail

/// Applies the config switches by substituting neutral parameters, so every
/// downstream stage runs the same code path whether or not a block is on.
inline ModelParams effective_params(const ModelParams& params,
                                    const EncoderConfig& config) {
  ModelParams p = params;
  if (!config.use_type_transform) {
    p.U[1] = p.U[0];
    p.U[2] = p.U[0];
    p.b[1] = p.b[0];
    p.b[2] = p.b[0];
  }
  if (!config.use_rel_attention) {
    detail::zero_mlp(p.att.delta_mlp);
    p.att.tau.fill(0.0);
  }
  if (!config.use_node_attention) {
    detail::zero_mlp(p.att.f_mlp);
    detail::zero_mlp(p.att.g_mlp);
  }
  return p;
}

inline void apply_activation(DenseMatrix& m, const std::string& name) {
  if (name == "identity") return;
  if (name == "tanh") {
    for (auto& v : m.data()) v = std::tanh(v);
    return;
  }
  if (name == "relu") {
    for (auto& v : m.data()) v = std::max(0.0, v);
    return;
  }
  throw ParseError("unknown activation '" + name + "'");
}

/// Stage 1: type-specific input transform x_i = U_phi(i) h_i + b_phi(i).
inline DenseMatrix type_transform(const DenseMatrix& H,
                                  const std::vector<NodeType>& phi,
                                  const ModelParams& params) {
  if (H.rows() != phi.size())
    throw DimMismatch("type_transform: feature rows != node count");
  if (static_cast<int>(H.cols()) != params.dims.d_in)
    throw DimMismatch("type_transform: features of width " +
                      std::to_string(H.cols()) + ", expected " +
                      std::to_string(params.dims.d_in));
  DenseMatrix X(H.rows(), params.dims.d);
  for (std::size_t i = 0; i < H.rows(); ++i) {
    const auto& U = params.U[static_cast<std::size_t>(phi[i])];
    const auto& bias = params.b[static_cast<std::size_t>(phi[i])];
    for (int c = 0; c < params.dims.d; ++c) {
      double acc = bias[c];
      for (int e = 0; e < params.dims.d_in; ++e) acc += U(c, e) * H(i, e);
      X(i, c) = acc;
    }
  }
  return X;
}

/// Result of the K-hop dynamic program before hop attention.
struct MultiHopResult {
  std::vector<DenseMatrix> Z;               // K matrices n x d, normalized
  std::vector<std::vector<double>> d_norm;  // K per-node path-weight sums
};

/// Stage 2: the K-hop relational message pass. For every hop count k and
/// node i this computes the path-weighted average of k-hop messages
///   z_i^k = (1/d_i^k) sum_{paths j -> i of length k} alpha(path) *
///           W_0^K .. W_0^{k+1} W_{r_k}^k .. W_{r_1}^1 x_j
///   d_i^k = sum over the same paths of alpha(path)
/// evaluated in O(K (m^2 n d + m E d + m n d^2)) by hop-level recursion:
/// messages M_r accumulate per final relation r, transitions mix the
/// previous hop's messages through exp(tau), and shorter paths are carried
/// up to hop K through the padding matrices W_0^t. Nodes with d_i^k == 0
/// get a zero row and are flagged by d_norm for masking downstream.
inline MultiHopResult multihop_pass(const MultiRelGraph& g,
                                    const DenseMatrix& X,
                                    const std::vector<double>& s,
                                    const ModelParams& params, int K) {
  const int n = g.n();
  const int m = params.dims.m;
  const int d = params.dims.d;
  if (g.m() > m)
    throw DimMismatch("multihop_pass: graph has relation ids beyond m");
  if (X.rows() != static_cast<std::size_t>(n) ||
      X.cols() != static_cast<std::size_t>(d))
    throw DimMismatch("multihop_pass: X must be n x d");
  if (K < 1 || K > params.dims.K)
    throw DimMismatch("multihop_pass: K outside parameter range");

  // Attention factors. exp(-1e30) underflows to exactly 0, which is what
  // implements hard masking of node types or transitions.
  std::vector<double> exp_f(3), exp_g(3);
  for (int t = 0; t < 3; ++t) {
    exp_f[t] = std::exp(f_score(static_cast<NodeType>(t), s, params.att));
    exp_g[t] = std::exp(g_score(static_cast<NodeType>(t), s, params.att));
  }
  std::vector<double> exp_delta(m + 1, 0.0);
  for (int r = 1; r <= m; ++r)
    exp_delta[r] = std::exp(delta_score(r, s, params.att));
  DenseMatrix exp_tau(m + 1, m + 1);
  for (int r = 1; r <= m; ++r)
    for (int q = 1; q <= m; ++q)
      exp_tau(r, q) = std::exp(tau_score(r, q, params.att));

  // Padding products O^k = W_0^K ... W_0^{k+1}; O^K is the identity.
  std::vector<DenseMatrix> pad(K + 1);
  pad[K] = DenseMatrix::identity(d);
  for (int k = K - 1; k >= 1; --k)
    pad[k] = matmul(pad[k + 1], params.W[k][0]);  // W[k][0] is hop k+1's pad

  // exp(f) row-scaled features seed every relation's message block.
  DenseMatrix FX = X;
  for (int i = 0; i < n; ++i) {
    double fi = exp_f[static_cast<std::size_t>(g.phi()[i])];
    for (int c = 0; c < d; ++c) FX(i, c) *= fi;
  }

  // Messages M[r] (n x d) and the parallel scalar pass M1[r] (n vector)
  // that recomputes the same recursion with identity W and all-ones input
  // to produce the normalizers.
  std::vector<DenseMatrix> M(m + 1, FX);
  std::vector<std::vector<double>> M1(m + 1);
  {
    std::vector<double> f1(n);
    for (int i = 0; i < n; ++i)
      f1[i] = exp_f[static_cast<std::size_t>(g.phi()[i])];
    for (int r = 0; r <= m; ++r) M1[r] = f1;
  }

  MultiHopResult out;
  out.Z.reserve(K);
  out.d_norm.reserve(K);

  for (int k = 1; k <= K; ++k) {
    std::vector<DenseMatrix> M_next(m + 1);
    std::vector<std::vector<double>> M1_next(m + 1);
    for (int r = 1; r <= m; ++r) {
      // Mix the previous hop's messages through the transition table
      // (first hop: the seed features, no transition factor).
      DenseMatrix S(n, d);
      std::vector<double> S1(n, 0.0);
      if (k == 1) {
        S = M[r];  // == FX for every r
        S1 = M1[r];
      } else {
        for (int q = 1; q <= m; ++q) {
          const double w = exp_tau(q, r);
          if (w == 0.0) continue;
          const auto& Mq = M[q];
          for (std::size_t idx = 0; idx < S.data().size(); ++idx)
            S.data()[idx] += w * Mq.data()[idx];
          for (int i = 0; i < n; ++i) S1[i] += w * M1[q][i];
        }
      }
      // Propagate along relation-r edges (source row -> target row).
      DenseMatrix T(n, d);
      std::vector<double> T1(n, 0.0);
      if (r <= g.m()) {
        for (const auto& e : g.edges_of_relation(r)) {
          const double* src = S.row(e.src);
          double* dst = T.row(e.dst);
          for (int c = 0; c < d; ++c) dst[c] += src[c];
          T1[e.dst] += S1[e.src];
        }
      }
      // Apply this hop's relation transform and the relation score.
      DenseMatrix Tr = matmul_transb(T, params.W[k - 1][r]);
      const double dr = exp_delta[r];
      for (auto& v : Tr.data()) v *= dr;
      for (auto& v : T1) v *= dr;
      M_next[r] = std::move(Tr);
      M1_next[r] = std::move(T1);
    }
    M_next[0] = DenseMatrix(n, d);
    M1_next[0].assign(n, 0.0);
    M = std::move(M_next);
    M1 = std::move(M1_next);

    // Aggregate hop-k messages, pad shorter paths up to hop K, and apply
    // the target-side node score.
    DenseMatrix sum(n, d);
    std::vector<double> dsum(n, 0.0);
    for (int r = 1; r <= m; ++r) {
      for (std::size_t idx = 0; idx < sum.data().size(); ++idx)
        sum.data()[idx] += M[r].data()[idx];
      for (int i = 0; i < n; ++i) dsum[i] += M1[r][i];
    }
    DenseMatrix Zk = matmul_transb(sum, pad[k]);
    std::vector<double> dk(n);
    for (int i = 0; i < n; ++i) {
      const double gi = exp_g[static_cast<std::size_t>(g.phi()[i])];
      dk[i] = gi * dsum[i];
      double* zi = Zk.row(i);
      if (dk[i] == 0.0) {
        for (int c = 0; c < d; ++c) zi[c] = 0.0;
      } else {
        const double scale = gi / dk[i];
        for (int c = 0; c < d; ++c) zi[c] *= scale;
      }
    }
    if (!is_finite(Zk) || !is_finite(dk))
      throw NonFinite("multihop_pass: non-finite aggregate at hop " +
                      std::to_string(k));
    out.Z.push_back(std::move(Zk));
    out.d_norm.push_back(std::move(dk));
  }
  return out;
}

/// Result of hop attention: per-node weights over hop counts and the
/// attended aggregate.
struct HopAttentionResult {
  DenseMatrix hop_weights;  // n x K; masked hops carry exactly 0
  DenseMatrix Zbar;         // n x d
};

/// Stage 3: softmax over unmasked hop counts of s^T B_hop z_i^k per node.
/// A node with every hop masked keeps a zero row in both outputs.
inline HopAttentionResult hop_attention(const MultiHopResult& mh,
                                        const std::vector<double>& s,
                                        const ModelParams& params) {
  const int K = static_cast<int>(mh.Z.size());
  if (K == 0) throw DimMismatch("hop_attention: no hops");
  const std::size_t n = mh.Z[0].rows();
  const int d = params.dims.d;
  if (params.B_hop.rows() != static_cast<std::size_t>(params.dims.d_s) ||
      params.B_hop.cols() != static_cast<std::size_t>(d))
    throw DimMismatch("hop_attention: B_hop must be d_s x d");
  if (s.size() != static_cast<std::size_t>(params.dims.d_s))
    throw DimMismatch("hop_attention: statement width mismatch");

  // u = s^T B_hop, so the per-(i, k) score is dot(u, z_i^k).
  std::vector<double> u(d, 0.0);
  for (int a = 0; a < params.dims.d_s; ++a)
    for (int c = 0; c < d; ++c) u[c] += s[a] * params.B_hop(a, c);

  HopAttentionResult out;
  out.hop_weights = DenseMatrix(n, K);
  out.Zbar = DenseMatrix(n, d);
  for (std::size_t i = 0; i < n; ++i) {
    std::vector<double> scores(K, 0.0);
    std::vector<unsigned char> active(K, 0);
    bool any = false;
    for (int k = 0; k < K; ++k) {
      if (mh.d_norm[k][i] > 0.0) {
        active[k] = 1;
        any = true;
        const double* zi = mh.Z[k].row(i);
        double acc = 0.0;
        for (int c = 0; c < d; ++c) acc += u[c] * zi[c];
        scores[k] = acc;
      }
    }
    if (!any) continue;  // unreachable node: zero weights, zero aggregate
    auto w = softmax_masked(scores, active);
    for (int k = 0; k < K; ++k) {
      out.hop_weights(i, k) = w[k];
      if (w[k] == 0.0) continue;
      const double* zi = mh.Z[k].row(i);
      double* zbar = out.Zbar.row(i);
      for (int c = 0; c < d; ++c) zbar[c] += w[k] * zi[c];
    }
  }
  return out;
}

/// Stage 4: h'_i = sigma(V h_i + V' zbar_i).
inline DenseMatrix activate(const DenseMatrix& H, const DenseMatrix& Zbar,
                            const ModelParams& params,
                            const std::string& activation) {
  if (H.rows() != Zbar.rows())
    throw DimMismatch("activate: row count mismatch");
  if (params.V.cols() != H.cols() || params.Vp.cols() != Zbar.cols())
    throw DimMismatch("activate: V/V' width mismatch");
  DenseMatrix shortcut = matmul_transb(H, params.V);
  DenseMatrix aggregate = matmul_transb(Zbar, params.Vp);
  for (std::size_t idx = 0; idx < shortcut.data().size(); ++idx)
    shortcut.data()[idx] += aggregate.data()[idx];
  apply_activation(shortcut, activation);
  return shortcut;
}

/// Result of answer pooling.
struct PoolResult {
  std::vector<double> pool_weights;  // length n, zero off answer nodes
  std::vector<double> g_vec;         // d_out
};

/// Stage 5: attention pooling of h'_i over answer nodes with scores
/// s^T P_pool h'_i. Throws NoAnswerNodes when the graph has no answers.
inline PoolResult pool_answer(const DenseMatrix& Hprime,
                              const std::vector<NodeType>& phi,
                              const std::vector<double>& s,
                              const ModelParams& params) {
  if (Hprime.rows() != phi.size())
    throw DimMismatch("pool_answer: row count mismatch");
  if (params.P_pool.rows() != static_cast<std::size_t>(params.dims.d_s) ||
      params.P_pool.cols() != Hprime.cols())
    throw DimMismatch("pool_answer: P_pool must be d_s x d_out");
  if (s.size() != static_cast<std::size_t>(params.dims.d_s))
    throw DimMismatch("pool_answer: statement width mismatch");
  const std::size_t n = Hprime.rows();
  const std::size_t d_out = Hprime.cols();

  std::vector<double> u(d_out, 0.0);
  for (int a = 0; a < params.dims.d_s; ++a)
    for (std::size_t c = 0; c < d_out; ++c) u[c] += s[a] * params.P_pool(a, c);

  std::vector<double> scores(n, 0.0);
  std::vector<unsigned char> active(n, 0);
  bool any = false;
  for (std::size_t i = 0; i < n; ++i) {
    if (phi[i] != NodeType::Answer) continue;
    active[i] = 1;
    any = true;
    const double* hi = Hprime.row(i);
    double acc = 0.0;
    for (std::size_t c = 0; c < d_out; ++c) acc += u[c] * hi[c];
    scores[i] = acc;
  }
  if (!any) throw NoAnswerNodes("pool_answer: graph has no answer nodes");

  PoolResult out;
  out.pool_weights = softmax_masked(scores, active);
  out.g_vec.assign(d_out, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    if (out.pool_weights[i] == 0.0) continue;
    const double* hi = Hprime.row(i);
    for (std::size_t c = 0; c < d_out; ++c)
      out.g_vec[c] += out.pool_weights[i] * hi[c];
  }
  return out;
}

/// Full encoder: type transform, K-hop message pass, hop attention,
/// activation, answer pooling.
inline EncoderOutput encode(const MultiRelGraph& g, const DenseMatrix& H,
                            const std::vector<double>& s,
                            const ModelParams& params,
                            const EncoderConfig& config = {}) {
  const ModelParams p = effective_params(params, config);
  const int K = detail::resolve_k(p, config);
  const std::string activation = detail::resolve_activation(p, config);

  EncoderOutput out;
  out.X = type_transform(H, g.phi(), p);
  MultiHopResult mh = multihop_pass(g, out.X, s, p, K);
  HopAttentionResult ha = hop_attention(mh, s, p);
  out.Hprime = activate(H, ha.Zbar, p, activation);
  PoolResult pool = pool_answer(out.Hprime, g.phi(), s, p);
  out.Z = std::move(mh.Z);
  out.d_norm = std::move(mh.d_norm);
  out.hop_weights = std::move(ha.hop_weights);
  out.Zbar = std::move(ha.Zbar);
  out.pool_weights = std::move(pool.pool_weights);
  out.g_vec = std::move(pool.g_vec);
  return out;
}

}  // namespace mhgrn
