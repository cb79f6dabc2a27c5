#pragma once

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "mhgrn/encoder.hpp"
#include "mhgrn/error.hpp"
#include "mhgrn/graph.hpp"
#include "mhgrn/matrix.hpp"

namespace mhgrn {

/// One answer option: its statement vector, evidence subgraph, and node
/// features.
struct QaOption {
  std::vector<double> s;
  MultiRelGraph g;
  DenseMatrix H;
};

/// A multiple-choice instance. Build through make_qa_instance, which
/// enforces at least two options and a valid correct index.
struct QaInstance {
  std::vector<QaOption> options;
  int correct = 0;
};

inline QaInstance make_qa_instance(std::vector<QaOption> options,
                                   int correct) {
  if (options.size() < 2)
    throw IndexOutOfRange("make_qa_instance: need at least 2 options, got " +
                          std::to_string(options.size()));
  if (correct < 0 || correct >= static_cast<int>(options.size()))
    throw IndexOutOfRange("make_qa_instance: correct index " +
                          std::to_string(correct) + " out of range");
  return QaInstance{std::move(options), correct};
}

/// Plausibility score of one option: a two-layer MLP on (s ++ g_vec).
inline double plausibility(const std::vector<double>& s,
                           const std::vector<double>& g_vec,
                           const ModelParams& params) {
  if (params.rho.w1.cols() != s.size() + g_vec.size())
    throw DimMismatch("plausibility: head expects input width " +
                      std::to_string(params.rho.w1.cols()) + ", got " +
                      std::to_string(s.size() + g_vec.size()));
  std::vector<double> in(s.size() + g_vec.size());
  std::copy(s.begin(), s.end(), in.begin());
  std::copy(g_vec.begin(), g_vec.end(), in.begin() + s.size());
  return params.rho.scalar(in);
}

/// Encodes every option and returns its plausibility score.
inline std::vector<double> option_scores(const QaInstance& instance,
                                         const ModelParams& params,
                                         const EncoderConfig& config = {}) {
  std::vector<double> scores;
  scores.reserve(instance.options.size());
  for (const auto& opt : instance.options) {
    auto out = encode(opt.g, opt.H, opt.s, params, config);
    scores.push_back(plausibility(opt.s, out.g_vec, params));
  }
  return scores;
}

/// Cross-entropy of the correct option under a softmax over scores,
/// computed with max subtraction so large scores cannot overflow.
inline double qa_loss(const std::vector<double>& scores, int correct) {
  if (scores.size() < 2)
    throw IndexOutOfRange("qa_loss: need at least 2 scores");
  if (correct < 0 || correct >= static_cast<int>(scores.size()))
    throw IndexOutOfRange("qa_loss: correct index out of range");
  const double top = *std::max_element(scores.begin(), scores.end());
  double sum = 0.0;
  for (double v : scores) sum += std::exp(v - top);
  return -(scores[correct] - top) + std::log(sum);
}

/// Argmax prediction; exact ties resolve to the lowest option index.
inline int predict(const QaInstance& instance, const ModelParams& params,
                   const EncoderConfig& config = {}) {
  auto scores = option_scores(instance, params, config);
  int best = 0;
  for (int a = 1; a < static_cast<int>(scores.size()); ++a)
    if (scores[a] > scores[best]) best = a;
  return best;
}

/// Pointers to every scalar parameter, in the fixed traversal order used by
/// the finite-difference trainer: U, b, W, V, V', attention (f, g, delta
/// MLPs, then tau), B_hop, P_pool, rho. The pointers alias the given params.
inline std::vector<double*> param_pointers(ModelParams& p) {
  std::vector<double*> out;
  auto add_matrix = [&](DenseMatrix& m) {
    for (auto& v : m.data()) out.push_back(&v);
  };
  auto add_vector = [&](std::vector<double>& v) {
    for (auto& x : v) out.push_back(&x);
  };
  auto add_mlp = [&](Mlp& mlp) {
    add_matrix(mlp.w1);
    add_vector(mlp.b1);
    add_matrix(mlp.w2);
    add_vector(mlp.b2);
  };
  for (auto& u : p.U) add_matrix(u);
  for (auto& b : p.b) add_vector(b);
  for (auto& hop : p.W)
    for (auto& w : hop) add_matrix(w);
  add_matrix(p.V);
  add_matrix(p.Vp);
  add_mlp(p.att.f_mlp);
  add_mlp(p.att.g_mlp);
  add_mlp(p.att.delta_mlp);
  add_matrix(p.att.tau);
  add_matrix(p.B_hop);
  add_matrix(p.P_pool);
  add_mlp(p.rho);
  return out;
}

/// Mean qa_loss of a batch under the given parameters.
inline double batch_loss(const ModelParams& params,
                         const std::vector<QaInstance>& batch,
                         const EncoderConfig& config = {}) {
  if (batch.empty()) throw IndexOutOfRange("batch_loss: empty batch");
  double total = 0.0;
  for (const auto& inst : batch)
    total += qa_loss(option_scores(inst, params, config), inst.correct);
  return total / static_cast<double>(batch.size());
}

namespace detail {

inline int fd_thread_count() {
  const char* env = std::getenv("MHGRN_THREADS");
  if (env == nullptr) return 1;
  int n = std::atoi(env);
  return n < 1 ? 1 : n;
}

}  // namespace detail

/// One full-batch training step with central finite differences: every
/// scalar parameter p gets gradient (L(p+eps) - L(p-eps)) / (2 eps) and the
/// update p -= lr * grad. Costs two forward passes per parameter, so the
/// parameter count is capped. Returns the updated parameters and the
/// pre-step batch loss. MHGRN_THREADS splits the parameter sweep.
inline std::pair<ModelParams, double> fd_train_step(
    const ModelParams& params, const std::vector<QaInstance>& batch,
    double eps = 1e-5, double lr = 0.05, int param_cap = 5000,
    const EncoderConfig& config = {}) {
  if (eps <= 0.0 || lr < 0.0)
    throw IndexOutOfRange("fd_train_step: eps must be > 0 and lr >= 0");
  ModelParams probe = params;
  const std::size_t count = param_pointers(probe).size();
  if (count > static_cast<std::size_t>(param_cap))
    throw ParamBudgetExceeded("fd_train_step: " + std::to_string(count) +
                              " parameters exceed the cap of " +
                              std::to_string(param_cap));
  const double loss_before = batch_loss(params, batch, config);

  std::vector<double> grad(count, 0.0);
  const int threads =
      std::min<int>(detail::fd_thread_count(), static_cast<int>(count));
  auto sweep = [&](std::size_t begin, std::size_t end) {
    // Each worker perturbs its own copy of the parameters in place.
    ModelParams local = params;
    auto ptrs = param_pointers(local);
    for (std::size_t i = begin; i < end; ++i) {
      const double saved = *ptrs[i];
      *ptrs[i] = saved + eps;
      const double up = batch_loss(local, batch, config);
      *ptrs[i] = saved - eps;
      const double down = batch_loss(local, batch, config);
      *ptrs[i] = saved;
      grad[i] = (up - down) / (2.0 * eps);
    }
  };
  if (threads <= 1) {
    sweep(0, count);
  } else {
    std::vector<std::thread> pool;
    const std::size_t chunk = (count + threads - 1) / threads;
    for (int t = 0; t < threads; ++t) {
      const std::size_t begin = t * chunk;
      const std::size_t end = std::min(count, begin + chunk);
      if (begin >= end) break;
      pool.emplace_back(sweep, begin, end);
    }
    for (auto& th : pool) th.join();
  }

  ModelParams updated = params;
  auto ptrs = param_pointers(updated);
  for (std::size_t i = 0; i < count; ++i) *ptrs[i] -= lr * grad[i];
  return {std::move(updated), loss_before};
}

}  // namespace mhgrn
