#pragma once

/// Wall-clock scaling harness: times the encoder and the relational-GCN
/// baseline on one fixed random graph while the hop count grows, and fits a
/// line to runtime-vs-hops so the linear-time claim is checkable from the
/// emitted CSV.

#include <algorithm>
#include <chrono>
#include <cstdint>
#include <fstream>
#include <functional>
#include <string>
#include <vector>

#include "mhgrn/baselines.hpp"
#include "mhgrn/encoder.hpp"
#include "mhgrn/error.hpp"
#include "mhgrn/matrix.hpp"
#include "mhgrn/rng.hpp"
#include "mhgrn/synthetic.hpp"

namespace mhgrn {

/// One timed configuration. wall_ns is the median over `trials` runs.
struct BenchRecord {
  std::string model;
  int K = 0;
  int n = 0;
  int m = 0;
  double mean_degree = 0.0;
  std::uint64_t wall_ns = 0;
  int trials = 0;
};

/// Least-squares line through (xs, ys). `defined` is false when fewer than
/// two distinct x values exist, in which case the other fields are zero.
struct LinearFit {
  double slope = 0.0;
  double intercept = 0.0;
  double r2 = 0.0;
  bool defined = false;
};

inline LinearFit linear_fit(const std::vector<double>& xs,
                            const std::vector<double>& ys) {
  if (xs.size() != ys.size())
    throw DimMismatch("linear_fit: xs and ys differ in length");
  LinearFit fit;
  const std::size_t n = xs.size();
  if (n < 2) return fit;
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    mx += xs[i];
    my += ys[i];
  }
  mx /= static_cast<double>(n);
  my /= static_cast<double>(n);
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    sxx += (xs[i] - mx) * (xs[i] - mx);
    sxy += (xs[i] - mx) * (ys[i] - my);
    syy += (ys[i] - my) * (ys[i] - my);
  }
  if (sxx == 0.0) return fit;
  fit.defined = true;
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  if (syy == 0.0) {
    fit.r2 = 1.0;  // constant data, fit is exact
    return fit;
  }
  double ss_res = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double e = ys[i] - (fit.intercept + fit.slope * xs[i]);
    ss_res += e * e;
  }
  fit.r2 = 1.0 - ss_res / syy;
  return fit;
}

/// Median wall time of `trials` sequential runs of fn, in nanoseconds.
inline std::uint64_t time_median_ns(const std::function<void()>& fn,
                                    int trials) {
  if (trials < 3)
    throw IndexOutOfRange("time_median_ns: need at least 3 trials");
  std::vector<std::uint64_t> samples;
  samples.reserve(static_cast<std::size_t>(trials));
  for (int t = 0; t < trials; ++t) {
    const auto start = std::chrono::steady_clock::now();
    fn();
    const auto stop = std::chrono::steady_clock::now();
    samples.push_back(static_cast<std::uint64_t>(
        std::chrono::duration_cast<std::chrono::nanoseconds>(stop - start)
            .count()));
  }
  std::sort(samples.begin(), samples.end());
  const std::size_t mid = samples.size() / 2;
  std::uint64_t median = samples.size() % 2 == 1
                             ? samples[mid]
                             : (samples[mid - 1] + samples[mid]) / 2;
  return std::max<std::uint64_t>(median, 1);  // clock granularity floor
}

/// Times the encoder and a K-layer relational GCN at every hop count
/// 1..k_max on one seeded random graph. Records come back encoder-first,
/// each block ordered by K.
inline std::vector<BenchRecord> run_bench(int k_max, int n, int m, double deg,
                                          int trials, std::uint64_t seed) {
  if (k_max < 1) throw IndexOutOfRange("run_bench: k_max must be >= 1");
  if (trials < 3) throw IndexOutOfRange("run_bench: need at least 3 trials");
  auto g = erdos_graph(n, deg, m, seed);

  ModelDims dims;
  dims.K = k_max;
  dims.m = m;
  auto params = make_params(dims, seed + 1);
  Rng rng(seed + 2);
  DenseMatrix H(static_cast<std::size_t>(n),
                static_cast<std::size_t>(dims.d_in));
  for (std::size_t r = 0; r < H.rows(); ++r)
    for (std::size_t c = 0; c < H.cols(); ++c)
      H(r, c) = rng.uniform(-1.0, 1.0);
  std::vector<double> s(static_cast<std::size_t>(dims.d_s));
  for (auto& v : s) v = rng.uniform(-1.0, 1.0);

  std::vector<DenseMatrix> W_gcn;
  for (int r = 0; r < m; ++r) {
    DenseMatrix w(H.cols(), H.cols());
    for (std::size_t i = 0; i < w.rows(); ++i)
      for (std::size_t j = 0; j < w.cols(); ++j)
        w(i, j) = rng.uniform(-0.1, 0.1);
    W_gcn.push_back(std::move(w));
  }

  std::vector<BenchRecord> records;
  for (int k = 1; k <= k_max; ++k) {
    EncoderConfig config;
    config.K = k;
    const std::uint64_t ns = time_median_ns(
        [&] { volatile double sink = encode(g, H, s, params, config).g_vec[0];
              (void)sink; },
        trials);
    records.push_back({"mhgrn", k, n, m, deg, ns, trials});
  }
  for (int k = 1; k <= k_max; ++k) {
    const std::uint64_t ns = time_median_ns(
        [&] {
          DenseMatrix cur = H;
          for (int layer = 0; layer < k; ++layer)
            cur = rgcn_layer(cur, g, W_gcn, "tanh");
          volatile double sink = cur(0, 0);
          (void)sink;
        },
        trials);
    records.push_back({"rgcn", k, n, m, deg, ns, trials});
  }
  return records;
}

/// Runtime-vs-K line for one model's records (others are ignored).
inline LinearFit fit_for_model(const std::vector<BenchRecord>& records,
                               const std::string& model) {
  std::vector<double> xs, ys;
  for (const auto& rec : records) {
    if (rec.model != model) continue;
    xs.push_back(static_cast<double>(rec.K));
    ys.push_back(static_cast<double>(rec.wall_ns));
  }
  return linear_fit(xs, ys);
}

inline void write_bench_csv(const std::string& path,
                            const std::vector<BenchRecord>& records) {
  std::ofstream out(path);
  if (!out) throw IoError("write_bench_csv: cannot open " + path);
  out << "model,K,n,m,deg,wall_ns_median,trials\n";
  for (const auto& rec : records)
    out << rec.model << "," << rec.K << "," << rec.n << "," << rec.m << ","
        << rec.mean_degree << "," << rec.wall_ns << "," << rec.trials << "\n";
  if (!out) throw IoError("write_bench_csv: write failed for " + path);
}

}  // namespace mhgrn
