#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <vector>

#include "mhgrn/error.hpp"
#include "mhgrn/rng.hpp"

namespace mhgrn {

/// Row-major dense matrix of doubles. This is the only numeric container in
/// the library; all model tensors, feature blocks and adjacency products are
/// instances of it.
class DenseMatrix {
 public:
  DenseMatrix() = default;
  DenseMatrix(std::size_t rows, std::size_t cols)
      : rows_(rows), cols_(cols), data_(rows * cols, 0.0) {}

  static DenseMatrix identity(std::size_t n) {
    DenseMatrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
  }

  double& operator()(std::size_t i, std::size_t j) {
    return data_[i * cols_ + j];
  }
  const double& operator()(std::size_t i, std::size_t j) const {
    return data_[i * cols_ + j];
  }

  double* row(std::size_t i) { return data_.data() + i * cols_; }
  const double* row(std::size_t i) const { return data_.data() + i * cols_; }

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  std::vector<double>& data() { return data_; }
  const std::vector<double>& data() const { return data_; }

  void fill(double v) { std::fill(data_.begin(), data_.end(), v); }

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

/// a (r x k) times b (k x c). Throws DimMismatch on incompatible shapes.
/// A zero-width contraction (k == 0) yields an all-zero matrix.
inline DenseMatrix matmul(const DenseMatrix& a, const DenseMatrix& b) {
  if (a.cols() != b.rows())
    throw DimMismatch("matmul: " + std::to_string(a.rows()) + "x" +
                      std::to_string(a.cols()) + " times " +
                      std::to_string(b.rows()) + "x" +
                      std::to_string(b.cols()));
  DenseMatrix c(a.rows(), b.cols());
  for (std::size_t i = 0; i < a.rows(); ++i) {
    const double* ai = a.row(i);
    double* ci = c.row(i);
    for (std::size_t k = 0; k < a.cols(); ++k) {
      const double aik = ai[k];
      const double* bk = b.row(k);
      for (std::size_t j = 0; j < b.cols(); ++j) ci[j] += aik * bk[j];
    }
  }
  return c;
}

/// a (r x k) times b^T where b is (c x k): returns (r x c). Right-multiplying
/// a row-major feature block by W^T this way applies W to each row vector.
inline DenseMatrix matmul_transb(const DenseMatrix& a, const DenseMatrix& b) {
  if (a.cols() != b.cols())
    throw DimMismatch("matmul_transb: " + std::to_string(a.rows()) + "x" +
                      std::to_string(a.cols()) + " times (" +
                      std::to_string(b.rows()) + "x" + std::to_string(b.cols()) +
                      ")^T");
  DenseMatrix c(a.rows(), b.rows());
  for (std::size_t i = 0; i < a.rows(); ++i) {
    const double* ai = a.row(i);
    double* ci = c.row(i);
    for (std::size_t j = 0; j < b.rows(); ++j) {
      const double* bj = b.row(j);
      double acc = 0.0;
      for (std::size_t k = 0; k < a.cols(); ++k) acc += ai[k] * bj[k];
      ci[j] = acc;
    }
  }
  return c;
}

inline DenseMatrix transpose(const DenseMatrix& a) {
  DenseMatrix t(a.cols(), a.rows());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j) t(j, i) = a(i, j);
  return t;
}

/// Matrix times column vector.
inline std::vector<double> matvec(const DenseMatrix& a,
                                  const std::vector<double>& x) {
  if (a.cols() != x.size())
    throw DimMismatch("matvec: " + std::to_string(a.rows()) + "x" +
                      std::to_string(a.cols()) + " times vec of " +
                      std::to_string(x.size()));
  std::vector<double> y(a.rows(), 0.0);
  for (std::size_t i = 0; i < a.rows(); ++i) {
    const double* ai = a.row(i);
    double acc = 0.0;
    for (std::size_t k = 0; k < a.cols(); ++k) acc += ai[k] * x[k];
    y[i] = acc;
  }
  return y;
}

inline double dot(const std::vector<double>& a, const std::vector<double>& b) {
  if (a.size() != b.size())
    throw DimMismatch("dot: vectors of " + std::to_string(a.size()) + " and " +
                      std::to_string(b.size()));
  double acc = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) acc += a[i] * b[i];
  return acc;
}

inline double max_abs_diff(const DenseMatrix& a, const DenseMatrix& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols())
    throw DimMismatch("max_abs_diff: shape mismatch");
  double worst = 0.0;
  for (std::size_t i = 0; i < a.data().size(); ++i)
    worst = std::max(worst, std::fabs(a.data()[i] - b.data()[i]));
  return worst;
}

inline bool is_finite(const DenseMatrix& a) {
  for (double v : a.data())
    if (!std::isfinite(v)) return false;
  return true;
}

inline bool is_finite(const std::vector<double>& a) {
  for (double v : a)
    if (!std::isfinite(v)) return false;
  return true;
}

/// Numerically stable softmax with max-subtraction. Throws AllMasked on an
/// empty input.
inline std::vector<double> softmax(const std::vector<double>& v) {
  if (v.empty()) throw AllMasked("softmax: empty input");
  double m = *std::max_element(v.begin(), v.end());
  std::vector<double> out(v.size());
  double sum = 0.0;
  for (std::size_t i = 0; i < v.size(); ++i) {
    out[i] = std::exp(v[i] - m);
    sum += out[i];
  }
  for (auto& x : out) x /= sum;
  return out;
}

/// Masked softmax: entries with active[i] == 0 are excluded from the
/// normalization and come back as exactly 0. Throws AllMasked when no entry
/// is active.
inline std::vector<double> softmax_masked(
    const std::vector<double>& v, const std::vector<unsigned char>& active) {
  if (v.size() != active.size())
    throw DimMismatch("softmax_masked: mask size mismatch");
  double m = -std::numeric_limits<double>::infinity();
  std::size_t n_active = 0;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (active[i]) {
      m = std::max(m, v[i]);
      ++n_active;
    }
  }
  if (n_active == 0) throw AllMasked("softmax_masked: no active entries");
  std::vector<double> out(v.size(), 0.0);
  double sum = 0.0;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (active[i]) {
      out[i] = std::exp(v[i] - m);
      sum += out[i];
    }
  }
  for (std::size_t i = 0; i < v.size(); ++i)
    if (active[i]) out[i] /= sum;
  return out;
}

/// Glorot/Xavier uniform init: entries drawn row-major from
/// U(-a, a) with a = sqrt(6 / (rows + cols)).
inline DenseMatrix glorot(std::size_t rows, std::size_t cols, Rng& rng) {
  double a = std::sqrt(6.0 / static_cast<double>(rows + cols));
  DenseMatrix m(rows, cols);
  for (auto& v : m.data()) v = rng.uniform(-a, a);
  return m;
}

}  // namespace mhgrn
