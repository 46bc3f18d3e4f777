#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <string>
#include <utility>
#include <vector>

#include "elasticflow/types.hpp"

namespace elasticflow {

/// Square matrix with kl sub- and ku super-diagonals. Storage leaves room for
/// the kl extra super-diagonals created by partial pivoting.
class BandedMatrix {
 public:
  BandedMatrix() = default;
  BandedMatrix(std::size_t n, std::size_t kl, std::size_t ku)
      : n_(n), kl_(kl), ku_(ku), width_(2 * kl + ku + 1), data_(n * width_, 0.0) {}

  std::size_t size() const { return n_; }
  std::size_t lower() const { return kl_; }
  std::size_t upper() const { return ku_; }

  bool in_band(std::size_t i, std::size_t j) const { return j + kl_ >= i && j <= i + ku_; }

  double operator()(std::size_t i, std::size_t j) const {
    if (j + kl_ < i || j > i + ku_ + kl_) return 0.0;
    return data_[i * width_ + (j + kl_ - i)];
  }

  double& at(std::size_t i, std::size_t j) {
    if (!in_band(i, j))
      throw Error(ErrorKind::InvalidValue, "entry (" + std::to_string(i) + ", " + std::to_string(j) +
                                               ") lies outside the band");
    return data_[i * width_ + (j + kl_ - i)];
  }

  /// y = A x
  std::vector<double> multiply(const std::vector<double>& x) const {
    std::vector<double> y(n_, 0.0);
    for (std::size_t i = 0; i < n_; ++i) {
      const std::size_t lo = i >= kl_ ? i - kl_ : 0;
      const std::size_t hi = std::min(n_ - 1, i + ku_);
      for (std::size_t j = lo; j <= hi; ++j) y[i] += (*this)(i, j) * x[j];
    }
    return y;
  }

  /// Sum of row i.
  double row_sum(std::size_t i) const {
    double s = 0.0;
    const std::size_t lo = i >= kl_ ? i - kl_ : 0;
    const std::size_t hi = std::min(n_ - 1, i + ku_);
    for (std::size_t j = lo; j <= hi; ++j) s += (*this)(i, j);
    return s;
  }

  /// Solve A x = b by banded Gaussian elimination with partial pivoting.
  /// The matrix itself is left untouched.
  std::vector<double> solve(std::vector<double> b) const {
    if (b.size() != n_) throw Error(ErrorKind::LengthMismatch, "right-hand side size");
    std::vector<double> a = data_;
    auto A = [&](std::size_t i, std::size_t j) -> double& { return a[i * width_ + (j + kl_ - i)]; };
    double scale = 0.0;
    for (double v : a) scale = std::max(scale, std::abs(v));
    const double tiny = scale * 1e-14;
    const std::size_t reach = ku_ + kl_;
    for (std::size_t k = 0; k < n_; ++k) {
      const std::size_t last = std::min(n_ - 1, k + kl_);
      std::size_t p = k;
      for (std::size_t i = k + 1; i <= last; ++i)
        if (std::abs(A(i, k)) > std::abs(A(p, k))) p = i;
      if (!(std::abs(A(p, k)) > tiny))
        throw Error(ErrorKind::SingularMatrix, "zero pivot in column " + std::to_string(k));
      const std::size_t jend = std::min(n_ - 1, k + reach);
      if (p != k) {
        for (std::size_t j = k; j <= jend; ++j) std::swap(A(k, j), A(p, j));
        std::swap(b[k], b[p]);
      }
      const double piv = A(k, k);
      for (std::size_t i = k + 1; i <= last; ++i) {
        const double l = A(i, k) / piv;
        if (l == 0.0) continue;
        for (std::size_t j = k + 1; j <= jend; ++j) A(i, j) -= l * A(k, j);
        b[i] -= l * b[k];
      }
    }
    for (std::size_t kk = n_; kk-- > 0;) {
      const std::size_t jend = std::min(n_ - 1, kk + reach);
      double s = b[kk];
      for (std::size_t j = kk + 1; j <= jend; ++j) s -= A(kk, j) * b[j];
      b[kk] = s / A(kk, kk);
    }
    return b;
  }

 private:
  std::size_t n_ = 0, kl_ = 0, ku_ = 0, width_ = 0;
  std::vector<double> data_;
};

}  // namespace elasticflow
