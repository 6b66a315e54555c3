#pragma once

#include <cmath>
#include <span>
#include <stdexcept>
#include <vector>

namespace geodet {

/// Richardson table for values sampled at h_j = h_0 / ratio^j, assuming the
/// error expands in h^p, h^(p+step), h^(p+2 step), ...
///
/// Row 0 holds the samples; row m eliminates m error terms. The last entry of
/// the last row is the extrapolated value.
class RichardsonTable {
 public:
  RichardsonTable(std::span<const double> samples, double ratio, double order, double order_step = 1.0) {
    if (samples.empty()) throw std::invalid_argument("RichardsonTable: no samples");
    rows_.emplace_back(samples.begin(), samples.end());
    double p = order;
    while (rows_.back().size() > 1) {
      const auto& prev = rows_.back();
      const double factor = std::pow(ratio, p);
      std::vector<double> next(prev.size() - 1);
      for (std::size_t i = 0; i + 1 < prev.size(); ++i) {
        next[i] = (factor * prev[i + 1] - prev[i]) / (factor - 1.0);
      }
      rows_.push_back(std::move(next));
      p += order_step;
    }
  }

  const std::vector<std::vector<double>>& rows() const { return rows_; }

  /// Extrapolation eliminating `levels` error terms, from the finest samples.
  double value(std::size_t levels) const {
    const auto& row = rows_.at(levels);
    return row.back();
  }

  double best() const { return rows_.back().back(); }

  /// Difference between the two deepest available estimates.
  double error_estimate() const {
    if (rows_.size() < 2) return 0.0;
    const auto& last = rows_.back();
    const auto& prev = rows_[rows_.size() - 2];
    return std::abs(last.back() - prev.back());
  }

 private:
  std::vector<std::vector<double>> rows_;
};

/// Least-squares slope of log|y| against log|x|.
inline double loglog_slope(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size() || x.size() < 2) throw std::invalid_argument("loglog_slope: bad sizes");
  double mx = 0, my = 0;
  const double count = static_cast<double>(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += std::log(std::abs(x[i]));
    my += std::log(std::abs(y[i]));
  }
  mx /= count;
  my /= count;
  double sxy = 0, sxx = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double dx = std::log(std::abs(x[i])) - mx;
    sxy += dx * (std::log(std::abs(y[i])) - my);
    sxx += dx * dx;
  }
  return sxy / sxx;
}

}  // namespace geodet
