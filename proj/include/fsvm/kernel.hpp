#pragma once

#include <cstddef>
#include <deque>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "fsvm/error.hpp"

namespace fsvm {

enum class kernel_kind { linear };

struct kernel_spec {
  kernel_kind kind = kernel_kind::linear;
};

inline std::string_view to_string(kernel_kind k) {
  switch (k) {
    case kernel_kind::linear: return "linear";
  }
  return "unknown";
}

inline kernel_kind parse_kernel_kind(std::string_view s) {
  if (s == "linear") return kernel_kind::linear;
  throw model_format_error("unsupported kernel '" + std::string(s) + "'");
}

inline double kernel_value(const kernel_spec&, std::span<const double> a, std::span<const double> b) {
  double dot = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) dot += a[i] * b[i];
  return dot;
}

// Kernel evaluations over a fixed training set. The full Gram matrix is
// materialized when it fits (n <= 4096); larger sets fall back to on-demand
// rows with FIFO eviction.
class gram_cache {
 public:
  static constexpr std::size_t full_matrix_limit = 4096;
  static constexpr std::size_t row_cache_capacity = 64;

  gram_cache(const std::vector<std::vector<double>>& points, kernel_spec spec)
      : points_(points), spec_(spec), n_(points.size()) {
    if (n_ <= full_matrix_limit) {
      full_.resize(n_ * n_);
      for (std::size_t i = 0; i < n_; ++i) {
        for (std::size_t j = 0; j <= i; ++j) {
          const double v = kernel_value(spec_, points_[i], points_[j]);
          full_[i * n_ + j] = v;
          full_[j * n_ + i] = v;
        }
      }
    }
  }

  double at(std::size_t i, std::size_t j) const { return row(i)[j]; }

  // The returned span stays valid until the second-next row() call: the two
  // most recently fetched rows are never evicted.
  std::span<const double> row(std::size_t i) const {
    if (!full_.empty()) return {full_.data() + i * n_, n_};
    auto it = rows_.find(i);
    if (it == rows_.end()) {
      std::vector<double> r(n_);
      for (std::size_t j = 0; j < n_; ++j) r[j] = kernel_value(spec_, points_[i], points_[j]);
      if (fifo_.size() >= row_cache_capacity) {
        for (auto victim = fifo_.begin(); victim != fifo_.end(); ++victim) {
          if (*victim != last_[0] && *victim != last_[1]) {
            rows_.erase(*victim);
            fifo_.erase(victim);
            break;
          }
        }
      }
      fifo_.push_back(i);
      it = rows_.emplace(i, std::move(r)).first;
    }
    last_[1] = last_[0];
    last_[0] = i;
    return {it->second.data(), n_};
  }

  std::size_t size() const { return n_; }

 private:
  const std::vector<std::vector<double>>& points_;
  kernel_spec spec_;
  std::size_t n_;
  std::vector<double> full_;
  mutable std::unordered_map<std::size_t, std::vector<double>> rows_;
  mutable std::deque<std::size_t> fifo_;
  mutable std::size_t last_[2] = {static_cast<std::size_t>(-1), static_cast<std::size_t>(-1)};
};

}  // namespace fsvm
