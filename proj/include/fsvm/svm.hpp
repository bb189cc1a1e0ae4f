#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <numeric>
#include <random>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "fsvm/dataset.hpp"
#include "fsvm/error.hpp"
#include "fsvm/kernel.hpp"

namespace fsvm {

struct train_options {
  double c = 10.0;
  double tol = 1e-3;  // KKT tolerance
  kernel_spec kernel{};
  std::uint64_t seed = 0;
  std::uint64_t max_pair_updates = 10'000'000;
};

// A trained classifier. train() retains one row per training example
// (including zero multipliers, for reporting); a model read back from disk
// retains only the support vectors.
struct svm_model {
  std::vector<std::string> training_ids;
  std::vector<double> alphas;
  std::vector<int> labels;
  std::vector<std::vector<double>> vectors;
  double bias = 0.0;
  double c = 10.0;
  kernel_spec kernel{};
  std::vector<int> feature_subset;  // 1-based indices into the source feature space

  std::size_t size() const { return alphas.size(); }
  std::size_t dimension() const { return vectors.empty() ? feature_subset.size() : vectors.front().size(); }
  std::size_t support_count() const {
    return static_cast<std::size_t>(std::count_if(alphas.begin(), alphas.end(), [](double a) { return a > 0.0; }));
  }
};

inline double discriminant(const svm_model& model, std::span<const double> x) {
  if (x.size() != model.dimension())
    throw shape_error("input has " + std::to_string(x.size()) + " features, model expects " +
                      std::to_string(model.dimension()));
  double sum = model.bias;
  for (std::size_t k = 0; k < model.size(); ++k) {
    if (model.alphas[k] == 0.0) continue;
    sum += model.alphas[k] * model.labels[k] * kernel_value(model.kernel, model.vectors[k], x);
  }
  return sum;
}

struct classify_result {
  int label = 0;
  bool boundary_tie = false;  // discriminant was exactly zero
};

// Sign rule: positive discriminant is the positive class. An exact zero is
// assigned to the negative class and flagged.
inline classify_result classify_ex(const svm_model& model, std::span<const double> x) {
  const double d = discriminant(model, x);
  if (d > 0.0) return {+1, false};
  if (d < 0.0) return {-1, false};
  return {-1, true};
}

inline int classify(const svm_model& model, std::span<const double> x) { return classify_ex(model, x).label; }

// Dual objective at the model's multipliers: sum(alpha) - 1/2 a'YKYa.
inline double dual_objective(const svm_model& model) {
  std::vector<std::size_t> sv;
  for (std::size_t k = 0; k < model.size(); ++k)
    if (model.alphas[k] != 0.0) sv.push_back(k);
  double linear = 0.0, quad = 0.0;
  for (std::size_t a : sv) {
    linear += model.alphas[a];
    for (std::size_t b : sv) {
      quad += model.alphas[a] * model.alphas[b] * model.labels[a] * model.labels[b] *
              kernel_value(model.kernel, model.vectors[a], model.vectors[b]);
    }
  }
  return linear - 0.5 * quad;
}

struct kkt_stats {
  double worst_violation = 0.0;
  double alpha_label_sum = 0.0;
  bool box_respected = true;

  bool ok(double tol) const { return box_respected && worst_violation <= tol; }
};

// Evaluates the optimality conditions on the model's own rows:
//   alpha = 0  =>  y f(x) >= 1 - tol
//   0 < alpha < c  =>  |y f(x) - 1| <= tol
//   alpha = c  =>  y f(x) <= 1 + tol
inline kkt_stats check_kkt(const svm_model& model) {
  kkt_stats stats;
  for (std::size_t k = 0; k < model.size(); ++k) {
    const double a = model.alphas[k];
    stats.alpha_label_sum += a * model.labels[k];
    if (a < 0.0 || a > model.c) stats.box_respected = false;
    const double margin = model.labels[k] * discriminant(model, model.vectors[k]);
    double violation = 0.0;
    if (a == 0.0)
      violation = std::max(0.0, 1.0 - margin);
    else if (a == model.c)
      violation = std::max(0.0, margin - 1.0);
    else
      violation = std::abs(margin - 1.0);
    stats.worst_violation = std::max(stats.worst_violation, violation);
  }
  return stats;
}

namespace detail {

// Platt-style sequential minimal optimization over the dual. The decision
// function convention is f(x) = sum_k alpha_k y_k K(x_k, x) + b.
class smo_solver {
 public:
  smo_solver(const std::vector<std::vector<double>>& points, const std::vector<int>& labels,
             const train_options& opts)
      : points_(points),
        labels_(labels),
        opts_(opts),
        n_(points.size()),
        gram_(points, opts.kernel),
        alpha_(points.size(), 0.0),
        errors_(points.size()),
        rng_(opts.seed) {
    for (std::size_t i = 0; i < n_; ++i) errors_[i] = -labels_[i];  // f == 0 initially
  }

  void run() {
    std::size_t refreshes = 0;
    while (true) {
      outer_loop();
      snap_bounds();
      refresh();
      if (worst_violation() <= opts_.tol) break;  // verified on the exact final state
      if (++refreshes > 64)
        throw convergence_error("solver stalled; worst KKT violation " + std::to_string(worst_violation()));
    }
  }

  const std::vector<double>& alphas() const { return alpha_; }
  double bias() const { return bias_; }

 private:
  static constexpr double step_eps = 1e-12;

  void outer_loop() {
    bool examine_all = true;
    std::size_t num_changed = 0;
    while (num_changed > 0 || examine_all) {
      num_changed = 0;
      for (std::size_t i = 0; i < n_; ++i) {
        if (examine_all || (alpha_[i] > 0.0 && alpha_[i] < opts_.c)) num_changed += examine(i);
      }
      if (examine_all)
        examine_all = false;
      else if (num_changed == 0)
        examine_all = true;
    }
  }

  std::size_t examine(std::size_t i2) {
    const double r2 = errors_[i2] * labels_[i2];
    const bool violates = (r2 < -opts_.tol && alpha_[i2] < opts_.c) || (r2 > opts_.tol && alpha_[i2] > 0.0);
    if (!violates) return 0;

    // First choice: the unbound example with the largest |E1 - E2|.
    std::size_t best = n_;
    double best_gap = -1.0;
    for (std::size_t i = 0; i < n_; ++i) {
      if (i == i2 || alpha_[i] <= 0.0 || alpha_[i] >= opts_.c) continue;
      const double gap = std::abs(errors_[i] - errors_[i2]);
      if (gap > best_gap) {
        best_gap = gap;
        best = i;
      }
    }
    if (best < n_ && take_step(best, i2)) return 1;

    // Then every unbound example from a random start, then every example.
    const std::size_t start1 = rng_() % n_;
    for (std::size_t k = 0; k < n_; ++k) {
      const std::size_t i1 = (start1 + k) % n_;
      if (alpha_[i1] <= 0.0 || alpha_[i1] >= opts_.c) continue;
      if (take_step(i1, i2)) return 1;
    }
    const std::size_t start2 = rng_() % n_;
    for (std::size_t k = 0; k < n_; ++k) {
      const std::size_t i1 = (start2 + k) % n_;
      if (take_step(i1, i2)) return 1;
    }
    return 0;
  }

  bool take_step(std::size_t i1, std::size_t i2) {
    if (i1 == i2) return false;
    const double a1_old = alpha_[i1], a2_old = alpha_[i2];
    const double y1 = labels_[i1], y2 = labels_[i2];
    const double s = y1 * y2;
    const double c = opts_.c;

    double low, high;
    if (y1 != y2) {
      low = std::max(0.0, a2_old - a1_old);
      high = std::min(c, c + a2_old - a1_old);
    } else {
      low = std::max(0.0, a1_old + a2_old - c);
      high = std::min(c, a1_old + a2_old);
    }
    if (low >= high) return false;

    const auto k1 = gram_.row(i1);
    const auto k2 = gram_.row(i2);
    const double k11 = k1[i1], k22 = k2[i2], k12 = k1[i2];
    const double e1 = errors_[i1], e2 = errors_[i2];
    const double eta = k11 + k22 - 2.0 * k12;

    double a2 = 0.0;
    if (eta > 0.0) {
      a2 = a2_old + y2 * (e1 - e2) / eta;
      a2 = std::clamp(a2, low, high);
    } else {
      // Flat or concave-degenerate direction: compare the objective at the
      // segment ends.
      const double gamma = a1_old + s * a2_old;
      const double v1 = (e1 + y1 - bias_) - a1_old * y1 * k11 - a2_old * y2 * k12;
      const double v2 = (e2 + y2 - bias_) - a1_old * y1 * k12 - a2_old * y2 * k22;
      auto objective_at = [&](double t) {
        const double u = gamma - s * t;  // the paired multiplier
        return u + t - 0.5 * k11 * u * u - 0.5 * k22 * t * t - s * k12 * u * t - y1 * u * v1 - y2 * t * v2;
      };
      const double w_low = objective_at(low);
      const double w_high = objective_at(high);
      if (w_low > w_high + step_eps)
        a2 = low;
      else if (w_high > w_low + step_eps)
        a2 = high;
      else
        return false;
    }

    if (a2 - low < step_eps) a2 = low;
    if (high - a2 < step_eps) a2 = high;
    if (std::abs(a2 - a2_old) < step_eps * (a2 + a2_old + step_eps)) return false;

    double a1 = a1_old + s * (a2_old - a2);
    a1 = std::clamp(a1, 0.0, c);

    const double d1 = y1 * (a1 - a1_old), d2 = y2 * (a2 - a2_old);
    const double b1 = bias_ - e1 - d1 * k11 - d2 * k12;
    const double b2 = bias_ - e2 - d1 * k12 - d2 * k22;
    double b_new;
    if (a1 > 0.0 && a1 < c)
      b_new = b1;
    else if (a2 > 0.0 && a2 < c)
      b_new = b2;
    else
      b_new = 0.5 * (b1 + b2);

    const double db = b_new - bias_;
    for (std::size_t i = 0; i < n_; ++i) errors_[i] += d1 * k1[i] + d2 * k2[i] + db;
    alpha_[i1] = a1;
    alpha_[i2] = a2;
    bias_ = b_new;

    if (++updates_ > opts_.max_pair_updates)
      throw convergence_error("pair update cap " + std::to_string(opts_.max_pair_updates) +
                              " exceeded; worst KKT violation " + std::to_string(worst_violation()));
    return true;
  }

  // Kernel expansion without the bias term.
  std::vector<double> expansion() const {
    std::vector<double> g(n_, 0.0);
    for (std::size_t j = 0; j < n_; ++j) {
      if (alpha_[j] == 0.0) continue;
      const auto kj = gram_.row(j);
      const double w = alpha_[j] * labels_[j];
      for (std::size_t i = 0; i < n_; ++i) g[i] += w * kj[i];
    }
    return g;
  }

  // Recompute the bias from first principles and rebuild the error cache,
  // clearing any drift the incremental updates accumulated.
  void refresh() {
    const std::vector<double> g = expansion();
    double free_sum = 0.0;
    std::size_t free_count = 0;
    double lo = -std::numeric_limits<double>::infinity();
    double hi = std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < n_; ++k) {
      const double target = labels_[k] - g[k];  // bias making this example sit on the margin
      // Bound membership is judged with the same slack the final snap uses, so
      // a multiplier the arithmetic left at 1e-16 never skews the free mean.
      const bool at_zero = alpha_[k] < step_eps;
      const bool at_c = alpha_[k] > opts_.c - step_eps;
      if (!at_zero && !at_c) {
        free_sum += target;
        ++free_count;
      } else if (at_zero == (labels_[k] > 0)) {
        // alpha=0,y=+1 requires b >= target; alpha=c,y=-1 likewise
        lo = std::max(lo, target);
      } else {
        hi = std::min(hi, target);
      }
    }
    if (free_count > 0) {
      bias_ = free_sum / static_cast<double>(free_count);
    } else if (std::isfinite(lo) && std::isfinite(hi)) {
      bias_ = 0.5 * (lo + hi);
    } else if (std::isfinite(lo)) {
      bias_ = lo;
    } else if (std::isfinite(hi)) {
      bias_ = hi;
    }
    for (std::size_t i = 0; i < n_; ++i) errors_[i] = g[i] + bias_ - labels_[i];
  }

  double worst_violation() const {
    double worst = 0.0;
    for (std::size_t k = 0; k < n_; ++k) {
      const double margin = labels_[k] * (errors_[k] + labels_[k]);
      double v = 0.0;
      if (alpha_[k] < step_eps)
        v = std::max(0.0, 1.0 - margin);
      else if (alpha_[k] > opts_.c - step_eps)
        v = std::max(0.0, margin - 1.0);
      else
        v = std::abs(margin - 1.0);
      worst = std::max(worst, v);
    }
    return worst;
  }

  void snap_bounds() {
    for (double& a : alpha_) {
      if (a < step_eps) a = 0.0;
      if (opts_.c - a < step_eps) a = opts_.c;
    }
  }

  const std::vector<std::vector<double>>& points_;
  const std::vector<int>& labels_;
  train_options opts_;
  std::size_t n_;
  gram_cache gram_;
  std::vector<double> alpha_;
  std::vector<double> errors_;  // E_i = f(x_i) - y_i
  double bias_ = 0.0;
  std::mt19937_64 rng_;
  std::size_t updates_ = 0;
};

}  // namespace detail

// Trains a soft-margin SVM on `ds` by sequential minimal optimization.
// `feature_subset` records which source features the dataset's columns are
// (defaults to the identity mapping).
inline svm_model train(const dataset& ds, const train_options& opts, std::vector<int> feature_subset = {}) {
  if (!(opts.c > 0.0)) throw std::invalid_argument("c must be positive");
  if (!(opts.tol > 0.0)) throw std::invalid_argument("tol must be positive");
  if (ds.positive_count == 0 || ds.negative_count == 0)
    throw degenerate_training_error("training set must contain both classes (have " +
                                    std::to_string(ds.positive_count) + " positive, " +
                                    std::to_string(ds.negative_count) + " negative)");

  const std::size_t n = ds.size();
  std::vector<std::vector<double>> points;
  std::vector<int> labels;
  points.reserve(n);
  labels.reserve(n);
  for (const instance& in : ds.instances) {
    points.push_back(in.features);
    labels.push_back(in.label);
  }

  detail::smo_solver solver(points, labels, opts);
  solver.run();

  svm_model model;
  model.alphas = solver.alphas();
  model.bias = solver.bias();
  model.c = opts.c;
  model.kernel = opts.kernel;
  model.vectors = std::move(points);
  model.labels = std::move(labels);
  model.training_ids.reserve(n);
  for (const instance& in : ds.instances) model.training_ids.push_back(in.id);
  if (feature_subset.empty()) {
    feature_subset.resize(ds.dimension());
    std::iota(feature_subset.begin(), feature_subset.end(), 1);
  } else if (feature_subset.size() != ds.dimension()) {
    throw shape_error("feature_subset size does not match dataset dimensionality");
  }
  model.feature_subset = std::move(feature_subset);
  return model;
}

}  // namespace fsvm
