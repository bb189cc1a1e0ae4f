#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <cmath>
#include <random>

#include "fsvm/fsvm.hpp"
#include "helpers.hpp"
#include "oracles.hpp"

using Catch::Matchers::ContainsSubstring;

namespace {

std::vector<double> vec(std::initializer_list<double> v) { return std::vector<double>(v); }

// Oracle-side decision function: bias from free multipliers (mean of y - g),
// falling back to the midpoint of the feasible interval.
double oracle_discriminant(const oracle::qp_result& ref, const std::vector<std::vector<double>>& x,
                           const std::vector<int>& y, double c, const std::vector<double>& probe) {
  const std::size_t n = x.size();
  auto expansion = [&](const std::vector<double>& p) {
    double s = 0.0;
    for (std::size_t j = 0; j < n; ++j) s += ref.alpha[j] * y[j] * oracle::dot(x[j], p);
    return s;
  };
  double lo = -std::numeric_limits<double>::infinity(), hi = std::numeric_limits<double>::infinity();
  double free_sum = 0.0;
  std::size_t free_count = 0;
  for (std::size_t k = 0; k < n; ++k) {
    const double target = y[k] - expansion(x[k]);
    const bool at_zero = ref.alpha[k] < 1e-9;
    const bool at_c = ref.alpha[k] > c - 1e-9;
    if (!at_zero && !at_c) {
      free_sum += target;
      ++free_count;
    } else if (at_zero == (y[k] > 0)) {
      lo = std::max(lo, target);
    } else {
      hi = std::min(hi, target);
    }
  }
  double b = 0.0;
  if (free_count > 0)
    b = free_sum / static_cast<double>(free_count);
  else if (std::isfinite(lo) && std::isfinite(hi))
    b = 0.5 * (lo + hi);
  else if (std::isfinite(lo))
    b = lo;
  else if (std::isfinite(hi))
    b = hi;
  return expansion(probe) + b;
}

}  // namespace

TEST_CASE("symmetric two-point pair solves exactly", "[svm]") {
  const auto ds = testutil::two_point();
  const fsvm::svm_model model = fsvm::train(ds, {});

  CHECK(model.alphas == std::vector<double>{0.5, 0.5});
  CHECK(model.bias == 0.0);
  CHECK(model.support_count() == 2);
  CHECK(model.feature_subset == std::vector<int>{1});
  CHECK(fsvm::discriminant(model, vec({1.0})) == 1.0);
  CHECK(fsvm::discriminant(model, vec({-1.0})) == -1.0);
  CHECK(fsvm::discriminant(model, vec({0.0})) == 0.0);
  CHECK(fsvm::discriminant(model, vec({3.0})) == 3.0);  // w=1, b=0
  CHECK(fsvm::dual_objective(model) == 0.5);            // 1 - 0.5*|w|^2

  const auto kkt = fsvm::check_kkt(model);
  CHECK(kkt.ok(1e-3));
  CHECK(kkt.alpha_label_sum == 0.0);
  CHECK(kkt.box_respected);
}

TEST_CASE("discriminant validates input dimensionality", "[svm]") {
  const fsvm::svm_model model = fsvm::train(testutil::two_point(), {});
  CHECK_THROWS_AS(fsvm::discriminant(model, vec({1.0, 2.0})), fsvm::shape_error);
  CHECK_THROWS_AS(fsvm::classify(model, vec({})), fsvm::shape_error);
}

TEST_CASE("classification follows the sign rule with ties to -1", "[svm]") {
  const fsvm::svm_model model = fsvm::train(testutil::two_point(), {});
  CHECK(fsvm::classify(model, vec({3.0})) == +1);
  CHECK(fsvm::classify(model, vec({-0.2})) == -1);

  const auto tie = fsvm::classify_ex(model, vec({0.0}));
  CHECK(tie.label == -1);
  CHECK(tie.boundary_tie);
  const auto clear = fsvm::classify_ex(model, vec({0.5}));
  CHECK(clear.label == +1);
  CHECK_FALSE(clear.boundary_tie);
}

TEST_CASE("training rejects bad inputs", "[svm]") {
  const auto single = fsvm::make_dataset({testutil::inst("a", {1}, +1), testutil::inst("b", {2}, +1)});
  CHECK_THROWS_AS(fsvm::train(single, {}), fsvm::degenerate_training_error);

  fsvm::train_options bad;
  bad.c = 0.0;
  CHECK_THROWS_AS(fsvm::train(testutil::two_point(), bad), std::invalid_argument);
  bad.c = 10.0;
  bad.tol = 0.0;
  CHECK_THROWS_AS(fsvm::train(testutil::two_point(), bad), std::invalid_argument);
}

TEST_CASE("WBC training satisfies the KKT suite and dual feasibility", "[svm]") {
  const auto [train_ds, test_ds] = fsvm::partition(testutil::wbc().ds, {});
  const fsvm::svm_model model = fsvm::train(train_ds, {});

  const auto kkt = fsvm::check_kkt(model);
  CHECK(kkt.ok(1e-3));
  CHECK(std::abs(kkt.alpha_label_sum) <= 1e-8);
  CHECK(kkt.box_respected);
  for (double a : model.alphas) {
    CHECK(a >= 0.0);
    CHECK(a <= model.c);
  }
  CHECK(model.support_count() > 0);
  CHECK(model.support_count() < train_ds.size());

  SECTION("free support vectors sit on the margin") {
    std::size_t free_svs = 0;
    for (std::size_t k = 0; k < model.size(); ++k) {
      if (model.alphas[k] <= 0.0 || model.alphas[k] >= model.c) continue;
      ++free_svs;
      const double margin = model.labels[k] * fsvm::discriminant(model, model.vectors[k]);
      CHECK(std::abs(margin - 1.0) <= 1e-3);
    }
    CHECK(free_svs > 0);
  }

  SECTION("training is deterministic") {
    const fsvm::svm_model again = fsvm::train(train_ds, {});
    CHECK(again.alphas == model.alphas);
    CHECK(again.bias == model.bias);
  }
}

TEST_CASE("SMO matches the brute-force QP oracle on tiny problems", "[svm]") {
  std::mt19937_64 rng(77);
  std::uniform_int_distribution<int> n_dist(1, 3);
  for (int it = 0; it < 60; ++it) {
    const std::size_t n_pos = static_cast<std::size_t>(n_dist(rng));
    const std::size_t n_neg = static_cast<std::size_t>(n_dist(rng));
    const auto ds = oracle::random_dataset(rng, n_pos, n_neg, 2, false, 0.0, -2.0, 2.0);
    const double c = (it % 2 == 0) ? 0.5 : 10.0;

    fsvm::train_options opts;
    opts.c = c;
    opts.tol = 1e-5;  // tight, so tolerance slack cannot mask an optimizer bug
    const fsvm::svm_model model = fsvm::train(ds, opts);

    std::vector<std::vector<double>> x;
    std::vector<int> y;
    for (const auto& in : ds.instances) {
      x.push_back(in.features);
      y.push_back(in.label);
    }
    const auto ref = oracle::qp_brute_force(x, y, c);
    REQUIRE(ref.found);

    INFO("iteration " << it << " n=" << x.size() << " c=" << c);
    CHECK(std::abs(fsvm::dual_objective(model) - ref.objective) <= 1e-4 * std::max(1.0, std::abs(ref.objective)));
    CHECK(fsvm::check_kkt(model).ok(1e-3));

    // Predictions agree wherever both functions are clearly off the boundary.
    std::uniform_real_distribution<double> probe_dist(-2.5, 2.5);
    for (int p = 0; p < 8; ++p) {
      const std::vector<double> probe = {probe_dist(rng), probe_dist(rng)};
      const double mine = fsvm::discriminant(model, probe);
      const double theirs = oracle_discriminant(ref, x, y, c, probe);
      if (std::abs(mine) > 0.05 && std::abs(theirs) > 0.05) CHECK((mine > 0) == (theirs > 0));
    }
  }
}

TEST_CASE("label flip negates the decision function", "[svm]") {
  std::mt19937_64 rng(5);
  const auto ds = oracle::random_dataset(rng, 6, 6, 3, false, 1.0);
  fsvm::dataset flipped = ds;
  for (auto& in : flipped.instances) in.label = -in.label;
  std::swap(flipped.positive_count, flipped.negative_count);

  const fsvm::svm_model a = fsvm::train(ds, {});
  const fsvm::svm_model b = fsvm::train(flipped, {});

  std::uniform_real_distribution<double> probe_dist(-2.0, 12.0);
  for (int p = 0; p < 20; ++p) {
    std::vector<double> probe = {probe_dist(rng), probe_dist(rng), probe_dist(rng)};
    const double da = fsvm::discriminant(a, probe);
    const double db = fsvm::discriminant(b, probe);
    CHECK(std::abs(da + db) <= 1e-9 * std::max(1.0, std::abs(da)));
    if (da != 0.0) CHECK(fsvm::classify(a, probe) == -fsvm::classify(b, probe));
  }
}

TEST_CASE("training-order permutation leaves the decision function unchanged", "[svm]") {
  std::mt19937_64 rng(9);
  const auto ds = oracle::random_dataset(rng, 10, 10, 3, false, 1.0);
  fsvm::dataset shuffled = ds;
  std::shuffle(shuffled.instances.begin(), shuffled.instances.end(), rng);

  // Train both copies close to the exact optimum so the comparison measures
  // order-dependence rather than leftover tolerance slack.
  fsvm::train_options opts;
  opts.tol = 1e-8;
  const fsvm::svm_model a = fsvm::train(ds, opts);
  const fsvm::svm_model b = fsvm::train(shuffled, opts);

  std::uniform_real_distribution<double> probe_dist(-2.0, 12.0);
  for (int p = 0; p < 20; ++p) {
    std::vector<double> probe = {probe_dist(rng), probe_dist(rng), probe_dist(rng)};
    CHECK(fsvm::discriminant(a, probe) == Catch::Approx(fsvm::discriminant(b, probe)).margin(1e-6));
  }
}

TEST_CASE("separable clusters give on-margin support vectors and full accuracy", "[svm]") {
  const auto ds = testutil::separated_line();
  const fsvm::svm_model model = fsvm::train(ds, {});
  CHECK(fsvm::measure(model, ds).accuracy() == 100.0);
  for (std::size_t k = 0; k < model.size(); ++k) {
    if (model.alphas[k] == 0.0) continue;
    const double margin = model.labels[k] * fsvm::discriminant(model, model.vectors[k]);
    CHECK(std::abs(margin - 1.0) <= 1e-3);
  }
  // interior points are not support vectors
  CHECK(model.support_count() == 2);
}

TEST_CASE("duplicate conflicting points (eta = 0 path) still converge", "[svm]") {
  const auto ds = fsvm::make_dataset({testutil::inst("a", {1.0}, +1), testutil::inst("b", {1.0}, -1),
                                      testutil::inst("c", {4.0}, +1), testutil::inst("d", {-2.0}, -1)});
  const fsvm::svm_model model = fsvm::train(ds, {});
  const auto kkt = fsvm::check_kkt(model);
  CHECK(kkt.ok(1e-3));
  CHECK(std::abs(kkt.alpha_label_sum) <= 1e-8);
  CHECK(kkt.box_respected);
}

TEST_CASE("pair-update cap raises a convergence error naming the violation", "[svm]") {
  std::mt19937_64 rng(11);
  const auto ds = oracle::random_dataset(rng, 5, 5, 2, false);
  fsvm::train_options opts;
  opts.max_pair_updates = 1;
  CHECK_THROWS_AS(fsvm::train(ds, opts), fsvm::convergence_error);
  CHECK_THROWS_WITH(fsvm::train(ds, opts), ContainsSubstring("KKT"));
}

TEST_CASE("feature_subset is recorded on the model", "[svm]") {
  const auto ds = fsvm::make_dataset({testutil::inst("a", {1, 2}, +1), testutil::inst("b", {-1, -2}, -1)});
  const fsvm::svm_model model = fsvm::train(ds, {}, {3, 7});
  CHECK(model.feature_subset == std::vector<int>{3, 7});
  CHECK_THROWS_AS(fsvm::train(ds, {}, {1, 2, 3}), fsvm::shape_error);

  const fsvm::svm_model identity = fsvm::train(ds, {});
  CHECK(identity.feature_subset == std::vector<int>{1, 2});
}

TEST_CASE("dual objective is the standard expansion", "[svm]") {
  // Hand-check on the two-point model: W = (0.5 + 0.5) - 0.5 * [0.5^2*1 +
  // 0.5^2*1 - 2*0.5*0.5*(-1)*(-1)... ] with K = [[1,-1],[-1,1]] = 1 - 0.5 = 0.5.
  const fsvm::svm_model model = fsvm::train(testutil::two_point(), {});
  CHECK(fsvm::dual_objective(model) == 0.5);
}
