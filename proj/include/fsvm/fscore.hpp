#pragma once

#include <algorithm>
#include <cstdio>
#include <functional>
#include <limits>
#include <numeric>
#include <ostream>
#include <utility>
#include <vector>

#include "fsvm/dataset.hpp"
#include "fsvm/error.hpp"

namespace fsvm {

struct feature_score {
  int index = 0;  // 1-based feature position
  double score = 0.0;
};

struct fscore_ranking {
  std::vector<feature_score> scores;  // one entry per feature, in index order
  std::vector<int> order;             // feature indices, descending score, ties by ascending index
};

// F-score of one feature: squared separation of the class means from the
// grand mean over the sum of the within-class sample variances. A constant
// feature scores 0; positive separation with zero within-class variance
// scores +infinity.
inline double fscore_one(const dataset& ds, int feature_index) {
  const int dim = static_cast<int>(ds.dimension());
  if (feature_index < 1 || feature_index > dim)
    throw invalid_subset_error("feature index " + std::to_string(feature_index) + " outside 1.." +
                               std::to_string(dim));
  if (ds.positive_count < 2 || ds.negative_count < 2)
    throw insufficient_class_size_error("need at least 2 instances per class, have " +
                                        std::to_string(ds.positive_count) + "/" +
                                        std::to_string(ds.negative_count));
  const std::size_t f = static_cast<std::size_t>(feature_index - 1);

  double sum_pos = 0.0, sum_neg = 0.0;
  for (const instance& in : ds.instances) (in.label > 0 ? sum_pos : sum_neg) += in.features[f];
  const double n_pos = static_cast<double>(ds.positive_count);
  const double n_neg = static_cast<double>(ds.negative_count);
  const double mean_pos = sum_pos / n_pos;
  const double mean_neg = sum_neg / n_neg;
  const double mean_all = (sum_pos + sum_neg) / (n_pos + n_neg);

  double ss_pos = 0.0, ss_neg = 0.0;
  for (const instance& in : ds.instances) {
    if (in.label > 0) {
      const double d = in.features[f] - mean_pos;
      ss_pos += d * d;
    } else {
      const double d = in.features[f] - mean_neg;
      ss_neg += d * d;
    }
  }
  const double numerator =
      (mean_pos - mean_all) * (mean_pos - mean_all) + (mean_neg - mean_all) * (mean_neg - mean_all);
  const double denominator = ss_pos / (n_pos - 1.0) + ss_neg / (n_neg - 1.0);
  if (denominator == 0.0)
    return numerator == 0.0 ? 0.0 : std::numeric_limits<double>::infinity();
  return numerator / denominator;
}

inline fscore_ranking rank_features(const dataset& ds) {
  const int dim = static_cast<int>(ds.dimension());
  fscore_ranking ranking;
  ranking.scores.reserve(static_cast<std::size_t>(dim));
  for (int i = 1; i <= dim; ++i) ranking.scores.push_back({i, fscore_one(ds, i)});
  ranking.order.resize(static_cast<std::size_t>(dim));
  std::iota(ranking.order.begin(), ranking.order.end(), 1);
  std::sort(ranking.order.begin(), ranking.order.end(), [&](int a, int b) {
    const double fa = ranking.scores[static_cast<std::size_t>(a - 1)].score;
    const double fb = ranking.scores[static_cast<std::size_t>(b - 1)].score;
    if (fa != fb) return fa > fb;
    return a < b;
  });
  return ranking;
}

// Tab-separated ranking report: feature_index, feature_name, fscore, rank.
inline void write_ranking(const fscore_ranking& ranking, const dataset& ds, std::ostream& out) {
  std::vector<int> rank_of(ranking.order.size() + 1, 0);
  for (std::size_t r = 0; r < ranking.order.size(); ++r) rank_of[static_cast<std::size_t>(ranking.order[r])] = static_cast<int>(r + 1);
  out << "feature_index\tfeature_name\tfscore\trank\n";
  char buf[40];
  for (const feature_score& fs : ranking.scores) {
    std::snprintf(buf, sizeof buf, "%.9g", fs.score);
    out << fs.index << '\t' << ds.feature_names[static_cast<std::size_t>(fs.index - 1)] << '\t' << buf << '\t'
        << rank_of[static_cast<std::size_t>(fs.index)] << '\n';
  }
}

struct elimination_stage {
  std::vector<int> kept;  // 1-based feature indices, ascending
  double train_accuracy = 0.0;
  double test_accuracy = 0.0;
};

// Maps (train, test) to (train accuracy, test accuracy), both in percent.
using trainer_fn = std::function<std::pair<double, double>(const dataset&, const dataset&)>;

// Backward elimination: starting from all features, drop the lowest-scoring
// remaining feature one stage at a time until `stop_at` features are left,
// recording the trainer's accuracies at every stage. Scores come from the
// full dataset by default; `score_on_train_split` restricts them to the
// train side of the partition.
inline std::vector<elimination_stage> backward_eliminate(const dataset& ds, const partition_spec& spec,
                                                         const trainer_fn& trainer, int stop_at,
                                                         bool score_on_train_split = false) {
  const int dim = static_cast<int>(ds.dimension());
  if (stop_at < 1 || stop_at > dim)
    throw invalid_subset_error("stop_at must lie in 1.." + std::to_string(dim) + ", got " +
                               std::to_string(stop_at));
  auto [train, test] = partition(ds, spec);
  const fscore_ranking ranking = rank_features(score_on_train_split ? train : ds);

  // Elimination order: ranking read back to front.
  std::vector<int> drop_order(ranking.order.rbegin(), ranking.order.rend());
  std::vector<int> kept(static_cast<std::size_t>(dim));
  std::iota(kept.begin(), kept.end(), 1);

  std::vector<elimination_stage> stages;
  std::size_t next_drop = 0;
  while (true) {
    elimination_stage stage;
    stage.kept = kept;
    auto [train_acc, test_acc] = trainer(project_features(train, kept), project_features(test, kept));
    stage.train_accuracy = train_acc;
    stage.test_accuracy = test_acc;
    stages.push_back(std::move(stage));
    if (static_cast<int>(kept.size()) == stop_at) break;
    const int victim = drop_order[next_drop++];
    kept.erase(std::remove(kept.begin(), kept.end(), victim), kept.end());
  }
  return stages;
}

}  // namespace fsvm
