#pragma once

#include <cmath>
#include <cstdint>
#include <istream>
#include <map>
#include <ostream>
#include <string>
#include <vector>

#include "fsvm/dataset.hpp"
#include "fsvm/error.hpp"
#include "fsvm/format.hpp"
#include "fsvm/report.hpp"
#include "fsvm/svm.hpp"

namespace fsvm {

struct confusion_counts {
  long tp = 0;
  long fp = 0;
  long tn = 0;
  long fn = 0;

  long total() const { return tp + fp + tn + fn; }
  double accuracy() const { return total() == 0 ? 0.0 : 100.0 * static_cast<double>(tp + tn) / total(); }
};

struct accuracy_record {
  std::string label;
  double train_accuracy = 0.0;
  double test_accuracy = 0.0;
  std::size_t train_size = 0;
  std::size_t test_size = 0;
  std::uint64_t seed = 0;
  confusion_counts confusion;
};

struct sweep_report {
  std::vector<accuracy_record> records;
  config_echo config;
};

// Confusion counts of `model` over `ds` (positive = label +1).
inline confusion_counts measure(const svm_model& model, const dataset& ds) {
  confusion_counts counts;
  for (const instance& in : ds.instances) {
    const int predicted = classify(model, in.features);
    if (predicted > 0)
      (in.label > 0 ? counts.tp : counts.fp) += 1;
    else
      (in.label > 0 ? counts.fn : counts.tn) += 1;
  }
  return counts;
}

// "50-50", "60-40", ... from a train fraction.
inline std::string fraction_label(double fraction) {
  const long p = std::lround(fraction * 100.0);
  return std::to_string(p) + "-" + std::to_string(100 - p);
}

inline std::vector<double> default_fractions() { return {0.5, 0.6, 0.7, 0.8, 0.4}; }

inline std::vector<std::vector<int>> default_ablation_sets() {
  return {{1, 2, 3, 4, 5, 6, 7, 9}, {1, 2, 3, 4, 6, 7, 9}, {1, 2, 3, 6, 7, 9}, {1, 3, 6, 7, 9}};
}

// "Set N" when the subset is one of the defaults, otherwise the index list
// itself ('+'-joined so the label stays a single comma-separated-file field).
inline std::string set_label(const std::vector<int>& subset) {
  const auto defaults = default_ablation_sets();
  for (std::size_t i = 0; i < defaults.size(); ++i) {
    if (subset == defaults[i]) return "Set " + std::to_string(i + 1);
  }
  std::string label;
  for (std::size_t i = 0; i < subset.size(); ++i) {
    if (i > 0) label += '+';
    label += std::to_string(subset[i]);
  }
  return label;
}

namespace detail {

inline accuracy_record evaluate_pair(const dataset& train_ds, const dataset& test_ds, const train_options& opts,
                                     std::string label, std::uint64_t seed, std::vector<int> subset = {}) {
  const svm_model model = train(train_ds, opts, std::move(subset));
  accuracy_record rec;
  rec.label = std::move(label);
  rec.train_accuracy = measure(model, train_ds).accuracy();
  rec.confusion = measure(model, test_ds);
  rec.test_accuracy = rec.confusion.accuracy();
  rec.train_size = train_ds.size();
  rec.test_size = test_ds.size();
  rec.seed = seed;
  return rec;
}

// Suffix any repeated label with its occurrence ordinal so report labels
// stay unique keys.
inline void make_labels_unique(std::vector<accuracy_record>& records) {
  std::map<std::string, int> seen;
  for (accuracy_record& rec : records) {
    const int n = ++seen[rec.label];
    if (n > 1) rec.label += "#" + std::to_string(n);
  }
}

inline std::string orientation_name(const dataset& ds) {
  return ds.positive_code == malignant_code ? "malignant" : "benign";
}

inline config_echo sweep_config(const dataset& ds, const partition_spec& spec, const train_options& opts) {
  config_echo config;
  config.add("c", opts.c);
  config.add("tol", opts.tol);
  config.add("seed", opts.seed);
  config.add("partition_seed", spec.seed);
  config.add("stratified", spec.stratified);
  config.add("positive_class", orientation_name(ds));
  return config;
}

}  // namespace detail

// Partitions, trains on the train side, and scores both sides.
inline accuracy_record evaluate_split(const dataset& ds, const partition_spec& spec, const train_options& opts,
                                      std::string label = {}) {
  const auto [train_ds, test_ds] = partition(ds, spec);
  if (label.empty()) label = fraction_label(spec.train_fraction);
  return detail::evaluate_pair(train_ds, test_ds, opts, std::move(label), spec.seed);
}

// Table 4: accuracy as a function of the train/test partition size.
inline sweep_report partition_sweep(const dataset& ds, const std::vector<double>& fractions,
                                    const partition_spec& base, const train_options& opts) {
  if (fractions.empty()) throw std::invalid_argument("fractions must be non-empty");
  sweep_report report;
  report.config = detail::sweep_config(ds, base, opts);
  std::string fraction_list;
  for (std::size_t i = 0; i < fractions.size(); ++i) {
    if (i > 0) fraction_list += ',';
    fraction_list += detail::fmt_double(fractions[i], "%g");
  }
  report.config.add("fractions", fraction_list);
  for (double f : fractions) {
    partition_spec spec = base;
    spec.train_fraction = f;
    report.records.push_back(evaluate_split(ds, spec, opts));
  }
  detail::make_labels_unique(report.records);
  return report;
}

// Table 5: accuracy as a function of the retained feature subset, on one
// fixed partition.
inline sweep_report ablation_sweep(const dataset& ds, const std::vector<std::vector<int>>& sets,
                                   const partition_spec& spec, const train_options& opts) {
  if (sets.empty()) throw std::invalid_argument("sets must be non-empty");
  sweep_report report;
  report.config = detail::sweep_config(ds, spec, opts);
  report.config.add("fraction", spec.train_fraction);
  const auto [train_full, test_full] = partition(ds, spec);
  for (const std::vector<int>& subset : sets) {
    const dataset train_ds = project_features(train_full, subset);
    const dataset test_ds = project_features(test_full, subset);
    report.records.push_back(
        detail::evaluate_pair(train_ds, test_ds, opts, set_label(subset), spec.seed, subset));
  }
  detail::make_labels_unique(report.records);
  return report;
}

// Repeats one split across seeds; quantifies how much a single-seed number
// can be trusted.
struct seed_stats {
  double mean = 0.0;
  double stddev = 0.0;  // sample standard deviation of test accuracy
  std::vector<accuracy_record> records;
};

inline seed_stats seed_stability(const dataset& ds, const partition_spec& base, const train_options& opts,
                                 const std::vector<std::uint64_t>& seeds) {
  if (seeds.empty()) throw std::invalid_argument("seeds must be non-empty");
  seed_stats stats;
  for (std::uint64_t s : seeds) {
    partition_spec spec = base;
    spec.seed = s;
    stats.records.push_back(evaluate_split(ds, spec, opts, "seed " + std::to_string(s)));
  }
  double sum = 0.0;
  for (const accuracy_record& rec : stats.records) sum += rec.test_accuracy;
  stats.mean = sum / static_cast<double>(stats.records.size());
  if (stats.records.size() > 1) {
    double ss = 0.0;
    for (const accuracy_record& rec : stats.records) {
      const double d = rec.test_accuracy - stats.mean;
      ss += d * d;
    }
    stats.stddev = std::sqrt(ss / static_cast<double>(stats.records.size() - 1));
  }
  return stats;
}

inline void write_sweep_report(std::ostream& out, const sweep_report& report) {
  write_config(out, report.config);
  out << "label\ttrain_accuracy\ttest_accuracy\ttrain_size\ttest_size\tseed\ttp\tfp\ttn\tfn\n";
  for (const accuracy_record& rec : report.records) {
    out << rec.label << '\t' << detail::fmt_double(rec.train_accuracy, "%.6g") << '\t'
        << detail::fmt_double(rec.test_accuracy, "%.6g") << '\t' << rec.train_size << '\t' << rec.test_size << '\t'
        << rec.seed << '\t' << rec.confusion.tp << '\t' << rec.confusion.fp << '\t' << rec.confusion.tn << '\t'
        << rec.confusion.fn << '\n';
  }
}

// Grouped-bar data for the Table 4 / Table 5 charts, one decimal place.
inline void emit_chart_data(std::ostream& out, const sweep_report& report) {
  write_config(out, report.config);
  if (report.records.empty()) out << "# warning: no records to chart\n";
  out << "label,train_accuracy,test_accuracy\n";
  for (const accuracy_record& rec : report.records) {
    out << rec.label << ',' << detail::fmt_double(rec.train_accuracy, "%.1f") << ','
        << detail::fmt_double(rec.test_accuracy, "%.1f") << '\n';
  }
}

struct chart_row {
  std::string label;
  double train_accuracy = 0.0;
  double test_accuracy = 0.0;
};

// Parses emit_chart_data output back into rows (round-trip check support).
inline std::vector<chart_row> parse_chart_data(std::istream& in) {
  std::vector<chart_row> rows;
  std::string line;
  bool header_seen = false;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line.front() == '#') continue;
    if (!header_seen) {
      if (line != "label,train_accuracy,test_accuracy")
        throw parse_error("line " + std::to_string(line_no) + ": unexpected chart header");
      header_seen = true;
      continue;
    }
    const auto fields = detail::split_fields(line, ',');
    if (fields.size() != 3)
      throw parse_error("line " + std::to_string(line_no) + ": expected 3 chart fields, got " +
                        std::to_string(fields.size()));
    chart_row row;
    row.label = std::string(fields[0]);
    if (!detail::parse_double_token(fields[1], row.train_accuracy) ||
        !detail::parse_double_token(fields[2], row.test_accuracy))
      throw parse_error("line " + std::to_string(line_no) + ": malformed accuracy value");
    rows.push_back(std::move(row));
  }
  if (!header_seen) throw parse_error("chart stream has no header");
  return rows;
}

}  // namespace fsvm
