#pragma once

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <cstdio>
#include <istream>
#include <numeric>
#include <ostream>
#include <random>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "fsvm/error.hpp"

namespace fsvm {

inline constexpr int wbc_feature_count = 9;

// Predictive attributes of the Wisconsin breast cancer table, in column order.
inline const std::array<std::string_view, wbc_feature_count> wbc_feature_names = {
    "clump_thickness",     "uniformity_of_cell_size", "uniformity_of_cell_shape",
    "marginal_adhesion",   "single_epithelial_cell_size", "bare_nuclei",
    "bland_chromatin",     "normal_nucleoli",         "mitoses",
};

// Which raw class code maps to +1.
enum class label_orientation { malignant_positive, benign_positive };

inline constexpr int benign_code = 2;
inline constexpr int malignant_code = 4;

inline int positive_code_of(label_orientation o) {
  return o == label_orientation::malignant_positive ? malignant_code : benign_code;
}

struct instance {
  std::string id;
  std::vector<double> features;
  int label = 0;  // +1 or -1
};

struct dataset {
  std::vector<instance> instances;
  std::vector<std::string> feature_names;
  std::size_t positive_count = 0;
  std::size_t negative_count = 0;
  int positive_code = malignant_code;  // raw class code carried by +1 instances

  std::size_t size() const { return instances.size(); }
  std::size_t dimension() const { return instances.empty() ? feature_names.size() : instances.front().features.size(); }
};

// Builds a dataset, checking shared dimensionality, label values, and class counts.
inline dataset make_dataset(std::vector<instance> instances, std::vector<std::string> feature_names = {},
                            int positive_code = malignant_code) {
  if (instances.empty()) throw empty_dataset_error("dataset has no instances");
  const std::size_t dim = instances.front().features.size();
  dataset ds;
  for (std::size_t i = 0; i < instances.size(); ++i) {
    const instance& in = instances[i];
    if (in.features.size() != dim)
      throw shape_error("instance " + std::to_string(i) + " has " + std::to_string(in.features.size()) +
                        " features, expected " + std::to_string(dim));
    if (in.label != +1 && in.label != -1)
      throw parse_error("instance " + std::to_string(i) + " has label " + std::to_string(in.label) +
                        ", expected +1 or -1");
    if (in.label > 0)
      ++ds.positive_count;
    else
      ++ds.negative_count;
  }
  if (feature_names.empty()) {
    for (std::size_t i = 0; i < dim; ++i) feature_names.push_back("feature_" + std::to_string(i + 1));
  } else if (feature_names.size() != dim) {
    throw shape_error("feature name count does not match dimensionality");
  }
  ds.instances = std::move(instances);
  ds.feature_names = std::move(feature_names);
  ds.positive_code = positive_code;
  return ds;
}

namespace detail {

inline std::vector<std::string_view> split_fields(std::string_view line, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    std::size_t pos = line.find(sep, start);
    if (pos == std::string_view::npos) {
      out.push_back(line.substr(start));
      break;
    }
    out.push_back(line.substr(start, pos - start));
    start = pos + 1;
  }
  return out;
}

inline bool parse_int(std::string_view s, long& out) {
  const char* first = s.data();
  const char* last = s.data() + s.size();
  auto [ptr, ec] = std::from_chars(first, last, out);
  return ec == std::errc() && ptr == last && first != last;
}

inline std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.back() == '\r' || s.back() == ' ' || s.back() == '\t')) s.remove_suffix(1);
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  return s;
}

}  // namespace detail

// Parses the UCI breast-cancer-wisconsin.data layout: 11 comma-separated
// fields per line, '?' as missing marker, no header. Records containing '?'
// are dropped; `dropped` (if given) receives their count.
inline dataset load_wbc(std::istream& in, label_orientation orientation = label_orientation::malignant_positive,
                        std::size_t* dropped = nullptr) {
  const int pos_code = positive_code_of(orientation);
  std::vector<instance> rows;
  std::size_t n_dropped = 0;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::string_view body = detail::trim(line);
    if (body.empty()) continue;
    auto fields = detail::split_fields(body, ',');
    if (fields.size() != 11)
      throw parse_error("line " + std::to_string(line_no) + ": expected 11 fields, got " +
                        std::to_string(fields.size()));
    bool missing = false;
    instance row;
    row.id = std::string(fields[0]);
    row.features.reserve(wbc_feature_count);
    for (int f = 1; f <= wbc_feature_count; ++f) {
      std::string_view v = detail::trim(fields[static_cast<std::size_t>(f)]);
      if (v == "?") {
        missing = true;
        continue;
      }
      long value = 0;
      if (!detail::parse_int(v, value))
        throw parse_error("line " + std::to_string(line_no) + ": attribute " + std::to_string(f + 1) +
                          " is not an integer or '?': '" + std::string(v) + "'");
      if (value < 1 || value > 10)
        throw parse_error("line " + std::to_string(line_no) + ": attribute " + std::to_string(f + 1) +
                          " out of range 1..10: " + std::to_string(value));
      row.features.push_back(static_cast<double>(value));
    }
    long cls = 0;
    if (!detail::parse_int(detail::trim(fields[10]), cls) || (cls != benign_code && cls != malignant_code))
      throw parse_error("line " + std::to_string(line_no) + ": class must be 2 or 4, got '" +
                        std::string(fields[10]) + "'");
    if (missing) {
      ++n_dropped;
      continue;
    }
    row.label = (cls == pos_code) ? +1 : -1;
    rows.push_back(std::move(row));
  }
  if (dropped) *dropped = n_dropped;
  if (rows.empty()) throw empty_dataset_error("no complete records in input");
  std::vector<std::string> names(wbc_feature_names.begin(), wbc_feature_names.end());
  return make_dataset(std::move(rows), std::move(names), pos_code);
}

// Writes a dataset back in the UCI layout. Integral feature values are
// printed as integers so that load/write/load is an identity on cleaned data.
inline void write_wbc(const dataset& ds, std::ostream& out) {
  char buf[32];
  for (const instance& in : ds.instances) {
    out << in.id;
    for (double v : in.features) {
      double ip;
      if (std::modf(v, &ip) == 0.0 && std::abs(v) < 1e15) {
        out << ',' << static_cast<long long>(v);
      } else {
        std::snprintf(buf, sizeof buf, "%.17g", v);
        out << ',' << buf;
      }
    }
    const int code = in.label > 0 ? ds.positive_code
                                  : (ds.positive_code == malignant_code ? benign_code : malignant_code);
    out << ',' << code << '\n';
  }
}

struct partition_spec {
  double train_fraction = 0.5;
  std::uint64_t seed = 0;
  bool stratified = true;
};

// Deterministic train/test split. Membership is decided by a seeded shuffle;
// both sides keep the instance order of the input dataset.
inline std::pair<dataset, dataset> partition(const dataset& ds, const partition_spec& spec) {
  const std::size_t n = ds.size();
  if (n == 0) throw empty_dataset_error("cannot partition an empty dataset");
  if (!(spec.train_fraction > 0.0 && spec.train_fraction < 1.0))
    throw invalid_partition_error("train_fraction must lie in (0,1), got " + std::to_string(spec.train_fraction));

  std::mt19937_64 rng(spec.seed);
  std::vector<char> in_train(n, 0);
  std::size_t train_total = 0;

  auto take = [&](std::vector<std::size_t>& idx, std::size_t count) {
    std::shuffle(idx.begin(), idx.end(), rng);
    for (std::size_t i = 0; i < count; ++i) in_train[idx[i]] = 1;
    train_total += count;
  };

  if (spec.stratified) {
    std::vector<std::size_t> pos, neg;
    for (std::size_t i = 0; i < n; ++i) (ds.instances[i].label > 0 ? pos : neg).push_back(i);
    take(pos, static_cast<std::size_t>(std::llround(spec.train_fraction * static_cast<double>(pos.size()))));
    take(neg, static_cast<std::size_t>(std::llround(spec.train_fraction * static_cast<double>(neg.size()))));
  } else {
    std::vector<std::size_t> all(n);
    std::iota(all.begin(), all.end(), std::size_t{0});
    take(all, static_cast<std::size_t>(std::llround(spec.train_fraction * static_cast<double>(n))));
  }

  if (train_total == 0 || train_total == n)
    throw invalid_partition_error("train_fraction " + std::to_string(spec.train_fraction) +
                                  " yields an empty side for " + std::to_string(n) + " instances");

  dataset train, test;
  train.feature_names = ds.feature_names;
  test.feature_names = ds.feature_names;
  train.positive_code = ds.positive_code;
  test.positive_code = ds.positive_code;
  for (std::size_t i = 0; i < n; ++i) {
    dataset& side = in_train[i] ? train : test;
    side.instances.push_back(ds.instances[i]);
    if (ds.instances[i].label > 0)
      ++side.positive_count;
    else
      ++side.negative_count;
  }
  return {std::move(train), std::move(test)};
}

// Keeps the 1-based feature positions listed in `keep`, in the given order.
inline dataset project_features(const dataset& ds, const std::vector<int>& keep) {
  const int dim = static_cast<int>(ds.dimension());
  if (keep.empty()) throw invalid_subset_error("feature subset is empty");
  std::vector<char> seen(static_cast<std::size_t>(dim), 0);
  for (int k : keep) {
    if (k < 1 || k > dim)
      throw invalid_subset_error("feature index " + std::to_string(k) + " outside 1.." + std::to_string(dim));
    if (seen[static_cast<std::size_t>(k - 1)])
      throw invalid_subset_error("duplicate feature index " + std::to_string(k));
    seen[static_cast<std::size_t>(k - 1)] = 1;
  }
  dataset out;
  out.positive_count = ds.positive_count;
  out.negative_count = ds.negative_count;
  out.positive_code = ds.positive_code;
  for (int k : keep) out.feature_names.push_back(ds.feature_names[static_cast<std::size_t>(k - 1)]);
  out.instances.reserve(ds.size());
  for (const instance& in : ds.instances) {
    instance proj;
    proj.id = in.id;
    proj.label = in.label;
    proj.features.reserve(keep.size());
    for (int k : keep) proj.features.push_back(in.features[static_cast<std::size_t>(k - 1)]);
    out.instances.push_back(std::move(proj));
  }
  return out;
}

// Optional scaling hook: min-max scales every feature to [0,1] over the
// dataset. Constant features map to 0.
inline dataset scale_unit(const dataset& ds) {
  dataset out = ds;
  const std::size_t dim = ds.dimension();
  for (std::size_t f = 0; f < dim; ++f) {
    double lo = ds.instances.front().features[f];
    double hi = lo;
    for (const instance& in : ds.instances) {
      lo = std::min(lo, in.features[f]);
      hi = std::max(hi, in.features[f]);
    }
    const double span = hi - lo;
    for (instance& in : out.instances) in.features[f] = span > 0.0 ? (in.features[f] - lo) / span : 0.0;
  }
  return out;
}

// Text manifest of a split: one id per line under a '# side count' heading.
inline void write_partition_manifest(const dataset& train, const dataset& test, std::ostream& out) {
  out << "# train " << train.size() << '\n';
  for (const instance& in : train.instances) out << in.id << '\n';
  out << "# test " << test.size() << '\n';
  for (const instance& in : test.instances) out << in.id << '\n';
}

}  // namespace fsvm
