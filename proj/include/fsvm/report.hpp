#pragma once

#include <algorithm>
#include <concepts>
#include <ostream>
#include <string>
#include <utility>
#include <vector>

#include "fsvm/dataset.hpp"
#include "fsvm/error.hpp"
#include "fsvm/format.hpp"
#include "fsvm/svm.hpp"

namespace fsvm {

// The effective run parameters, echoed verbatim into every artifact behind a
// '#' comment marker so a run can be reproduced from its own output.
struct config_echo {
  std::vector<std::pair<std::string, std::string>> entries;

  config_echo& add(std::string key, std::string value) {
    entries.emplace_back(std::move(key), std::move(value));
    return *this;
  }
  config_echo& add(std::string key, const char* value) { return add(std::move(key), std::string(value)); }
  // echo lines are for humans and reruns; %g keeps 0.6 as "0.6"
  config_echo& add(std::string key, double value) { return add(std::move(key), detail::fmt_double(value, "%g")); }
  config_echo& add(std::string key, bool value) { return add(std::move(key), value ? "true" : "false"); }
  template <std::integral T>
    requires(!std::same_as<T, bool>)
  config_echo& add(std::string key, T value) {
    return add(std::move(key), std::to_string(value));
  }
};

inline void write_config(std::ostream& out, const config_echo& config) {
  for (const auto& [key, value] : config.entries) out << "# " << key << '=' << value << '\n';
}

// One row of a Gist-style report. `label` and `weight` are meaningful for
// training reports only.
struct example_report {
  std::string id;
  int label = 0;
  double weight = 0.0;
  int classification = 0;
  double discriminant = 0.0;
  bool boundary_tie = false;
};

namespace detail {

inline void sort_by_discriminant(std::vector<example_report>& rows) {
  std::stable_sort(rows.begin(), rows.end(),
                   [](const example_report& a, const example_report& b) { return a.discriminant > b.discriminant; });
}

}  // namespace detail

// Per-training-example weights and discriminants, ordered by descending
// discriminant. The dataset must be the one the model was trained on.
inline std::vector<example_report> report_training(const svm_model& model, const dataset& train) {
  if (model.size() != train.size())
    throw consistency_error("model has " + std::to_string(model.size()) + " rows but dataset has " +
                            std::to_string(train.size()));
  for (std::size_t k = 0; k < train.size(); ++k) {
    if (model.training_ids[k] != train.instances[k].id)
      throw consistency_error("model/dataset id mismatch at row " + std::to_string(k) + ": '" +
                              model.training_ids[k] + "' vs '" + train.instances[k].id + "'");
  }
  std::vector<example_report> rows;
  rows.reserve(train.size());
  for (std::size_t k = 0; k < train.size(); ++k) {
    const instance& in = train.instances[k];
    example_report row;
    row.id = in.id;
    row.label = in.label;
    // IEEE sign of 0*label keeps Gist's convention: non-support-vectors of
    // the negative class print as -0.
    row.weight = model.alphas[k] * in.label;
    row.discriminant = discriminant(model, in.features);
    row.boundary_tie = row.discriminant == 0.0;
    row.classification = row.discriminant > 0.0 ? +1 : -1;
    rows.push_back(std::move(row));
  }
  detail::sort_by_discriminant(rows);
  return rows;
}

// Classifications for previously unseen rows, ordered by descending
// discriminant. Labels in `test` (if meaningful) are carried through for the
// caller's accounting but are not part of the emitted report.
inline std::vector<example_report> report_test(const svm_model& model, const dataset& test) {
  std::vector<example_report> rows;
  rows.reserve(test.size());
  for (const instance& in : test.instances) {
    example_report row;
    row.id = in.id;
    row.label = in.label;
    row.discriminant = discriminant(model, in.features);
    row.boundary_tie = row.discriminant == 0.0;
    row.classification = row.discriminant > 0.0 ? +1 : -1;
    rows.push_back(std::move(row));
  }
  detail::sort_by_discriminant(rows);
  return rows;
}

inline void write_training_report(std::ostream& out, const std::vector<example_report>& rows,
                                  const config_echo& config = {}) {
  write_config(out, config);
  out << "example\tclass\tweight\ttrain_classification\ttrain_discriminant\n";
  for (const example_report& row : rows) {
    out << row.id << '\t' << row.label << '\t' << detail::fmt_double(row.weight, "%.6g") << '\t'
        << row.classification << '\t' << detail::fmt_double(row.discriminant, "%.6g") << '\n';
  }
}

inline void write_test_report(std::ostream& out, const std::vector<example_report>& rows,
                              const config_echo& config = {}) {
  write_config(out, config);
  out << "example\tclassification\tdiscriminant\n";
  for (const example_report& row : rows) {
    out << row.id << '\t' << row.classification << '\t' << detail::fmt_double(row.discriminant, "%.6g") << '\n';
  }
}

}  // namespace fsvm
