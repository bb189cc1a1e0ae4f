#pragma once

#include <cmath>
#include <cstddef>
#include <fstream>
#include <istream>
#include <ostream>
#include <set>
#include <string>
#include <vector>

#include "fsvm/error.hpp"
#include "fsvm/format.hpp"
#include "fsvm/svm.hpp"

namespace fsvm {

inline constexpr const char* model_magic = "fsvm model v1";

// Text format, one support vector per line:
//   fsvm model v1
//   kernel linear
//   c 10
//   features 1 3 6 7 9
//   bias -0.21...
//   support_vectors N
//   <id> <alpha> <label> <f1> <f2> ...
// Doubles are written with %.17g so a save/load round trip reproduces the
// decision function bit for bit.
inline void save_model(std::ostream& out, const svm_model& model) {
  if (model.training_ids.size() != model.size() || model.labels.size() != model.size() ||
      model.vectors.size() != model.size())
    throw consistency_error("model rows are not the same length across fields");
  out << model_magic << '\n';
  out << "kernel " << to_string(model.kernel.kind) << '\n';
  out << "c " << detail::fmt_double(model.c) << '\n';
  out << "features";
  for (int f : model.feature_subset) out << ' ' << f;
  out << '\n';
  out << "bias " << detail::fmt_double(model.bias) << '\n';
  out << "support_vectors " << model.support_count() << '\n';
  for (std::size_t k = 0; k < model.size(); ++k) {
    if (model.alphas[k] == 0.0) continue;
    out << model.training_ids[k] << ' ' << detail::fmt_double(model.alphas[k]) << ' ' << model.labels[k];
    for (double v : model.vectors[k]) out << ' ' << detail::fmt_double(v);
    out << '\n';
  }
}

namespace detail {

struct model_reader {
  std::istream& in;
  std::size_t line_no = 0;

  std::string require_line(const char* what) {
    std::string line;
    if (!std::getline(in, line))
      throw model_format_error(std::string("unexpected end of model file, expected ") + what + " at line " +
                               std::to_string(line_no + 1));
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    return line;
  }

  [[noreturn]] void fail(const std::string& what) {
    throw model_format_error("line " + std::to_string(line_no) + ": " + what);
  }

  std::vector<std::string_view> require_fields(const std::string& line, const char* key) {
    auto fields = split_whitespace(line);
    if (fields.empty() || fields.front() != key) fail(std::string("expected '") + key + "' entry");
    return fields;
  }

  double parse_double(std::string_view tok, const char* what) {
    double v = 0.0;
    if (!parse_double_token(tok, v) || !std::isfinite(v)) fail(std::string("malformed ") + what);
    return v;
  }

  long parse_long(std::string_view tok, const char* what) {
    long v = 0;
    if (!parse_long_token(tok, v)) fail(std::string("malformed ") + what);
    return v;
  }
};

}  // namespace detail

inline svm_model load_model(std::istream& in) {
  detail::model_reader r{in};

  if (r.require_line("magic header") != model_magic)
    throw model_format_error("not an fsvm model file (bad magic line)");

  svm_model model;
  // Each header line is pinned in a named local: the parsed fields are views
  // into that string and must not outlive it.
  {
    const std::string line = r.require_line("kernel");
    const auto fields = r.require_fields(line, "kernel");
    if (fields.size() != 2) r.fail("kernel entry takes one value");
    model.kernel.kind = parse_kernel_kind(std::string(fields[1]));
  }
  {
    const std::string line = r.require_line("c");
    const auto fields = r.require_fields(line, "c");
    if (fields.size() != 2) r.fail("c entry takes one value");
    model.c = r.parse_double(fields[1], "c value");
    if (!(model.c > 0.0)) r.fail("c must be positive");
  }
  {
    const std::string line = r.require_line("features");
    const auto fields = r.require_fields(line, "features");
    if (fields.size() < 2) r.fail("features entry needs at least one index");
    std::set<long> seen;
    for (std::size_t i = 1; i < fields.size(); ++i) {
      const long f = r.parse_long(fields[i], "feature index");
      if (f < 1) r.fail("feature indices are 1-based");
      if (!seen.insert(f).second) r.fail("duplicate feature index");
      model.feature_subset.push_back(static_cast<int>(f));
    }
  }
  {
    const std::string line = r.require_line("bias");
    const auto fields = r.require_fields(line, "bias");
    if (fields.size() != 2) r.fail("bias entry takes one value");
    model.bias = r.parse_double(fields[1], "bias value");
  }
  std::size_t sv_count = 0;
  {
    const std::string line = r.require_line("support_vectors");
    const auto fields = r.require_fields(line, "support_vectors");
    if (fields.size() != 2) r.fail("support_vectors entry takes one value");
    const long n = r.parse_long(fields[1], "support vector count");
    if (n < 0) r.fail("support vector count cannot be negative");
    sv_count = static_cast<std::size_t>(n);
  }

  const std::size_t dim = model.feature_subset.size();
  for (std::size_t k = 0; k < sv_count; ++k) {
    auto line = r.require_line("support vector row");
    auto fields = detail::split_whitespace(line);
    if (fields.size() != 3 + dim)
      r.fail("support vector row has " + std::to_string(fields.size()) + " fields, expected " +
             std::to_string(3 + dim));
    model.training_ids.emplace_back(fields[0]);
    const double alpha = r.parse_double(fields[1], "alpha");
    const long label = r.parse_long(fields[2], "label");
    if (label != 1 && label != -1) r.fail("label must be 1 or -1");
    if (alpha < 0.0 || alpha > model.c)
      throw invariant_violation_error("line " + std::to_string(r.line_no) + ": alpha " +
                                      detail::fmt_double(alpha) + " outside [0, c]");
    std::vector<double> x(dim);
    for (std::size_t j = 0; j < dim; ++j) x[j] = r.parse_double(fields[3 + j], "feature value");
    model.alphas.push_back(alpha);
    model.labels.push_back(static_cast<int>(label));
    model.vectors.push_back(std::move(x));
  }

  // Nothing but blank lines may follow the last row.
  std::string extra;
  while (std::getline(in, extra)) {
    ++r.line_no;
    if (!detail::split_whitespace(extra).empty()) r.fail("trailing content after support vectors");
  }

  double alpha_label_sum = 0.0;
  for (std::size_t k = 0; k < model.size(); ++k) alpha_label_sum += model.alphas[k] * model.labels[k];
  if (std::abs(alpha_label_sum) > 1e-6)
    throw invariant_violation_error("sum of alpha*label is " + detail::fmt_double(alpha_label_sum) +
                                    ", exceeds 1e-6");
  return model;
}

inline void save_model(const std::string& path, const svm_model& model) {
  std::ofstream out(path);
  if (!out) throw error("cannot open " + path);
  save_model(out, model);
  if (!out) throw error("failed writing " + path);
}

inline svm_model load_model(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw error("cannot open " + path);
  return load_model(in);
}

}  // namespace fsvm
