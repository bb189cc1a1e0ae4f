// fsvm command-line driver: feature scoring, training, prediction, and the
// partition/ablation experiment sweeps, with every artifact carrying its
// effective configuration as '#' comment lines.

#include <algorithm>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "fsvm/fsvm.hpp"

namespace {

struct options {
  std::string data_path;
  std::string model_path = "model.fsvm";
  std::string out_path = "-";
  std::string chart_path;
  std::string manifest_path;
  double c = 10.0;
  double tol = 1e-3;
  std::uint64_t seed = 0;
  double fraction = 0.5;
  std::string fractions_arg;
  std::string sets_arg;
  bool no_stratify = false;
  std::string positive_class = "malignant";
  std::string scale = "none";
};

// Output sink: '-' is stdout, anything else a file created fresh.
class sink {
 public:
  explicit sink(const std::string& path) : path_(path) {
    if (path != "-") {
      file_.open(path);
      if (!file_) throw fsvm::error("cannot open " + path);
    }
  }
  std::ostream& stream() { return path_ == "-" ? std::cout : file_; }
  void finish() {
    stream().flush();
    if (!stream()) throw fsvm::error("failed writing " + (path_ == "-" ? std::string("stdout") : path_));
  }

 private:
  std::string path_;
  std::ofstream file_;
};

fsvm::label_orientation orientation_of(const options& opt) {
  return opt.positive_class == "benign" ? fsvm::label_orientation::benign_positive
                                        : fsvm::label_orientation::malignant_positive;
}

// Loads and optionally rescales the dataset; `allow_empty` turns the
// no-usable-rows case into nullopt instead of an error (predict semantics).
std::optional<fsvm::dataset> load_data(const options& opt, bool allow_empty = false) {
  std::ifstream in(opt.data_path);
  if (!in) throw fsvm::error("cannot open " + opt.data_path);
  std::size_t dropped = 0;
  std::optional<fsvm::dataset> ds;
  try {
    ds = fsvm::load_wbc(in, orientation_of(opt), &dropped);
  } catch (const fsvm::empty_dataset_error&) {
    if (!allow_empty) throw;
  }
  if (dropped > 0) std::cerr << "dropped " << dropped << " instances\n";
  if (ds && opt.scale == "unit") ds = fsvm::scale_unit(*ds);
  return ds;
}

fsvm::partition_spec partition_of(const options& opt) {
  fsvm::partition_spec spec;
  spec.train_fraction = opt.fraction;
  spec.seed = opt.seed;
  spec.stratified = !opt.no_stratify;
  return spec;
}

fsvm::train_options train_options_of(const options& opt) {
  fsvm::train_options topt;
  topt.c = opt.c;
  topt.tol = opt.tol;
  topt.seed = opt.seed;
  return topt;
}

std::vector<double> parse_fractions(const std::string& arg) {
  if (arg.empty()) return fsvm::default_fractions();
  std::vector<double> out;
  for (std::string_view tok : fsvm::detail::split_fields(arg, ',')) {
    double f = 0.0;
    if (!fsvm::detail::parse_double_token(fsvm::detail::trim(tok), f))
      throw fsvm::error("malformed fraction '" + std::string(tok) + "'");
    out.push_back(f);
  }
  return out;
}

std::vector<std::vector<int>> parse_sets(const std::string& arg) {
  if (arg.empty()) return fsvm::default_ablation_sets();
  std::vector<std::vector<int>> out;
  for (std::string_view group : fsvm::detail::split_fields(arg, ';')) {
    std::vector<int> set;
    for (std::string_view tok : fsvm::detail::split_fields(group, ',')) {
      long v = 0;
      if (!fsvm::detail::parse_int(fsvm::detail::trim(tok), v))
        throw fsvm::error("malformed feature index '" + std::string(tok) + "'");
      set.push_back(static_cast<int>(v));
    }
    out.push_back(std::move(set));
  }
  return out;
}

std::string join_sets(const std::vector<std::vector<int>>& sets) {
  std::string out;
  for (std::size_t i = 0; i < sets.size(); ++i) {
    if (i > 0) out += ';';
    for (std::size_t j = 0; j < sets[i].size(); ++j) {
      if (j > 0) out += ',';
      out += std::to_string(sets[i][j]);
    }
  }
  return out;
}

std::string join_fractions(const std::vector<double>& fractions) {
  std::string out;
  for (std::size_t i = 0; i < fractions.size(); ++i) {
    if (i > 0) out += ',';
    out += fsvm::detail::fmt_double(fractions[i], "%g");
  }
  return out;
}

// Chart path defaulting: sibling of the report file, or chart.csv for stdout.
std::string chart_path_of(const options& opt) {
  if (!opt.chart_path.empty()) return opt.chart_path;
  if (opt.out_path == "-") return "chart.csv";
  std::string base = opt.out_path;
  if (base.size() > 4 && base.ends_with(".tsv")) base.resize(base.size() - 4);
  return base + ".chart.csv";
}

// Decision D13: a subset-trained model applied to full-width rows projects
// the configured subset automatically; narrower input must already match.
fsvm::dataset maybe_project(const fsvm::dataset& ds, const fsvm::svm_model& model) {
  if (ds.dimension() == model.dimension()) return ds;
  const auto& subset = model.feature_subset;
  const int max_index = subset.empty() ? 0 : *std::max_element(subset.begin(), subset.end());
  if (static_cast<std::size_t>(max_index) <= ds.dimension()) {
    std::string joined;
    for (std::size_t i = 0; i < subset.size(); ++i) {
      if (i > 0) joined += ',';
      joined += std::to_string(subset[i]);
    }
    std::cerr << "note: projecting " << ds.dimension() << "-feature input onto model feature subset " << joined
              << "\n";
    return fsvm::project_features(ds, subset);
  }
  throw fsvm::shape_error("input has " + std::to_string(ds.dimension()) + " features but the model needs feature " +
                          std::to_string(max_index));
}

fsvm::config_echo base_config(const char* command, const options& opt) {
  fsvm::config_echo config;
  config.add("command", command);
  config.add("data", opt.data_path);
  config.add("out", opt.out_path);
  config.add("positive_class", opt.positive_class);
  config.add("scale", opt.scale);
  return config;
}

// Appends library-produced entries, keeping the first occurrence of any key
// the CLI has already echoed.
void merge_config(fsvm::config_echo& into, const fsvm::config_echo& extra) {
  for (const auto& entry : extra.entries) {
    const bool present = std::any_of(into.entries.begin(), into.entries.end(),
                                     [&](const auto& e) { return e.first == entry.first; });
    if (!present) into.entries.push_back(entry);
  }
}

int cmd_fscore(const options& opt) {
  const fsvm::dataset ds = *load_data(opt);
  const fsvm::fscore_ranking ranking = fsvm::rank_features(ds);
  sink out(opt.out_path);
  fsvm::write_config(out.stream(), base_config("fscore", opt));
  fsvm::write_ranking(ranking, ds, out.stream());
  out.finish();
  return 0;
}

int cmd_train(const options& opt) {
  const fsvm::dataset ds = *load_data(opt);
  const auto [train_ds, test_ds] = fsvm::partition(ds, partition_of(opt));
  const fsvm::svm_model model = fsvm::train(train_ds, train_options_of(opt));
  const auto rows = fsvm::report_training(model, train_ds);

  fsvm::save_model(opt.model_path, model);

  fsvm::config_echo config = base_config("train", opt);
  config.add("model", opt.model_path);
  config.add("c", opt.c);
  config.add("tol", opt.tol);
  config.add("seed", opt.seed);
  config.add("fraction", opt.fraction);
  config.add("stratified", !opt.no_stratify);
  config.add("train_size", train_ds.size());
  config.add("test_size", test_ds.size());

  sink out(opt.out_path);
  fsvm::write_training_report(out.stream(), rows, config);
  out.finish();

  if (!opt.manifest_path.empty()) {
    sink manifest(opt.manifest_path);
    fsvm::write_config(manifest.stream(), config);
    fsvm::write_partition_manifest(train_ds, test_ds, manifest.stream());
    manifest.finish();
  }
  return 0;
}

int run_prediction(const options& opt, bool with_accuracy) {
  const fsvm::svm_model model = fsvm::load_model(opt.model_path);
  std::optional<fsvm::dataset> ds = load_data(opt, /*allow_empty=*/true);

  fsvm::config_echo config = base_config(with_accuracy ? "report" : "predict", opt);
  config.add("model", opt.model_path);

  std::vector<fsvm::example_report> rows;
  if (ds) {
    const fsvm::dataset projected = maybe_project(*ds, model);
    rows = fsvm::report_test(model, projected);
    if (with_accuracy) {
      const fsvm::confusion_counts counts = fsvm::measure(model, projected);
      config.add("accuracy", fsvm::detail::fmt_double(counts.accuracy(), "%.6g"));
      config.add("tp", counts.tp);
      config.add("fp", counts.fp);
      config.add("tn", counts.tn);
      config.add("fn", counts.fn);
    }
  } else {
    std::cerr << "warning: no usable instances in " << opt.data_path << "; writing header-only report\n";
  }

  sink out(opt.out_path);
  fsvm::write_test_report(out.stream(), rows, config);
  out.finish();
  return 0;
}

int cmd_sweep(const options& opt) {
  const fsvm::dataset ds = *load_data(opt);
  const std::vector<double> fractions = parse_fractions(opt.fractions_arg);
  fsvm::sweep_report report = fsvm::partition_sweep(ds, fractions, partition_of(opt), train_options_of(opt));

  fsvm::config_echo config = base_config("sweep", opt);
  config.add("chart", chart_path_of(opt));
  config.add("fractions", join_fractions(fractions));
  merge_config(config, report.config);
  report.config = std::move(config);

  sink out(opt.out_path);
  fsvm::write_sweep_report(out.stream(), report);
  out.finish();
  sink chart(chart_path_of(opt));
  fsvm::emit_chart_data(chart.stream(), report);
  chart.finish();
  return 0;
}

int cmd_ablate(const options& opt) {
  const fsvm::dataset ds = *load_data(opt);
  const std::vector<std::vector<int>> sets = parse_sets(opt.sets_arg);
  fsvm::sweep_report report = fsvm::ablation_sweep(ds, sets, partition_of(opt), train_options_of(opt));

  fsvm::config_echo config = base_config("ablate", opt);
  config.add("chart", chart_path_of(opt));
  config.add("sets", join_sets(sets));
  merge_config(config, report.config);
  report.config = std::move(config);

  sink out(opt.out_path);
  fsvm::write_sweep_report(out.stream(), report);
  out.finish();
  sink chart(chart_path_of(opt));
  fsvm::emit_chart_data(chart.stream(), report);
  chart.finish();
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"F-score feature selection and SVM training on the Wisconsin breast cancer data"};
  app.require_subcommand(1);

  options opt;
  const auto orientation_check = CLI::IsMember({"malignant", "benign"});
  const auto scale_check = CLI::IsMember({"none", "unit"});

  auto add_data_flags = [&](CLI::App* cmd) {
    cmd->add_option("--data", opt.data_path, "input dataset (UCI WBC layout)")->required();
    cmd->add_option("--positive-class", opt.positive_class, "class mapped to +1")
        ->default_val("malignant")
        ->check(orientation_check);
    cmd->add_option("--scale", opt.scale, "feature scaling")->default_val("none")->check(scale_check);
  };
  auto add_solver_flags = [&](CLI::App* cmd) {
    cmd->add_option("--c", opt.c, "soft-margin box constraint")->default_val(10.0);
    cmd->add_option("--tol", opt.tol, "KKT tolerance")->default_val(1e-3);
    cmd->add_option("--seed", opt.seed, "seed for partitioning and the solver")->default_val(0);
  };
  auto add_partition_flags = [&](CLI::App* cmd) {
    cmd->add_option("--fraction", opt.fraction, "train fraction of the split")->default_val(0.5);
    cmd->add_flag("--no-stratify", opt.no_stratify, "split without preserving class balance");
  };

  CLI::App* fscore = app.add_subcommand("fscore", "rank features by F-score");
  add_data_flags(fscore);
  fscore->add_option("--out", opt.out_path, "ranking file ('-' for stdout)")->default_val("-");

  CLI::App* train = app.add_subcommand("train", "train on one partition and write model + training report");
  add_data_flags(train);
  add_solver_flags(train);
  add_partition_flags(train);
  train->add_option("--model", opt.model_path, "model file to write")->default_val("model.fsvm");
  train->add_option("--out", opt.out_path, "training report ('-' for stdout)")->default_val("-");
  train->add_option("--manifest", opt.manifest_path, "also write the partition id manifest");

  CLI::App* predict = app.add_subcommand("predict", "classify rows with a saved model");
  add_data_flags(predict);
  predict->add_option("--model", opt.model_path, "model file to read")->required();
  predict->add_option("--out", opt.out_path, "test report ('-' for stdout)")->default_val("-");

  CLI::App* report = app.add_subcommand("report", "predict plus accuracy accounting against known labels");
  add_data_flags(report);
  report->add_option("--model", opt.model_path, "model file to read")->required();
  report->add_option("--out", opt.out_path, "test report ('-' for stdout)")->default_val("-");

  CLI::App* sweep = app.add_subcommand("sweep", "accuracy across train/test partition sizes");
  add_data_flags(sweep);
  add_solver_flags(sweep);
  sweep->add_flag("--no-stratify", opt.no_stratify, "split without preserving class balance");
  sweep->add_option("--fractions", opt.fractions_arg, "comma-separated train fractions");
  sweep->add_option("--out", opt.out_path, "sweep report path")->default_val("sweep_report.tsv");
  sweep->add_option("--chart", opt.chart_path, "chart data path (default: report name + .chart.csv)");

  CLI::App* ablate = app.add_subcommand("ablate", "accuracy across feature subsets on one partition");
  add_data_flags(ablate);
  add_solver_flags(ablate);
  add_partition_flags(ablate);
  ablate->add_option("--sets", opt.sets_arg, "semicolon-separated feature index lists, e.g. 1,3,6;1,2,3");
  ablate->add_option("--out", opt.out_path, "ablation report path")->default_val("ablation_report.tsv");
  ablate->add_option("--chart", opt.chart_path, "chart data path (default: report name + .chart.csv)");

  CLI11_PARSE(app, argc, argv);

  try {
    if (fscore->parsed()) return cmd_fscore(opt);
    if (train->parsed()) return cmd_train(opt);
    if (predict->parsed()) return run_prediction(opt, false);
    if (report->parsed()) return run_prediction(opt, true);
    if (sweep->parsed()) return cmd_sweep(opt);
    if (ablate->parsed()) return cmd_ablate(opt);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 1;
}
