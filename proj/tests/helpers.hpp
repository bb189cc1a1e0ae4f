#pragma once

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <sys/wait.h>
#include <unistd.h>

#include "fsvm/fsvm.hpp"

namespace testutil {

struct wbc_load {
  fsvm::dataset ds;
  std::size_t dropped = 0;
};

// The canonical Wisconsin file, loaded once per process.
inline const wbc_load& wbc() {
  static const wbc_load cached = [] {
    std::ifstream in(WBC_DATA_PATH);
    if (!in) throw std::runtime_error("cannot open " WBC_DATA_PATH);
    wbc_load out;
    out.ds = fsvm::load_wbc(in, fsvm::label_orientation::malignant_positive, &out.dropped);
    return out;
  }();
  return cached;
}

inline fsvm::instance inst(std::string id, std::vector<double> features, int label) {
  fsvm::instance in;
  in.id = std::move(id);
  in.features = std::move(features);
  in.label = label;
  return in;
}

// x=+1 (label +1), x=-1 (label -1): the symmetric hard-margin pair.
inline fsvm::dataset two_point() {
  return fsvm::make_dataset({inst("p", {1.0}, +1), inst("n", {-1.0}, -1)});
}

// 1-D, well separated: only the innermost pair become support vectors.
inline fsvm::dataset separated_line() {
  return fsvm::make_dataset({inst("p5", {5.0}, +1), inst("p6", {6.0}, +1), inst("p7", {7.0}, +1),
                             inst("n5", {-5.0}, -1), inst("n6", {-6.0}, -1), inst("n7", {-7.0}, -1)});
}

inline std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

inline void write_file(const std::filesystem::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open " + path.string());
  out << content;
}

// Scratch directory for CLI artifacts, unique per process, cleaned lazily by
// the OS tmp reaper.
inline const std::filesystem::path& scratch_dir() {
  static const std::filesystem::path dir = [] {
    auto d = std::filesystem::temp_directory_path() / ("fsvm_test_" + std::to_string(::getpid()));
    std::filesystem::create_directories(d);
    return d;
  }();
  return dir;
}

// Runs the CLI binary; returns its exit code, with stderr captured to a file.
inline int run_cli(const std::string& args, const std::filesystem::path& stderr_path = {}) {
  std::string cmd = std::string(FSVM_CLI_PATH) + " " + args;
  if (!stderr_path.empty()) cmd += " 2> " + stderr_path.string();
  const int status = std::system(cmd.c_str());
  if (status == -1) return -1;
  if (WIFEXITED(status)) return WEXITSTATUS(status);
  return -2;
}

inline std::vector<std::string> lines_of(const std::string& text) {
  std::vector<std::string> out;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) out.push_back(line);
  return out;
}

// Non-comment lines (the config echo block stripped).
inline std::vector<std::string> data_lines(const std::string& text) {
  std::vector<std::string> out;
  for (auto& line : lines_of(text))
    if (line.empty() || line.front() != '#') out.push_back(line);
  return out;
}

}  // namespace testutil
