#include <catch2/catch_amalgamated.hpp>

#include <cstdio>
#include <random>
#include <sstream>
#include <vector>

#include "fsvm/fsvm.hpp"
#include "helpers.hpp"

using Catch::Matchers::ContainsSubstring;

namespace {

std::string save_to_string(const fsvm::svm_model& model) {
  std::ostringstream out;
  fsvm::save_model(out, model);
  return out.str();
}

fsvm::svm_model load_from_string(const std::string& text) {
  std::istringstream in(text);
  return fsvm::load_model(in);
}

// A syntactically complete single-SV file with the given row and preamble.
std::string one_sv_file(const std::string& row, const std::string& features = "features 1",
                        const std::string& kernel = "kernel linear") {
  return std::string(fsvm::model_magic) + "\n" + kernel + "\nc 10\n" + features + "\nbias 0\nsupport_vectors 1\n" +
         row + "\n";
}

}  // namespace

TEST_CASE("two-point model survives a text round trip bit for bit", "[model_io]") {
  const fsvm::svm_model model = fsvm::train(testutil::two_point(), {});
  const fsvm::svm_model back = load_from_string(save_to_string(model));

  CHECK(back.training_ids == model.training_ids);
  CHECK(back.alphas == model.alphas);
  CHECK(back.labels == model.labels);
  CHECK(back.vectors == model.vectors);
  CHECK(back.bias == model.bias);
  CHECK(back.c == model.c);
  CHECK(back.feature_subset == model.feature_subset);
  CHECK(back.kernel.kind == model.kernel.kind);
}

TEST_CASE("saved files keep support vectors only and preserve the decision function", "[model_io]") {
  const auto [train_ds, test_ds] = fsvm::partition(testutil::wbc().ds, {});
  const fsvm::svm_model model = fsvm::train(train_ds, {});
  REQUIRE(model.support_count() < model.size());

  const std::string text = save_to_string(model);
  const fsvm::svm_model back = load_from_string(text);
  CHECK(back.size() == model.support_count());
  for (double a : back.alphas) CHECK(a > 0.0);

  // Zero-weight rows contribute exactly nothing, so the reloaded expansion is
  // identical on every probe, not merely close.
  for (std::size_t i = 0; i < test_ds.size(); i += 17) {
    const auto& probe = test_ds.instances[i].features;
    CHECK(fsvm::discriminant(back, probe) == fsvm::discriminant(model, probe));
  }

  // Saving the reloaded model reproduces the same bytes.
  CHECK(save_to_string(back) == text);
}

TEST_CASE("truncated model files are rejected at every prefix", "[model_io]") {
  const std::string text = save_to_string(fsvm::train(testutil::two_point(), {}));
  const auto lines = testutil::lines_of(text);
  REQUIRE(lines.size() == 8);  // 6 header lines + 2 support vectors

  for (std::size_t keep = 0; keep < lines.size(); ++keep) {
    std::string prefix;
    for (std::size_t i = 0; i < keep; ++i) prefix += lines[i] + "\n";
    INFO("prefix of " << keep << " lines");
    CHECK_THROWS_AS(load_from_string(prefix), fsvm::model_format_error);
  }
  CHECK_THROWS_WITH(load_from_string(""), ContainsSubstring("magic"));
}

TEST_CASE("malformed model files name the offending line", "[model_io]") {
  CHECK_THROWS_AS(load_from_string("not a model\n"), fsvm::model_format_error);
  CHECK_THROWS_WITH(load_from_string("not a model\n"), ContainsSubstring("magic"));

  SECTION("unknown kernel") {
    const std::string text = one_sv_file("a 1 1 2", "features 1", "kernel rbf");
    CHECK_THROWS_AS(load_from_string(text), fsvm::model_format_error);
    CHECK_THROWS_WITH(load_from_string(text), ContainsSubstring("kernel"));
  }
  SECTION("label must be +/-1") {
    const std::string text = one_sv_file("a 1 2 2");
    CHECK_THROWS_AS(load_from_string(text), fsvm::model_format_error);
    CHECK_THROWS_WITH(load_from_string(text), ContainsSubstring("label"));
  }
  SECTION("row field count must match the feature list") {
    const std::string text = one_sv_file("a 1 1 2 3", "features 1");
    CHECK_THROWS_AS(load_from_string(text), fsvm::model_format_error);
    CHECK_THROWS_WITH(load_from_string(text), ContainsSubstring("expected 4"));
  }
  SECTION("duplicate feature index") {
    const std::string text = one_sv_file("a 1 1 2 3", "features 3 3");
    CHECK_THROWS_AS(load_from_string(text), fsvm::model_format_error);
    CHECK_THROWS_WITH(load_from_string(text), ContainsSubstring("duplicate"));
  }
  SECTION("zero feature index") {
    CHECK_THROWS_AS(load_from_string(one_sv_file("a 1 1 2", "features 0")), fsvm::model_format_error);
  }
  SECTION("unparseable numbers") {
    CHECK_THROWS_AS(load_from_string(one_sv_file("a x 1 2")), fsvm::model_format_error);
    CHECK_THROWS_AS(load_from_string(one_sv_file("a 1 1 2x")), fsvm::model_format_error);
  }
  SECTION("non-finite values") {
    const std::string text = std::string(fsvm::model_magic) +
                             "\nkernel linear\nc 10\nfeatures 1\nbias inf\nsupport_vectors 0\n";
    CHECK_THROWS_AS(load_from_string(text), fsvm::model_format_error);
  }
  SECTION("trailing content") {
    const std::string text = one_sv_file("a 1 1 2") + "b 1 -1 3\n";
    CHECK_THROWS_AS(load_from_string(text), fsvm::model_format_error);
    CHECK_THROWS_WITH(load_from_string(text), ContainsSubstring("trailing"));
  }
  SECTION("trailing blank lines are fine") {
    // alpha*label sums to zero across the two rows
    const std::string text = std::string(fsvm::model_magic) +
                             "\nkernel linear\nc 10\nfeatures 1\nbias 0\nsupport_vectors 2\n"
                             "a 1 1 2\nb 1 -1 3\n\n  \n";
    CHECK_NOTHROW(load_from_string(text));
  }
}

TEST_CASE("model invariants are enforced on load", "[model_io]") {
  SECTION("alpha above c") {
    CHECK_THROWS_AS(load_from_string(one_sv_file("a 11 1 2")), fsvm::invariant_violation_error);
  }
  SECTION("negative alpha") {
    CHECK_THROWS_AS(load_from_string(one_sv_file("a -0.25 1 2")), fsvm::invariant_violation_error);
  }
  SECTION("alpha-label balance") {
    const std::string text = one_sv_file("a 1 1 2");  // sum alpha*y = 1
    CHECK_THROWS_AS(load_from_string(text), fsvm::invariant_violation_error);
    CHECK_THROWS_WITH(load_from_string(text), ContainsSubstring("1e-6"));
  }
}

TEST_CASE("model path overloads write and read files", "[model_io]") {
  const auto dir = testutil::scratch_dir();
  const std::string path = (dir / "two_point.fsvm").string();
  const fsvm::svm_model model = fsvm::train(testutil::two_point(), {});

  fsvm::save_model(path, model);
  const fsvm::svm_model back = fsvm::load_model(path);
  CHECK(back.alphas == model.alphas);
  CHECK(back.bias == model.bias);

  CHECK_THROWS_WITH(fsvm::load_model((dir / "missing.fsvm").string()), ContainsSubstring("cannot open"));
  std::remove(path.c_str());
}

TEST_CASE("save_model rejects inconsistent in-memory models", "[model_io]") {
  fsvm::svm_model broken = fsvm::train(testutil::two_point(), {});
  broken.labels.pop_back();
  std::ostringstream out;
  CHECK_THROWS_AS(fsvm::save_model(out, broken), fsvm::consistency_error);
}
