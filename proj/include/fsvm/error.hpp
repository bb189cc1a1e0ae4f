#pragma once

#include <stdexcept>
#include <string>

namespace fsvm {

struct error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Malformed input record; the message names the offending line.
struct parse_error : error {
  using error::error;
};

struct empty_dataset_error : error {
  using error::error;
};

struct invalid_partition_error : error {
  using error::error;
};

struct invalid_subset_error : error {
  using error::error;
};

// A class has fewer instances than a sample variance needs.
struct insufficient_class_size_error : error {
  using error::error;
};

// Training set does not contain both classes.
struct degenerate_training_error : error {
  using error::error;
};

struct convergence_error : error {
  using error::error;
};

struct shape_error : error {
  using error::error;
};

struct consistency_error : error {
  using error::error;
};

// Unreadable, truncated, or wrong-version model stream.
struct model_format_error : error {
  using error::error;
};

// A loaded model violates a model invariant (e.g. alpha outside the box).
struct invariant_violation_error : error {
  using error::error;
};

}  // namespace fsvm
