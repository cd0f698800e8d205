#pragma once

#include <stdexcept>
#include <string>

namespace revpat {

/// Malformed or invalid user-supplied input (files, flags, DSL text).
/// The CLI maps this to exit code 2.
class InputError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A learner cannot proceed with the data it was given, e.g. single-class labels.
class TrainingError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace revpat
