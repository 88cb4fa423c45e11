#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <utility>

namespace iscc {

// Value-or-reason carrier for solver steps whose failure mode is
// "infeasible problem" rather than a programming error.
template <class T>
class Outcome {
 public:
  Outcome(T value) : value_(std::move(value)) {}  // NOLINT(implicit)

  static Outcome infeasible(std::string reason) {
    Outcome o;
    o.reason_ = std::move(reason);
    return o;
  }

  explicit operator bool() const { return value_.has_value(); }
  bool ok() const { return value_.has_value(); }

  const T& value() const {
    if (!value_) throw std::logic_error("Outcome::value on infeasible result: " + reason_);
    return *value_;
  }
  const T& operator*() const { return value(); }
  const T* operator->() const { return &value(); }

  const std::string& reason() const { return reason_; }

 private:
  Outcome() = default;
  std::optional<T> value_;
  std::string reason_;
};

}  // namespace iscc
