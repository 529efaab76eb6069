#pragma once

#include <stdexcept>
#include <string>

namespace nrd {

/// Raised when a search or solver exhausts its configured budget.
class ResourceError : public std::runtime_error {
 public:
  explicit ResourceError(const std::string& what, long long partial = -1)
      : std::runtime_error(what), partial_(partial) {}

  /// Best value found before the budget ran out, or -1 if none.
  long long partial() const { return partial_; }

 private:
  long long partial_;
};

/// Raised when a construction that should be impossible to fail does fail.
class InternalError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

}  // namespace nrd
