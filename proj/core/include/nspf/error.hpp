#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace nspf {

/// Base class for all errors raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Invalid input: bad configuration, violated precondition, malformed file.
/// Carries every problem found, not just the first.
class ValidationError : public Error {
 public:
  explicit ValidationError(std::string problem)
      : ValidationError(std::vector<std::string>{std::move(problem)}) {}
  explicit ValidationError(std::vector<std::string> problems)
      : Error(join(problems)), problems_(std::move(problems)) {}

  const std::vector<std::string>& problems() const noexcept { return problems_; }

 private:
  static std::string join(const std::vector<std::string>& items) {
    std::string out;
    for (const auto& item : items) {
      if (!out.empty()) out += "; ";
      out += item;
    }
    return out;
  }

  std::vector<std::string> problems_;
};

/// Non-finite values or a numerical procedure that cannot proceed.
class NumericalError : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace nspf
