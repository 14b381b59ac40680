#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace gsde {

class GsdeError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Invalid arguments to a type constructor or factory.
class ConstructionError : public GsdeError {
 public:
  using GsdeError::GsdeError;
};

// Configuration file problem, anchored to a source line when available.
class ConfigError : public GsdeError {
 public:
  ConfigError(const std::string& source, int line, const std::string& message)
      : GsdeError(source + ":" + std::to_string(line) + ": " + message), line_(line) {}
  explicit ConfigError(const std::string& message) : GsdeError(message) {}

  int line() const noexcept { return line_; }

 private:
  int line_ = 0;
};

// Non-finite solver state. Carries the offending step and path so the
// failure can be traced back to a concrete simulation input.
class BlowUpError : public GsdeError {
 public:
  BlowUpError(std::size_t step, const std::string& path_key)
      : GsdeError("solution state non-finite at step " + std::to_string(step) +
                  " (path " + path_key + ")"),
        step_(step),
        path_key_(path_key) {}

  std::size_t step() const noexcept { return step_; }
  const std::string& path_key() const noexcept { return path_key_; }

 private:
  std::size_t step_;
  std::string path_key_;
};

}  // namespace gsde

#define GSDE_REQUIRE(ExcType, cond, msg) \
  do {                                   \
    if (!(cond)) throw ExcType(msg);     \
  } while (0)
