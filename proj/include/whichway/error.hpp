#pragma once

#include <stdexcept>
#include <string>

namespace whichway {

/// Failure category; the CLI maps these onto exit codes.
enum class ErrorKind {
  validation,  // bad input or configuration, detected before computing
  pipeline,    // a numerical stage failed (wraparound, no fringes, ...)
};

/// Exception carrying the module that raised it.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, std::string module, const std::string& what)
      : std::runtime_error(module + ": " + what), kind_(kind), module_(std::move(module)) {}

  ErrorKind kind() const noexcept { return kind_; }
  const std::string& module() const noexcept { return module_; }

 private:
  ErrorKind kind_;
  std::string module_;
};

inline Error validation_error(std::string module, const std::string& what) {
  return Error(ErrorKind::validation, std::move(module), what);
}

inline Error pipeline_error(std::string module, const std::string& what) {
  return Error(ErrorKind::pipeline, std::move(module), what);
}

}  // namespace whichway
