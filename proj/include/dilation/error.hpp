#pragma once

#include <stdexcept>
#include <string>

namespace dilation {

// Raised when an operation's precondition does not hold. `code` names the
// violated condition (e.g. "not_square", "not_a_contraction"); `value` carries
// the offending measurement when one exists (a norm, an eigenvalue, a gap).
class PreconditionError : public std::invalid_argument {
 public:
  PreconditionError(std::string code, const std::string& message,
                    double value = 0.0)
      : std::invalid_argument(code + ": " + message),
        code_(std::move(code)),
        value_(value) {}

  const std::string& code() const noexcept { return code_; }
  double value() const noexcept { return value_; }

 private:
  std::string code_;
  double value_;
};

// A multi-stage pipeline failure; wraps the underlying message with the
// stage that raised it.
class StageError : public std::runtime_error {
 public:
  StageError(std::string stage, const std::string& message)
      : std::runtime_error("[" + stage + "] " + message),
        stage_(std::move(stage)) {}

  const std::string& stage() const noexcept { return stage_; }

 private:
  std::string stage_;
};

}  // namespace dilation
