#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace treeknap {

enum class ErrorCode {
  kParentOrder,
  kNegativeValue,
  kOverflowRisk,
  kLengthMismatch,
  kParse,
  kUnknownState,
  kDuplicateRule,
  kBadShape,
  kInvalidAutomaton,
  kUnknownConstraint,
  kSizeGuard,
  kNotPrefixClosed,
  kUnsupported,
  kContractViolation,
};

const char* to_string(ErrorCode code);

// Every library failure is reported through this type. Parse errors carry a
// 1-based line and column; other errors leave them at zero.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}
  Error(ErrorCode code, const std::string& message, std::size_t line,
        std::size_t column)
      : std::runtime_error(message + " (line " + std::to_string(line) +
                           ", column " + std::to_string(column) + ")"),
        code_(code),
        line_(line),
        column_(column) {}

  ErrorCode code() const noexcept { return code_; }
  std::size_t line() const noexcept { return line_; }
  std::size_t column() const noexcept { return column_; }

  // Internal contract violations map to a different process exit code than
  // user-facing validation failures.
  bool is_contract_violation() const noexcept {
    return code_ == ErrorCode::kContractViolation;
  }

 private:
  ErrorCode code_;
  std::size_t line_ = 0;
  std::size_t column_ = 0;
};

}  // namespace treeknap
