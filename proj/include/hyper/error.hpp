#pragma once

#include <stdexcept>
#include <string>

namespace hyper {

enum class ErrorCode {
  kMalformedInput,
  kEmptyLog,
  kIo,
  kInvalidConfig,
  kUnknownUser,
  kUnknownRule,
  kNoOccurrences,
  kEmptyCandidates,
  kNoCandidates,
  kNoTestCases,
  kInvariantViolation,
};

const char* ErrorCodeName(ErrorCode code);

/**
 * @brief Single exception type for the engine; callers branch on code().
 */
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(std::string(ErrorCodeName(code)) + ": " + message),
        code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace hyper
