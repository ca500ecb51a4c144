#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace vocablab {

enum class ErrorKind {
  kInput,          // empty or unusable input data
  kConfig,         // invalid parameters or manifest values
  kIo,             // unreadable / unwritable files
  kParse,          // malformed file contents
  kDecode,         // token outside the piece inventory
  kCollision,      // prefix already present on a token
  kFormat,         // token missing an expected prefix
  kConsistency,    // pipeline artifacts disagree with each other
  kAlignment,      // parallel files with different line counts
  kQuota,          // not enough lines to satisfy a request
  kComparability,  // score reports produced with different signatures
};

std::string_view to_string(ErrorKind kind);

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(message), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

// Raised by the pipeline orchestrator; wraps the failing stage.
class StageError : public Error {
 public:
  StageError(std::string stage, ErrorKind kind, const std::string& message)
      : Error(kind, stage + ": " + message), stage_(std::move(stage)) {}

  const std::string& stage() const noexcept { return stage_; }

 private:
  std::string stage_;
};

}  // namespace vocablab
