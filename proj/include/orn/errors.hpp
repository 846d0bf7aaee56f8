#pragma once

#include <stdexcept>
#include <string>

namespace orn {

// Base for every error the engine raises. `code()` is the stable
// machine-readable identifier surfaced by the frontend.
class EngineError : public std::runtime_error {
 public:
  EngineError(std::string code, const std::string& what)
      : std::runtime_error(what), code_(std::move(code)) {}
  const std::string& code() const { return code_; }

 private:
  std::string code_;
};

#define ORN_DEFINE_ERROR(Name, code_str)                 \
  class Name : public EngineError {                      \
   public:                                               \
    explicit Name(const std::string& what)               \
        : EngineError(code_str, what) {}                 \
  }

ORN_DEFINE_ERROR(UnresolvedNameError, "unresolved-name");
ORN_DEFINE_ERROR(DomainError, "domain-error");
ORN_DEFINE_ERROR(IndexMismatchError, "index-mismatch");
ORN_DEFINE_ERROR(MalformedSetError, "malformed-set");
ORN_DEFINE_ERROR(AlignmentError, "alignment-error");
ORN_DEFINE_ERROR(CarrierOverflowError, "carrier-overflow");
ORN_DEFINE_ERROR(NotCartesianError, "not-cartesian");
ORN_DEFINE_ERROR(FrameMismatchError, "frame-mismatch");
ORN_DEFINE_ERROR(BaseMismatchError, "base-mismatch");
ORN_DEFINE_ERROR(MalformedElementError, "malformed-element");
ORN_DEFINE_ERROR(CoherenceViolationError, "coherence-violation");
ORN_DEFINE_ERROR(NameError, "name-error");
ORN_DEFINE_ERROR(ValidationError, "validation-error");

#undef ORN_DEFINE_ERROR

// Raised while reading session text; remembers where the offending
// token started.
class ParseError : public EngineError {
 public:
  ParseError(const std::string& what, int line, int column)
      : EngineError("parse-error",
                    "line " + std::to_string(line) + ", column " +
                        std::to_string(column) + ": " + what),
        line_(line),
        column_(column) {}
  int line() const { return line_; }
  int column() const { return column_; }

 private:
  int line_;
  int column_;
};

}  // namespace orn
