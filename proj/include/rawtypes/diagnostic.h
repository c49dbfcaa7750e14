#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "rawtypes/symbol.h"

namespace rawtypes {

struct SourceLocation {
  std::string file = "<input>";
  int line = 1;    // 1-based
  int column = 1;  // 1-based

  bool operator==(const SourceLocation&) const = default;
};

enum class Severity { kError, kWarning };

// Stable diagnostic codes. Every Diagnostic::code is one of these strings.
namespace codes {
// Lexing and parsing.
inline constexpr const char* kLexError = "lex-error";
inline constexpr const char* kSyntaxError = "syntax-error";
inline constexpr const char* kEmptyProgram = "empty-program";
inline constexpr const char* kUnresolvedName = "unresolved-name";
inline constexpr const char* kDuplicateDefinition = "duplicate-definition";
inline constexpr const char* kPcLabel = "pc-label-mismatch";
inline constexpr const char* kMissingConstructor = "missing-constructor";
// Structure.
inline constexpr const char* kMissingMain = "missing-main";
inline constexpr const char* kEmptyMethod = "empty-method";
inline constexpr const char* kMissingNextInstruction =
    "missing-next-instruction";
inline constexpr const char* kConstructorFinalReturn =
    "constructor-final-return";
inline constexpr const char* kJumpTarget = "jump-target-out-of-range";
inline constexpr const char* kHandlerRange = "handler-out-of-range";
inline constexpr const char* kHierarchyCycle = "hierarchy-cycle";
inline constexpr const char* kRootCount = "root-count";
inline constexpr const char* kUndeclaredClass = "undeclared-class";
inline constexpr const char* kUndeclaredField = "undeclared-field";
inline constexpr const char* kUndeclaredMethod = "undeclared-method";
inline constexpr const char* kAssignToThis = "assign-to-this";
inline constexpr const char* kSuperInRoot = "super-in-root-constructor";
inline constexpr const char* kSuperOutsideConstructor =
    "super-outside-constructor";
inline constexpr const char* kSetInitOutsideConstructor =
    "setinit-outside-constructor";
inline constexpr const char* kReservedName = "reserved-name";
inline constexpr const char* kInconsistentName = "inconsistent-name";
// Typing.
inline constexpr const char* kFieldTypeViolation = "field-type-violation-static";
inline constexpr const char* kReturnPostViolation =
    "return-post-violation-static";
inline constexpr const char* kReturnTypeViolation =
    "return-type-violation-static";
inline constexpr const char* kConstructorReturnNotThis =
    "constructor-return-not-this-static";
inline constexpr const char* kSetInitOrderViolation =
    "setinit-order-violation-static";
inline constexpr const char* kCallPreViolation = "call-pre-violation-static";
inline constexpr const char* kCallArgViolation = "call-arg-violation-static";
inline constexpr const char* kOverridePre = "override-pre-violation";
inline constexpr const char* kOverrideArg = "override-arg-violation";
inline constexpr const char* kOverridePost = "override-post-violation";
inline constexpr const char* kOverrideRet = "override-ret-violation";
inline constexpr const char* kUnreachableCode = "unreachable-code";
// Harness.
inline constexpr const char* kInvalidBounds = "invalid-bounds";
inline constexpr const char* kEnumerationTooLarge = "enumeration-too-large";
// I/O (CLI only).
inline constexpr const char* kIoError = "io-error";
// Broken invariant inside the library (e.g. a dangling location).
inline constexpr const char* kInternal = "internal-error";
}  // namespace codes

// All codes above, for tests and documentation.
const std::vector<std::string>& all_diagnostic_codes();

struct Diagnostic {
  Severity severity = Severity::kError;
  std::string code;
  std::string message;
  SourceLocation location;
  // Optional program position (checker and structural diagnostics).
  std::optional<ClassId> cls;
  std::optional<MethodName> method;
  std::optional<int> pc;

  bool is_error() const { return severity == Severity::kError; }
  bool operator==(const Diagnostic&) const = default;
};

Diagnostic make_error(std::string code, std::string message,
                      SourceLocation location = {});

bool has_errors(const std::vector<Diagnostic>& diags);

// `file:line:col code message`
std::string format_diagnostic(const Diagnostic& d);

// Raised for invariant breaches on the in-memory model (querying an
// undeclared class, a dangling heap location, ...).
class ModelError : public std::runtime_error {
 public:
  explicit ModelError(Diagnostic d)
      : std::runtime_error(d.code + ": " + d.message), diag_(std::move(d)) {}
  const Diagnostic& diagnostic() const { return diag_; }

 private:
  Diagnostic diag_;
};

// Either a value or a non-empty list of diagnostics.
template <class T>
class Result {
 public:
  Result(T value) : data_(std::move(value)) {}
  Result(std::vector<Diagnostic> diags) : data_(std::move(diags)) {}
  Result(Diagnostic diag) : data_(std::vector<Diagnostic>{std::move(diag)}) {}

  bool ok() const { return data_.index() == 0; }
  explicit operator bool() const { return ok(); }

  T& value() { return std::get<0>(data_); }
  const T& value() const { return std::get<0>(data_); }
  T& operator*() { return value(); }
  const T& operator*() const { return value(); }
  T* operator->() { return &value(); }
  const T* operator->() const { return &value(); }

  const std::vector<Diagnostic>& diagnostics() const {
    return std::get<1>(data_);
  }

 private:
  std::variant<T, std::vector<Diagnostic>> data_;
};

}  // namespace rawtypes
