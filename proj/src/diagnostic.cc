#include "rawtypes/diagnostic.h"

#include <algorithm>
#include <sstream>

namespace rawtypes {

const std::vector<std::string>& all_diagnostic_codes() {
  static const std::vector<std::string> all = {
      codes::kLexError,
      codes::kSyntaxError,
      codes::kEmptyProgram,
      codes::kUnresolvedName,
      codes::kDuplicateDefinition,
      codes::kPcLabel,
      codes::kMissingConstructor,
      codes::kMissingMain,
      codes::kEmptyMethod,
      codes::kMissingNextInstruction,
      codes::kConstructorFinalReturn,
      codes::kJumpTarget,
      codes::kHandlerRange,
      codes::kHierarchyCycle,
      codes::kRootCount,
      codes::kUndeclaredClass,
      codes::kUndeclaredField,
      codes::kUndeclaredMethod,
      codes::kAssignToThis,
      codes::kSuperInRoot,
      codes::kSuperOutsideConstructor,
      codes::kSetInitOutsideConstructor,
      codes::kReservedName,
      codes::kInconsistentName,
      codes::kFieldTypeViolation,
      codes::kReturnPostViolation,
      codes::kReturnTypeViolation,
      codes::kConstructorReturnNotThis,
      codes::kSetInitOrderViolation,
      codes::kCallPreViolation,
      codes::kCallArgViolation,
      codes::kOverridePre,
      codes::kOverrideArg,
      codes::kOverridePost,
      codes::kOverrideRet,
      codes::kUnreachableCode,
      codes::kInvalidBounds,
      codes::kEnumerationTooLarge,
      codes::kIoError,
      codes::kInternal,
  };
  return all;
}

Diagnostic make_error(std::string code, std::string message,
                      SourceLocation location) {
  Diagnostic d;
  d.code = std::move(code);
  d.message = std::move(message);
  d.location = std::move(location);
  return d;
}

bool has_errors(const std::vector<Diagnostic>& diags) {
  return std::any_of(diags.begin(), diags.end(),
                     [](const Diagnostic& d) { return d.is_error(); });
}

std::string format_diagnostic(const Diagnostic& d) {
  std::ostringstream os;
  os << d.location.file << ':' << d.location.line << ':' << d.location.column
     << ' ' << d.code << ' ' << d.message;
  return os.str();
}

}  // namespace rawtypes
