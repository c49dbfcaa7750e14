#pragma once

#include <optional>
#include <vector>

#include "rawtypes/model.h"

namespace rawtypes {

// A method as written: any annotation may be missing.
struct PartialMethod {
  MethodName name;
  bool is_constructor = false;
  std::vector<Instr> instrs;
  HandlerTable handlers;
  std::optional<InitType> pre;
  std::optional<InitType> post;
  std::optional<InitType> argtype;
  std::optional<InitType> rettype;
  SourceLocation location;
  std::vector<SourceLocation> instr_locations;
};

struct PartialClass {
  ClassId id;
  std::optional<ClassId> super;
  std::optional<PartialMethod> ctor;
  std::vector<PartialMethod> methods;
  SourceLocation location;
};

struct PartialField {
  FieldId id;
  std::optional<InitType> type;
  SourceLocation location;
};

struct PartialProgram {
  std::vector<PartialClass> classes;
  std::vector<PartialField> fields;
  ClassId main;
  SourceLocation main_location;
};

// Safe-by-default annotations:
//   fields, argtype, rettype             -> Init
//   constructor of C: pre -> Raw, post   -> Raw(C)
//   other methods:    pre -> Init, post  -> the resolved pre
// Duplicate names keep their first definition; a class without a
// constructor gets `0: return this`.
Program apply_default_annotations(const PartialProgram& partial);

// Checks every model invariant: targets in range, final-return discipline,
// constructor shape, single acyclic hierarchy, no writes to `this`, and
// referential integrity of class, field and method names. Empty iff valid.
std::vector<Diagnostic> validate_structure(const Program& p);

}  // namespace rawtypes
