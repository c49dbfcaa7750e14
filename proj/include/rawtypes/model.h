#pragma once

#include <map>
#include <optional>
#include <ostream>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "rawtypes/diagnostic.h"
#include "rawtypes/symbol.h"

namespace rawtypes {

// Names with a fixed meaning in every program.
namespace names {
VarId this_var();
VarId arg_var();
MethodName constructor();  // "init": constructors are keyed by this name
MethodName main_method();
ExcId null_pointer();  // "np"
ExcId class_cast();    // "cce"
}  // namespace names

// Initialization type: Init ⊑ Raw(c) ⊑ Raw(c') ⊑ RawBot when c ⪯ c'.
struct InitType {
  enum class Kind : unsigned char { kInit, kRaw, kRawBot };

  Kind kind = Kind::kInit;
  ClassId cls;  // meaningful only for kRaw

  static InitType init() { return {Kind::kInit, {}}; }
  static InitType raw(ClassId c) { return {Kind::kRaw, c}; }
  static InitType raw_bot() { return {Kind::kRawBot, {}}; }

  bool is_init() const { return kind == Kind::kInit; }
  bool is_raw() const { return kind == Kind::kRaw; }
  bool is_raw_bot() const { return kind == Kind::kRawBot; }

  friend bool operator==(const InitType& a, const InitType& b) {
    return a.kind == b.kind && (a.kind != Kind::kRaw || a.cls == b.cls);
  }
  friend bool operator!=(const InitType& a, const InitType& b) {
    return !(a == b);
  }
};

// `Init`, `Raw`, `Raw(C)`: the concrete syntax.
std::string to_string(const InitType& t);
std::ostream& operator<<(std::ostream& os, const InitType& t);

// null | x | e.f, stored as a root followed by a field path.
struct Expr {
  enum class Root : unsigned char { kNull, kVar };

  Root root = Root::kNull;
  VarId var;
  std::vector<FieldId> path;

  static Expr null() { return {}; }
  static Expr variable(VarId v) { return {Root::kVar, v, {}}; }
  Expr field(FieldId f) const {
    Expr e = *this;
    e.path.push_back(f);
    return e;
  }

  bool operator==(const Expr&) const = default;
};

std::string to_string(const Expr& e);

struct Assign {
  VarId target;
  Expr value;
  bool operator==(const Assign&) const = default;
};
struct FieldWrite {
  VarId object;
  FieldId field;
  VarId value;
  bool operator==(const FieldWrite&) const = default;
};
struct New {
  VarId target;
  ClassId cls;
  VarId arg;
  bool operator==(const New&) const = default;
};
struct IfStar {
  int target = 0;
  bool operator==(const IfStar&) const = default;
};
struct SuperCall {
  VarId arg;
  bool operator==(const SuperCall&) const = default;
};
struct VirtualCall {
  VarId target;
  VarId receiver;
  ClassId declaring;  // static anchor of the callee's policy
  MethodName method;
  VarId arg;
  bool operator==(const VirtualCall&) const = default;
};
struct Return {
  VarId value;
  bool operator==(const Return&) const = default;
};
struct SetInit {
  bool operator==(const SetInit&) const = default;
};
struct CastInit {
  VarId target;
  VarId source;
  bool operator==(const CastInit&) const = default;
};
struct CastRaw {
  VarId target;
  ClassId cls;
  VarId source;
  bool operator==(const CastRaw&) const = default;
};

using Instr = std::variant<Assign, FieldWrite, New, IfStar, SuperCall,
                           VirtualCall, Return, SetInit, CastInit, CastRaw>;

std::string to_string(const Instr& ins);

// Variable written by the instruction, if any.
std::optional<VarId> written_var(const Instr& ins);

// (pc, exception) -> handler pc
using HandlerTable = std::map<std::pair<int, ExcId>, int>;

struct MethodDef {
  MethodName name;
  std::vector<Instr> instrs;
  HandlerTable handlers;
  InitType pre;
  InitType post;
  InitType argtype;
  InitType rettype;
  bool is_constructor = false;

  // Source positions; not part of the program's identity.
  SourceLocation location;
  std::vector<SourceLocation> instr_locations;

  SourceLocation location_of(int pc) const;
  std::optional<int> handler(int pc, ExcId exc) const;

  friend bool operator==(const MethodDef& a, const MethodDef& b) {
    return a.name == b.name && a.instrs == b.instrs &&
           a.handlers == b.handlers && a.pre == b.pre && a.post == b.post &&
           a.argtype == b.argtype && a.rettype == b.rettype &&
           a.is_constructor == b.is_constructor;
  }
};

struct ClassDef {
  ClassId id;
  std::optional<ClassId> super;
  std::map<MethodName, MethodDef> methods;
  MethodDef ctor;

  SourceLocation location;

  friend bool operator==(const ClassDef& a, const ClassDef& b) {
    return a.id == b.id && a.super == b.super && a.methods == b.methods &&
           a.ctor == b.ctor;
  }
};

struct Program {
  std::map<ClassId, ClassDef> classes;
  ClassId main;
  std::map<FieldId, InitType> fields;

  const ClassDef* find_class(ClassId c) const;
  // Declared method (constructor when `m` is "init"); nullptr if absent.
  const MethodDef* find_method(ClassId c, MethodName m) const;

  friend bool operator==(const Program& a, const Program& b) {
    return a.classes == b.classes && a.main == b.main && a.fields == b.fields;
  }
};

// The method's variables: `this`, `arg`, then every other variable in order
// of first occurrence. Type states and local stores are total over this set.
std::vector<VarId> method_variables(const MethodDef& m);

}  // namespace rawtypes
