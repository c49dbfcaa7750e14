#pragma once

#include <map>
#include <optional>
#include <utility>
#include <vector>

#include "rawtypes/diagnostic.h"
#include "rawtypes/flat_map.h"
#include "rawtypes/hierarchy.h"
#include "rawtypes/model.h"

namespace rawtypes {

// Variable types at one program point, total over the method's variables.
using TypeState = FlatMap<VarId, InitType>;

struct MethodTypeTable {
  std::vector<VarId> variables;
  // Indexed by pc; empty for unreachable points.
  std::vector<std::optional<TypeState>> states;

  const TypeState* at(int pc) const {
    if (pc < 0 || pc >= static_cast<int>(states.size()) || !states[pc]) {
      return nullptr;
    }
    return &*states[pc];
  }
};

using MethodKey = std::pair<ClassId, MethodName>;
using TypeTables = std::map<MethodKey, MethodTypeTable>;

enum class Verdict { kWellTyped, kIllTyped };

struct CheckReport {
  Verdict verdict = Verdict::kIllTyped;
  TypeTables tables;
  std::vector<Diagnostic> diagnostics;

  bool well_typed() const { return verdict == Verdict::kWellTyped; }
};

// Pointwise order and join on type states over the same variables.
bool state_le(const Hierarchy& h, const TypeState& a, const TypeState& b);
TypeState state_join(const Hierarchy& h, const TypeState& a,
                     const TypeState& b);

// The flow-sensitive initialization type system. The program must be
// structurally valid and outlive the checker.
class Checker {
 public:
  explicit Checker(const Program& program);

  const Hierarchy& hierarchy() const { return h_; }

  // null : Init, x : L(x), e.f : fields(f).
  Result<InitType> type_expr(const TypeState& L, const Expr& e) const;

  // One typing rule per instruction form. `pc` only positions diagnostics.
  Result<TypeState> transfer(ClassId cls, const MethodDef& m, const Instr& ins,
                             const TypeState& L, int pc = 0) const;

  // this ↦ pre, arg ↦ argtype, every other variable ↦ Init.
  TypeState entry_state(const MethodDef& m) const;

  // Least fixpoint by worklist. Unreachable points are reported through
  // `warnings` when given.
  Result<MethodTypeTable> check_method(
      ClassId cls, const MethodDef& m,
      std::vector<Diagnostic>* warnings = nullptr) const;

  // Contra-variant pre/argtype, co-variant post/rettype for every override.
  std::vector<Diagnostic> check_overrides() const;

  CheckReport check_program() const;

 private:
  Diagnostic violation(const char* code, std::string message, ClassId cls,
                       const MethodDef& m, int pc) const;
  void require(std::vector<Diagnostic>& out, const InitType& actual,
               const InitType& bound, const char* code,
               const std::string& what, ClassId cls, const MethodDef& m,
               int pc) const;

  const Program* program_;
  Hierarchy h_;
};

// Receiver type once the SetInit of class `cls` has run: `t` itself when it
// is already at least Raw(cls), Raw(cls) otherwise.
InitType after_set_init(const Hierarchy& h, const InitType& t, ClassId cls);

// One-shot forms.
Result<InitType> type_expr(const Program& p, const TypeState& L,
                           const Expr& e);
Result<TypeState> transfer(const Program& p, ClassId cls, const MethodDef& m,
                           const Instr& ins, const TypeState& L);
Result<MethodTypeTable> check_method(const Program& p, ClassId cls,
                                     const MethodDef& m);
std::vector<Diagnostic> check_overrides(const Program& p);
// Runs validate_structure first; a structurally invalid program is
// reported ill-typed without further checking.
CheckReport check_program(const Program& p);

}  // namespace rawtypes
