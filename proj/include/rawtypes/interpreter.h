#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <unordered_map>
#include <variant>
#include <vector>

#include "rawtypes/checker.h"
#include "rawtypes/flat_map.h"
#include "rawtypes/hierarchy.h"
#include "rawtypes/model.h"

namespace rawtypes {

// null or a heap location.
struct Value {
  std::int32_t loc = -1;

  static Value null() { return {}; }
  static Value at(std::int32_t l) { return {l}; }
  bool is_null() const { return loc < 0; }
  bool operator==(const Value&) const = default;
};

std::string to_string(Value v);

// [c, c_init, o]: dynamic class, initialization level (absent = ⊥) and
// field store.
struct HeapObject {
  ClassId dyn_class;
  std::optional<ClassId> init_level;
  FlatMap<FieldId, Value> fields;

  bool operator==(const HeapObject&) const = default;
};

// Location ids index the vector; locations are never freed or reused.
using Heap = std::vector<HeapObject>;
using Locals = FlatMap<VarId, Value>;

struct MethodRef {
  ClassId cls;
  MethodName name;  // names::constructor() for c.init

  bool operator==(const MethodRef&) const = default;
};

std::string to_string(const MethodRef& m);

// A pending call: the caller's method, the pc of its call instruction, its
// locals and the variable receiving the result (none for super calls).
struct Frame {
  MethodRef method;
  int pc = 0;
  Locals locals;
  std::optional<VarId> result;

  bool operator==(const Frame&) const = default;
};

using CallStack = std::vector<Frame>;  // innermost frame last

struct MachineState {
  MethodRef method;
  int pc = 0;
  Locals locals;
  Heap heap;
  CallStack stack;
  std::optional<ExcId> exc;  // set while an exception propagates

  bool operator==(const MachineState&) const = default;
};

enum class StuckReason {
  kCallPreViolation,
  kCallArgViolation,
  kSetInitOrderViolation,
  kMissingMethod,
  kConstructorReturnNotThis,
};

// "call-pre-violation", "call-arg-violation", "setinit-order-violation",
// "missing-method", "constructor-return-not-this".
const char* to_string(StuckReason r);

struct Stuck {
  StuckReason reason;
  std::string detail;
  MethodRef method;
  int pc = 0;
  SourceLocation location;
};

struct Next {
  MachineState state;
};
struct Final {
  Value value;
};
struct FinalExceptional {
  ExcId exc;
};

using StepResult = std::variant<Next, Final, FinalExceptional, Stuck>;

// h ⊢ v : t. Throws ModelError for a dangling location.
bool value_has_type(const Hierarchy& h, const Heap& heap, Value v,
                    const InitType& t);
bool value_has_type(const Program& p, const Heap& heap, Value v,
                    const InitType& t);

// Fresh location holding [c, ⊥, every field null].
std::int32_t alloc(const Program& p, Heap& heap, ClassId c);

// Marks the object at `loc` initialized up to `c`. Succeeds when the
// current level is c.super (⊥ for the root) and leaves the object alone
// when it is already at c or deeper; any other level is an order
// violation and returns false with the heap unchanged.
bool set_init(const Hierarchy& h, Heap& heap, ClassId c, std::int32_t loc);

// nullopt signals a null dereference (np).
std::optional<Value> eval_expr(const Heap& heap, const Locals& locals,
                               const Expr& e);

// ⟨main.main, 0, all null, empty heap, empty stack⟩.
MachineState initial_state(const Program& p);

// Hashable identity of a method reference (interned symbol addresses).
struct MethodRefHash {
  std::size_t operator()(const MethodRef& m) const {
    return m.cls.hash() * 31 + m.name.hash();
  }
};

// wf heap, wf locals and wf call stack against per-point type tables.
class WellFormedness {
 public:
  // Both arguments must outlive the checker.
  WellFormedness(const Hierarchy& h, const TypeTables& tables);

  // Full check. `why`, when given, receives the first violation.
  bool check(const MachineState& s, std::string* why = nullptr) const;

  // Same verdict as check() along one execution path. When `successor` is
  // set, `s` must be the direct successor of the state last passed in, and
  // frames that were already verified and are still on the stack are
  // skipped: frames never change while suspended, and the typing of a
  // location is stable because tags only move towards the dynamic class.
  bool check_along_path(const MachineState& s, bool successor,
                        std::string* why = nullptr);

 private:
  const TypeState* state_at(const MethodRef& m, int pc) const;
  bool heap_ok(const Heap& heap, std::string* why) const;
  bool locals_ok(const Heap& heap, const MethodRef& m, int pc,
                 const Locals& locals, const char* where,
                 std::string* why) const;

  const Hierarchy* h_;
  const TypeTables* tables_;
  std::unordered_map<MethodRef, const MethodTypeTable*, MethodRefHash> index_;
  std::vector<FieldId> field_ids_;  // program fields in heap order
  std::vector<InitType> field_types_;
  std::size_t verified_frames_ = 0;
};

bool state_well_formed(const Hierarchy& h, const MachineState& s,
                       const TypeTables& tables, std::string* why = nullptr);
bool state_well_formed(const Program& p, const MachineState& s,
                       const TypeTables& tables);

// Identical for states that differ only in unreachable objects and in the
// numbering of locations.
std::string canonical_key(const MachineState& s);

enum class BranchPolicy { kSeeded, kExhaustive };

struct RunOptions {
  BranchPolicy policy = BranchPolicy::kSeeded;
  std::uint64_t seed = 0;
  std::int64_t path_cap = 1 << 12;  // exhaustive mode only
  // Replays these IfStar decisions (true = jump) before consulting the
  // policy. Used to reproduce a reported path.
  std::vector<bool> forced_branches;
  std::ostream* trace = nullptr;  // one line per step
  // Exhaustive mode: stop a path on a state already explored with at least
  // as much fuel left. Unreachable objects are ignored when comparing
  // states, so allocation in a loop still converges.
  bool merge_states = false;
};

struct RunOutcome {
  enum class Kind { kFinal, kFinalExceptional, kStuck, kFuelExhausted };

  Kind kind = Kind::kFinal;
  Value value;                       // kFinal
  ExcId exc;                         // kFinalExceptional
  std::optional<Stuck> stuck;        // kStuck
  std::optional<MachineState> state; // kFuelExhausted: where fuel ran out
  std::vector<bool> branches;        // IfStar decisions of the reported path

  std::int64_t steps = 0;      // total over all explored paths
  std::int64_t paths = 0;      // completed paths, merged ones included
  std::int64_t merged = 0;     // paths cut short by merge_states
  std::int64_t max_depth = 0;  // longest path in steps
  bool truncated = false;      // exhaustive exploration hit the path cap
};

const char* to_string(RunOutcome::Kind k);
std::string describe(const RunOutcome& o);

// Called on every state reached, with the decisions taken so far and
// whether the state directly follows the previously observed one (false
// at the start of each explored path). Returning false aborts the run.
using StateObserver = std::function<bool(
    const MachineState&, const std::vector<bool>&, bool successor)>;

// The small-step machine. The program must be structurally valid and
// outlive the machine.
class Machine {
 public:
  explicit Machine(const Program& program);

  const Program& program() const { return *program_; }
  const Hierarchy& hierarchy() const { return h_; }

  // One transition. `jump` picks the IfStar successor.
  StepResult step(MachineState s, bool jump = false) const;

  // In-place form: returns nullopt and updates `s` for a Next transition.
  std::optional<StepResult> step_in_place(MachineState& s, bool jump) const;

  // True when the next transition is an IfStar choice.
  bool at_branch(const MachineState& s) const;

  // Seeded mode follows one path; exhaustive mode explores every IfStar
  // choice up to `fuel` steps per path and reports the worst outcome
  // (Stuck > FuelExhausted > FinalExceptional > Final).
  RunOutcome run(std::int64_t fuel, const RunOptions& options = {},
                 const StateObserver& observer = nullptr) const;

 private:
  struct MethodEntry {
    const MethodDef* def;
    Locals fresh;  // every variable null
  };

  const MethodEntry& entry(const MethodRef& ref) const;
  const MethodDef& method(const MethodRef& ref) const {
    return *entry(ref).def;
  }
  std::optional<StepResult> enter(MachineState& s, MethodRef callee,
                                  Value self, Value arg,
                                  std::optional<VarId> result,
                                  const MethodDef& caller) const;
  void trace_line(std::ostream& os, std::int64_t n, const MachineState& before,
                  const MachineState* after) const;

  RunOutcome run_seeded(std::int64_t fuel, const RunOptions& options,
                        const StateObserver& observer) const;
  RunOutcome run_exhaustive(std::int64_t fuel, const RunOptions& options,
                            const StateObserver& observer) const;

  const Program* program_;
  Hierarchy h_;
  std::unordered_map<MethodRef, MethodEntry, MethodRefHash> methods_;
};

StepResult step(const Program& p, const MachineState& s, bool jump = false);
RunOutcome run(const Program& p, std::int64_t fuel,
               const RunOptions& options = {});

}  // namespace rawtypes
