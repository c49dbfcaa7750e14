#include "rawtypes/interpreter.h"

#include <ostream>
#include <random>
#include <sstream>
#include <unordered_map>

namespace rawtypes {

std::string to_string(Value v) {
  return v.is_null() ? "null" : "l" + std::to_string(v.loc);
}

std::string to_string(const MethodRef& m) {
  return m.cls.name() + "." + m.name.name();
}

const char* to_string(StuckReason r) {
  switch (r) {
    case StuckReason::kCallPreViolation:
      return "call-pre-violation";
    case StuckReason::kCallArgViolation:
      return "call-arg-violation";
    case StuckReason::kSetInitOrderViolation:
      return "setinit-order-violation";
    case StuckReason::kMissingMethod:
      return "missing-method";
    case StuckReason::kConstructorReturnNotThis:
      return "constructor-return-not-this";
  }
  return "?";
}

const char* to_string(RunOutcome::Kind k) {
  switch (k) {
    case RunOutcome::Kind::kFinal:
      return "Final";
    case RunOutcome::Kind::kFinalExceptional:
      return "FinalExceptional";
    case RunOutcome::Kind::kStuck:
      return "Stuck";
    case RunOutcome::Kind::kFuelExhausted:
      return "FuelExhausted";
  }
  return "?";
}

std::string describe(const RunOutcome& o) {
  std::ostringstream os;
  os << to_string(o.kind);
  switch (o.kind) {
    case RunOutcome::Kind::kFinal:
      os << "(" << to_string(o.value) << ")";
      break;
    case RunOutcome::Kind::kFinalExceptional:
      os << "(" << o.exc << ")";
      break;
    case RunOutcome::Kind::kStuck:
      os << "(" << to_string(o.stuck->reason) << ") at "
         << to_string(o.stuck->method) << " pc " << o.stuck->pc << ": "
         << o.stuck->detail;
      break;
    case RunOutcome::Kind::kFuelExhausted:
      if (o.state) {
        os << " at " << to_string(o.state->method) << " pc " << o.state->pc;
      }
      break;
  }
  return os.str();
}

namespace {

const HeapObject& deref(const Heap& heap, Value v) {
  if (v.loc >= static_cast<std::int32_t>(heap.size())) {
    throw ModelError(make_error(codes::kInternal,
                                "dangling location " + to_string(v)));
  }
  return heap[v.loc];
}

Value local(const Locals& locals, VarId x) {
  const Value* v = locals.get(x);
  return v ? *v : Value::null();
}

std::string tag_name(const std::optional<ClassId>& tag) {
  return tag ? tag->name() : "_";
}

}  // namespace

bool value_has_type(const Hierarchy& h, const Heap& heap, Value v,
                    const InitType& t) {
  if (v.is_null()) return true;
  const HeapObject& o = deref(heap, v);
  switch (t.kind) {
    case InitType::Kind::kRawBot:
      return true;
    case InitType::Kind::kInit:
      return o.init_level && *o.init_level == o.dyn_class;
    case InitType::Kind::kRaw:
      for (std::optional<ClassId> c = o.dyn_class; c; c = h.super_of(*c)) {
        if (!h.le(t.cls, *c)) continue;
        if (!o.init_level || !h.le(*o.init_level, *c)) return false;
      }
      return true;
  }
  return false;
}

bool value_has_type(const Program& p, const Heap& heap, Value v,
                    const InitType& t) {
  return value_has_type(Hierarchy(p), heap, v, t);
}

std::int32_t alloc(const Program& p, Heap& heap, ClassId c) {
  HeapObject o;
  o.dyn_class = c;
  for (const auto& [f, type] : p.fields) o.fields.set(f, Value::null());
  heap.push_back(std::move(o));
  return static_cast<std::int32_t>(heap.size() - 1);
}

bool set_init(const Hierarchy& h, Heap& heap, ClassId c, std::int32_t loc) {
  HeapObject& o = heap.at(loc);
  if (o.init_level == h.super_of(c)) {
    o.init_level = c;
    return true;
  }
  return o.init_level && h.le(*o.init_level, c);
}

std::optional<Value> eval_expr(const Heap& heap, const Locals& locals,
                               const Expr& e) {
  Value v = e.root == Expr::Root::kNull ? Value::null() : local(locals, e.var);
  for (FieldId f : e.path) {
    if (v.is_null()) return std::nullopt;
    const Value* next = deref(heap, v).fields.get(f);
    v = next ? *next : Value::null();
  }
  return v;
}

MachineState initial_state(const Program& p) {
  MachineState s;
  s.method = {p.main, names::main_method()};
  if (const MethodDef* m = p.find_method(p.main, names::main_method())) {
    for (VarId x : method_variables(*m)) s.locals.set(x, Value::null());
  }
  return s;
}

WellFormedness::WellFormedness(const Hierarchy& h, const TypeTables& tables)
    : h_(&h), tables_(&tables) {
  for (const auto& [key, table] : tables) {
    index_.emplace(MethodRef{key.first, key.second}, &table);
  }
  // Heap objects store every program field, in FieldId order.
  for (const auto& [f, t] : h.program().fields) {
    field_ids_.push_back(f);
    field_types_.push_back(t);
  }
}

const TypeState* WellFormedness::state_at(const MethodRef& m, int pc) const {
  auto it = index_.find(m);
  return it == index_.end() ? nullptr : it->second->at(pc);
}

bool WellFormedness::heap_ok(const Heap& heap, std::string* why) const {
  for (std::size_t l = 0; l < heap.size(); ++l) {
    std::size_t i = 0;
    for (const auto& [f, v] : heap[l].fields) {
      InitType expected = InitType::init();
      if (i < field_types_.size() && field_ids_[i] == f) {
        expected = field_types_[i];
      } else if (auto it = h_->program().fields.find(f);
                 it != h_->program().fields.end()) {
        expected = it->second;
      }
      ++i;
      if (!value_has_type(*h_, heap, v, expected)) {
        if (why) {
          *why = "heap: l" + std::to_string(l) + "." + f.name() + " = " +
                 to_string(v) + " does not have type " + to_string(expected);
        }
        return false;
      }
    }
  }
  return true;
}

bool WellFormedness::locals_ok(const Heap& heap, const MethodRef& m, int pc,
                               const Locals& locals, const char* where,
                               std::string* why) const {
  auto fail = [&](const std::string& msg) {
    if (why) {
      *why = std::string(where) + " " + to_string(m) + " pc " +
             std::to_string(pc) + ": " + msg;
    }
    return false;
  };
  const TypeState* L = state_at(m, pc);
  if (L == nullptr) return fail("no type state");
  for (const auto& [x, v] : locals) {
    const InitType* t = L->get(x);
    InitType expected = t ? *t : InitType::init();
    if (!value_has_type(*h_, heap, v, expected)) {
      return fail("variable " + x.name() + " = " + to_string(v) +
                  " does not have type " + to_string(expected));
    }
  }
  return true;
}

bool WellFormedness::check(const MachineState& s, std::string* why) const {
  if (!heap_ok(s.heap, why)) return false;
  if (!locals_ok(s.heap, s.method, s.pc, s.locals, "locals", why)) {
    return false;
  }
  for (const Frame& f : s.stack) {
    if (!locals_ok(s.heap, f.method, f.pc, f.locals, "frame", why)) {
      return false;
    }
  }
  return true;
}

bool WellFormedness::check_along_path(const MachineState& s, bool successor,
                                      std::string* why) {
  // One step pushes or pops at most one frame, so every frame below the
  // new top that was verified before is unchanged.
  const std::size_t keep =
      successor ? std::min(verified_frames_, s.stack.size()) : 0;
  verified_frames_ = 0;
  if (!heap_ok(s.heap, why)) return false;
  if (!locals_ok(s.heap, s.method, s.pc, s.locals, "locals", why)) {
    return false;
  }
  for (std::size_t i = keep; i < s.stack.size(); ++i) {
    const Frame& f = s.stack[i];
    if (!locals_ok(s.heap, f.method, f.pc, f.locals, "frame", why)) {
      return false;
    }
  }
  verified_frames_ = s.stack.size();
  return true;
}

bool state_well_formed(const Hierarchy& h, const MachineState& s,
                       const TypeTables& tables, std::string* why) {
  return WellFormedness(h, tables).check(s, why);
}

bool state_well_formed(const Program& p, const MachineState& s,
                       const TypeTables& tables) {
  return state_well_formed(Hierarchy(p), s, tables);
}

namespace {

class KeyWriter {
 public:
  explicit KeyWriter(const MachineState& s) : s_(s), ids_(s.heap.size(), -1) {
    // Number reachable objects in discovery order from the roots.
    visit_locals(s.locals);
    for (auto it = s.stack.rbegin(); it != s.stack.rend(); ++it) {
      visit_locals(it->locals);
    }
    for (std::size_t i = 0; i < order_.size(); ++i) {
      for (const auto& [f, v] : s.heap[order_[i]].fields) visit(v);
    }
  }

  std::string key() {
    put(s_.exc ? s_.exc->address() : nullptr);
    frame(s_.method, s_.pc, s_.locals, std::nullopt);
    put_int(static_cast<std::int32_t>(s_.stack.size()));
    for (const Frame& f : s_.stack) frame(f.method, f.pc, f.locals, f.result);
    for (std::int32_t l : order_) {
      const HeapObject& o = s_.heap[l];
      put(o.dyn_class.address());
      put(o.init_level ? o.init_level->address() : nullptr);
      for (const auto& [f, v] : o.fields) value(v);
    }
    return std::move(out_);
  }

 private:
  void visit(Value v) {
    if (v.is_null() || ids_.at(v.loc) >= 0) return;
    ids_[v.loc] = static_cast<std::int32_t>(order_.size());
    order_.push_back(v.loc);
  }
  void visit_locals(const Locals& locals) {
    for (const auto& [x, v] : locals) visit(v);
  }

  void put(const void* p) {
    out_.append(reinterpret_cast<const char*>(&p), sizeof p);
  }
  void put_int(std::int32_t n) {
    out_.append(reinterpret_cast<const char*>(&n), sizeof n);
  }
  void value(Value v) { put_int(v.is_null() ? -1 : ids_[v.loc]); }
  void frame(const MethodRef& m, int pc, const Locals& locals,
             const std::optional<VarId>& result) {
    put(m.cls.address());
    put(m.name.address());
    put_int(pc);
    put(result ? result->address() : nullptr);
    for (const auto& [x, v] : locals) {
      put(x.address());
      value(v);
    }
  }

  const MachineState& s_;
  std::vector<std::int32_t> ids_;
  std::vector<std::int32_t> order_;
  std::string out_;
};

}  // namespace

std::string canonical_key(const MachineState& s) {
  return KeyWriter(s).key();
}

Machine::Machine(const Program& program) : program_(&program), h_(program) {
  auto add = [&](ClassId c, const MethodDef& m) {
    MethodEntry e{&m, {}};
    for (VarId x : method_variables(m)) e.fresh.set(x, Value::null());
    e.fresh.set(names::this_var(), Value::null());
    e.fresh.set(names::arg_var(), Value::null());
    methods_.emplace(MethodRef{c, m.is_constructor ? names::constructor()
                                                   : m.name},
                     std::move(e));
  };
  for (const auto& [cid, c] : program.classes) {
    add(cid, c.ctor);
    for (const auto& [name, m] : c.methods) add(cid, m);
  }
}

const Machine::MethodEntry& Machine::entry(const MethodRef& ref) const {
  auto it = methods_.find(ref);
  if (it == methods_.end()) {
    throw ModelError(make_error(codes::kUndeclaredMethod,
                                "no method " + to_string(ref)));
  }
  return it->second;
}

std::optional<StepResult> Machine::enter(MachineState& s, MethodRef callee,
                                         Value self, Value arg,
                                         std::optional<VarId> result,
                                         const MethodDef& caller) const {
  const MethodEntry& e = entry(callee);
  const MethodDef& m = *e.def;
  auto stuck = [&](StuckReason r, std::string detail) -> StepResult {
    return Stuck{r, std::move(detail), s.method, s.pc,
                 caller.location_of(s.pc)};
  };
  if (!value_has_type(h_, s.heap, arg, m.argtype)) {
    return stuck(StuckReason::kCallArgViolation,
                 "argument " + to_string(arg) + " of " + to_string(callee) +
                     " does not have type " + to_string(m.argtype));
  }
  if (!value_has_type(h_, s.heap, self, m.pre)) {
    return stuck(StuckReason::kCallPreViolation,
                 "receiver " + to_string(self) + " of " + to_string(callee) +
                     " does not have type " + to_string(m.pre));
  }
  s.stack.push_back(Frame{s.method, s.pc, std::move(s.locals), result});
  s.method = callee;
  s.pc = 0;
  s.locals = e.fresh;
  *s.locals.get(names::this_var()) = self;
  *s.locals.get(names::arg_var()) = arg;
  return std::nullopt;
}

bool Machine::at_branch(const MachineState& s) const {
  if (s.exc) return false;
  const MethodDef& m = method(s.method);
  return std::holds_alternative<IfStar>(m.instrs.at(s.pc));
}

std::optional<StepResult> Machine::step_in_place(MachineState& s,
                                                 bool jump) const {
  const MethodDef& m = method(s.method);

  if (s.exc) {
    if (auto j = m.handler(s.pc, *s.exc)) {
      s.pc = *j;
      s.exc.reset();
      return std::nullopt;
    }
    if (s.stack.empty()) return FinalExceptional{*s.exc};
    Frame f = std::move(s.stack.back());
    s.stack.pop_back();
    s.method = f.method;
    s.pc = f.pc;
    s.locals = std::move(f.locals);
    return std::nullopt;
  }

  auto raise = [&](ExcId e) -> std::optional<StepResult> {
    s.exc = e;
    return std::nullopt;
  };
  auto stuck = [&](StuckReason r, std::string detail) -> StepResult {
    return Stuck{r, std::move(detail), s.method, s.pc, m.location_of(s.pc)};
  };

  const Instr& ins = m.instrs.at(s.pc);

  if (auto* a = std::get_if<Assign>(&ins)) {
    auto v = eval_expr(s.heap, s.locals, a->value);
    if (!v) return raise(names::null_pointer());
    s.locals.set(a->target, *v);
    ++s.pc;
    return std::nullopt;
  }

  if (auto* w = std::get_if<FieldWrite>(&ins)) {
    Value obj = local(s.locals, w->object);
    if (obj.is_null()) return raise(names::null_pointer());
    deref(s.heap, obj);
    s.heap[obj.loc].fields.set(w->field, local(s.locals, w->value));
    ++s.pc;
    return std::nullopt;
  }

  if (auto* n = std::get_if<New>(&ins)) {
    Value arg = local(s.locals, n->arg);
    std::int32_t l = alloc(*program_, s.heap, n->cls);
    return enter(s, {n->cls, names::constructor()}, Value::at(l), arg,
                 n->target, m);
  }

  if (auto* b = std::get_if<IfStar>(&ins)) {
    s.pc = jump ? b->target : s.pc + 1;
    return std::nullopt;
  }

  if (auto* sc = std::get_if<SuperCall>(&ins)) {
    auto parent = h_.super_of(s.method.cls);
    if (!parent) {
      return stuck(StuckReason::kMissingMethod,
                   "root class " + s.method.cls.name() + " has no super");
    }
    return enter(s, {*parent, names::constructor()},
                 local(s.locals, names::this_var()), local(s.locals, sc->arg),
                 std::nullopt, m);
  }

  if (auto* c = std::get_if<VirtualCall>(&ins)) {
    Value recv = local(s.locals, c->receiver);
    if (recv.is_null()) return raise(names::null_pointer());
    ClassId dyn = deref(s.heap, recv).dyn_class;
    if (!h_.le(dyn, c->declaring)) return raise(names::class_cast());
    auto owner = h_.lookup_owner(dyn, c->method);
    if (!owner) {
      return stuck(StuckReason::kMissingMethod,
                   "no method " + c->method.name() + " above " + dyn.name());
    }
    return enter(s, {*owner, c->method}, recv, local(s.locals, c->arg),
                 c->target, m);
  }

  if (auto* r = std::get_if<Return>(&ins)) {
    Value v = local(s.locals, r->value);
    if (m.is_constructor) {
      if (r->value != names::this_var()) {
        return stuck(StuckReason::kConstructorReturnNotThis,
                     "constructor returns " + r->value.name());
      }
      if (v.is_null() || !set_init(h_, s.heap, s.method.cls, v.loc)) {
        return stuck(StuckReason::kSetInitOrderViolation,
                     "cannot tag " + to_string(v) + " as " +
                         s.method.cls.name());
      }
    }
    if (s.stack.empty()) return Final{v};
    Frame f = std::move(s.stack.back());
    s.stack.pop_back();
    s.method = f.method;
    s.pc = f.pc + 1;
    s.locals = std::move(f.locals);
    if (f.result) s.locals.set(*f.result, v);
    return std::nullopt;
  }

  if (std::holds_alternative<SetInit>(ins)) {
    Value self = local(s.locals, names::this_var());
    if (self.is_null() || !set_init(h_, s.heap, s.method.cls, self.loc)) {
      return stuck(StuckReason::kSetInitOrderViolation,
                   "cannot tag " + to_string(self) + " as " +
                       s.method.cls.name());
    }
    ++s.pc;
    return std::nullopt;
  }

  if (auto* ci = std::get_if<CastInit>(&ins)) {
    Value v = local(s.locals, ci->source);
    if (!value_has_type(h_, s.heap, v, InitType::init())) {
      return raise(names::class_cast());
    }
    s.locals.set(ci->target, v);
    ++s.pc;
    return std::nullopt;
  }

  const auto& cr = std::get<CastRaw>(ins);
  Value v = local(s.locals, cr.source);
  if (!value_has_type(h_, s.heap, v, InitType::raw(cr.cls))) {
    return raise(names::class_cast());
  }
  s.locals.set(cr.target, v);
  ++s.pc;
  return std::nullopt;
}

StepResult Machine::step(MachineState s, bool jump) const {
  if (auto r = step_in_place(s, jump)) return std::move(*r);
  return Next{std::move(s)};
}

void Machine::trace_line(std::ostream& os, std::int64_t n,
                         const MachineState& before,
                         const MachineState* after) const {
  os << "step " << n << ": " << to_string(before.method) << " pc "
     << before.pc << ": ";
  if (before.exc) {
    os << "raise " << *before.exc;
  } else {
    os << to_string(method(before.method).instrs.at(before.pc));
  }
  if (after) {
    os << " | heap " << after->heap.size();
    for (std::size_t l = 0; l < after->heap.size(); ++l) {
      std::optional<ClassId> old;
      if (l < before.heap.size()) old = before.heap[l].init_level;
      const auto& now = after->heap[l].init_level;
      if (l >= before.heap.size() || old != now) {
        os << " | l" << l << " " << after->heap[l].dyn_class << " "
           << (l < before.heap.size() ? tag_name(old) : "new") << "->"
           << tag_name(now);
      }
    }
  }
  os << "\n";
}

namespace {

int severity(RunOutcome::Kind k) {
  switch (k) {
    case RunOutcome::Kind::kFinal:
      return 0;
    case RunOutcome::Kind::kFinalExceptional:
      return 1;
    case RunOutcome::Kind::kFuelExhausted:
      return 2;
    case RunOutcome::Kind::kStuck:
      return 3;
  }
  return 0;
}

// Records a terminal result in `out`.
void settle(RunOutcome& out, StepResult&& r) {
  if (auto* f = std::get_if<Final>(&r)) {
    out.kind = RunOutcome::Kind::kFinal;
    out.value = f->value;
  } else if (auto* e = std::get_if<FinalExceptional>(&r)) {
    out.kind = RunOutcome::Kind::kFinalExceptional;
    out.exc = e->exc;
  } else {
    out.kind = RunOutcome::Kind::kStuck;
    out.stuck = std::move(std::get<Stuck>(r));
  }
}

}  // namespace

RunOutcome Machine::run(std::int64_t fuel, const RunOptions& options,
                        const StateObserver& observer) const {
  return options.policy == BranchPolicy::kExhaustive
             ? run_exhaustive(fuel, options, observer)
             : run_seeded(fuel, options, observer);
}

RunOutcome Machine::run_seeded(std::int64_t fuel, const RunOptions& options,
                               const StateObserver& observer) const {
  RunOutcome out;
  std::mt19937_64 rng(options.seed);
  MachineState s = initial_state(*program_);
  if (observer && !observer(s, out.branches, false)) {
    out.kind = RunOutcome::Kind::kFuelExhausted;
    out.state = std::move(s);
    out.paths = 1;
    return out;
  }
  std::size_t forced = 0;
  for (std::int64_t n = 0;; ++n) {
    if (n >= fuel) {
      out.kind = RunOutcome::Kind::kFuelExhausted;
      out.state = std::move(s);
      break;
    }
    bool jump = false;
    if (at_branch(s)) {
      jump = forced < options.forced_branches.size()
                 ? options.forced_branches[forced++]
                 : (rng() & 1) != 0;
      out.branches.push_back(jump);
    }
    MachineState before;
    if (options.trace) before = s;
    auto r = step_in_place(s, jump);
    ++out.steps;
    if (options.trace) trace_line(*options.trace, n, before, r ? nullptr : &s);
    if (r) {
      settle(out, std::move(*r));
      break;
    }
    if (observer && !observer(s, out.branches, true)) {
      out.kind = RunOutcome::Kind::kFuelExhausted;
      out.state = std::move(s);
      break;
    }
  }
  out.paths = 1;
  out.max_depth = out.steps;
  return out;
}

namespace {

// 128 bits of a canonical key; a collision could only hide a state from
// exploration, never report a false violation.
struct KeyHash {
  std::uint64_t a = 0;
  std::uint64_t b = 0;
  bool operator==(const KeyHash&) const = default;
};

struct KeyHashHasher {
  std::size_t operator()(const KeyHash& k) const {
    return static_cast<std::size_t>(k.a ^ (k.b * 0x9e3779b97f4a7c15ull));
  }
};

KeyHash hash_key(const std::string& key) {
  KeyHash h;
  h.a = std::hash<std::string>()(key);
  h.b = 0xcbf29ce484222325ull;
  for (unsigned char c : key) {
    h.b ^= c;
    h.b *= 0x100000001b3ull;
  }
  return h;
}

constexpr std::size_t kMaxRememberedStates = std::size_t{1} << 21;
// Deep call stacks rarely repeat and are expensive to key.
constexpr std::size_t kMaxMergedDepth = 32;

}  // namespace

RunOutcome Machine::run_exhaustive(std::int64_t fuel,
                                   const RunOptions& options,
                                   const StateObserver& observer) const {
  RunOutcome worst;
  bool have_worst = false;
  std::int64_t steps = 0;
  std::int64_t paths = 0;
  std::int64_t max_depth = 0;
  bool truncated = false;
  bool aborted = false;

  auto finish_path = [&](RunOutcome&& leaf, std::int64_t depth) {
    ++paths;
    max_depth = std::max(max_depth, depth);
    if (!have_worst || severity(leaf.kind) > severity(worst.kind)) {
      worst = std::move(leaf);
      have_worst = true;
    }
  };

  std::unordered_map<KeyHash, std::int64_t, KeyHashHasher> seen;  // fuel left
  std::int64_t merged = 0;
  // True when the state was already explored with at least as much fuel.
  auto merge = [&](const MachineState& s, std::int64_t depth) {
    if (!options.merge_states || s.stack.size() > kMaxMergedDepth) {
      return false;
    }
    const std::int64_t left = fuel - depth;
    const KeyHash key = hash_key(canonical_key(s));
    auto it = seen.find(key);
    if (it == seen.end()) {
      if (seen.size() < kMaxRememberedStates) seen.emplace(key, left);
      return false;
    }
    if (it->second >= left) return true;
    it->second = left;
    return false;
  };

  // A pending path is the branch prefix that reaches it; the last decision
  // is the untried one. Paths are rebuilt by replaying from the initial
  // state, which keeps memory proportional to path length.
  std::vector<std::vector<bool>> pending{{}};
  if (observer && !observer(initial_state(*program_), {}, false)) {
    aborted = true;
  }

  std::int64_t trace_n = 0;
  while (!pending.empty() && !aborted) {
    const std::vector<bool> prefix = std::move(pending.back());
    pending.pop_back();
    MachineState s = initial_state(*program_);
    std::vector<bool> branches;
    std::int64_t depth = 0;
    bool successor = false;  // the first observed state follows a replay
    for (;;) {
      if (depth >= fuel) {
        RunOutcome leaf;
        leaf.kind = RunOutcome::Kind::kFuelExhausted;
        leaf.state = std::move(s);
        leaf.branches = std::move(branches);
        finish_path(std::move(leaf), depth);
        break;
      }
      bool jump = false;
      if (at_branch(s)) {
        const std::size_t k = branches.size();
        if (k < prefix.size()) {
          jump = prefix[k];
        } else if (k < options.forced_branches.size()) {
          jump = options.forced_branches[k];
        } else {
          std::int64_t live =
              paths + static_cast<std::int64_t>(pending.size()) + 1;
          if (live < options.path_cap) {
            std::vector<bool> alt = branches;
            alt.push_back(true);
            pending.push_back(std::move(alt));
          } else {
            truncated = true;
          }
        }
        branches.push_back(jump);
      }
      // Steps before the prefix's last decision were already explored.
      const bool replay = branches.size() < prefix.size();
      MachineState before;
      if (options.trace && !replay) before = s;
      auto r = step_in_place(s, jump);
      ++depth;
      if (replay) {
        if (r) break;  // unreachable: the original path went further
        continue;
      }
      ++steps;
      if (options.trace) {
        trace_line(*options.trace, trace_n++, before, r ? nullptr : &s);
      }
      if (r) {
        RunOutcome leaf;
        settle(leaf, std::move(*r));
        leaf.branches = std::move(branches);
        bool is_stuck = leaf.kind == RunOutcome::Kind::kStuck;
        finish_path(std::move(leaf), depth);
        if (is_stuck) aborted = true;  // nothing outranks Stuck
        break;
      }
      if (observer && !observer(s, branches, successor)) {
        aborted = true;
        break;
      }
      successor = true;
      if (merge(s, depth)) {
        ++paths;
        ++merged;
        max_depth = std::max(max_depth, depth);
        break;
      }
    }
  }

  if (!have_worst) {
    worst.kind = RunOutcome::Kind::kFuelExhausted;
    worst.state = initial_state(*program_);
  }
  worst.steps = steps;
  worst.paths = paths;
  worst.merged = merged;
  worst.max_depth = max_depth;
  worst.truncated = truncated;
  return worst;
}

StepResult step(const Program& p, const MachineState& s, bool jump) {
  return Machine(p).step(s, jump);
}

RunOutcome run(const Program& p, std::int64_t fuel,
               const RunOptions& options) {
  return Machine(p).run(fuel, options);
}

}  // namespace rawtypes
