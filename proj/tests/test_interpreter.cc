#include <sstream>

#include "doctest.h"
#include "rawtypes/checker.h"
#include "rawtypes/harness.h"
#include "rawtypes/interpreter.h"
#include "support.h"

using namespace rawtypes;

namespace {

// Object <- A <- B, plus a main class.
const char* kChain = R"(
field f : Init;
field g : Raw(A);
class Object { init() { 0: return this; } }
class A extends Object {
  init() { 0: super(arg); 1: return this; }
  method m() pre Init { 0: return this; }
}
class B extends A {
  init() { 0: super(arg); 1: return this; }
}
class Main extends Object {
  init() { 0: super(arg); 1: return this; }
  method main() {
    0: x <- new B(y);
    1: r <- x.A::m(n);
    2: return x;
  }
}
main Main;
)";

ClassId cid(const char* s) { return ClassId(s); }
VarId var(const char* s) { return VarId(s); }

HeapObject object(const char* dyn, std::optional<const char*> tag) {
  HeapObject o;
  o.dyn_class = cid(dyn);
  if (tag) o.init_level = cid(*tag);
  return o;
}

MachineState next_state(const StepResult& r) {
  REQUIRE(std::holds_alternative<Next>(r));
  return std::get<Next>(r).state;
}

RunOutcome exhaustive(const Program& p, std::int64_t fuel,
                      const StateObserver& obs = nullptr) {
  RunOptions o;
  o.policy = BranchPolicy::kExhaustive;
  return Machine(p).run(fuel, o, obs);
}

}  // namespace

TEST_CASE("value typing examples") {
  Program p = rtest::parse_or_throw(kChain);
  Heap heap{object("B", std::nullopt), object("B", "A"), object("B", "B"),
            object("Object", "Object")};
  CHECK(value_has_type(p, heap, Value::null(), InitType::init()));
  CHECK(value_has_type(p, heap, Value::at(0), InitType::raw_bot()));
  CHECK_FALSE(value_has_type(p, heap, Value::at(0), InitType::raw(cid("Object"))));
  CHECK(value_has_type(p, heap, Value::at(1), InitType::raw(cid("A"))));
  CHECK(value_has_type(p, heap, Value::at(1), InitType::raw(cid("Object"))));
  CHECK_FALSE(value_has_type(p, heap, Value::at(1), InitType::raw(cid("B"))));
  CHECK_FALSE(value_has_type(p, heap, Value::at(1), InitType::init()));
  CHECK(value_has_type(p, heap, Value::at(2), InitType::init()));
  CHECK(value_has_type(p, heap, Value::at(3), InitType::init()));
  // Raw(B) on an Object instance: no class is above both, so it holds.
  CHECK(value_has_type(p, heap, Value::at(3), InitType::raw(cid("B"))));
  try {
    value_has_type(p, heap, Value::at(9), InitType::init());
    FAIL("expected ModelError");
  } catch (const ModelError& e) {
    CHECK(e.diagnostic().code == codes::kInternal);
  }
}

TEST_CASE("value typing matches the reference and is monotone") {
  std::int64_t checks = 0;
  for (int n = 1; n <= 3; ++n) {
    rtest::for_each_hierarchy(n, [&](const rtest::Parents& parents) {
      Program p = rtest::hierarchy_program(parents);
      Hierarchy h(p);
      rtest::Oracle o(parents);
      const auto types = o.types();
      o.for_each_heap(3, [&](const Heap& heap) {
        std::vector<Value> values{Value::null()};
        for (std::size_t l = 0; l < heap.size(); ++l) {
          values.push_back(Value::at(static_cast<std::int32_t>(l)));
        }
        for (Value v : values) {
          for (const auto& t1 : types) {
            bool has1 = value_has_type(h, heap, v, t1);
            REQUIRE(has1 == o.has_type(heap, v, t1));
            for (const auto& t2 : types) {
              if (has1 && o.subtype(t1, t2)) {
                REQUIRE(value_has_type(h, heap, v, t2));
              }
              ++checks;
            }
          }
        }
      });
    });
  }
  CHECK(checks > 100000);
}

TEST_CASE("alloc") {
  Program p = rtest::parse_or_throw(kChain);
  Heap heap;
  auto l0 = alloc(p, heap, cid("B"));
  REQUIRE(heap.size() == 1);
  CHECK(heap[l0].dyn_class == cid("B"));
  CHECK_FALSE(heap[l0].init_level.has_value());
  CHECK(heap[l0].fields.size() == 2);
  for (const auto& [f, v] : heap[l0].fields) CHECK(v.is_null());
  auto l1 = alloc(p, heap, cid("A"));
  CHECK(l0 != l1);
  CHECK_FALSE(value_has_type(p, heap, Value::at(l0), InitType::init()));
  CHECK_FALSE(value_has_type(p, heap, Value::at(l1), InitType::init()));
}

TEST_CASE("set_init") {
  Program p = rtest::parse_or_throw(kChain);
  Hierarchy h(p);
  Heap heap{object("B", "A"), object("Object", std::nullopt),
            object("B", std::nullopt), object("B", "B")};
  CHECK(set_init(h, heap, cid("B"), 0));
  CHECK(heap[0].init_level == cid("B"));
  CHECK(set_init(h, heap, cid("Object"), 1));
  CHECK(heap[1].init_level == cid("Object"));
  Heap before = heap;
  CHECK_FALSE(set_init(h, heap, cid("B"), 2));
  CHECK(heap == before);
  // Already at or past the class: left alone.
  CHECK(set_init(h, heap, cid("B"), 3));
  CHECK(set_init(h, heap, cid("A"), 3));
  CHECK(heap[3].init_level == cid("B"));
}

TEST_CASE("eval_expr") {
  Program p = rtest::parse_or_throw(kChain);
  Heap heap;
  auto l0 = alloc(p, heap, cid("A"));
  auto l1 = alloc(p, heap, cid("A"));
  heap[l0].fields.set(FieldId("f"), Value::at(l1));
  Locals locals;
  locals.set(var("x"), Value::null());
  locals.set(var("y"), Value::at(l0));
  CHECK_FALSE(eval_expr(heap, locals, Expr::variable(var("x")).field(FieldId("f"))));
  CHECK(eval_expr(heap, locals, Expr::null()) == Value::null());
  CHECK(eval_expr(heap, locals, Expr::variable(var("y"))) == Value::at(l0));
  CHECK(eval_expr(heap, locals, Expr::variable(var("y")).field(FieldId("f"))) ==
        Value::at(l1));
  CHECK(eval_expr(heap, locals, Expr::variable(var("y"))
                                    .field(FieldId("f"))
                                    .field(FieldId("g"))) == Value::null());
  CHECK_FALSE(eval_expr(heap, locals, Expr::variable(var("y"))
                                          .field(FieldId("g"))
                                          .field(FieldId("f"))));
}

TEST_CASE("new enters the constructor with fresh locals") {
  Program p = rtest::parse_or_throw(kChain);
  Machine mach(p);
  MachineState s0 = initial_state(p);
  CHECK(s0.method == MethodRef{cid("Main"), names::main_method()});
  CHECK(s0.pc == 0);
  CHECK(s0.heap.empty());
  CHECK(s0.stack.empty());
  for (const auto& [v, val] : s0.locals) CHECK(val.is_null());

  MachineState s1 = next_state(mach.step(s0));
  CHECK(s1.method == MethodRef{cid("B"), names::constructor()});
  CHECK(s1.pc == 0);
  REQUIRE(s1.heap.size() == 1);
  CHECK(s1.heap[0].dyn_class == cid("B"));
  CHECK(*s1.locals.get(names::this_var()) == Value::at(0));
  CHECK(*s1.locals.get(names::arg_var()) == Value::null());
  for (const auto& [v, val] : s1.locals) {
    if (v != names::this_var()) CHECK(val.is_null());
  }
  REQUIRE(s1.stack.size() == 1);
  CHECK(s1.stack[0].method == s0.method);
  CHECK(s1.stack[0].pc == 0);
  CHECK(s1.stack[0].result == var("x"));
  CHECK(s1.stack[0].locals == s0.locals);
}

TEST_CASE("constructor chain tags the object one class at a time") {
  Program p = rtest::parse_or_throw(kChain);
  Machine mach(p);
  MachineState s = initial_state(p);
  std::vector<std::optional<ClassId>> tags;
  for (int i = 0; i < 20; ++i) {
    if (!s.heap.empty() &&
        (tags.empty() || tags.back() != s.heap[0].init_level)) {
      tags.push_back(s.heap[0].init_level);
    }
    if (s.method.name == names::main_method() && s.pc == 1) break;
    s = next_state(mach.step(s));
  }
  std::vector<std::optional<ClassId>> want{std::nullopt, cid("Object"),
                                           cid("A"), cid("B")};
  CHECK(tags == want);
  CHECK(*s.locals.get(var("x")) == Value::at(0));
  CHECK(s.stack.empty());
}

TEST_CASE("root constructor return sets the tag and pops") {
  Program p = rtest::parse_or_throw(R"(
class C {
  init() { 0: return this; }
  method main() { 0: x <- new C(n); 1: return x; }
}
main C;
)");
  Machine mach(p);
  MachineState s = next_state(mach.step(initial_state(p)));
  CHECK_FALSE(s.heap[0].init_level.has_value());
  s = next_state(mach.step(s));
  CHECK(s.heap[0].init_level == cid("C"));
  CHECK(s.stack.empty());
  CHECK(s.pc == 1);
  auto r = mach.step(s);
  REQUIRE(std::holds_alternative<Final>(r));
  CHECK(std::get<Final>(r).value == Value::at(0));
}

TEST_CASE("calling an Init method on a partially initialized receiver is stuck") {
  Program p = rtest::parse_or_throw(kChain);
  MachineState s = initial_state(p);
  s.pc = 1;
  s.heap.push_back(object("B", "A"));
  s.heap.back().fields.set(FieldId("f"), Value::null());
  s.heap.back().fields.set(FieldId("g"), Value::null());
  s.locals.set(var("x"), Value::at(0));
  auto r = step(p, s);
  REQUIRE(std::holds_alternative<Stuck>(r));
  const Stuck& st = std::get<Stuck>(r);
  CHECK(st.reason == StuckReason::kCallPreViolation);
  CHECK(std::string(to_string(st.reason)) == "call-pre-violation");
  CHECK(st.pc == 1);

  s.heap[0].init_level = cid("B");
  MachineState in = next_state(step(p, s));
  CHECK(in.method == MethodRef{cid("A"), MethodName("m")});
}

TEST_CASE("argument checks on new and calls") {
  Program p = rtest::parse_or_throw(R"(
class C {
  init(arg: Init) { 0: return this; }
  method take(arg: Init) { 0: return n; }
  method main() {
    0: x <- new C(y);
    1: z <- x.C::take(w);
    2: return z;
  }
}
main C;
)");
  Machine mach(p);
  MachineState s = initial_state(p);
  s.heap.push_back(object("C", std::nullopt));
  s.locals.set(var("y"), Value::at(0));
  auto r = mach.step(s);
  REQUIRE(std::holds_alternative<Stuck>(r));
  CHECK(std::get<Stuck>(r).reason == StuckReason::kCallArgViolation);

  MachineState t = initial_state(p);
  t.pc = 1;
  t.heap.push_back(object("C", "C"));
  t.locals.set(var("x"), Value::at(0));
  CHECK(std::holds_alternative<Next>(mach.step(t)));
  t.heap[0].init_level.reset();
  auto u = mach.step(t);
  REQUIRE(std::holds_alternative<Stuck>(u));
  CHECK(std::get<Stuck>(u).reason == StuckReason::kCallPreViolation);
}

TEST_CASE("setinit out of order and return of another value are stuck") {
  Program p = rtest::parse_or_throw(R"(
class O { init() { 0: return this; } }
class A extends O {
  init() {
    0: if * jmp 3;
    1: setinit;
    2: return this;
    3: if * jmp 6;
    4: super(n);
    5: return n;
    6: super(n);
    7: return this;
  }
}
class M extends O {
  init() { 0: super(arg); 1: return this; }
  method main() { 0: x <- new A(n); 1: return x; }
}
main M;
)");
  Machine mach(p);
  MachineState s = next_state(mach.step(initial_state(p)));
  // Fall through to the early setinit.
  MachineState a = next_state(mach.step(s, false));
  auto r = mach.step(a);
  REQUIRE(std::holds_alternative<Stuck>(r));
  CHECK(std::get<Stuck>(r).reason == StuckReason::kSetInitOrderViolation);

  RunOptions forced;
  forced.forced_branches = {true, false};
  RunOutcome o = mach.run(100, forced);
  REQUIRE(o.kind == RunOutcome::Kind::kStuck);
  CHECK(o.stuck->reason == StuckReason::kConstructorReturnNotThis);

  forced.forced_branches = {true, true};
  CHECK(mach.run(100, forced).kind == RunOutcome::Kind::kFinal);

  RunOutcome all = exhaustive(p, 100);
  CHECK(all.kind == RunOutcome::Kind::kStuck);
  CHECK(all.paths >= 1);
}

TEST_CASE("receiver outside the declaring class raises cce") {
  Program p = rtest::parse_or_throw(kChain);
  MachineState s = initial_state(p);
  s.pc = 1;
  s.heap.push_back(object("Main", "Main"));
  s.locals.set(var("x"), Value::at(0));
  MachineState t = next_state(step(p, s));
  CHECK(t.exc == names::class_cast());
}

TEST_CASE("exceptions: handlers, unwinding, uncaught") {
  Program p = rtest::parse_or_throw(R"(
field f : Init;
class C {
  init() { 0: return this; }
  method boom() { 0: x <- n.f; 1: return x; }
  method main() {
    0: if * jmp 3;
    1: x <- this.C::boom(n);
    2: return x;
    3: y <- new C(n);
    4: z <- y.C::boom(n);
    5: return z;
    handler 4 np -> 6;
    6: w <- (Raw(C)) y;
    7: v <- (Init) n;
    8: return v;
  }
}
main C;
)");
  Machine mach(p);
  RunOptions o;
  o.forced_branches = {false};
  RunOutcome a = mach.run(100, o);
  // `this` is null in main, so the call itself raises np.
  REQUIRE(a.kind == RunOutcome::Kind::kFinalExceptional);
  CHECK(a.exc == names::null_pointer());

  o.forced_branches = {true};
  RunOutcome b = mach.run(100, o);
  // boom raises np, unwinds to main's handler, then the casts succeed.
  REQUIRE(b.kind == RunOutcome::Kind::kFinal);
  CHECK(b.value == Value::null());

  // Null passes every cast; an uninitialized object fails (Init).
  Program q = rtest::parse_or_throw(R"(
class C {
  init() { 0: x <- (Init) this; 1: return this; }
  method main() { 0: y <- new C(n); 1: return y; }
}
main C;
)");
  RunOutcome c = run(q, 100);
  REQUIRE(c.kind == RunOutcome::Kind::kFinalExceptional);
  CHECK(c.exc == names::class_cast());
}

TEST_CASE("field writes and reads") {
  Program p = rtest::parse_or_throw(R"(
field f : Init;
class C {
  init() { 0: return this; }
  method main() {
    0: a <- new C(n);
    1: b <- new C(n);
    2: a.f <- b;
    3: c <- a.f;
    4: n.f <- c;
    5: return c;
  }
}
main C;
)");
  Machine mach(p);
  MachineState s = initial_state(p);
  for (int i = 0; i < 5; ++i) s = next_state(mach.step(s));
  CHECK(s.pc == 3);
  CHECK(*s.heap[0].fields.get(FieldId("f")) == Value::at(1));
  s = next_state(mach.step(s));
  CHECK(*s.locals.get(var("c")) == Value::at(1));
  s = next_state(mach.step(s));
  CHECK(s.exc == names::null_pointer());
  auto r = mach.step(s);
  REQUIRE(std::holds_alternative<FinalExceptional>(r));
}

TEST_CASE("run outcomes") {
  Program p = rtest::parse_or_throw(R"(
class C {
  init() { 0: return this; }
  method main() { 0: return x; }
}
main C;
)");
  RunOutcome r = run(p, 10);
  CHECK(r.kind == RunOutcome::Kind::kFinal);
  CHECK(r.value == Value::null());
  CHECK(r.steps == 1);

  RunOutcome z = run(p, 0);
  REQUIRE(z.kind == RunOutcome::Kind::kFuelExhausted);
  REQUIRE(z.state.has_value());
  CHECK(*z.state == initial_state(p));

  Program loop = rtest::parse_or_throw(R"(
class C {
  init() { 0: return this; }
  method main() { 0: if * jmp 0; 1: return x; }
}
main C;
)");
  RunOutcome e = exhaustive(loop, 50);
  CHECK(e.kind == RunOutcome::Kind::kFuelExhausted);
  RunOptions o;
  o.forced_branches = {true, true, false};
  RunOutcome f = Machine(loop).run(50, o);
  CHECK(f.kind == RunOutcome::Kind::kFinal);
  CHECK(f.branches == std::vector<bool>{true, true, false});
  CHECK(f.steps == 4);
}

TEST_CASE("attacker corpus reaches call-pre-violation") {
  Program p = rtest::load_corpus("classloader_attack.rt");
  RunOutcome r = exhaustive(p, 10000);
  REQUIRE(r.kind == RunOutcome::Kind::kStuck);
  CHECK(r.stuck->reason == StuckReason::kCallPreViolation);
  CHECK(r.stuck->method == MethodRef{cid("Attacker"), MethodName("finalize")});
  CHECK(r.stuck->pc == 0);

  // The reported path replays to the same stuck state.
  RunOptions o;
  o.forced_branches = r.branches;
  RunOutcome again = Machine(p).run(10000, o);
  REQUIRE(again.kind == RunOutcome::Kind::kStuck);
  CHECK(again.stuck->reason == StuckReason::kCallPreViolation);
}

TEST_CASE("well-typed corpus never gets stuck") {
  for (const char* f : {"classloader.rt", "ex1_raw.rt", "setinit.rt"}) {
    CAPTURE(f);
    Program p = rtest::load_corpus(f);
    CheckReport rep = check_program(p);
    REQUIRE(rep.well_typed());
    Hierarchy h(p);
    std::string why;
    RunOutcome r = exhaustive(p, 10000, [&](const MachineState& s,
                                            const std::vector<bool>&, bool) {
      return state_well_formed(h, s, rep.tables, &why);
    });
    CHECK_MESSAGE(why.empty(), why);
    CHECK(r.kind != RunOutcome::Kind::kStuck);
    CHECK(r.kind != RunOutcome::Kind::kFuelExhausted);
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
      RunOptions o;
      o.seed = seed;
      CHECK(run(p, 10000, o).kind != RunOutcome::Kind::kStuck);
    }
  }
}

TEST_CASE("well-formed states") {
  Program p = rtest::parse_or_throw(kChain);
  CheckReport rep = check_program(p);
  REQUIRE(rep.well_typed());
  MachineState s = initial_state(p);
  CHECK(state_well_formed(p, s, rep.tables));

  // Heap surgery: an Init field holding a half-built object.
  Heap& heap = s.heap;
  auto l0 = alloc(p, heap, cid("B"));
  auto l1 = alloc(p, heap, cid("B"));
  heap[l1].init_level = cid("A");
  heap[l0].init_level = cid("B");
  CHECK(state_well_formed(p, s, rep.tables));
  heap[l0].fields.set(FieldId("f"), Value::at(l1));
  std::string why;
  CHECK_FALSE(state_well_formed(Hierarchy(p), s, rep.tables, &why));
  CHECK_FALSE(why.empty());
  // Raw(A) field accepts it.
  heap[l0].fields.set(FieldId("f"), Value::null());
  heap[l0].fields.set(FieldId("g"), Value::at(l1));
  CHECK(state_well_formed(p, s, rep.tables));

  // A local typed Init at pc 2 holding the same object.
  s.pc = 2;
  s.locals.set(var("x"), Value::at(l1));
  CHECK_FALSE(state_well_formed(p, s, rep.tables));
  s.locals.set(var("x"), Value::at(l0));
  CHECK(state_well_formed(p, s, rep.tables));

  // A suspended frame is checked at its call site.
  MachineState t = s;
  t.stack.push_back(Frame{t.method, 1, t.locals, var("r")});
  t.stack.back().locals.set(var("x"), Value::at(l1));
  t.method = MethodRef{cid("A"), MethodName("m")};
  t.pc = 0;
  t.locals = Locals{};
  t.locals.set(names::this_var(), Value::at(l0));
  t.locals.set(names::arg_var(), Value::null());
  CHECK_FALSE(state_well_formed(p, t, rep.tables));
}

TEST_CASE("incremental and full well-formedness agree along runs") {
  GenBounds b;
  int runs = 0;
  for (std::uint64_t seed = 0; seed < 400 && runs < 40; ++seed) {
    Program p = generate_program(seed, b);
    CheckReport rep = check_program(p);
    if (!rep.well_typed()) continue;
    ++runs;
    Hierarchy h(p);
    WellFormedness inc(h, rep.tables), full(h, rep.tables);
    std::int64_t states = 0;
    RunOptions o;
    o.policy = BranchPolicy::kExhaustive;
    o.path_cap = 256;
    Machine(p).run(300, o, [&](const MachineState& s,
                               const std::vector<bool>&, bool successor) {
      REQUIRE(inc.check_along_path(s, successor) == full.check(s));
      ++states;
      return true;
    });
    CHECK(states > 0);
  }
  CHECK(runs > 10);
}

TEST_CASE("tags ascend one class at a time and the heap only grows") {
  GenBounds b;
  int programs = 0;
  for (std::uint64_t seed = 0; seed < 300; ++seed) {
    Program p = generate_program(seed, b);
    Hierarchy h(p);
    std::optional<MachineState> prev;
    RunOptions o;
    o.policy = BranchPolicy::kExhaustive;
    o.path_cap = 64;
    Machine(p).run(200, o, [&](const MachineState& s,
                               const std::vector<bool>&, bool successor) {
      if (successor && prev) {
        REQUIRE(s.heap.size() >= prev->heap.size());
        for (std::size_t l = 0; l < prev->heap.size(); ++l) {
          const auto& before = prev->heap[l];
          const auto& after = s.heap[l];
          REQUIRE(before.dyn_class == after.dyn_class);
          REQUIRE(h.le(after.dyn_class, after.init_level.value_or(
                                            after.dyn_class)));
          if (before.init_level == after.init_level) continue;
          REQUIRE(after.init_level.has_value());
          // The new tag sits directly below the old one.
          REQUIRE(h.super_of(*after.init_level) == before.init_level);
        }
      }
      prev = s;
      return true;
    });
    ++programs;
  }
  CHECK(programs == 300);
}

TEST_CASE("canonical keys ignore garbage and location numbering") {
  Program p = rtest::parse_or_throw(kChain);
  MachineState a = initial_state(p);
  auto l0 = alloc(p, a.heap, cid("B"));
  a.locals.set(var("x"), Value::at(l0));

  MachineState b = initial_state(p);
  alloc(p, b.heap, cid("A"));  // unreachable
  auto m1 = alloc(p, b.heap, cid("B"));
  b.locals.set(var("x"), Value::at(m1));
  CHECK(canonical_key(a) == canonical_key(b));

  b.heap[m1].init_level = cid("Object");
  CHECK(canonical_key(a) != canonical_key(b));
}

TEST_CASE("merging states does not change verdicts") {
  GenBounds b;
  for (std::uint64_t seed = 0; seed < 200; ++seed) {
    Program p = generate_program(seed, b);
    RunOptions plain, merged;
    plain.policy = merged.policy = BranchPolicy::kExhaustive;
    plain.path_cap = merged.path_cap = 1 << 12;
    merged.merge_states = true;
    RunOutcome x = Machine(p).run(200, plain);
    RunOutcome y = Machine(p).run(200, merged);
    if (x.truncated || y.truncated) continue;
    CAPTURE(seed);
    CHECK((x.kind == RunOutcome::Kind::kStuck) ==
          (y.kind == RunOutcome::Kind::kStuck));
  }
}

TEST_CASE("trace lines") {
  Program p = rtest::parse_or_throw(R"(
class C {
  init() { 0: return this; }
  method main() { 0: x <- new C(n); 1: return x; }
}
main C;
)");
  std::ostringstream trace;
  RunOptions o;
  o.trace = &trace;
  Machine(p).run(10, o);
  std::string t = trace.str();
  CHECK(t.find("step 0: C.main pc 0: x <- new C(n) | heap 1") == 0);
  CHECK(t.find("l0 C _->C") != std::string::npos);
  int lines = 0;
  for (char ch : t) lines += ch == '\n';
  CHECK(lines == 3);
}
