#include <set>

#include "doctest.h"
#include "rawtypes/hierarchy.h"
#include "rawtypes/model.h"
#include "rawtypes/structure.h"
#include "support.h"

using namespace rawtypes;
using rtest::Oracle;
using rtest::Parents;

namespace {

const char* kThree = R"(
class Object { init() { 0: return this; } }
class A extends Object { init() { 0: super(arg); 1: return this; } }
class B extends Object {
  init() { 0: super(arg); 1: return this; }
  method main() { 0: return x; }
}
main B;
)";

const char* kLookup = R"(
class Object { init() { 0: return this; } }
class A extends Object {
  init() { 0: super(arg); 1: return this; }
  method m() { 0: return this; }
  method k() { 0: return this; }
}
class B extends A {
  init() { 0: super(arg); 1: return this; }
  method m() { 0: return this; }
}
class C extends B {
  init() { 0: super(arg); 1: return this; }
  method main() { 0: return x; }
}
main C;
)";

ClassId cid(const char* s) { return ClassId(s); }

}  // namespace

TEST_CASE("identifiers intern by text") {
  ClassId a("Alpha"), b("Alpha"), c("Beta");
  CHECK(a == b);
  CHECK(a != c);
  CHECK(a < c);
  CHECK_FALSE(c < a);
  CHECK(a.hash() == b.hash());
  CHECK(a.address() == b.address());
  CHECK(ClassId().empty());
}

TEST_CASE("type and expression syntax") {
  CHECK(to_string(InitType::init()) == "Init");
  CHECK(to_string(InitType::raw_bot()) == "Raw");
  CHECK(to_string(InitType::raw(cid("C"))) == "Raw(C)");
  CHECK(InitType::raw(cid("C")) == InitType::raw(cid("C")));
  CHECK(InitType::raw(cid("C")) != InitType::raw(cid("D")));
  CHECK(to_string(Expr::null()) == "null");
  Expr e = Expr::variable(VarId("x")).field(FieldId("f")).field(FieldId("g"));
  CHECK(to_string(e) == "x.f.g");
}

TEST_CASE("written_var and method_variables") {
  CHECK(written_var(Instr{Assign{VarId("x"), Expr::null()}}) == VarId("x"));
  CHECK(written_var(Instr{New{VarId("y"), cid("C"), VarId("a")}}) ==
        VarId("y"));
  CHECK_FALSE(written_var(Instr{SetInit{}}).has_value());
  CHECK_FALSE(written_var(Instr{IfStar{0}}).has_value());
  CHECK(written_var(Instr{CastRaw{VarId("z"), cid("C"), VarId("w")}}) ==
        VarId("z"));

  MethodDef m;
  m.instrs = {Assign{VarId("b"), Expr::variable(VarId("a"))},
              FieldWrite{VarId("c"), FieldId("f"), VarId("b")},
              Return{VarId("b")}};
  auto vars = method_variables(m);
  REQUIRE(vars.size() == 5);
  CHECK(vars[0] == names::this_var());
  CHECK(vars[1] == names::arg_var());
  CHECK(vars[2] == VarId("b"));
  CHECK(vars[3] == VarId("a"));
  CHECK(vars[4] == VarId("c"));
}

TEST_CASE("flat map keeps keys sorted and unique") {
  FlatMap<int, int> m;
  m.set(3, 30);
  m.set(1, 10);
  m.set(3, 33);
  CHECK(m.size() == 2);
  CHECK(*m.get(3) == 33);
  CHECK(m.get(2) == nullptr);
  CHECK(m.begin()->first == 1);
}

TEST_CASE("diagnostic formatting") {
  Diagnostic d = make_error("syntax-error", "expected ';'", {"a.rt", 3, 7});
  CHECK(format_diagnostic(d) == "a.rt:3:7 syntax-error expected ';'");
  CHECK(has_errors({d}));
  d.severity = Severity::kWarning;
  CHECK_FALSE(has_errors({d}));
  std::set<std::string> codes(all_diagnostic_codes().begin(),
                              all_diagnostic_codes().end());
  CHECK(codes.size() == all_diagnostic_codes().size());
  CHECK(codes.count("missing-next-instruction"));
  CHECK(codes.count("hierarchy-cycle"));
}

TEST_CASE("class_le examples") {
  Program p = rtest::parse_or_throw(kThree);
  CHECK(class_le(p, cid("A"), cid("A")));
  CHECK(class_le(p, cid("A"), cid("Object")));
  CHECK_FALSE(class_le(p, cid("Object"), cid("A")));
  CHECK_FALSE(class_le(p, cid("A"), cid("B")));
}

TEST_CASE("subtype and join examples") {
  Program p = rtest::parse_or_throw(kThree);
  auto A = InitType::raw(cid("A")), B = InitType::raw(cid("B")),
       O = InitType::raw(cid("Object"));
  CHECK(subtype(p, InitType::init(), A));
  CHECK_FALSE(subtype(p, O, A));
  CHECK(subtype(p, A, O));
  CHECK(subtype(p, O, InitType::raw_bot()));
  CHECK(join(p, InitType::init(), A) == A);
  CHECK(join(p, A, B) == O);
  CHECK(join(p, InitType::raw_bot(), InitType::init()) ==
        InitType::raw_bot());
}

TEST_CASE("undeclared classes raise a diagnostic") {
  Program p = rtest::parse_or_throw(kThree);
  try {
    class_le(p, cid("A"), cid("Nowhere"));
    FAIL("expected ModelError");
  } catch (const ModelError& e) {
    CHECK(e.diagnostic().code == codes::kUndeclaredClass);
  }
  CHECK_THROWS_AS(subtype(p, InitType::raw(cid("Nope")), InitType::raw_bot()),
                  ModelError);
}

TEST_CASE("lookup walks towards the root") {
  Program p = rtest::parse_or_throw(kLookup);
  Hierarchy h(p);
  CHECK(h.lookup_owner(cid("C"), MethodName("m")) == cid("B"));
  CHECK(h.lookup_owner(cid("B"), MethodName("m")) == cid("B"));
  CHECK(h.lookup_owner(cid("C"), MethodName("k")) == cid("A"));
  CHECK(h.lookup(cid("B"), MethodName("k")) ==
        p.find_method(cid("A"), MethodName("k")));
  CHECK(lookup(p, cid("Object"), MethodName("absent")) == nullptr);
  CHECK(h.raw_super(cid("Object")) == InitType::raw_bot());
  CHECK(h.raw_super(cid("B")) == InitType::raw(cid("A")));
}

TEST_CASE("lattice agrees with the reference on every hierarchy of up to 5 classes") {
  int hierarchies = 0;
  for (int n = 1; n <= 5; ++n) {
    rtest::for_each_hierarchy(n, [&](const Parents& parents) {
      ++hierarchies;
      Program p = rtest::hierarchy_program(parents);
      Hierarchy h(p);
      Oracle o(parents);
      const auto types = o.types();
      for (int a = 0; a < n; ++a) {
        for (int b = 0; b < n; ++b) {
          REQUIRE(h.le(o.id(a), o.id(b)) == o.le(a, b));
        }
      }
      for (const auto& t1 : types) {
        for (const auto& t2 : types) {
          REQUIRE(h.subtype(t1, t2) == o.subtype(t1, t2));
          auto j = o.join(t1, t2);
          REQUIRE(j.has_value());
          REQUIRE(h.join(t1, t2) == *j);
          // antisymmetry
          if (h.subtype(t1, t2) && h.subtype(t2, t1)) REQUIRE(t1 == t2);
          for (const auto& t3 : types) {
            if (h.subtype(t1, t2) && h.subtype(t2, t3)) {
              REQUIRE(h.subtype(t1, t3));
            }
          }
        }
        REQUIRE(h.subtype(t1, t1));
      }
      // lookup: the owner is an ancestor and nothing closer declares m.
      for (int c = 0; c < n; ++c) {
        auto owner = h.lookup_owner(o.id(c), names::main_method());
        REQUIRE(owner.has_value() == o.le(c, 0));
        if (owner) REQUIRE(*owner == o.id(0));
      }
    });
  }
  // 1 + 2 + 9 + 64 + 625 labelled rooted trees.
  CHECK(hierarchies == 701);
}

TEST_CASE("lookup returns the nearest declaring ancestor") {
  Program p = rtest::parse_or_throw(kLookup);
  Hierarchy h(p);
  for (ClassId c : h.classes()) {
    for (const char* name : {"m", "k", "main", "absent"}) {
      MethodName m(name);
      auto owner = h.lookup_owner(c, m);
      std::optional<ClassId> expected;
      for (ClassId a : h.ancestors(c)) {
        if (p.find_method(a, m) != nullptr) {
          expected = a;
          break;
        }
      }
      CHECK(owner == expected);
    }
  }
}

TEST_CASE("default annotations") {
  auto pp = rtest::parse_or_throw(R"(
field f;
class C {
  init() { 0: return this; }
  method main() { 0: return x; }
  method g() pre Raw(C) { 0: return x; }
}
main C;
)");
  const MethodDef& ctor = pp.classes.at(cid("C")).ctor;
  CHECK(ctor.pre == InitType::raw_bot());
  CHECK(ctor.post == InitType::raw(cid("C")));
  CHECK(ctor.argtype == InitType::init());
  CHECK(ctor.rettype == InitType::init());
  const MethodDef* g = pp.find_method(cid("C"), MethodName("g"));
  REQUIRE(g != nullptr);
  CHECK(g->pre == InitType::raw(cid("C")));
  CHECK(g->post == InitType::raw(cid("C")));
  const MethodDef* m = pp.find_method(cid("C"), names::main_method());
  CHECK(m->pre == InitType::init());
  CHECK(m->post == InitType::init());
  CHECK(pp.fields.at(FieldId("f")) == InitType::init());
}

namespace {

bool has_code(const std::vector<Diagnostic>& ds, const std::string& code) {
  for (const auto& d : ds) {
    if (d.code == code) return true;
  }
  return false;
}

MethodDef& main_of(Program& p) {
  return p.classes.at(p.main).methods.at(names::main_method());
}

}  // namespace

TEST_CASE("validate_structure accepts the corpus") {
  for (const char* f : {"classloader.rt", "classloader_attack.rt",
                        "ex1_raw.rt", "ex1_init.rt", "setinit.rt"}) {
    CAPTURE(f);
    CHECK(validate_structure(rtest::load_corpus(f)).empty());
  }
}

TEST_CASE("validate_structure reports each broken invariant") {
  const Program base = rtest::parse_or_throw(kThree);

  SUBCASE("method ending in a jump") {
    Program p = base;
    main_of(p).instrs = {IfStar{0}};
    CHECK(has_code(validate_structure(p), codes::kMissingNextInstruction));
  }
  SUBCASE("empty body") {
    Program p = base;
    main_of(p).instrs.clear();
    CHECK(has_code(validate_structure(p), codes::kEmptyMethod));
  }
  SUBCASE("constructor not ending in return this") {
    Program p = base;
    p.classes.at(cid("A")).ctor.instrs.back() = Return{VarId("x")};
    CHECK(has_code(validate_structure(p), codes::kConstructorFinalReturn));
  }
  SUBCASE("cycle") {
    Program p = base;
    p.classes.at(cid("A")).super = cid("B");
    p.classes.at(cid("B")).super = cid("A");
    CHECK(has_code(validate_structure(p), codes::kHierarchyCycle));
  }
  SUBCASE("two roots") {
    Program p = base;
    p.classes.at(cid("A")).super.reset();
    p.classes.at(cid("A")).ctor.instrs = {Return{names::this_var()}};
    CHECK(has_code(validate_structure(p), codes::kRootCount));
  }
  SUBCASE("jump out of range") {
    Program p = base;
    main_of(p).instrs.insert(main_of(p).instrs.begin(), IfStar{7});
    CHECK(has_code(validate_structure(p), codes::kJumpTarget));
  }
  SUBCASE("handler out of range") {
    Program p = base;
    main_of(p).handlers[{0, names::null_pointer()}] = 4;
    CHECK(has_code(validate_structure(p), codes::kHandlerRange));
  }
  SUBCASE("assignment to this") {
    Program p = base;
    main_of(p).instrs.insert(main_of(p).instrs.begin(),
                             Assign{names::this_var(), Expr::null()});
    CHECK(has_code(validate_structure(p), codes::kAssignToThis));
  }
  SUBCASE("new into this") {
    Program p = base;
    main_of(p).instrs.insert(main_of(p).instrs.begin(),
                             New{names::this_var(), cid("A"), VarId("x")});
    CHECK(has_code(validate_structure(p), codes::kAssignToThis));
  }
  SUBCASE("undeclared field") {
    Program p = base;
    main_of(p).instrs.insert(
        main_of(p).instrs.begin(),
        Assign{VarId("y"), Expr::variable(VarId("x")).field(FieldId("g"))});
    CHECK(has_code(validate_structure(p), codes::kUndeclaredField));
  }
  SUBCASE("undeclared class in new") {
    Program p = base;
    main_of(p).instrs.insert(main_of(p).instrs.begin(),
                             New{VarId("y"), cid("Zed"), VarId("x")});
    CHECK(has_code(validate_structure(p), codes::kUndeclaredClass));
  }
  SUBCASE("undeclared method in call") {
    Program p = base;
    main_of(p).instrs.insert(
        main_of(p).instrs.begin(),
        VirtualCall{VarId("y"), VarId("x"), cid("A"), MethodName("main"),
                    VarId("x")});
    CHECK(has_code(validate_structure(p), codes::kUndeclaredMethod));
  }
  SUBCASE("super in the root constructor") {
    Program p = base;
    auto& ctor = p.classes.at(cid("Object")).ctor;
    ctor.instrs.insert(ctor.instrs.begin(), SuperCall{VarId("arg")});
    CHECK(has_code(validate_structure(p), codes::kSuperInRoot));
  }
  SUBCASE("super and setinit outside constructors") {
    Program p = base;
    main_of(p).instrs.insert(main_of(p).instrs.begin(), SetInit{});
    main_of(p).instrs.insert(main_of(p).instrs.begin(),
                             SuperCall{VarId("x")});
    auto ds = validate_structure(p);
    CHECK(has_code(ds, codes::kSuperOutsideConstructor));
    CHECK(has_code(ds, codes::kSetInitOutsideConstructor));
  }
  SUBCASE("missing main") {
    Program p = base;
    p.main = cid("A");
    CHECK(has_code(validate_structure(p), codes::kMissingMain));
  }
  SUBCASE("raw type naming an undeclared class") {
    Program p = base;
    main_of(p).pre = InitType::raw(cid("Ghost"));
    CHECK(has_code(validate_structure(p), codes::kUndeclaredClass));
  }
}
