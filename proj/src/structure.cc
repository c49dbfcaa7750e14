#include "rawtypes/structure.h"

#include <set>

namespace rawtypes {
namespace {

MethodDef resolve_method(const PartialMethod& pm, ClassId owner) {
  MethodDef m;
  m.name = pm.name;
  m.is_constructor = pm.is_constructor;
  m.instrs = pm.instrs;
  m.handlers = pm.handlers;
  m.argtype = pm.argtype.value_or(InitType::init());
  m.rettype = pm.rettype.value_or(InitType::init());
  if (pm.is_constructor) {
    m.pre = pm.pre.value_or(InitType::raw_bot());
    m.post = pm.post.value_or(InitType::raw(owner));
  } else {
    m.pre = pm.pre.value_or(InitType::init());
    m.post = pm.post.value_or(m.pre);
  }
  m.location = pm.location;
  m.instr_locations = pm.instr_locations;
  return m;
}

MethodDef trivial_constructor(ClassId owner, const SourceLocation& loc) {
  PartialMethod pm;
  pm.name = names::constructor();
  pm.is_constructor = true;
  pm.instrs = {Return{names::this_var()}};
  pm.location = loc;
  pm.instr_locations = {loc};
  return resolve_method(pm, owner);
}

}  // namespace

Program apply_default_annotations(const PartialProgram& partial) {
  Program p;
  p.main = partial.main;
  for (const PartialField& f : partial.fields) {
    p.fields.emplace(f.id, f.type.value_or(InitType::init()));
  }
  for (const PartialClass& pc : partial.classes) {
    if (p.classes.count(pc.id) != 0) continue;
    ClassDef cls;
    cls.id = pc.id;
    cls.super = pc.super;
    cls.location = pc.location;
    cls.ctor = pc.ctor ? resolve_method(*pc.ctor, pc.id)
                       : trivial_constructor(pc.id, pc.location);
    for (const PartialMethod& pm : pc.methods) {
      cls.methods.emplace(pm.name, resolve_method(pm, pc.id));
    }
    p.classes.emplace(pc.id, std::move(cls));
  }
  return p;
}

namespace {

class StructureValidator {
 public:
  explicit StructureValidator(const Program& p) : p_(p) {}

  std::vector<Diagnostic> run() {
    check_main();
    check_hierarchy();
    for (const auto& [id, f] : p_.fields) {
      check_type(f, SourceLocation{}, nullptr, nullptr, "field " + id.name());
    }
    for (const auto& [id, cls] : p_.classes) {
      if (cls.id != id) {
        error(codes::kInconsistentName,
              "class keyed '" + id.name() + "' is named '" + cls.id.name() +
                  "'",
              cls.location);
      }
      check_method(cls, cls.ctor, true);
      for (const auto& [name, m] : cls.methods) {
        if (m.name != name) {
          error(codes::kInconsistentName,
                "method keyed '" + name.name() + "' is named '" +
                    m.name.name() + "'",
                m.location);
        }
        check_method(cls, m, false);
      }
    }
    return std::move(diags_);
  }

 private:
  void error(const char* code, std::string message, SourceLocation loc,
             const ClassDef* cls = nullptr, const MethodDef* m = nullptr,
             std::optional<int> pc = std::nullopt) {
    Diagnostic d = make_error(code, std::move(message), std::move(loc));
    if (cls) d.cls = cls->id;
    if (m) d.method = m->name;
    d.pc = pc;
    diags_.push_back(std::move(d));
  }

  void check_main() {
    const ClassDef* main = p_.find_class(p_.main);
    if (main == nullptr) {
      error(codes::kMissingMain,
            "main class '" + p_.main.name() + "' is not declared", {});
      return;
    }
    if (main->methods.count(names::main_method()) == 0) {
      error(codes::kMissingMain,
            "main class '" + p_.main.name() + "' declares no method 'main'",
            main->location, main);
    }
  }

  void check_hierarchy() {
    int roots = 0;
    for (const auto& [id, cls] : p_.classes) {
      if (!cls.super) {
        ++roots;
        continue;
      }
      if (p_.classes.count(*cls.super) == 0) {
        error(codes::kUndeclaredClass,
              "superclass '" + cls.super->name() + "' of '" + id.name() +
                  "' is not declared",
              cls.location, &cls);
        continue;
      }
      // A class is on a cycle iff walking up from it returns to it.
      std::set<ClassId> seen;
      std::optional<ClassId> cur = cls.super;
      while (cur && seen.insert(*cur).second) {
        if (*cur == id) {
          error(codes::kHierarchyCycle,
                "class '" + id.name() + "' is its own ancestor", cls.location,
                &cls);
          break;
        }
        const ClassDef* next = p_.find_class(*cur);
        cur = next ? next->super : std::nullopt;
      }
    }
    if (!p_.classes.empty() && roots != 1) {
      error(codes::kRootCount,
            "expected exactly one root class, found " + std::to_string(roots),
            {});
    }
  }

  void check_class_ref(ClassId c, const SourceLocation& loc,
                       const ClassDef* cls, const MethodDef* m,
                       std::optional<int> pc) {
    if (p_.classes.count(c) == 0) {
      error(codes::kUndeclaredClass,
            "class '" + c.name() + "' is not declared", loc, cls, m, pc);
    }
  }

  void check_field_ref(FieldId f, const SourceLocation& loc,
                       const ClassDef* cls, const MethodDef* m, int pc) {
    if (p_.fields.count(f) == 0) {
      error(codes::kUndeclaredField,
            "field '" + f.name() + "' is not declared", loc, cls, m, pc);
    }
  }

  void check_type(const InitType& t, const SourceLocation& loc,
                  const ClassDef* cls, const MethodDef* m,
                  const std::string& what) {
    if (t.is_raw() && p_.classes.count(t.cls) == 0) {
      error(codes::kUndeclaredClass,
            what + " refers to undeclared class '" + t.cls.name() + "'", loc,
            cls, m);
    }
  }

  void check_method(const ClassDef& cls, const MethodDef& m, bool is_ctor) {
    const ClassDef* c = &cls;
    const MethodDef* pm = &m;
    if (m.is_constructor != is_ctor) {
      error(codes::kInconsistentName,
            "method '" + m.name.name() + "' has a wrong constructor flag",
            m.location, c, pm);
    }
    if (is_ctor && m.name != names::constructor()) {
      error(codes::kInconsistentName, "constructor must be named 'init'",
            m.location, c, pm);
    }
    if (!is_ctor && m.name == names::constructor()) {
      error(codes::kReservedName,
            "'init' is reserved for the constructor", m.location, c, pm);
    }
    check_type(m.pre, m.location, c, pm, "pre");
    check_type(m.post, m.location, c, pm, "post");
    check_type(m.argtype, m.location, c, pm, "argument type");
    check_type(m.rettype, m.location, c, pm, "return type");

    const int n = static_cast<int>(m.instrs.size());
    if (n == 0) {
      error(codes::kEmptyMethod,
            "method '" + m.name.name() + "' has no instructions", m.location,
            c, pm);
      return;
    }
    const Instr& last = m.instrs.back();
    if (!std::holds_alternative<Return>(last)) {
      error(codes::kMissingNextInstruction,
            "instruction " + std::to_string(n - 1) +
                " is not a return and has no next instruction",
            m.location_of(n - 1), c, pm, n - 1);
    } else if (is_ctor &&
               std::get<Return>(last).value != names::this_var()) {
      error(codes::kConstructorFinalReturn,
            "constructor must end with 'return this'", m.location_of(n - 1), c,
            pm, n - 1);
    }

    for (int pc = 0; pc < n; ++pc) {
      check_instr(cls, m, pc, is_ctor);
    }
    for (const auto& [key, target] : m.handlers) {
      if (key.first < 0 || key.first >= n || target < 0 || target >= n) {
        error(codes::kHandlerRange,
              "handler " + std::to_string(key.first) + " " +
                  key.second.name() + " -> " + std::to_string(target) +
                  " is out of range",
              m.location, c, pm);
      }
    }
  }

  void check_instr(const ClassDef& cls, const MethodDef& m, int pc,
                   bool is_ctor) {
    const Instr& ins = m.instrs[pc];
    const SourceLocation loc = m.location_of(pc);
    const ClassDef* c = &cls;
    const MethodDef* pm = &m;
    const int n = static_cast<int>(m.instrs.size());

    if (auto w = written_var(ins); w && *w == names::this_var()) {
      error(codes::kAssignToThis, "'this' cannot be assigned", loc, c, pm, pc);
    }
    if (auto* a = std::get_if<Assign>(&ins)) {
      for (const FieldId& f : a->value.path) check_field_ref(f, loc, c, pm, pc);
    } else if (auto* fw = std::get_if<FieldWrite>(&ins)) {
      check_field_ref(fw->field, loc, c, pm, pc);
    } else if (auto* nw = std::get_if<New>(&ins)) {
      check_class_ref(nw->cls, loc, c, pm, pc);
    } else if (auto* j = std::get_if<IfStar>(&ins)) {
      if (j->target < 0 || j->target >= n) {
        error(codes::kJumpTarget,
              "jump target " + std::to_string(j->target) + " is out of range",
              loc, c, pm, pc);
      }
    } else if (std::holds_alternative<SuperCall>(ins)) {
      if (!is_ctor) {
        error(codes::kSuperOutsideConstructor,
              "super(...) outside a constructor", loc, c, pm, pc);
      } else if (!cls.super) {
        error(codes::kSuperInRoot,
              "root class '" + cls.id.name() + "' has no super constructor",
              loc, c, pm, pc);
      }
    } else if (auto* call = std::get_if<VirtualCall>(&ins)) {
      const ClassDef* decl = p_.find_class(call->declaring);
      if (decl == nullptr) {
        check_class_ref(call->declaring, loc, c, pm, pc);
      } else if (decl->methods.count(call->method) == 0) {
        error(codes::kUndeclaredMethod,
              "class '" + call->declaring.name() + "' declares no method '" +
                  call->method.name() + "'",
              loc, c, pm, pc);
      }
    } else if (std::holds_alternative<SetInit>(ins)) {
      if (!is_ctor) {
        error(codes::kSetInitOutsideConstructor,
              "setinit outside a constructor", loc, c, pm, pc);
      }
    } else if (auto* cr = std::get_if<CastRaw>(&ins)) {
      check_class_ref(cr->cls, loc, c, pm, pc);
    }
  }

  const Program& p_;
  std::vector<Diagnostic> diags_;
};

}  // namespace

std::vector<Diagnostic> validate_structure(const Program& p) {
  return StructureValidator(p).run();
}

}  // namespace rawtypes
