#include "rawtypes/checker.h"

#include <set>
#include <sstream>

#include "rawtypes/structure.h"

namespace rawtypes {

bool state_le(const Hierarchy& h, const TypeState& a, const TypeState& b) {
  for (const auto& [v, t] : a) {
    const InitType* other = b.get(v);
    if (other == nullptr || !h.subtype(t, *other)) return false;
  }
  return true;
}

TypeState state_join(const Hierarchy& h, const TypeState& a,
                     const TypeState& b) {
  TypeState out = a;
  for (const auto& [v, t] : b) {
    const InitType* mine = out.get(v);
    out.set(v, mine ? h.join(*mine, t) : t);
  }
  return out;
}

InitType after_set_init(const Hierarchy& h, const InitType& t, ClassId cls) {
  InitType target = InitType::raw(cls);
  return h.subtype(t, target) ? t : target;
}

Checker::Checker(const Program& program)
    : program_(&program), h_(program) {}

Diagnostic Checker::violation(const char* code, std::string message,
                              ClassId cls, const MethodDef& m, int pc) const {
  Diagnostic d = make_error(code, std::move(message), m.location_of(pc));
  d.cls = cls;
  d.method = m.name;
  d.pc = pc;
  return d;
}

void Checker::require(std::vector<Diagnostic>& out, const InitType& actual,
                      const InitType& bound, const char* code,
                      const std::string& what, ClassId cls,
                      const MethodDef& m, int pc) const {
  if (h_.subtype(actual, bound)) return;
  out.push_back(violation(code,
                          what + ": " + to_string(actual) +
                              " is not a subtype of " + to_string(bound),
                          cls, m, pc));
}

Result<InitType> Checker::type_expr(const TypeState& L, const Expr& e) const {
  if (!e.path.empty()) {
    FieldId last = e.path.back();
    auto it = program_->fields.find(last);
    if (it == program_->fields.end()) {
      return make_error(codes::kUndeclaredField,
                        "field '" + last.name() + "' is not declared");
    }
    return it->second;
  }
  if (e.root == Expr::Root::kNull) return InitType::init();
  const InitType* t = L.get(e.var);
  if (t == nullptr) {
    return make_error(codes::kUnresolvedName,
                      "variable '" + e.var.name() + "' is not in scope");
  }
  return *t;
}

namespace {

InitType var_type(const TypeState& L, VarId v) {
  const InitType* t = L.get(v);
  // Variables outside the method's set start null, which inhabits Init.
  return t ? *t : InitType::init();
}

}  // namespace

Result<TypeState> Checker::transfer(ClassId cls, const MethodDef& m,
                                    const Instr& ins, const TypeState& L,
                                    int pc) const {
  std::vector<Diagnostic> errs;
  TypeState out = L;
  const VarId self = names::this_var();

  if (auto w = written_var(ins); w && *w == self) {
    errs.push_back(violation(codes::kAssignToThis, "'this' cannot be assigned",
                             cls, m, pc));
  }

  if (auto* i = std::get_if<Assign>(&ins)) {
    Result<InitType> t = type_expr(L, i->value);
    if (!t) {
      for (Diagnostic d : t.diagnostics()) {
        d.location = m.location_of(pc);
        d.cls = cls;
        d.method = m.name;
        d.pc = pc;
        errs.push_back(std::move(d));
      }
    } else {
      out.set(i->target, *t);
    }
  } else if (auto* i = std::get_if<FieldWrite>(&ins)) {
    auto it = program_->fields.find(i->field);
    if (it == program_->fields.end()) {
      errs.push_back(violation(codes::kUndeclaredField,
                               "field '" + i->field.name() +
                                   "' is not declared",
                               cls, m, pc));
    } else {
      require(errs, var_type(L, i->value), it->second,
              codes::kFieldTypeViolation,
              "value written to field '" + i->field.name() + "'", cls, m, pc);
    }
  } else if (auto* i = std::get_if<New>(&ins)) {
    const MethodDef& ctor = program_->classes.at(i->cls).ctor;
    require(errs, var_type(L, i->arg), ctor.argtype, codes::kCallArgViolation,
            "argument of new " + i->cls.name(), cls, m, pc);
    // The fresh receiver carries no initialization at all.
    require(errs, InitType::raw_bot(), ctor.pre, codes::kCallPreViolation,
            "fresh receiver of new " + i->cls.name(), cls, m, pc);
    out.set(i->target, InitType::init());
  } else if (std::holds_alternative<IfStar>(ins)) {
    // Both successors receive L.
  } else if (auto* i = std::get_if<SuperCall>(&ins)) {
    auto parent = h_.super_of(cls);
    if (!m.is_constructor || !parent) {
      errs.push_back(violation(codes::kSuperInRoot,
                               "super(...) has no super constructor", cls, m,
                               pc));
    } else {
      const MethodDef& ctor = program_->classes.at(*parent).ctor;
      require(errs, var_type(L, i->arg), ctor.argtype,
              codes::kCallArgViolation,
              "argument of super constructor " + parent->name(), cls, m, pc);
      require(errs, var_type(L, self), ctor.pre, codes::kCallPreViolation,
              "receiver of super constructor " + parent->name(), cls, m, pc);
      out.set(self, InitType::raw(*parent));
    }
  } else if (auto* i = std::get_if<VirtualCall>(&ins)) {
    const MethodDef* callee = program_->find_method(i->declaring, i->method);
    if (callee == nullptr || i->method == names::constructor()) {
      errs.push_back(violation(codes::kUndeclaredMethod,
                               "class '" + i->declaring.name() +
                                   "' declares no method '" +
                                   i->method.name() + "'",
                               cls, m, pc));
    } else {
      const std::string callee_name =
          i->declaring.name() + "::" + i->method.name();
      require(errs, var_type(L, i->receiver), callee->pre,
              codes::kCallPreViolation, "receiver of " + callee_name, cls, m,
              pc);
      require(errs, var_type(L, i->arg), callee->argtype,
              codes::kCallArgViolation, "argument of " + callee_name, cls, m,
              pc);
      out.set(i->receiver, callee->post);
      out.set(i->target, callee->rettype);
    }
  } else if (auto* i = std::get_if<Return>(&ins)) {
    const InitType self_type = var_type(L, self);
    if (m.is_constructor) {
      if (i->value != self) {
        errs.push_back(violation(codes::kConstructorReturnNotThis,
                                 "a constructor must return 'this'", cls, m,
                                 pc));
      }
      require(errs, self_type, h_.raw_super(cls), codes::kSetInitOrderViolation,
              "receiver at constructor return", cls, m, pc);
      require(errs, after_set_init(h_, self_type, cls), m.post,
              codes::kReturnPostViolation, "receiver at return", cls, m, pc);
    } else {
      require(errs, self_type, m.post, codes::kReturnPostViolation,
              "receiver at return", cls, m, pc);
      require(errs, var_type(L, i->value), m.rettype,
              codes::kReturnTypeViolation, "returned value", cls, m, pc);
    }
  } else if (std::holds_alternative<SetInit>(ins)) {
    if (!m.is_constructor) {
      errs.push_back(violation(codes::kSetInitOutsideConstructor,
                               "setinit outside a constructor", cls, m, pc));
    } else {
      const InitType self_type = var_type(L, self);
      require(errs, self_type, h_.raw_super(cls),
              codes::kSetInitOrderViolation, "receiver at setinit", cls, m,
              pc);
      out.set(self, after_set_init(h_, self_type, cls));
    }
  } else if (auto* i = std::get_if<CastInit>(&ins)) {
    out.set(i->target, InitType::init());
  } else if (auto* i = std::get_if<CastRaw>(&ins)) {
    out.set(i->target, InitType::raw(i->cls));
  }

  if (!errs.empty()) return errs;
  return out;
}

TypeState Checker::entry_state(const MethodDef& m) const {
  TypeState L;
  for (const VarId& v : method_variables(m)) L.set(v, InitType::init());
  L.set(names::this_var(), m.pre);
  L.set(names::arg_var(), m.argtype);
  return L;
}

namespace {

std::vector<int> successors(const Instr& ins, int pc) {
  if (std::holds_alternative<Return>(ins)) return {};
  if (auto* j = std::get_if<IfStar>(&ins)) return {pc + 1, j->target};
  return {pc + 1};
}

}  // namespace

Result<MethodTypeTable> Checker::check_method(
    ClassId cls, const MethodDef& m, std::vector<Diagnostic>* warnings) const {
  const int n = static_cast<int>(m.instrs.size());
  MethodTypeTable table;
  table.variables = method_variables(m);
  table.states.assign(n, std::nullopt);
  if (n == 0) {
    return violation(codes::kEmptyMethod, "method has no instructions", cls, m,
                     0);
  }

  // Handler edges grouped by source point.
  std::vector<std::vector<int>> handler_targets(n);
  for (const auto& [key, target] : m.handlers) {
    if (key.first >= 0 && key.first < n && target >= 0 && target < n) {
      handler_targets[key.first].push_back(target);
    }
  }

  std::set<int> worklist;
  auto merge = [&](int j, const TypeState& L) {
    if (j < 0 || j >= n) return;
    if (!table.states[j]) {
      table.states[j] = L;
      worklist.insert(j);
    } else if (!state_le(h_, L, *table.states[j])) {
      table.states[j] = state_join(h_, *table.states[j], L);
      worklist.insert(j);
    }
  };

  merge(0, entry_state(m));
  while (!worklist.empty()) {
    int i = *worklist.begin();
    worklist.erase(worklist.begin());
    const TypeState L = *table.states[i];
    for (int j : handler_targets[i]) merge(j, L);
    Result<TypeState> out = transfer(cls, m, m.instrs[i], L, i);
    // A failing rule fails for every larger state too, so it is final.
    if (!out) continue;
    for (int j : successors(m.instrs[i], i)) merge(j, *out);
  }

  std::vector<Diagnostic> errs;
  std::vector<int> unreachable;
  for (int i = 0; i < n; ++i) {
    if (!table.states[i]) {
      unreachable.push_back(i);
      continue;
    }
    Result<TypeState> out = transfer(cls, m, m.instrs[i], *table.states[i], i);
    if (!out) {
      errs.insert(errs.end(), out.diagnostics().begin(),
                  out.diagnostics().end());
    }
  }
  if (warnings != nullptr && errs.empty() && !unreachable.empty()) {
    std::ostringstream pcs;
    for (std::size_t k = 0; k < unreachable.size(); ++k) {
      pcs << (k ? ", " : "") << unreachable[k];
    }
    Diagnostic d = violation(codes::kUnreachableCode,
                             "unreachable instructions: " + pcs.str(), cls, m,
                             unreachable.front());
    d.severity = Severity::kWarning;
    warnings->push_back(std::move(d));
  }
  if (!errs.empty()) return errs;
  return table;
}

std::vector<Diagnostic> Checker::check_overrides() const {
  std::vector<Diagnostic> out;
  std::set<std::pair<MethodKey, MethodKey>> seen;
  for (const auto& [declaring, decl_cls] : program_->classes) {
    for (const auto& [name, base] : decl_cls.methods) {
      for (const ClassId& sub : h_.classes()) {
        if (sub == declaring || !h_.le(sub, declaring)) continue;
        auto owner = h_.lookup_owner(sub, name);
        if (!owner || *owner == declaring) continue;
        if (!seen.insert({{declaring, name}, {*owner, name}}).second) continue;
        const MethodDef& over = program_->classes.at(*owner).methods.at(name);
        const std::string what = owner->name() + "::" + name.name() +
                                 " overriding " + declaring.name() +
                                 "::" + name.name();
        // pre and argtype may only widen; post and rettype only narrow.
        require(out, base.pre, over.pre, codes::kOverridePre, what + " (pre)",
                *owner, over, 0);
        require(out, base.argtype, over.argtype, codes::kOverrideArg,
                what + " (argument)", *owner, over, 0);
        require(out, over.post, base.post, codes::kOverridePost,
                what + " (post)", *owner, over, 0);
        require(out, over.rettype, base.rettype, codes::kOverrideRet,
                what + " (return)", *owner, over, 0);
      }
    }
  }
  for (Diagnostic& d : out) {
    d.pc.reset();
    const MethodDef* m = program_->find_method(*d.cls, *d.method);
    d.location = m->location;
  }
  return out;
}

CheckReport Checker::check_program() const {
  CheckReport report;
  report.diagnostics = check_overrides();
  for (const auto& [id, cls] : program_->classes) {
    std::vector<const MethodDef*> methods = {&cls.ctor};
    for (const auto& [name, m] : cls.methods) methods.push_back(&m);
    for (const MethodDef* m : methods) {
      Result<MethodTypeTable> r = check_method(id, *m, &report.diagnostics);
      if (r) {
        report.tables.emplace(MethodKey{id, m->name}, std::move(*r));
      } else {
        report.diagnostics.insert(report.diagnostics.end(),
                                  r.diagnostics().begin(),
                                  r.diagnostics().end());
      }
    }
  }
  report.verdict =
      has_errors(report.diagnostics) ? Verdict::kIllTyped : Verdict::kWellTyped;
  return report;
}

Result<InitType> type_expr(const Program& p, const TypeState& L,
                           const Expr& e) {
  return Checker(p).type_expr(L, e);
}

Result<TypeState> transfer(const Program& p, ClassId cls, const MethodDef& m,
                           const Instr& ins, const TypeState& L) {
  return Checker(p).transfer(cls, m, ins, L);
}

Result<MethodTypeTable> check_method(const Program& p, ClassId cls,
                                     const MethodDef& m) {
  return Checker(p).check_method(cls, m);
}

std::vector<Diagnostic> check_overrides(const Program& p) {
  return Checker(p).check_overrides();
}

CheckReport check_program(const Program& p) {
  std::vector<Diagnostic> structural = validate_structure(p);
  if (!structural.empty()) {
    CheckReport report;
    report.diagnostics = std::move(structural);
    return report;
  }
  return Checker(p).check_program();
}

}  // namespace rawtypes
