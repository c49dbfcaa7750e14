#include "rawtypes/model.h"

#include <algorithm>
#include <sstream>

namespace rawtypes {

namespace names {
VarId this_var() {
  static const VarId v("this");
  return v;
}
VarId arg_var() {
  static const VarId v("arg");
  return v;
}
MethodName constructor() {
  static const MethodName m("init");
  return m;
}
MethodName main_method() {
  static const MethodName m("main");
  return m;
}
ExcId null_pointer() {
  static const ExcId e("np");
  return e;
}
ExcId class_cast() {
  static const ExcId e("cce");
  return e;
}
}  // namespace names

std::string to_string(const InitType& t) {
  switch (t.kind) {
    case InitType::Kind::kInit:
      return "Init";
    case InitType::Kind::kRawBot:
      return "Raw";
    case InitType::Kind::kRaw:
      return "Raw(" + t.cls.name() + ")";
  }
  return "?";
}

std::ostream& operator<<(std::ostream& os, const InitType& t) {
  return os << to_string(t);
}

std::string to_string(const Expr& e) {
  std::string out = e.root == Expr::Root::kNull ? "null" : e.var.name();
  for (const FieldId& f : e.path) {
    out += '.';
    out += f.name();
  }
  return out;
}

namespace {

struct InstrPrinter {
  std::string operator()(const Assign& i) const {
    return i.target.name() + " <- " + to_string(i.value);
  }
  std::string operator()(const FieldWrite& i) const {
    return i.object.name() + "." + i.field.name() + " <- " + i.value.name();
  }
  std::string operator()(const New& i) const {
    return i.target.name() + " <- new " + i.cls.name() + "(" + i.arg.name() +
           ")";
  }
  std::string operator()(const IfStar& i) const {
    return "if * jmp " + std::to_string(i.target);
  }
  std::string operator()(const SuperCall& i) const {
    return "super(" + i.arg.name() + ")";
  }
  std::string operator()(const VirtualCall& i) const {
    return i.target.name() + " <- " + i.receiver.name() + "." +
           i.declaring.name() + "::" + i.method.name() + "(" + i.arg.name() +
           ")";
  }
  std::string operator()(const Return& i) const {
    return "return " + i.value.name();
  }
  std::string operator()(const SetInit&) const { return "setinit"; }
  std::string operator()(const CastInit& i) const {
    return i.target.name() + " <- (Init) " + i.source.name();
  }
  std::string operator()(const CastRaw& i) const {
    return i.target.name() + " <- (Raw(" + i.cls.name() + ")) " +
           i.source.name();
  }
};

}  // namespace

std::string to_string(const Instr& ins) {
  return std::visit(InstrPrinter{}, ins);
}

std::optional<VarId> written_var(const Instr& ins) {
  if (auto* i = std::get_if<Assign>(&ins)) return i->target;
  if (auto* i = std::get_if<New>(&ins)) return i->target;
  if (auto* i = std::get_if<VirtualCall>(&ins)) return i->target;
  if (auto* i = std::get_if<CastInit>(&ins)) return i->target;
  if (auto* i = std::get_if<CastRaw>(&ins)) return i->target;
  return std::nullopt;
}

SourceLocation MethodDef::location_of(int pc) const {
  if (pc >= 0 && pc < static_cast<int>(instr_locations.size())) {
    return instr_locations[pc];
  }
  return location;
}

std::optional<int> MethodDef::handler(int pc, ExcId exc) const {
  auto it = handlers.find({pc, exc});
  if (it == handlers.end()) return std::nullopt;
  return it->second;
}

const ClassDef* Program::find_class(ClassId c) const {
  auto it = classes.find(c);
  return it == classes.end() ? nullptr : &it->second;
}

const MethodDef* Program::find_method(ClassId c, MethodName m) const {
  const ClassDef* cls = find_class(c);
  if (cls == nullptr) return nullptr;
  if (m == names::constructor()) return &cls->ctor;
  auto it = cls->methods.find(m);
  return it == cls->methods.end() ? nullptr : &it->second;
}

namespace {

void collect_expr_vars(const Expr& e, std::vector<VarId>& out) {
  if (e.root == Expr::Root::kVar) out.push_back(e.var);
}

struct VarCollector {
  std::vector<VarId>& out;
  void operator()(const Assign& i) {
    out.push_back(i.target);
    collect_expr_vars(i.value, out);
  }
  void operator()(const FieldWrite& i) {
    out.push_back(i.object);
    out.push_back(i.value);
  }
  void operator()(const New& i) {
    out.push_back(i.target);
    out.push_back(i.arg);
  }
  void operator()(const IfStar&) {}
  void operator()(const SuperCall& i) { out.push_back(i.arg); }
  void operator()(const VirtualCall& i) {
    out.push_back(i.target);
    out.push_back(i.receiver);
    out.push_back(i.arg);
  }
  void operator()(const Return& i) { out.push_back(i.value); }
  void operator()(const SetInit&) {}
  void operator()(const CastInit& i) {
    out.push_back(i.target);
    out.push_back(i.source);
  }
  void operator()(const CastRaw& i) {
    out.push_back(i.target);
    out.push_back(i.source);
  }
};

}  // namespace

std::vector<VarId> method_variables(const MethodDef& m) {
  std::vector<VarId> seen;
  for (const Instr& ins : m.instrs) std::visit(VarCollector{seen}, ins);
  std::vector<VarId> vars = {names::this_var(), names::arg_var()};
  for (const VarId& v : seen) {
    if (std::find(vars.begin(), vars.end(), v) == vars.end()) {
      vars.push_back(v);
    }
  }
  return vars;
}

}  // namespace rawtypes
