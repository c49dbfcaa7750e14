#include "rawtypes/hierarchy.h"

namespace rawtypes {
namespace {

[[noreturn]] void undeclared(ClassId c) {
  throw ModelError(make_error(codes::kUndeclaredClass,
                              "class '" + c.name() + "' is not declared"));
}

}  // namespace

Hierarchy::Hierarchy(const Program& program) : program_(&program) {
  for (const auto& [id, cls] : program.classes) {
    index_.emplace(id, static_cast<int>(ids_.size()));
    ids_.push_back(id);
  }
  const int n = static_cast<int>(ids_.size());
  super_.assign(n, -1);
  for (int i = 0; i < n; ++i) {
    const ClassDef& cls = program.classes.at(ids_[i]);
    if (cls.super) {
      auto it = index_.find(*cls.super);
      if (it == index_.end()) undeclared(*cls.super);
      super_[i] = it->second;
    }
  }
  le_.assign(static_cast<std::size_t>(n) * n, 0);
  for (int i = 0; i < n; ++i) {
    int steps = 0;
    for (int c = i; c != -1; c = super_[c]) {
      if (steps++ > n) {
        throw ModelError(make_error(
            codes::kHierarchyCycle,
            "super chain of '" + ids_[i].name() + "' is cyclic"));
      }
      le_[static_cast<std::size_t>(i) * n + c] = 1;
    }
  }
}

int Hierarchy::index(ClassId c) const {
  auto it = index_.find(c);
  if (it == index_.end()) undeclared(c);
  return it->second;
}

bool Hierarchy::declared(ClassId c) const { return index_.count(c) != 0; }

std::optional<ClassId> Hierarchy::super_of(ClassId c) const {
  int s = super_[index(c)];
  if (s < 0) return std::nullopt;
  return ids_[s];
}

std::vector<ClassId> Hierarchy::ancestors(ClassId c) const {
  std::vector<ClassId> out;
  for (int i = index(c); i != -1; i = super_[i]) out.push_back(ids_[i]);
  return out;
}

bool Hierarchy::le(ClassId a, ClassId b) const {
  const std::size_t n = ids_.size();
  return le_[static_cast<std::size_t>(index(a)) * n + index(b)] != 0;
}

void Hierarchy::require_declared(const InitType& t) const {
  if (t.is_raw()) index(t.cls);
}

bool Hierarchy::subtype(const InitType& a, const InitType& b) const {
  require_declared(a);
  require_declared(b);
  if (a.is_init() || b.is_raw_bot()) return true;
  if (a.is_raw_bot() || b.is_init()) return false;
  return le(a.cls, b.cls);
}

std::optional<ClassId> Hierarchy::common_ancestor(ClassId a, ClassId b) const {
  for (int i = index(a); i != -1; i = super_[i]) {
    if (le(b, ids_[i])) return ids_[i];
  }
  return std::nullopt;
}

InitType Hierarchy::join(const InitType& a, const InitType& b) const {
  require_declared(a);
  require_declared(b);
  if (a.is_raw_bot() || b.is_raw_bot()) return InitType::raw_bot();
  if (a.is_init()) return b;
  if (b.is_init()) return a;
  auto lca = common_ancestor(a.cls, b.cls);
  return lca ? InitType::raw(*lca) : InitType::raw_bot();
}

InitType Hierarchy::raw_super(ClassId c) const {
  auto s = super_of(c);
  return s ? InitType::raw(*s) : InitType::raw_bot();
}

std::optional<ClassId> Hierarchy::lookup_owner(ClassId c, MethodName m) const {
  for (int i = index(c); i != -1; i = super_[i]) {
    const ClassDef& cls = program_->classes.at(ids_[i]);
    if (cls.methods.count(m) != 0) return ids_[i];
  }
  return std::nullopt;
}

const MethodDef* Hierarchy::lookup(ClassId c, MethodName m) const {
  auto owner = lookup_owner(c, m);
  if (!owner) return nullptr;
  return &program_->classes.at(*owner).methods.at(m);
}

bool class_le(const Program& p, ClassId c1, ClassId c2) {
  return Hierarchy(p).le(c1, c2);
}

bool subtype(const Program& p, const InitType& t1, const InitType& t2) {
  return Hierarchy(p).subtype(t1, t2);
}

InitType join(const Program& p, const InitType& t1, const InitType& t2) {
  return Hierarchy(p).join(t1, t2);
}

const MethodDef* lookup(const Program& p, ClassId c, MethodName m) {
  return Hierarchy(p).lookup(c, m);
}

}  // namespace rawtypes
