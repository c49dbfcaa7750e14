#pragma once

#include <optional>
#include <unordered_map>
#include <vector>

#include "rawtypes/model.h"

namespace rawtypes {

// Precomputed view of a program's class hierarchy and the initialization
// type lattice over it. The program must outlive the hierarchy.
//
// c1 ⪯ c2 holds when c2 is reachable from c1 by zero or more super steps.
// Querying an undeclared class throws ModelError (undeclared-class).
class Hierarchy {
 public:
  // Throws ModelError when a super link is dangling or cyclic.
  explicit Hierarchy(const Program& program);

  const Program& program() const { return *program_; }
  const std::vector<ClassId>& classes() const { return ids_; }

  bool declared(ClassId c) const;
  std::optional<ClassId> super_of(ClassId c) const;
  // c, super(c), ..., root.
  std::vector<ClassId> ancestors(ClassId c) const;

  bool le(ClassId a, ClassId b) const;
  bool subtype(const InitType& a, const InitType& b) const;
  InitType join(const InitType& a, const InitType& b) const;
  // Least common ⪯-ancestor; absent only for classes in disjoint trees.
  std::optional<ClassId> common_ancestor(ClassId a, ClassId b) const;

  // Raw(super(c)), or RawBot when c is the root.
  InitType raw_super(ClassId c) const;

  // Dynamic dispatch: first class at or above `c` declaring `m`.
  std::optional<ClassId> lookup_owner(ClassId c, MethodName m) const;
  const MethodDef* lookup(ClassId c, MethodName m) const;

  // Raise ModelError unless every class mentioned by `t` is declared.
  void require_declared(const InitType& t) const;

 private:
  int index(ClassId c) const;

  const Program* program_;
  std::vector<ClassId> ids_;
  std::vector<int> super_;
  std::vector<char> le_;  // row-major n×n
  std::unordered_map<ClassId, int, IdentHash> index_;
};

// One-shot forms over a Program (each builds a Hierarchy).
bool class_le(const Program& p, ClassId c1, ClassId c2);
bool subtype(const Program& p, const InitType& t1, const InitType& t2);
InitType join(const Program& p, const InitType& t1, const InitType& t2);
const MethodDef* lookup(const Program& p, ClassId c, MethodName m);

}  // namespace rawtypes
