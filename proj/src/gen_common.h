#pragma once

// Shared by the generator, the enumerator and the mutator.

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "rawtypes/hierarchy.h"
#include "rawtypes/model.h"

namespace rawtypes::gen {

inline ClassId class_name(int i) { return ClassId("C" + std::to_string(i)); }
inline FieldId field_name(int i) { return FieldId("f" + std::to_string(i)); }

// main, m1, m2, ...
inline MethodName method_name(int i) {
  return i == 0 ? names::main_method() : MethodName("m" + std::to_string(i));
}

// this, arg, x0, x1, ... truncated to n (at least `this`).
inline std::vector<VarId> variable_pool(int n) {
  std::vector<VarId> out{names::this_var()};
  if (n >= 2) out.push_back(names::arg_var());
  for (int i = 0; i + 2 < n; ++i) out.push_back(VarId("x" + std::to_string(i)));
  return out;
}

// The engine's output sequence is fixed by the standard; the reductions
// below avoid the implementation-defined distributions.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : eng_(seed) {}

  std::uint64_t next() { return eng_(); }
  int below(std::size_t n) {
    return n <= 1 ? 0 : static_cast<int>(eng_() % n);
  }
  bool chance(double p) {
    return static_cast<double>(eng_() >> 11) * 0x1.0p-53 < p;
  }
  template <class T>
  const T& pick(const std::vector<T>& v) {
    return v[below(v.size())];
  }

 private:
  std::mt19937_64 eng_;
};

// Types covering or covered by `t` in the lattice.
std::vector<InitType> lattice_neighbors(const Hierarchy& h, const InitType& t);

}  // namespace rawtypes::gen
