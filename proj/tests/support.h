#pragma once

// Shared fixtures and reference oracles for the test binaries. The oracles
// work on a plain parent vector and never call into the library's lattice
// code, so the two can be compared.

#include <fstream>
#include <functional>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "rawtypes/interpreter.h"
#include "rawtypes/model.h"
#include "rawtypes/parser.h"

namespace rtest {

using namespace rawtypes;

inline std::string corpus_path(const std::string& name) {
  return std::string(RT_CORPUS_DIR) + "/" + name;
}

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline Program parse_or_throw(const std::string& text,
                              const std::string& file = "<test>") {
  auto r = parse(text, file);
  if (!r) {
    std::string msg;
    for (const auto& d : r.diagnostics()) msg += format_diagnostic(d) + "\n";
    throw std::runtime_error("parse failed:\n" + msg);
  }
  return *r;
}

inline Program load_corpus(const std::string& name) {
  return parse_or_throw(read_file(corpus_path(name)), name);
}

// 1-based line of the first line containing `needle`.
inline int line_of(const std::string& text, const std::string& needle) {
  std::istringstream in(text);
  std::string line;
  for (int n = 1; std::getline(in, line); ++n) {
    if (line.find(needle) != std::string::npos) return n;
  }
  return -1;
}

// ---- hierarchies -------------------------------------------------------

// parent[i] is the index of K<i>'s super, -1 for the root.
using Parents = std::vector<int>;

inline std::string class_name(int i) { return "K" + std::to_string(i); }

// Source for a program with the given hierarchy. K0 holds `main`.
inline std::string hierarchy_source(const Parents& parents) {
  std::string s;
  for (int i = 0; i < static_cast<int>(parents.size()); ++i) {
    s += "class " + class_name(i);
    if (parents[i] >= 0) s += " extends " + class_name(parents[i]);
    s += " {\n";
    if (parents[i] >= 0) {
      s += "  init() { 0: super(arg); 1: return this; }\n";
    } else {
      s += "  init() { 0: return this; }\n";
    }
    if (i == 0) s += "  method main() { 0: return x; }\n";
    s += "}\n";
  }
  s += "main K0;\n";
  return s;
}

inline Program hierarchy_program(const Parents& parents) {
  return parse_or_throw(hierarchy_source(parents));
}

inline bool single_rooted_acyclic(const Parents& parents) {
  const int n = static_cast<int>(parents.size());
  int roots = 0;
  for (int i = 0; i < n; ++i) {
    if (parents[i] < 0) ++roots;
    int c = i;
    for (int steps = 0; c >= 0; ++steps) {
      if (steps > n) return false;
      c = parents[c];
    }
  }
  return roots == 1;
}

// Every labelled single-rooted tree on n classes.
inline void for_each_hierarchy(int n, const std::function<void(const Parents&)>& f) {
  Parents parents(n, -1);
  std::function<void(int)> rec = [&](int i) {
    if (i == n) {
      if (single_rooted_acyclic(parents)) f(parents);
      return;
    }
    for (int p = -1; p < n; ++p) {
      if (p == i) continue;
      parents[i] = p;
      rec(i + 1);
    }
  };
  rec(0);
}

// Reference lattice over a parent vector.
class Oracle {
 public:
  explicit Oracle(Parents parents) : parents_(std::move(parents)) {}

  int size() const { return static_cast<int>(parents_.size()); }

  int index(ClassId c) const {
    const std::string& s = c.name();
    if (s.size() < 2 || s[0] != 'K') throw std::invalid_argument(s);
    return std::stoi(s.substr(1));
  }
  ClassId id(int i) const { return ClassId(class_name(i)); }

  bool le(int a, int b) const {
    for (int c = a; c >= 0; c = parents_[c]) {
      if (c == b) return true;
    }
    return false;
  }
  bool le(ClassId a, ClassId b) const { return le(index(a), index(b)); }

  std::vector<InitType> types() const {
    std::vector<InitType> ts{InitType::init()};
    for (int i = 0; i < size(); ++i) ts.push_back(InitType::raw(id(i)));
    ts.push_back(InitType::raw_bot());
    return ts;
  }

  bool subtype(const InitType& a, const InitType& b) const {
    if (a.is_init() || b.is_raw_bot()) return true;
    if (a.is_raw_bot() || b.is_init()) return false;
    return le(a.cls, b.cls);
  }

  // Least element of the set of common upper bounds, by brute force.
  std::optional<InitType> join(const InitType& a, const InitType& b) const {
    std::vector<InitType> upper;
    for (const auto& t : types()) {
      if (subtype(a, t) && subtype(b, t)) upper.push_back(t);
    }
    for (const auto& u : upper) {
      bool least = true;
      for (const auto& t : upper) least = least && subtype(u, t);
      if (least) return u;
    }
    return std::nullopt;
  }

  // h ⊢ v : t written out with the quantifier over classes.
  bool has_type(const Heap& heap, Value v, const InitType& t) const {
    if (v.is_null() || t.is_raw_bot()) return true;
    const HeapObject& o = heap.at(v.loc);
    const int dyn = index(o.dyn_class);
    if (t.is_init()) {
      return o.init_level.has_value() && index(*o.init_level) == dyn;
    }
    const int c = index(t.cls);
    for (int c2 = 0; c2 < size(); ++c2) {
      if (!le(dyn, c2) || !le(c, c2)) continue;
      if (!o.init_level || !le(index(*o.init_level), c2)) return false;
    }
    return true;
  }

  // Objects satisfying the tag invariant: dyn ⪯ tag, or tag absent.
  std::vector<HeapObject> objects() const {
    std::vector<HeapObject> out;
    for (int d = 0; d < size(); ++d) {
      out.push_back({id(d), std::nullopt, {}});
      for (int t = 0; t < size(); ++t) {
        if (le(d, t)) out.push_back({id(d), id(t), {}});
      }
    }
    return out;
  }

  // Every heap of 0..max_objects such objects.
  void for_each_heap(int max_objects,
                     const std::function<void(const Heap&)>& f) const {
    const auto objs = objects();
    Heap heap;
    std::function<void()> rec = [&] {
      f(heap);
      if (static_cast<int>(heap.size()) == max_objects) return;
      for (const auto& o : objs) {
        heap.push_back(o);
        rec();
        heap.pop_back();
      }
    };
    rec();
  }

 private:
  Parents parents_;
};

}  // namespace rtest
