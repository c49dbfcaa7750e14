#include <algorithm>
#include <stdexcept>

#include "gen_common.h"
#include "rawtypes/checker.h"
#include "rawtypes/harness.h"
#include "rawtypes/structure.h"

namespace rawtypes {

std::vector<std::string> GenBounds::problems() const {
  std::vector<std::string> out;
  auto at_least = [&](int v, int min, const char* what) {
    if (v < min) {
      out.push_back(std::string(what) + " must be at least " +
                    std::to_string(min));
    }
  };
  at_least(max_classes, 1, "max_classes");
  at_least(max_methods_per_class, 1, "max_methods_per_class");
  at_least(max_instrs_per_method, 1, "max_instrs_per_method");
  at_least(max_vars, 2, "max_vars");  // `this` and `arg` always exist
  at_least(max_fields, 0, "max_fields");
  return out;
}

namespace gen {

std::vector<InitType> lattice_neighbors(const Hierarchy& h,
                                        const InitType& t) {
  std::vector<InitType> out;
  auto children = [&](std::optional<ClassId> parent) {
    std::vector<ClassId> kids;
    for (ClassId c : h.classes()) {
      if (h.super_of(c) == parent) kids.push_back(c);
    }
    return kids;
  };
  switch (t.kind) {
    case InitType::Kind::kInit:
      for (ClassId c : h.classes()) {
        if (children(c).empty()) out.push_back(InitType::raw(c));
      }
      break;
    case InitType::Kind::kRaw: {
      auto up = h.super_of(t.cls);
      out.push_back(up ? InitType::raw(*up) : InitType::raw_bot());
      auto kids = children(t.cls);
      if (kids.empty()) out.push_back(InitType::init());
      for (ClassId d : kids) out.push_back(InitType::raw(d));
      break;
    }
    case InitType::Kind::kRawBot:
      for (ClassId r : children(std::nullopt)) out.push_back(InitType::raw(r));
      break;
  }
  return out;
}

}  // namespace gen

namespace {

using gen::Rng;

// Callable (declaring class, method) pair.
using Callable = std::pair<ClassId, MethodName>;

class Generator {
 public:
  Generator(std::uint64_t seed, const GenBounds& b) : rng_(seed), b_(b) {}

  Program run() {
    make_hierarchy();
    make_fields();
    make_signatures();
    make_bodies();
    return std::move(p_);
  }

 private:
  InitType random_type() {
    double r = static_cast<double>(rng_.below(100)) / 100.0;
    if (r < 0.45) return InitType::init();
    if (r < 0.8) return InitType::raw(rng_.pick(classes_));
    return InitType::raw_bot();
  }

  void make_hierarchy() {
    int k = 1 + rng_.below(b_.max_classes);
    for (int i = 0; i < k; ++i) {
      ClassDef c;
      c.id = gen::class_name(i);
      if (i > 0) c.super = classes_[rng_.below(i)];
      classes_.push_back(c.id);
      p_.classes.emplace(c.id, std::move(c));
    }
    p_.main = rng_.pick(classes_);
    vars_ = gen::variable_pool(b_.max_vars);
    for (VarId v : vars_) {
      if (v != names::this_var()) writable_.push_back(v);
    }
  }

  void make_fields() {
    int n = rng_.below(b_.max_fields + 1);
    for (int i = 0; i < n; ++i) {
      fields_.push_back(gen::field_name(i));
      p_.fields[fields_.back()] = random_type();
    }
  }

  // Nearest strict ancestor declaring `m`.
  const MethodDef* inherited(ClassId c, MethodName m) const {
    for (auto s = p_.classes.at(c).super; s; s = p_.classes.at(*s).super) {
      const ClassDef& sc = p_.classes.at(*s);
      auto it = sc.methods.find(m);
      if (it != sc.methods.end()) return &it->second;
    }
    return nullptr;
  }

  void make_signatures() {
    for (ClassId cid : classes_) {
      ClassDef& c = p_.classes.at(cid);
      MethodDef& ctor = c.ctor;
      ctor.name = names::constructor();
      ctor.is_constructor = true;
      ctor.pre = rng_.chance(0.8) ? InitType::raw_bot() : random_type();
      ctor.post = rng_.chance(0.8) ? InitType::raw(cid) : random_type();
      ctor.argtype = random_type();
      ctor.rettype = InitType::init();

      for (int i = 0; i < b_.max_methods_per_class; ++i) {
        MethodName name = gen::method_name(i);
        bool wanted = (i == 0 && cid == p_.main) || rng_.chance(0.5);
        if (!wanted) continue;
        MethodDef m;
        m.name = name;
        const MethodDef* base = inherited(cid, name);
        if (base != nullptr && rng_.chance(0.85)) {
          m.pre = base->pre;
          m.post = base->post;
          m.argtype = base->argtype;
          m.rettype = base->rettype;
        } else {
          m.pre = random_type();
          m.post = rng_.chance(0.75) ? m.pre : random_type();
          m.argtype = random_type();
          m.rettype = rng_.chance(0.6) ? InitType::init() : random_type();
        }
        c.methods.emplace(name, std::move(m));
      }
    }
    for (ClassId cid : classes_) {
      for (const auto& [name, m] : p_.classes.at(cid).methods) {
        callables_.emplace_back(cid, name);
      }
    }
  }

  void make_bodies() {
    Checker checker(p_);
    for (ClassId cid : classes_) {
      ClassDef& c = p_.classes.at(cid);
      body(checker, cid, c.ctor);
      for (auto& [name, m] : c.methods) body(checker, cid, m);
    }
  }

  VarId fitting(const Checker& ch, const TypeState& L, const InitType& bound,
                double p) {
    if (rng_.chance(p)) {
      std::vector<VarId> ok;
      for (VarId v : vars_) {
        if (ch.hierarchy().subtype(*L.get(v), bound)) ok.push_back(v);
      }
      if (!ok.empty()) return rng_.pick(ok);
    }
    return rng_.pick(vars_);
  }

  void body(const Checker& ch, ClassId cid, MethodDef& m) {
    const Hierarchy& h = ch.hierarchy();
    const auto parent = h.super_of(cid);
    int len = 1 + rng_.below(b_.max_instrs_per_method);
    // A subclass constructor needs room for its super call.
    if (m.is_constructor && parent && len == 1) {
      len = std::min(2, b_.max_instrs_per_method);
    }
    const bool is_main = cid == p_.main && m.name == names::main_method();

    TypeState L;
    for (VarId v : vars_) L.set(v, InitType::init());
    L.set(names::this_var(), m.pre);
    if (vars_.size() > 1) L.set(names::arg_var(), m.argtype);
    // Class of the object last allocated into each variable.
    FlatMap<VarId, ClassId> hint;

    m.instrs.clear();
    for (int pc = 0; pc + 1 < len; ++pc) {
      Instr ins = pick_instr(ch, m, L, hint, len, pc, is_main, parent);
      if (auto* n = std::get_if<New>(&ins)) {
        hint.set(n->target, n->cls);
      } else if (auto v = written_var(ins)) {
        if (auto* slot = hint.get(*v)) *slot = ClassId();
      }
      if (auto next = ch.transfer(cid, m, ins, L, pc)) L = *next;
      m.instrs.push_back(std::move(ins));
    }
    if (m.is_constructor) {
      m.instrs.push_back(Return{names::this_var()});
    } else {
      m.instrs.push_back(Return{fitting(ch, L, m.rettype, 0.85)});
    }

    m.handlers.clear();
    if (b_.allow_handlers && rng_.chance(0.3)) {
      int n = 1 + rng_.below(2);
      for (int i = 0; i < n; ++i) {
        ExcId e = rng_.chance(0.5) ? names::null_pointer() : names::class_cast();
        int at = rng_.below(len);
        m.handlers[{at, e}] = rng_.below(len);
      }
    }
  }

  Instr pick_instr(const Checker& ch, const MethodDef& m,
                   const TypeState& L, const FlatMap<VarId, ClassId>& hint,
                   int len, int pc, bool is_main,
                   const std::optional<ClassId>& parent) {
    const bool can_write = !writable_.empty();

    if (m.is_constructor && parent && pc == 0 && rng_.chance(0.9)) {
      return SuperCall{
          fitting(ch, L, p_.classes.at(*parent).ctor.argtype, 0.7)};
    }

    enum Kind {
      kAssign, kWrite, kNew, kIf, kCall, kReturn, kSetInit, kCastInit,
      kCastRaw, kSuper
    };
    std::vector<std::pair<Kind, int>> weights = {
        {kAssign, can_write ? 16 : 0},
        {kWrite, fields_.empty() ? 0 : 10},
        {kNew, can_write ? (is_main ? 30 : 12) : 0},
        {kIf, 8},
        {kCall, can_write ? 22 : 0},
        {kReturn, 2},
        {kSetInit, m.is_constructor ? 5 : 0},
        {kCastInit, can_write && b_.allow_casts ? 4 : 0},
        {kCastRaw, can_write && b_.allow_casts ? 4 : 0},
        {kSuper, m.is_constructor && parent ? 4 : 0},
    };
    int total = 0;
    for (auto& [k, w] : weights) total += w;
    int r = rng_.below(total);
    Kind kind = kIf;
    for (auto& [k, w] : weights) {
      if (r < w) {
        kind = k;
        break;
      }
      r -= w;
    }

    switch (kind) {
      case kAssign: {
        Expr e;
        int shape = rng_.below(10);
        if (shape < 2) {
          e = Expr::null();
        } else if (shape < 6 || fields_.empty()) {
          e = Expr::variable(rng_.pick(vars_));
        } else {
          e = Expr::variable(rng_.pick(vars_)).field(rng_.pick(fields_));
        }
        return Assign{rng_.pick(writable_), e};
      }
      case kWrite: {
        VarId obj = m.is_constructor && rng_.chance(0.5) ? names::this_var()
                                                          : rng_.pick(vars_);
        FieldId f = rng_.pick(fields_);
        return FieldWrite{obj, f, fitting(ch, L, p_.fields.at(f), 0.85)};
      }
      case kNew: {
        ClassId c = rng_.pick(classes_);
        return New{rng_.pick(writable_), c,
                   fitting(ch, L, p_.classes.at(c).ctor.argtype, 0.85)};
      }
      case kIf:
        return IfStar{rng_.below(len)};
      case kCall:
        return pick_call(ch, L, hint);
      case kReturn:
        return Return{m.is_constructor && rng_.chance(0.7)
                          ? names::this_var()
                          : rng_.pick(vars_)};
      case kSetInit:
        return SetInit{};
      case kCastInit:
        return CastInit{rng_.pick(writable_), rng_.pick(vars_)};
      case kCastRaw:
        return CastRaw{rng_.pick(writable_), rng_.pick(classes_),
                       rng_.pick(vars_)};
      case kSuper:
        return SuperCall{
            fitting(ch, L, p_.classes.at(*parent).ctor.argtype, 0.7)};
    }
    return IfStar{rng_.below(len)};
  }

  Instr pick_call(const Checker& ch, const TypeState& L,
                  const FlatMap<VarId, ClassId>& hint) {
    const Hierarchy& h = ch.hierarchy();
    VarId target = rng_.pick(writable_);
    if (callables_.empty()) {
      return VirtualCall{target, rng_.pick(vars_), rng_.pick(classes_),
                         names::main_method(), rng_.pick(vars_)};
    }
    if (rng_.chance(0.6)) {
      std::vector<std::pair<VarId, Callable>> ok, ok_class;
      for (VarId r : vars_) {
        for (const Callable& c : callables_) {
          const MethodDef& callee = p_.classes.at(c.first).methods.at(c.second);
          if (!h.subtype(*L.get(r), callee.pre)) continue;
          ok.emplace_back(r, c);
          const ClassId* k = hint.get(r);
          if (k && !k->empty() && h.le(*k, c.first)) ok_class.emplace_back(r, c);
        }
      }
      const auto& pool = !ok_class.empty() && rng_.chance(0.9) ? ok_class : ok;
      if (!pool.empty()) {
        const auto& [r, c] = rng_.pick(pool);
        const MethodDef& callee = p_.classes.at(c.first).methods.at(c.second);
        return VirtualCall{target, r, c.first, c.second,
                           fitting(ch, L, callee.argtype, 0.8)};
      }
    }
    const Callable& c = rng_.pick(callables_);
    return VirtualCall{target, rng_.pick(vars_), c.first, c.second,
                       rng_.pick(vars_)};
  }

  Rng rng_;
  GenBounds b_;
  Program p_;
  std::vector<ClassId> classes_;
  std::vector<FieldId> fields_;
  std::vector<VarId> vars_;
  std::vector<VarId> writable_;
  std::vector<Callable> callables_;
};

}  // namespace

Program generate_program(std::uint64_t seed, const GenBounds& b) {
  auto problems = b.problems();
  if (!problems.empty()) throw std::invalid_argument(problems.front());
  return Generator(seed, b).run();
}

namespace {

struct MethodSite {
  ClassId cls;
  MethodName name;
};

MethodDef& method_at(Program& p, const MethodSite& s) {
  ClassDef& c = p.classes.at(s.cls);
  return s.name == names::constructor() ? c.ctor : c.methods.at(s.name);
}

std::vector<MethodSite> all_methods(const Program& p) {
  std::vector<MethodSite> out;
  for (const auto& [cid, c] : p.classes) {
    out.push_back({cid, names::constructor()});
    for (const auto& [name, m] : c.methods) out.push_back({cid, name});
  }
  return out;
}

bool step_annotation(Program& p, Rng& rng) {
  Hierarchy h(p);
  std::vector<InitType*> slots;
  for (auto& [f, t] : p.fields) slots.push_back(&t);
  for (const MethodSite& s : all_methods(p)) {
    MethodDef& m = method_at(p, s);
    slots.insert(slots.end(), {&m.pre, &m.post, &m.argtype, &m.rettype});
  }
  InitType* slot = slots[rng.below(slots.size())];
  auto next = gen::lattice_neighbors(h, *slot);
  if (next.empty()) return false;
  *slot = rng.pick(next);
  return true;
}

template <class T>
std::vector<std::pair<MethodSite, int>> sites_of(const Program& p) {
  std::vector<std::pair<MethodSite, int>> out;
  for (const MethodSite& s : all_methods(p)) {
    const MethodDef* m = p.find_method(s.cls, s.name);
    for (int pc = 0; pc < static_cast<int>(m->instrs.size()); ++pc) {
      if (std::holds_alternative<T>(m->instrs[pc])) out.push_back({s, pc});
    }
  }
  return out;
}

bool swap_call_target(Program& p, Rng& rng) {
  auto sites = sites_of<VirtualCall>(p);
  std::vector<Callable> callables;
  for (const auto& [cid, c] : p.classes) {
    for (const auto& [name, m] : c.methods) callables.emplace_back(cid, name);
  }
  if (sites.empty() || callables.size() < 2) return false;
  auto [site, pc] = rng.pick(sites);
  auto& call = std::get<VirtualCall>(method_at(p, site).instrs[pc]);
  Callable now{call.declaring, call.method};
  Callable pick = rng.pick(callables);
  if (pick == now) return false;
  call.declaring = pick.first;
  call.method = pick.second;
  return true;
}

int shift_after_removal(int target, int removed) {
  return target > removed ? target - 1 : target;
}

bool delete_setinit(Program& p, Rng& rng) {
  auto sites = sites_of<SetInit>(p);
  if (sites.empty()) return false;
  auto [site, pc] = rng.pick(sites);
  MethodDef& m = method_at(p, site);
  m.instrs.erase(m.instrs.begin() + pc);
  if (pc < static_cast<int>(m.instr_locations.size())) {
    m.instr_locations.erase(m.instr_locations.begin() + pc);
  }
  for (Instr& ins : m.instrs) {
    if (auto* b = std::get_if<IfStar>(&ins)) {
      b->target = shift_after_removal(b->target, pc);
    }
  }
  HandlerTable handlers;
  for (const auto& [key, target] : m.handlers) {
    if (key.first == pc) continue;
    handlers[{shift_after_removal(key.first, pc), key.second}] =
        shift_after_removal(target, pc);
  }
  m.handlers = std::move(handlers);
  return true;
}

bool swap_instructions(Program& p, Rng& rng) {
  std::vector<MethodSite> candidates;
  for (const MethodSite& s : all_methods(p)) {
    if (p.find_method(s.cls, s.name)->instrs.size() >= 3) candidates.push_back(s);
  }
  if (candidates.empty()) return false;
  MethodDef& m = method_at(p, rng.pick(candidates));
  int last = static_cast<int>(m.instrs.size()) - 1;
  int i = rng.below(last);
  int j = rng.below(last);
  if (i == j || m.instrs[i] == m.instrs[j]) return false;
  std::swap(m.instrs[i], m.instrs[j]);
  return true;
}

bool retarget_jump(Program& p, Rng& rng) {
  auto sites = sites_of<IfStar>(p);
  if (sites.empty()) return false;
  auto [site, pc] = rng.pick(sites);
  MethodDef& m = method_at(p, site);
  auto& b = std::get<IfStar>(m.instrs[pc]);
  int t = rng.below(m.instrs.size());
  if (t == b.target) return false;
  b.target = t;
  return true;
}

}  // namespace

Program mutate(const Program& p, std::uint64_t seed) {
  Rng rng(seed);
  for (int attempt = 0; attempt < 64; ++attempt) {
    Program q = p;
    bool changed = false;
    switch (rng.below(5)) {
      case 0:
        changed = step_annotation(q, rng);
        break;
      case 1:
        changed = swap_call_target(q, rng);
        break;
      case 2:
        changed = delete_setinit(q, rng);
        break;
      case 3:
        changed = swap_instructions(q, rng);
        break;
      case 4:
        changed = retarget_jump(q, rng);
        break;
    }
    if (changed && !(q == p) && validate_structure(q).empty()) return q;
  }
  return p;
}

}  // namespace rawtypes
