#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include "gen_common.h"
#include "rawtypes/harness.h"

namespace rawtypes {

namespace {

using Callable = std::pair<ClassId, MethodName>;

// Everything an instruction may mention within one skeleton.
struct Vocabulary {
  std::vector<ClassId> classes;
  std::vector<FieldId> fields;
  std::vector<VarId> vars;
  std::vector<VarId> writable;
  std::vector<Callable> callables;
  std::vector<InitType> types;  // Init, Raw(C0).., RawBot
  bool casts = false;
  bool handlers = false;
};

std::uint64_t ipow(std::uint64_t b, int e) {
  std::uint64_t r = 1;
  while (e-- > 0) r *= b;
  return r;
}

double dpow(double b, int e) { return std::pow(b, e); }

// Instruction alphabet for a method body of length `len`.
class Alphabet {
 public:
  Alphabet(const Vocabulary& v, int len, bool ctor, bool root) {
    const std::uint64_t V = v.vars.size(), W = v.writable.size(),
                        F = v.fields.size(), K = v.classes.size(),
                        P = v.callables.size();
    add(kAssign, W * (1 + V + V * F));
    add(kWrite, V * F * V);
    add(kNew, W * K * V);
    add(kIf, static_cast<std::uint64_t>(len));
    add(kSuper, ctor && !root ? V : 0);
    add(kCall, W * V * P * V);
    add(kReturn, V);
    add(kSetInit, ctor ? 1 : 0);
    add(kCastInit, v.casts ? W * V : 0);
    add(kCastRaw, v.casts ? W * K * V : 0);
  }

  std::uint64_t size() const { return total_; }

  Instr at(const Vocabulary& v, std::uint64_t i) const {
    for (auto [kind, n] : parts_) {
      if (i >= n) {
        i -= n;
        continue;
      }
      auto take = [&i](std::size_t radix) {
        std::size_t d = i % radix;
        i /= radix;
        return d;
      };
      switch (kind) {
        case kAssign: {
          VarId x = v.writable[take(v.writable.size())];
          std::uint64_t e = i;
          if (e == 0) return Assign{x, Expr::null()};
          --e;
          if (e < v.vars.size()) return Assign{x, Expr::variable(v.vars[e])};
          e -= v.vars.size();
          VarId base = v.vars[e % v.vars.size()];
          return Assign{x, Expr::variable(base).field(
                               v.fields[e / v.vars.size()])};
        }
        case kWrite: {
          VarId x = v.vars[take(v.vars.size())];
          FieldId f = v.fields[take(v.fields.size())];
          return FieldWrite{x, f, v.vars[take(v.vars.size())]};
        }
        case kNew: {
          VarId x = v.writable[take(v.writable.size())];
          ClassId c = v.classes[take(v.classes.size())];
          return New{x, c, v.vars[take(v.vars.size())]};
        }
        case kIf:
          return IfStar{static_cast<int>(i)};
        case kSuper:
          return SuperCall{v.vars[i]};
        case kCall: {
          VarId x = v.writable[take(v.writable.size())];
          VarId r = v.vars[take(v.vars.size())];
          const Callable& c = v.callables[take(v.callables.size())];
          return VirtualCall{x, r, c.first, c.second,
                             v.vars[take(v.vars.size())]};
        }
        case kReturn:
          return Return{v.vars[i]};
        case kSetInit:
          return SetInit{};
        case kCastInit: {
          VarId x = v.writable[take(v.writable.size())];
          return CastInit{x, v.vars[take(v.vars.size())]};
        }
        case kCastRaw: {
          VarId x = v.writable[take(v.writable.size())];
          ClassId c = v.classes[take(v.classes.size())];
          return CastRaw{x, c, v.vars[take(v.vars.size())]};
        }
      }
    }
    throw std::out_of_range("instruction index");
  }

 private:
  enum Kind {
    kAssign, kWrite, kNew, kIf, kSuper, kCall, kReturn, kSetInit, kCastInit,
    kCastRaw
  };
  void add(Kind k, std::uint64_t n) {
    if (n == 0) return;
    parts_.emplace_back(k, n);
    total_ += n;
  }

  std::vector<std::pair<Kind, std::uint64_t>> parts_;
  std::uint64_t total_ = 0;
};

std::uint64_t handler_choices(const Vocabulary& v, int len) {
  const std::uint64_t n = static_cast<std::uint64_t>(len);
  return v.handlers ? 1 + n * 2 * n : 1;
}

}  // namespace

struct ProgramEnumerator::MethodSpace {
  ClassId cls;
  MethodName name;
  bool ctor = false;
  bool root = false;
  double size = 0;  // annotations × bodies

  double body_count(const Vocabulary& v, int max_len) const {
    double total = 0;
    for (int len = 1; len <= max_len; ++len) {
      Alphabet a(v, len, ctor, root);
      double last = ctor ? 1 : static_cast<double>(v.vars.size());
      total += dpow(static_cast<double>(a.size()), len - 1) * last *
               static_cast<double>(handler_choices(v, len));
    }
    return total;
  }

  double annotation_count(const Vocabulary& v) const {
    return dpow(static_cast<double>(v.types.size()), ctor ? 3 : 4);
  }

  // Decodes the `index`-th method of this space.
  MethodDef at(const Vocabulary& v, int max_len, std::uint64_t index) const {
    MethodDef m;
    m.name = name;
    m.is_constructor = ctor;
    const std::uint64_t T = v.types.size();
    std::uint64_t ann = ipow(T, ctor ? 3 : 4);
    std::uint64_t a = index % ann;
    index /= ann;
    m.pre = v.types[a % T];
    a /= T;
    m.post = v.types[a % T];
    a /= T;
    m.argtype = v.types[a % T];
    a /= T;
    m.rettype = ctor ? InitType::init() : v.types[a % T];

    for (int len = 1; len <= max_len; ++len) {
      Alphabet alpha(v, len, ctor, root);
      const std::uint64_t last = ctor ? 1 : v.vars.size();
      const std::uint64_t hc = handler_choices(v, len);
      const std::uint64_t n = ipow(alpha.size(), len - 1) * last * hc;
      if (index >= n) {
        index -= n;
        continue;
      }
      for (int pc = 0; pc + 1 < len; ++pc) {
        m.instrs.push_back(alpha.at(v, index % alpha.size()));
        index /= alpha.size();
      }
      m.instrs.push_back(ctor ? Return{names::this_var()}
                              : Return{v.vars[index % last]});
      index /= last;
      if (index > 0) {
        std::uint64_t h = index - 1;
        int at = static_cast<int>(h % len);
        h /= len;
        ExcId e = h % 2 == 0 ? names::null_pointer() : names::class_cast();
        h /= 2;
        m.handlers[{at, e}] = static_cast<int>(h);
      }
      return m;
    }
    throw std::out_of_range("method index");
  }
};

struct ProgramEnumerator::Skeleton {
  int classes = 1;
  std::vector<int> supers;  // supers[i] for class i > 0
  int main = 0;
  std::vector<InitType> field_types;
  std::vector<unsigned> masks;  // declared method slots per class
  Vocabulary vocab;
  std::vector<MethodSpace> methods;
  double size = 0;
};

ProgramEnumerator::~ProgramEnumerator() = default;

ProgramEnumerator::ProgramEnumerator(const GenBounds& b) : bounds_(b) {
  auto problems = b.problems();
  if (!problems.empty()) throw std::invalid_argument(problems.front());

  const int M = b.max_methods_per_class;
  const double cap = static_cast<double>(kMaxPrograms);
  bool over = false;
  double total = 0;

  auto add_skeleton = [&](Skeleton s) {
    Vocabulary& v = s.vocab;
    for (int i = 0; i < s.classes; ++i) v.classes.push_back(gen::class_name(i));
    for (std::size_t i = 0; i < s.field_types.size(); ++i) {
      v.fields.push_back(gen::field_name(static_cast<int>(i)));
    }
    v.vars = gen::variable_pool(b.max_vars);
    for (VarId x : v.vars) {
      if (x != names::this_var()) v.writable.push_back(x);
    }
    v.types.push_back(InitType::init());
    for (ClassId c : v.classes) v.types.push_back(InitType::raw(c));
    v.types.push_back(InitType::raw_bot());
    v.casts = b.allow_casts;
    v.handlers = b.allow_handlers;
    // Callables follow map order (class name, then method name), as in a
    // Program.
    std::vector<std::pair<ClassId, int>> by_name;
    for (int i = 0; i < s.classes; ++i) by_name.emplace_back(v.classes[i], i);
    std::sort(by_name.begin(), by_name.end());
    for (auto [cid, i] : by_name) {
      std::vector<MethodName> ms;
      for (int j = 0; j < M; ++j) {
        if (s.masks[i] & (1u << j)) ms.push_back(gen::method_name(j));
      }
      std::sort(ms.begin(), ms.end());
      for (MethodName m : ms) v.callables.emplace_back(cid, m);
      MethodSpace ctor{cid, names::constructor(), true, i == 0, 0};
      s.methods.push_back(ctor);
      for (MethodName m : ms) s.methods.push_back({cid, m, false, false, 0});
    }
    s.size = 1;
    for (MethodSpace& m : s.methods) {
      m.size = m.annotation_count(v) * m.body_count(v, b.max_instrs_per_method);
      s.size *= m.size;
    }
    prefix_.push_back(total);
    total += s.size;
    if (total > cap) over = true;
    skeletons_.push_back(std::move(s));
  };

  for (int k = 1; k <= b.max_classes && !over; ++k) {
    // supers: class i picks a parent among 0..i-1
    std::uint64_t shapes = 1;
    for (int i = 1; i < k; ++i) shapes *= static_cast<std::uint64_t>(i);
    for (std::uint64_t shape = 0; shape < shapes && !over; ++shape) {
      std::vector<int> supers(k, -1);
      std::uint64_t rest = shape;
      for (int i = 1; i < k; ++i) {
        supers[i] = static_cast<int>(rest % i);
        rest /= i;
      }
      for (int main = 0; main < k && !over; ++main) {
        for (int nf = 0; nf <= b.max_fields && !over; ++nf) {
          const std::uint64_t T = static_cast<std::uint64_t>(k) + 2;
          const std::uint64_t ftypes = ipow(T, nf);
          const std::uint64_t masks = ipow(1ull << M, k);
          for (std::uint64_t ft = 0; ft < ftypes && !over; ++ft) {
            for (std::uint64_t mk = 0; mk < masks && !over; ++mk) {
              Skeleton s;
              s.classes = k;
              s.supers = supers;
              s.main = main;
              std::uint64_t f = ft;
              for (int i = 0; i < nf; ++i) {
                std::uint64_t t = f % T;
                f /= T;
                s.field_types.push_back(
                    t == 0       ? InitType::init()
                    : t == T - 1 ? InitType::raw_bot()
                                 : InitType::raw(gen::class_name(
                                       static_cast<int>(t - 1))));
              }
              std::uint64_t mm = mk;
              for (int i = 0; i < k; ++i) {
                s.masks.push_back(static_cast<unsigned>(mm % (1ull << M)));
                mm >>= M;
              }
              if (!(s.masks[main] & 1u)) continue;
              add_skeleton(std::move(s));
            }
          }
        }
      }
    }
  }
  estimate_ = total;
  if (over) {
    // Extrapolate from the skeletons seen so far to all of them.
    double all = 0;
    for (int k = 1; k <= b.max_classes; ++k) {
      double shapes = 1;
      for (int i = 1; i < k; ++i) shapes *= i;
      double fields = 0;
      for (int nf = 0; nf <= b.max_fields; ++nf) fields += dpow(k + 2.0, nf);
      all += shapes * k * fields * dpow(2.0, M * k) / 2;
    }
    const double seen = static_cast<double>(prefix_.size());
    estimate_ = std::max(total * all / seen, cap + 1);
  }
  if (over) skeletons_.clear();
}

std::uint64_t ProgramEnumerator::count() const {
  if (!tractable()) throw std::logic_error("enumeration is not tractable");
  return static_cast<std::uint64_t>(estimate_);
}

Program ProgramEnumerator::at(std::uint64_t index) const {
  if (index >= count()) throw std::out_of_range("program index");
  auto it = std::upper_bound(prefix_.begin(), prefix_.end(),
                             static_cast<double>(index));
  const std::size_t k = static_cast<std::size_t>(it - prefix_.begin()) - 1;
  const Skeleton& s = skeletons_[k];
  std::uint64_t local = index - static_cast<std::uint64_t>(prefix_[k]);

  Program p;
  for (int i = 0; i < s.classes; ++i) {
    ClassDef c;
    c.id = s.vocab.classes[i];
    if (i > 0) c.super = s.vocab.classes[s.supers[i]];
    p.classes.emplace(c.id, std::move(c));
  }
  p.main = s.vocab.classes[s.main];
  for (std::size_t i = 0; i < s.field_types.size(); ++i) {
    p.fields[s.vocab.fields[i]] = s.field_types[i];
  }
  for (const MethodSpace& ms : s.methods) {
    const auto radix = static_cast<std::uint64_t>(ms.size);
    MethodDef m = ms.at(s.vocab, bounds_.max_instrs_per_method, local % radix);
    local /= radix;
    ClassDef& c = p.classes.at(ms.cls);
    if (ms.ctor) {
      c.ctor = std::move(m);
    } else {
      c.methods.emplace(ms.name, std::move(m));
    }
  }
  return p;
}

Result<std::uint64_t> enumerate_small_programs(
    const GenBounds& b, const std::function<bool(const Program&)>& visit) {
  ProgramEnumerator e(b);
  if (!e.tractable()) {
    std::ostringstream msg;
    msg << "refusing to enumerate: more than "
        << ProgramEnumerator::kMaxPrograms << " programs (estimate "
        << (e.estimate() > 1e15 ? std::string("> 1e15")
                                : std::to_string(static_cast<std::uint64_t>(
                                      e.estimate())))
        << ")";
    return make_error(codes::kEnumerationTooLarge, msg.str());
  }
  const std::uint64_t n = e.count();
  std::uint64_t visited = 0;
  for (std::uint64_t i = 0; i < n; ++i) {
    ++visited;
    if (!visit(e.at(i))) break;
  }
  return visited;
}

}  // namespace rawtypes
