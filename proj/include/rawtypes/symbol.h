#pragma once

#include <cstddef>
#include <functional>
#include <ostream>
#include <string>
#include <string_view>

namespace rawtypes {

// An interned string. Two symbols are equal iff they were interned from the
// same text; ordering follows the text so that map iteration is stable
// across processes.
class Symbol {
 public:
  Symbol();
  explicit Symbol(std::string_view text);

  const std::string& str() const { return *text_; }
  bool empty() const { return text_->empty(); }

  friend bool operator==(Symbol a, Symbol b) { return a.text_ == b.text_; }
  friend bool operator<(Symbol a, Symbol b) {
    return a.text_ != b.text_ && *a.text_ < *b.text_;
  }

  std::size_t hash() const { return std::hash<const void*>()(text_); }
  // Unique per distinct text within one process.
  const void* address() const { return text_; }

 private:
  const std::string* text_;
};

// Strongly typed identifier over an interned symbol. The tag keeps class,
// field, variable, method and exception names from mixing.
template <class Tag>
class Ident {
 public:
  Ident() = default;
  explicit Ident(std::string_view name) : sym_(name) {}

  const std::string& name() const { return sym_.str(); }
  bool empty() const { return sym_.empty(); }

  friend bool operator==(const Ident& a, const Ident& b) {
    return a.sym_ == b.sym_;
  }
  friend bool operator!=(const Ident& a, const Ident& b) { return !(a == b); }
  friend bool operator<(const Ident& a, const Ident& b) {
    return a.sym_ < b.sym_;
  }
  friend std::ostream& operator<<(std::ostream& os, const Ident& id) {
    return os << id.name();
  }

  std::size_t hash() const { return sym_.hash(); }
  const void* address() const { return sym_.address(); }

 private:
  Symbol sym_;
};

using ClassId = Ident<struct ClassTag>;
using FieldId = Ident<struct FieldTag>;
using VarId = Ident<struct VarTag>;
using MethodName = Ident<struct MethodTag>;
using ExcId = Ident<struct ExcTag>;

struct IdentHash {
  template <class Tag>
  std::size_t operator()(const Ident<Tag>& id) const {
    return id.hash();
  }
};

}  // namespace rawtypes
