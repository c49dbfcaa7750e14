#include "rawtypes/symbol.h"

#include <mutex>
#include <unordered_set>

namespace rawtypes {
namespace {

// Node-based set: element addresses stay valid for the process lifetime.
struct Interner {
  std::mutex mu;
  std::unordered_set<std::string> table;

  const std::string* intern(std::string_view text) {
    std::lock_guard<std::mutex> lock(mu);
    return &*table.emplace(text).first;
  }
};

Interner& interner() {
  static Interner* instance = new Interner();
  return *instance;
}

const std::string* empty_symbol() {
  static const std::string* empty = interner().intern("");
  return empty;
}

}  // namespace

Symbol::Symbol() : text_(empty_symbol()) {}

Symbol::Symbol(std::string_view text) : text_(interner().intern(text)) {}

}  // namespace rawtypes
