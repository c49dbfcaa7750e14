#pragma once

#include <algorithm>
#include <utility>
#include <vector>

namespace rawtypes {

// Small sorted-vector map. Variable and field sets per method/program are
// tiny, so linear storage beats node-based maps for copying and lookup.
template <class K, class V>
class FlatMap {
 public:
  using value_type = std::pair<K, V>;
  using iterator = typename std::vector<value_type>::iterator;
  using const_iterator = typename std::vector<value_type>::const_iterator;

  FlatMap() = default;

  const_iterator begin() const { return items_.begin(); }
  const_iterator end() const { return items_.end(); }
  iterator begin() { return items_.begin(); }
  iterator end() { return items_.end(); }
  std::size_t size() const { return items_.size(); }
  bool empty() const { return items_.empty(); }

  const_iterator find(const K& key) const {
    auto it = lower(key);
    return (it != items_.end() && it->first == key) ? it : items_.end();
  }
  iterator find(const K& key) {
    auto it = lower(key);
    return (it != items_.end() && it->first == key) ? it : items_.end();
  }
  bool contains(const K& key) const { return find(key) != end(); }

  const V* get(const K& key) const {
    auto it = find(key);
    return it == end() ? nullptr : &it->second;
  }
  V* get(const K& key) {
    auto it = find(key);
    return it == end() ? nullptr : &it->second;
  }

  // Inserts or overwrites.
  void set(const K& key, V value) {
    auto it = lower(key);
    if (it != items_.end() && it->first == key) {
      it->second = std::move(value);
    } else {
      items_.insert(it, value_type(key, std::move(value)));
    }
  }

  bool operator==(const FlatMap&) const = default;

 private:
  const_iterator lower(const K& key) const {
    return std::lower_bound(
        items_.begin(), items_.end(), key,
        [](const value_type& item, const K& k) { return item.first < k; });
  }
  iterator lower(const K& key) {
    return std::lower_bound(
        items_.begin(), items_.end(), key,
        [](const value_type& item, const K& k) { return item.first < k; });
  }

  std::vector<value_type> items_;
};

}  // namespace rawtypes
