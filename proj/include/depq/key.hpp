#pragma once

#include <compare>
#include <cstdint>

namespace depq {

using UserKey = std::int64_t;

/// A stored key. Ordering is lexicographic on (user_key, uid), so two keys
/// inserted into the same structure never compare equal even when the user
/// supplied duplicates.
struct Key {
  UserKey user_key = 0;
  std::uint64_t uid = 0;

  friend constexpr auto operator<=>(const Key&, const Key&) = default;
};

constexpr bool key_less(const Key& a, const Key& b) noexcept {
  return a.user_key < b.user_key || (a.user_key == b.user_key && a.uid < b.uid);
}

/// Which end of a double-ended queue / which list of a node.
enum class ListId : std::uint8_t { Min = 0, Max = 1 };

constexpr int index_of(ListId t) noexcept { return static_cast<int>(t); }
constexpr ListId opposite(ListId t) noexcept {
  return t == ListId::Min ? ListId::Max : ListId::Min;
}
constexpr const char* to_string(ListId t) noexcept {
  return t == ListId::Min ? "min" : "max";
}

/// Should k1 come before k2 in list t?
constexpr bool before(const Key& k1, const Key& k2, ListId t) noexcept {
  return t == ListId::Min ? key_less(k1, k2) : key_less(k2, k1);
}

}  // namespace depq
