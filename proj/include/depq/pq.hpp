#pragma once

#include <optional>
#include <vector>

#include "depq/item.hpp"

namespace depq {

/// Single-consumer priority queue over arena items, ordered by
/// before(., ., order()). Inserts may come from any thread; at most one
/// thread calls extract_first at a time.
class PriorityQueue {
 public:
  virtual ~PriorityQueue() = default;

  virtual ListId order() const = 0;
  virtual void insert(NodeId item) = 0;
  /// A first item under order(), or nullopt when empty.
  virtual std::optional<NodeId> extract_first() = 0;

  virtual bool has_delete() const { return false; }
  /// Removes `item` if present. Absent items are a no-op returning false.
  virtual bool erase(NodeId /*item*/) { return false; }

  /// Items currently held, including ones already reserved through the other
  /// queue. Quiescent only.
  virtual std::vector<NodeId> items() const = 0;
  virtual std::size_t size() const { return items().size(); }
};

}  // namespace depq
