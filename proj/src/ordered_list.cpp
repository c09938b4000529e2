#include "depq/ordered_list.hpp"

#include <sstream>

#include "depq/sched.hpp"

namespace depq {

OrderedList::OrderedList(ItemArena& arena, ListId t, NodeId sentinel)
    : arena_(arena), type_(t), head_(sentinel), last_deleted_(sentinel) {
  Node& s = arena_.node(sentinel);
  s.deleted_mask.fetch_or(static_cast<std::uint8_t>(1u << index_of(t)), std::memory_order_relaxed);
}

void OrderedList::insert(NodeId node) {
  Node& fresh = arena_.node(node);
  const Key k = fresh.key;
  NodeId pred = head_.load(std::memory_order_acquire);
  for (;;) {
    LinkWord w = arena_.node(pred).load_link(type_);
    NodeId curr = w.successor();
    bool marked = w.marked();
    // Skip the deleted prefix, then every node that belongs before k.
    while (marked || (curr != kNone && before(arena_.node(curr).key, k, type_))) {
      pred = curr;
      w = arena_.node(curr).load_link(type_);
      curr = w.successor();
      marked = w.marked();
    }
    fresh.store_link(type_, LinkWord{curr, false}, std::memory_order_relaxed);
    sched::point(sched::Site::InsertBeforeCas);
    std::uint64_t expected = LinkWord{curr, false}.raw();
    if (arena_.node(pred).link[index_of(type_)].compare_exchange_strong(
            expected, LinkWord{node, false}.raw(), std::memory_order_acq_rel,
            std::memory_order_acquire))
      return;
    // Retry from pred: the deleted prefix only grows, so pred stays a valid
    // starting point.
    failed_cas_.fetch_add(1, std::memory_order_relaxed);
  }
}

LinkWord OrderedList::fao_mark(NodeId node) {
  return LinkWord::from_raw(
      arena_.node(node).link[index_of(type_)].fetch_or(1, std::memory_order_acq_rel));
}

std::optional<NodeId> OrderedList::extract(bool reserving) {
  const auto bit = static_cast<std::uint8_t>(1u << index_of(type_));
  for (;;) {
    NodeId last = last_deleted_.load(std::memory_order_acquire);
    // Linearization point of an empty result.
    if (arena_.node(last).load_link(type_).successor() == kNone) return std::nullopt;
    last = fao_mark(last).successor();
    Node& victim = arena_.node(last);
    victim.deleted_mask.fetch_or(bit, std::memory_order_relaxed);
    mark_pending_.store(true, std::memory_order_release);
    sched::point(sched::Site::AfterMark);
    last_deleted_.store(last, std::memory_order_release);
    mark_pending_.store(false, std::memory_order_release);
    if (!reserving) return last;
    if (try_reserve(victim, reserve_tag(type_))) return last;
    failed_reserve_.fetch_add(1, std::memory_order_relaxed);
  }
}

std::vector<NodeId> OrderedList::update_head() {
  update_head_calls_.fetch_add(1, std::memory_order_relaxed);
  const NodeId head = head_.load(std::memory_order_acquire);
  const NodeId target = last_deleted_.load(std::memory_order_acquire);
  std::vector<NodeId> removed;
  if (head == target) return removed;
  const auto bit = static_cast<std::uint8_t>(1u << index_of(type_));
  for (NodeId n = head; n != target; n = arena_.node(n).load_link(type_).successor()) {
    if ((arena_.node(n).deleted_mask.load(std::memory_order_relaxed) & bit) == 0)
      unmarked_removals_.fetch_add(1, std::memory_order_relaxed);
    removed.push_back(n);
  }
  head_.store(target, std::memory_order_release);
  return removed;
}

std::vector<NodeId> OrderedList::traverse() const {
  std::vector<NodeId> out;
  const std::size_t bound = arena_.high_water() + 1;
  for (NodeId n = head(); n != kNone && out.size() <= bound;
       n = arena_.node(n).load_link(type_).successor())
    out.push_back(n);
  return out;
}

std::vector<NodeId> OrderedList::live_suffix() const {
  std::vector<NodeId> out;
  NodeId n = last_deleted();
  // With an extract frozen after its mark, last_deleted lags one node.
  if (extract_between_mark_and_write()) n = arena_.node(n).load_link(type_).successor();
  for (n = arena_.node(n).load_link(type_).successor(); n != kNone;
       n = arena_.node(n).load_link(type_).successor())
    out.push_back(n);
  return out;
}

ListAudit OrderedList::audit() const {
  ListAudit r;
  std::ostringstream diag;
  const auto bit = static_cast<std::uint8_t>(1u << index_of(type_));
  auto deleted = [&](NodeId n) {
    return (arena_.node(n).deleted_mask.load(std::memory_order_acquire) & bit) != 0;
  };

  const NodeId head = this->head();
  const NodeId last_del = last_deleted();
  if (!deleted(head) || !deleted(last_del)) {
    r.heads_deleted = false;
    diag << "head or last_deleted not logically deleted; ";
  }

  // Walk from head. The node reached through a marked edge is deleted; the
  // head itself is deleted by the invariant checked above.
  std::vector<NodeId> path{head};
  std::vector<bool> path_deleted{true};
  const std::size_t bound = arena_.high_water() + 1;
  NodeId n = head;
  for (;;) {
    const LinkWord w = arena_.node(n).load_link(type_);
    if (w.successor() == kNone) {
      if (w.marked()) {
        r.deleted_prefix = false;
        diag << "marked link with no successor; ";
      }
      break;
    }
    n = w.successor();
    path.push_back(n);
    path_deleted.push_back(w.marked());
    if (w.marked() != deleted(n)) {
      r.deleted_prefix = false;
      diag << "mark/tag disagreement at node " << n << "; ";
    }
    if (path.size() > bound) {
      r.finite = false;
      diag << "cycle or unbounded chain; ";
      break;
    }
  }

  std::size_t prefix = 0;
  while (prefix < path.size() && path_deleted[prefix]) ++prefix;
  for (std::size_t i = prefix; i < path.size(); ++i) {
    if (path_deleted[i]) {
      r.deleted_prefix = false;
      diag << "deleted node " << path[i] << " after live node; ";
      break;
    }
  }
  r.prefix_length = prefix;
  r.suffix_length = path.size() - prefix;

  for (std::size_t i = prefix + 1; i < path.size(); ++i) {
    if (!before(arena_.node(path[i - 1]).key, arena_.node(path[i]).key, type_)) {
      r.suffix_sorted = false;
      diag << "suffix out of order at nodes " << path[i - 1] << "," << path[i] << "; ";
      break;
    }
  }

  if (prefix >= 1) {
    const NodeId last_of_prefix = path[prefix - 1];
    if (extract_between_mark_and_write()) {
      r.used_second_last_branch = true;
      if (prefix < 2 || path[prefix - 2] != last_del) {
        r.last_deleted_position = false;
        diag << "last_deleted is not the second-last deleted node while an extract is mid-flight; ";
      }
    } else if (last_of_prefix != last_del) {
      r.last_deleted_position = false;
      diag << "last_deleted " << last_del << " is not the last deleted node " << last_of_prefix
           << "; ";
    }
  }

  if (!r.ok()) {
    diag << "path:";
    for (std::size_t i = 0; i < path.size(); ++i)
      diag << ' ' << path[i] << (path_deleted[i] ? "(d)" : "") << '['
           << arena_.node(path[i]).key.user_key << ']';
    r.diagnostic = diag.str();
  }
  return r;
}

}  // namespace depq
