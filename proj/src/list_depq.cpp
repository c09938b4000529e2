#include "depq/list_depq.hpp"

#include <sstream>

#include "depq/sched.hpp"

namespace depq {

ListDepq::ListDepq(ListDepqOptions opts)
    : opts_(opts), reclaimer_(arena_, opts.reclaim), sentinel_(arena_.new_sentinel()) {
  for (ListId t : {ListId::Min, ListId::Max}) {
    lists_[index_of(t)] = std::make_unique<OrderedList>(arena_, t, sentinel_);
    combiners_[index_of(t)] = std::make_unique<Combiner<Unit, std::optional<UserKey>>>(
        opts_.batch_cap, [this, t](Unit&) { return serve(t); }, [this, t] { finish_batch(t); });
    if (opts_.trace_combiners) combiners_[index_of(t)]->enable_trace();
  }
  arena_.set_poison_checks(opts_.reclaim == ReclaimMode::Epoch);
}

ListDepq::~ListDepq() = default;

void ListDepq::insert(UserKey k) {
  auto guard = reclaimer_.enter();
  const NodeId node = arena_.new_item(k);
  lists_[0]->insert(node);
  sched::point(sched::Site::InsertBetweenQueues);
  lists_[1]->insert(node);
}

std::optional<UserKey> ListDepq::extract(ListId t) {
  auto guard = reclaimer_.enter();
  return combiners_[index_of(t)]->announce(Unit{});
}

std::optional<UserKey> ListDepq::serve(ListId t) {
  const auto node = lists_[index_of(t)]->extract(!opts_.skip_reservation);
  if (!node) return std::nullopt;
  successes_[index_of(t)].fetch_add(1, std::memory_order_relaxed);
  return arena_.node(*node).key.user_key;
}

void ListDepq::finish_batch(ListId t) {
  for (NodeId n : lists_[index_of(t)]->update_head()) reclaimer_.unlink_and_maybe_retire(n);
  reclaimer_.try_advance();
}

std::vector<UserKey> ListDepq::quiescent_contents() const {
  std::vector<UserKey> out;
  for (NodeId n : lists_[0]->live_suffix()) {
    const Node& node = arena_.node(n);
    if (!is_reserved(node)) out.push_back(node.key.user_key);
  }
  return out;
}

std::string ListDepq::audit() const {
  std::ostringstream os;
  for (ListId t : {ListId::Min, ListId::Max}) {
    const ListAudit a = lists_[index_of(t)]->audit();
    if (!a.ok()) os << to_string(t) << " list: " << a.diagnostic << '\n';
    if (lists_[index_of(t)]->unmarked_removals() != 0)
      os << to_string(t) << " list: removed a node that was never marked\n";
  }
  if (reclaimer_.protocol_violations() != 0) os << "retire protocol violated\n";
  if (arena_.poisoned_accesses() != 0) os << "access to a freed node\n";
  return os.str();
}

DepqStats ListDepq::stats() const {
  DepqStats s;
  s.failed_reserve_min = lists_[0]->failed_reserve();
  s.failed_reserve_max = lists_[1]->failed_reserve();
  s.successful_min = successes_[0].load(std::memory_order_relaxed);
  s.successful_max = successes_[1].load(std::memory_order_relaxed);
  s.failed_insert_cas = lists_[0]->failed_insert_cas() + lists_[1]->failed_insert_cas();
  s.retired = reclaimer_.retired();
  s.deallocated = reclaimer_.deallocated();
  s.batch_sizes_min = combiners_[0]->stats().batch_sizes;
  s.batch_sizes_max = combiners_[1]->stats().batch_sizes;
  return s;
}

std::vector<std::pair<UserKey, bool>> ListDepq::dump(ListId t) const {
  std::vector<std::pair<UserKey, bool>> out;
  const auto bit = static_cast<std::uint8_t>(1u << index_of(t));
  for (NodeId n : lists_[index_of(t)]->traverse()) {
    if (n == sentinel_) continue;
    const Node& node = arena_.node(n);
    out.emplace_back(node.key.user_key,
                     (node.deleted_mask.load(std::memory_order_acquire) & bit) != 0);
  }
  return out;
}

}  // namespace depq
