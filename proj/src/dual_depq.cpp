#include "depq/dual_depq.hpp"

#include <sstream>

#include "depq/oracle.hpp"
#include "depq/sched.hpp"

namespace depq {

ListPq::ListPq(ItemArena& arena, ListId order)
    : arena_(arena), list_(arena, order, arena.new_sentinel()) {}

std::optional<NodeId> ListPq::extract_first() {
  auto node = list_.extract(false);
  // Removed nodes stay in the arena until the owning DEPQ is destroyed.
  if (node) list_.update_head();
  return node;
}

DualDepq::DualDepq(std::shared_ptr<ItemArena> arena, std::unique_ptr<PriorityQueue> min_pq,
                   std::unique_ptr<PriorityQueue> max_pq, bool use_optional_delete)
    : arena_(std::move(arena)),
      queues_{std::move(min_pq), std::move(max_pq)},
      optional_delete_(use_optional_delete && queues_[0]->has_delete() &&
                       queues_[1]->has_delete()) {
  if (queues_[0]->order() != ListId::Min || queues_[1]->order() != ListId::Max)
    throw std::invalid_argument("DualDepq: expected an ascending and a descending queue");
}

void DualDepq::insert(UserKey k) {
  const NodeId item = arena_->new_item(k);
  queues_[0]->insert(item);
  sched::point(sched::Site::InsertBetweenQueues);
  queues_[1]->insert(item);
}

std::optional<UserKey> DualDepq::extract(ListId t) {
  const int self = index_of(t);
  PriorityQueue& own = *queues_[self];
  for (;;) {
    const auto item = own.extract_first();
    if (!item) return std::nullopt;
    sched::point(sched::Site::AfterQueueExtract);
    Node& node = arena_->node(*item);
    if (try_reserve(node, reserve_tag(t))) {
      if (optional_delete_) queues_[1 - self]->erase(*item);
      successes_[self].fetch_add(1, std::memory_order_relaxed);
      return node.key.user_key;
    }
    failed_reserve_[self].fetch_add(1, std::memory_order_relaxed);
    // Only a reservation from the opposite end can beat us to this item.
    if (node.reserved.load(std::memory_order_acquire) != reserve_tag(opposite(t)))
      transfer_violations_.fetch_add(1, std::memory_order_relaxed);
  }
}

std::vector<UserKey> DualDepq::quiescent_contents() const {
  std::vector<UserKey> out;
  for (NodeId id : queues_[0]->items()) {
    const Node& n = arena_->node(id);
    if (!is_reserved(n)) out.push_back(n.key.user_key);
  }
  return out;
}

std::string DualDepq::audit() const {
  std::ostringstream os;
  for (ListId t : {ListId::Min, ListId::Max}) {
    const PriorityQueue& q = *queues_[index_of(t)];
    if (const auto* heap = dynamic_cast<const LockedHeapPq*>(&q); heap && !heap->check_heap())
      os << to_string(t) << " heap: heap property or index broken\n";
    if (const auto* lq = dynamic_cast<const ListPq*>(&q)) {
      const ListAudit a = lq->list().audit();
      if (!a.ok()) os << to_string(t) << " list: " << a.diagnostic << '\n';
    }
  }
  if (transfer_violations() != 0) os << "reservation lost to a non-opposite end\n";
  return os.str();
}

DepqStats DualDepq::stats() const {
  DepqStats s;
  s.failed_reserve_min = failed_reserve_[0].load(std::memory_order_relaxed);
  s.failed_reserve_max = failed_reserve_[1].load(std::memory_order_relaxed);
  s.successful_min = successes_[0].load(std::memory_order_relaxed);
  s.successful_max = successes_[1].load(std::memory_order_relaxed);
  for (const auto& q : queues_)
    if (const auto* lq = dynamic_cast<const ListPq*>(q.get()))
      s.failed_insert_cas += lq->list().failed_insert_cas();
  return s;
}

std::unique_ptr<DualDepq> make_dual_heap(bool use_optional_delete) {
  auto arena = std::make_shared<ItemArena>();
  auto d = std::make_unique<DualDepq>(arena, std::make_unique<LockedHeapPq>(*arena, ListId::Min),
                                      std::make_unique<LockedHeapPq>(*arena, ListId::Max),
                                      use_optional_delete);
  d->set_name("dual-heap");
  return d;
}

std::unique_ptr<DualDepq> make_dual_list() {
  auto arena = std::make_shared<ItemArena>();
  auto d = std::make_unique<DualDepq>(arena, std::make_unique<ListPq>(*arena, ListId::Min),
                                      std::make_unique<ListPq>(*arena, ListId::Max));
  d->set_name("dual-list");
  return d;
}

const char* to_string(MultiConsumerMode m) {
  return m == MultiConsumerMode::TwoLocks ? "two-locks" : "combining";
}

MultiConsumerDepq::MultiConsumerDepq(std::unique_ptr<DualDepq> inner, MultiConsumerMode mode,
                                     std::size_t batch_cap)
    : inner_(std::move(inner)), mode_(mode) {
  if (mode_ == MultiConsumerMode::Combining) {
    for (ListId t : {ListId::Min, ListId::Max})
      combiners_[index_of(t)] = std::make_unique<Combiner<Unit, std::optional<UserKey>>>(
          batch_cap, [this, t](Unit&) { return inner_->extract(t); });
  }
}

std::optional<UserKey> MultiConsumerDepq::extract(ListId t) {
  if (mode_ == MultiConsumerMode::TwoLocks) {
    std::lock_guard g(locks_[index_of(t)]);
    return inner_->extract(t);
  }
  return combiners_[index_of(t)]->announce(Unit{});
}

DepqStats MultiConsumerDepq::stats() const {
  DepqStats s = inner_->stats();
  if (mode_ == MultiConsumerMode::Combining) {
    s.batch_sizes_min = combiners_[0]->stats().batch_sizes;
    s.batch_sizes_max = combiners_[1]->stats().batch_sizes;
  }
  return s;
}

CombinerStats MultiConsumerDepq::combiner_stats(ListId t) const {
  if (!combiners_[index_of(t)]) return {};
  return combiners_[index_of(t)]->stats();
}

std::string MultiConsumerDepq::name() const {
  return inner_->name() + "/" + to_string(mode_);
}

std::unique_ptr<MultiConsumerDepq> make_multi_consumer(std::unique_ptr<DualDepq> d,
                                                       MultiConsumerMode mode,
                                                       std::size_t batch_cap) {
  return std::make_unique<MultiConsumerDepq>(std::move(d), mode, batch_cap);
}

}  // namespace depq
