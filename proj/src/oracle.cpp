#include "depq/oracle.hpp"

namespace depq {

const char* to_string(OpKind k) {
  switch (k) {
    case OpKind::Insert: return "Insert";
    case OpKind::ExtractMin: return "ExtractMin";
    case OpKind::ExtractMax: return "ExtractMax";
  }
  return "?";
}

std::optional<UserKey> SeqDepq::extract_min() {
  if (contents_.empty()) return std::nullopt;
  const auto it = contents_.begin();
  const UserKey k = it->user_key;
  contents_.erase(it);
  return k;
}

std::optional<UserKey> SeqDepq::extract_max() {
  if (contents_.empty()) return std::nullopt;
  const auto it = std::prev(contents_.end());
  const UserKey k = it->user_key;
  contents_.erase(it);
  return k;
}

std::optional<UserKey> SeqDepq::apply(const Op& op) {
  switch (op.kind) {
    case OpKind::Insert:
      insert(op.arg);
      return std::nullopt;
    case OpKind::ExtractMin: return extract_min();
    case OpKind::ExtractMax: return extract_max();
  }
  return std::nullopt;
}

std::vector<UserKey> SeqDepq::keys() const {
  std::vector<UserKey> out;
  out.reserve(contents_.size());
  for (const Key& k : contents_) out.push_back(k.user_key);
  return out;
}

void LockedHeapPq::insert(NodeId item) {
  std::lock_guard g(mu_);
  heap_.push_back(item);
  pos_[item] = heap_.size() - 1;
  sift_up(heap_.size() - 1);
}

std::optional<NodeId> LockedHeapPq::extract_first() {
  std::lock_guard g(mu_);
  if (heap_.empty()) return std::nullopt;
  const NodeId top = heap_.front();
  remove_at(0);
  return top;
}

bool LockedHeapPq::erase(NodeId item) {
  std::lock_guard g(mu_);
  const auto it = pos_.find(item);
  if (it == pos_.end()) return false;
  remove_at(it->second);
  return true;
}

void LockedHeapPq::remove_at(std::size_t i) {
  pos_.erase(heap_[i]);
  const NodeId tail = heap_.back();
  heap_.pop_back();
  if (i == heap_.size()) return;
  place(i, tail);
  sift_down(i);
  sift_up(i);
}

void LockedHeapPq::sift_up(std::size_t i) {
  const NodeId id = heap_[i];
  while (i > 0) {
    const std::size_t parent = (i - 1) / 2;
    if (!first(id, heap_[parent])) break;
    place(i, heap_[parent]);
    i = parent;
  }
  place(i, id);
}

void LockedHeapPq::sift_down(std::size_t i) {
  const NodeId id = heap_[i];
  const std::size_t n = heap_.size();
  for (;;) {
    std::size_t child = 2 * i + 1;
    if (child >= n) break;
    if (child + 1 < n && first(heap_[child + 1], heap_[child])) ++child;
    if (!first(heap_[child], id)) break;
    place(i, heap_[child]);
    i = child;
  }
  place(i, id);
}

std::vector<NodeId> LockedHeapPq::items() const {
  std::lock_guard g(mu_);
  return heap_;
}

std::size_t LockedHeapPq::size() const {
  std::lock_guard g(mu_);
  return heap_.size();
}

bool LockedHeapPq::check_heap() const {
  std::lock_guard g(mu_);
  if (pos_.size() != heap_.size()) return false;
  for (std::size_t i = 0; i < heap_.size(); ++i) {
    const auto it = pos_.find(heap_[i]);
    if (it == pos_.end() || it->second != i) return false;
    if (i > 0 && first(heap_[i], heap_[(i - 1) / 2])) return false;
  }
  return true;
}

}  // namespace depq
