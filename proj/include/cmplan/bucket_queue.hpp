#pragma once

#include <cassert>
#include <cstddef>
#include <cstdint>
#include <utility>
#include <vector>

namespace cmplan {

/// Monotone-friendly priority queue over small nonnegative integer priorities.
/// Buckets are LIFO. Decrease-key is done by pushing again and letting the
/// caller skip the stale entry when it pops.
template <typename T>
class BucketQueue {
 public:
  void push(std::size_t priority, T item) {
    if (priority >= buckets_.size()) buckets_.resize(priority + 1);
    buckets_[priority].push_back(std::move(item));
    if (priority < cursor_) cursor_ = priority;
    ++size_;
  }

  [[nodiscard]] bool empty() const { return size_ == 0; }
  [[nodiscard]] std::size_t size() const { return size_; }

  /// Smallest priority present. Requires !empty().
  std::size_t min_priority() {
    assert(size_ > 0);
    while (buckets_[cursor_].empty()) ++cursor_;
    return cursor_;
  }

  /// Removes and returns an item of minimal priority. Requires !empty().
  std::pair<std::size_t, T> pop() {
    const std::size_t p = min_priority();
    T item = std::move(buckets_[p].back());
    buckets_[p].pop_back();
    --size_;
    return {p, std::move(item)};
  }

  /// Moves every item of the minimal bucket into `out` (in push order).
  std::size_t take_min_bucket(std::vector<T>& out) {
    const std::size_t p = min_priority();
    auto& b = buckets_[p];
    size_ -= b.size();
    for (auto& item : b) out.push_back(std::move(item));
    b.clear();
    return p;
  }

  /// Empties the queue but keeps bucket capacity for reuse.
  void clear() {
    if (size_ > 0) {
      for (auto& b : buckets_) b.clear();
    }
    size_ = 0;
    cursor_ = 0;
  }

 private:
  std::vector<std::vector<T>> buckets_;
  std::size_t cursor_ = 0;
  std::size_t size_ = 0;
};

/// Two-level bucket queue ordered lexicographically by (f, t). Items of the
/// current f-layer are redistributed into buckets by t, so within one f value
/// earlier timesteps pop first.
template <typename T>
class LayeredBucketQueue {
 public:
  void push(std::size_t f, std::size_t t, T item) {
    if (layer_active_ && f == layer_f_) {
      inner_.push(t, Entry{t, std::move(item)});
      return;
    }
    if (layer_active_ && f < layer_f_) flush_layer();
    outer_.push(f, Entry{t, std::move(item)});
  }

  [[nodiscard]] bool empty() const { return inner_.empty() && outer_.empty(); }

  /// Pops the item with the smallest (f, t). Requires !empty().
  struct Popped {
    std::size_t f;
    std::size_t t;
    T item;
  };
  Popped pop() {
    if (inner_.empty()) load_next_layer();
    auto [t, entry] = inner_.pop();
    return {layer_f_, t, std::move(entry.item)};
  }

  /// Smallest (f, t) key currently queued. Requires !empty().
  std::pair<std::size_t, std::size_t> peek_key() {
    if (inner_.empty()) load_next_layer();
    return {layer_f_, inner_.min_priority()};
  }

  void clear() {
    inner_.clear();
    outer_.clear();
    scratch_.clear();
    layer_active_ = false;
  }

 private:
  struct Entry {
    std::size_t t;
    T item;
  };

  void load_next_layer() {
    scratch_.clear();
    layer_f_ = outer_.take_min_bucket(scratch_);
    layer_active_ = true;
    for (auto& e : scratch_) inner_.push(e.t, std::move(e));
    scratch_.clear();
  }

  void flush_layer() {
    while (!inner_.empty()) {
      auto [t, e] = inner_.pop();
      outer_.push(layer_f_, std::move(e));
    }
    layer_active_ = false;
  }

  BucketQueue<Entry> inner_;
  BucketQueue<Entry> outer_;
  std::vector<Entry> scratch_;
  std::size_t layer_f_ = 0;
  bool layer_active_ = false;
};

}  // namespace cmplan
