#include "eikfm/front_heap.hpp"

#include <algorithm>

namespace eikfm {

// 0-based layout: children of k live at 2k+1 and 2k+2, parent at (k-1)/2.

void FrontHeap::insert(double key, Index node) {
  entries_.push_back({key, node});
  peak_ = std::max(peak_, entries_.size());
  sift_up(entries_.size() - 1);
}

std::optional<HeapEntry> FrontHeap::extract_min(
    std::span<const std::uint8_t> known) {
  while (!entries_.empty()) {
    const HeapEntry top = entries_.front();
    entries_.front() = entries_.back();
    entries_.pop_back();
    if (!entries_.empty()) sift_down(0);
    if (!known[static_cast<std::size_t>(top.node)]) return top;
  }
  return std::nullopt;
}

bool FrontHeap::is_heap() const {
  for (std::size_t k = 1; k < entries_.size(); ++k) {
    if (less(entries_[k], entries_[(k - 1) / 2])) return false;
  }
  return true;
}

void FrontHeap::sift_up(std::size_t pos) {
  const HeapEntry moving = entries_[pos];
  while (pos > 0) {
    const std::size_t parent = (pos - 1) / 2;
    if (!less(moving, entries_[parent])) break;
    entries_[pos] = entries_[parent];
    pos = parent;
  }
  entries_[pos] = moving;
}

void FrontHeap::sift_down(std::size_t pos) {
  const std::size_t n = entries_.size();
  const HeapEntry moving = entries_[pos];
  for (;;) {
    std::size_t child = 2 * pos + 1;
    if (child >= n) break;
    if (child + 1 < n && less(entries_[child + 1], entries_[child])) ++child;
    if (!less(entries_[child], moving)) break;
    entries_[pos] = entries_[child];
    pos = child;
  }
  entries_[pos] = moving;
}

}  // namespace eikfm
