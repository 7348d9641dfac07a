#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "eikfm/grid.hpp"

namespace eikfm {

struct HeapEntry {
  double key = 0.0;
  Index node = 0;
};

/// Array-backed binary min-heap of (key, node) with no decrease-key.
///
/// A node whose value improves is simply inserted again. extract_min() drops
/// entries whose node is already marked in the known mask, so the smallest
/// entry of each node wins and later duplicates are discarded. Equal keys are
/// ordered by the smaller node index.
class FrontHeap {
 public:
  FrontHeap() = default;
  explicit FrontHeap(std::size_t reserve) { entries_.reserve(reserve); }

  void insert(double key, Index node);
  /// Minimum entry whose node is not known, or nullopt once only stale
  /// entries (or nothing) remain.
  std::optional<HeapEntry> extract_min(std::span<const std::uint8_t> known);

  bool empty() const { return entries_.empty(); }
  std::size_t size() const { return entries_.size(); }
  std::size_t peak_size() const { return peak_; }
  void clear() { entries_.clear(); }

  /// Checks parent <= children at every position.
  bool is_heap() const;

 private:
  static bool less(const HeapEntry& a, const HeapEntry& b) {
    return a.key < b.key || (a.key == b.key && a.node < b.node);
  }
  void sift_up(std::size_t pos);
  void sift_down(std::size_t pos);

  std::vector<HeapEntry> entries_;
  std::size_t peak_ = 0;
};

}  // namespace eikfm
