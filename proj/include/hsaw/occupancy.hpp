#pragma once

// Occupancy map from 32-bit lattice coordinates to walk indices, used by
// the pivot sampler as its self-avoidance oracle.
//
// Two levels: an open-addressing hash of 8x8 lattice patches, each patch a
// dense array of 64 indices. Consecutive walk sites usually fall in the
// same patch, so lookups along the walk stay in a few cache lines.

#include <array>
#include <bit>
#include <cstdint>
#include <vector>

namespace hsaw::detail {

class OccupancyMap {
 public:
  static constexpr std::int32_t kAbsent = -1;

  OccupancyMap() { reset(0); }
  explicit OccupancyMap(std::size_t expected) { reset(expected); }

  void reset(std::size_t expected) {
    std::size_t cap = 64;
    while (cap < expected / 2) cap <<= 1;
    table_.assign(cap, TableSlot{});
    table_mask_ = cap - 1;
    table_shift_ = 64 - static_cast<unsigned>(std::countr_zero(cap));
    table_used_ = 0;
    patches_.clear();
    free_.clear();
    size_ = 0;
    last_key_ = kNoPatch;
  }

  std::int32_t find(std::int32_t x, std::int32_t y) const {
    const std::int32_t p = find_patch(patch_key(x, y));
    if (p < 0) return kAbsent;
    return patches_[static_cast<std::size_t>(p)].cells[cell(x, y)];
  }

  /// Inserts or overwrites.
  void insert(std::int32_t x, std::int32_t y, std::int32_t value) {
    const std::uint64_t key = patch_key(x, y);
    std::int32_t p = find_patch(key);
    if (p < 0) p = add_patch(key);
    Patch& patch = patches_[static_cast<std::size_t>(p)];
    std::int32_t& c = patch.cells[cell(x, y)];
    if (c == kAbsent) {
      ++patch.count;
      ++size_;
    }
    c = value;
  }

  void erase(std::int32_t x, std::int32_t y) {
    const std::uint64_t key = patch_key(x, y);
    const std::int32_t p = find_patch(key);
    if (p < 0) return;
    Patch& patch = patches_[static_cast<std::size_t>(p)];
    std::int32_t& c = patch.cells[cell(x, y)];
    if (c == kAbsent) return;
    c = kAbsent;
    --size_;
    if (--patch.count == 0) remove_patch(key, p);
  }

  std::size_t size() const { return size_; }

 private:
  static constexpr std::uint64_t kNoPatch = ~std::uint64_t{0};

  struct Patch {
    std::array<std::int32_t, 64> cells;
    std::int32_t count = 0;
  };

  struct TableSlot {
    std::uint64_t key = kNoPatch;
    std::int32_t patch = -1;
  };

  static std::uint64_t patch_key(std::int32_t x, std::int32_t y) {
    return (static_cast<std::uint64_t>(static_cast<std::uint32_t>(x >> 3)) << 32) |
           static_cast<std::uint32_t>(y >> 3);
  }

  static std::size_t cell(std::int32_t x, std::int32_t y) {
    return (static_cast<std::size_t>(x & 7) << 3) | static_cast<std::size_t>(y & 7);
  }

  std::size_t home(std::uint64_t key) const {
    return static_cast<std::size_t>((key * 0x9e3779b97f4a7c15ULL) >> table_shift_);
  }

  std::int32_t find_patch(std::uint64_t key) const {
    if (key == last_key_) return last_patch_;
    std::size_t i = home(key);
    while (true) {
      const TableSlot& s = table_[i];
      if (s.key == key) {
        last_key_ = key;
        last_patch_ = s.patch;
        return s.patch;
      }
      if (s.key == kNoPatch) return -1;
      i = (i + 1) & table_mask_;
    }
  }

  std::int32_t add_patch(std::uint64_t key) {
    if (2 * (table_used_ + 1) > table_.size()) grow();
    std::int32_t p;
    if (!free_.empty()) {
      p = free_.back();
      free_.pop_back();
    } else {
      p = static_cast<std::int32_t>(patches_.size());
      patches_.emplace_back();
    }
    Patch& patch = patches_[static_cast<std::size_t>(p)];
    patch.cells.fill(kAbsent);
    patch.count = 0;
    place(key, p);
    ++table_used_;
    return p;
  }

  void place(std::uint64_t key, std::int32_t p) {
    std::size_t i = home(key);
    while (table_[i].key != kNoPatch) i = (i + 1) & table_mask_;
    table_[i] = {key, p};
  }

  void remove_patch(std::uint64_t key, std::int32_t p) {
    free_.push_back(p);
    if (last_key_ == key) last_key_ = kNoPatch;
    std::size_t i = home(key);
    while (table_[i].key != key) i = (i + 1) & table_mask_;
    // Backward-shift deletion keeps probe runs contiguous.
    std::size_t hole = i;
    std::size_t j = i;
    while (true) {
      j = (j + 1) & table_mask_;
      if (table_[j].key == kNoPatch) break;
      const std::size_t h = home(table_[j].key);
      const bool movable = (hole <= j) ? (h <= hole || h > j) : (h <= hole && h > j);
      if (movable) {
        table_[hole] = table_[j];
        hole = j;
      }
    }
    table_[hole] = TableSlot{};
    --table_used_;
  }

  void grow() {
    std::vector<TableSlot> old = std::move(table_);
    table_.assign(old.size() * 2, TableSlot{});
    table_mask_ = table_.size() - 1;
    table_shift_ -= 1;
    for (const auto& s : old) {
      if (s.key != kNoPatch) place(s.key, s.patch);
    }
  }

  std::vector<TableSlot> table_;
  std::size_t table_mask_ = 0;
  unsigned table_shift_ = 58;
  std::size_t table_used_ = 0;
  std::vector<Patch> patches_;
  std::vector<std::int32_t> free_;
  std::size_t size_ = 0;
  mutable std::uint64_t last_key_ = kNoPatch;
  mutable std::int32_t last_patch_ = -1;
};

}  // namespace hsaw::detail
