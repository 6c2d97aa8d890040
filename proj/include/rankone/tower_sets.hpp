#pragma once

#include <cstddef>
#include <variant>
#include <vector>

#include "rankone/construction.hpp"

namespace rankone {

/// Default bound on materialized ranges / enumerated indices.
inline constexpr std::size_t kDefaultCardinalityCap = 10'000'000;

/// The level T^l C_j.
struct LevelRef {
  int stage = 1;
  Index level = 0;
  friend bool operator==(const LevelRef&, const LevelRef&) = default;
};

/// Spacer mass added when stage `birth_stage` was built.
struct Spacer {
  int birth_stage = 0;
  friend bool operator==(const Spacer&, const Spacer&) = default;
};

using Location = std::variant<LevelRef, Spacer>;

/// Half-open run of level indices [lo, hi).
struct LevelRange {
  Index lo = 0;
  Index hi = 0;
  Index size() const { return hi - lo; }
  friend bool operator==(const LevelRange&, const LevelRange&) = default;
};

/// A union of levels of a single stage, kept as sorted disjoint non-adjacent
/// ranges so that equal sets compare equal.
class LevelSet {
 public:
  LevelSet() = default;
  LevelSet(int stage, std::vector<LevelRange> ranges);

  static LevelSet empty(int stage) { return LevelSet(stage, {}); }
  static LevelSet single(int stage, Index level) { return LevelSet(stage, {{level, level + 1}}); }
  static LevelSet interval(int stage, Index lo, Index hi) { return LevelSet(stage, {{lo, hi}}); }
  static LevelSet from_indices(int stage, std::vector<Index> indices);
  static LevelSet full_tower(const StageTable& table, int stage);

  int stage() const { return stage_; }
  const std::vector<LevelRange>& ranges() const { return ranges_; }
  bool is_empty() const { return ranges_.empty(); }
  Index cardinality() const;
  bool contains(Index level) const;
  /// k-th smallest index, 0 <= k < cardinality().
  Index nth(Index k) const;
  std::vector<Index> indices(std::size_t cap = kDefaultCardinalityCap) const;

  /// Throws StageOutOfRange if the stage is not materialized or an index is >= h_j.
  void validate(const StageTable& table) const;

  friend bool operator==(const LevelSet&, const LevelSet&) = default;

 private:
  int stage_ = 1;
  std::vector<LevelRange> ranges_;
};

/// Stage-`target` levels whose union is the given level.
LevelSet refine_level(const StageTable& table, LevelRef level, int target,
                      std::size_t cap = kDefaultCardinalityCap);

LevelSet refine(const StageTable& table, const LevelSet& set, int target,
                std::size_t cap = kDefaultCardinalityCap);

/// The stage-`ancestor` level containing level x of stage `stage`, or the
/// spacer it was born in. Descends one stage at a time with a binary search
/// over the column offsets.
Location locate(const StageTable& table, int stage, Index x, int ancestor);

Rational measure(const StageTable& table, const LevelSet& set);

enum class SetOp { unite, intersect, subtract };

/// Both operands are refined to the deeper of the two stages first.
LevelSet set_algebra(const StageTable& table, const LevelSet& a, const LevelSet& b, SetOp op,
                     std::size_t cap = kDefaultCardinalityCap);

}  // namespace rankone
