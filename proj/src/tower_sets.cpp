#include "rankone/tower_sets.hpp"

#include <algorithm>
#include <string>

namespace rankone {

namespace {

std::vector<LevelRange> normalize(std::vector<LevelRange> ranges) {
  std::erase_if(ranges, [](const LevelRange& r) { return r.hi <= r.lo; });
  std::sort(ranges.begin(), ranges.end(), [](const LevelRange& a, const LevelRange& b) { return a.lo < b.lo; });
  std::vector<LevelRange> out;
  out.reserve(ranges.size());
  for (const auto& r : ranges) {
    if (!out.empty() && r.lo <= out.back().hi) {
      out.back().hi = std::max(out.back().hi, r.hi);
    } else {
      out.push_back(r);
    }
  }
  return out;
}

}  // namespace

LevelSet::LevelSet(int stage, std::vector<LevelRange> ranges) : stage_(stage), ranges_(normalize(std::move(ranges))) {}

LevelSet LevelSet::from_indices(int stage, std::vector<Index> indices) {
  std::vector<LevelRange> ranges;
  ranges.reserve(indices.size());
  for (Index x : indices) ranges.push_back({x, x + 1});
  return LevelSet(stage, std::move(ranges));
}

LevelSet LevelSet::full_tower(const StageTable& table, int stage) {
  return LevelSet(stage, {{0, table.height(stage)}});
}

Index LevelSet::cardinality() const {
  Index total = 0;
  for (const auto& r : ranges_) total += r.size();
  return total;
}

bool LevelSet::contains(Index level) const {
  auto it = std::upper_bound(ranges_.begin(), ranges_.end(), level,
                             [](Index x, const LevelRange& r) { return x < r.lo; });
  if (it == ranges_.begin()) return false;
  --it;
  return level < it->hi;
}

Index LevelSet::nth(Index k) const {
  for (const auto& r : ranges_) {
    if (k < r.size()) return r.lo + k;
    k -= r.size();
  }
  throw Error(Errc::usage_error, "LevelSet::nth index past cardinality");
}

std::vector<Index> LevelSet::indices(std::size_t cap) const {
  if (cardinality() > cap) {
    throw Error(Errc::cardinality_cap, "level set of " + std::to_string(cardinality()) + " levels exceeds cap");
  }
  std::vector<Index> out;
  out.reserve(cardinality());
  for (const auto& r : ranges_)
    for (Index x = r.lo; x < r.hi; ++x) out.push_back(x);
  return out;
}

void LevelSet::validate(const StageTable& table) const {
  const Index h = table.height(stage_);
  if (!ranges_.empty() && ranges_.back().hi > h) {
    throw Error(Errc::stage_out_of_range, "level " + std::to_string(ranges_.back().hi - 1) +
                                              " outside stage " + std::to_string(stage_) + " of height " +
                                              std::to_string(h));
  }
}

LevelSet refine_level(const StageTable& table, LevelRef level, int target, std::size_t cap) {
  return refine(table, LevelSet::single(level.stage, level.level), target, cap);
}

LevelSet refine(const StageTable& table, const LevelSet& set, int target, std::size_t cap) {
  set.validate(table);
  table.stage(target);
  if (target < set.stage()) {
    throw Error(Errc::stage_out_of_range, "cannot refine stage " + std::to_string(set.stage()) +
                                              " to shallower stage " + std::to_string(target));
  }
  if (target == set.stage()) return set;
  const std::size_t copies = table.copy_count(set.stage(), target);
  if (set.ranges().size() != 0 && copies > cap / set.ranges().size()) {
    throw Error(Errc::cardinality_cap, "refinement to stage " + std::to_string(target) + " exceeds cap");
  }
  const auto offsets = table.copy_offsets(set.stage(), target, cap);
  std::vector<LevelRange> out;
  out.reserve(offsets.size() * set.ranges().size());
  // Offsets are sorted and copies are disjoint, so the output is already ordered.
  for (Index p : offsets)
    for (const auto& r : set.ranges()) out.push_back({p + r.lo, p + r.hi});
  return LevelSet(target, std::move(out));
}

Location locate(const StageTable& table, int stage, Index x, int ancestor) {
  if (x >= table.height(stage)) {
    throw Error(Errc::stage_out_of_range,
                "index " + std::to_string(x) + " outside stage " + std::to_string(stage));
  }
  table.stage(ancestor);
  if (ancestor > stage) {
    throw Error(Errc::stage_out_of_range, "ancestor stage " + std::to_string(ancestor) + " deeper than " +
                                              std::to_string(stage));
  }
  for (int k = stage - 1; k >= ancestor; --k) {
    const Stage& s = table.stage(k);
    auto it = std::upper_bound(s.offsets.begin(), s.offsets.end(), x);
    --it;  // offsets[0] == 0 <= x
    const Index rel = x - *it;
    if (rel >= s.height) return Spacer{k + 1};
    x = rel;
  }
  return LevelRef{ancestor, x};
}

Rational measure(const StageTable& table, const LevelSet& set) {
  set.validate(table);
  return make_rational(set.cardinality()) * table.width(set.stage());
}

LevelSet set_algebra(const StageTable& table, const LevelSet& a, const LevelSet& b, SetOp op, std::size_t cap) {
  const int stage = std::max(a.stage(), b.stage());
  const LevelSet ra = refine(table, a, stage, cap);
  const LevelSet rb = refine(table, b, stage, cap);

  std::vector<LevelRange> out;
  switch (op) {
    case SetOp::unite: {
      out = ra.ranges();
      out.insert(out.end(), rb.ranges().begin(), rb.ranges().end());
      break;
    }
    case SetOp::intersect: {
      auto i = ra.ranges().begin();
      auto j = rb.ranges().begin();
      while (i != ra.ranges().end() && j != rb.ranges().end()) {
        const Index lo = std::max(i->lo, j->lo);
        const Index hi = std::min(i->hi, j->hi);
        if (lo < hi) out.push_back({lo, hi});
        if (i->hi < j->hi) ++i; else ++j;
      }
      break;
    }
    case SetOp::subtract: {
      auto j = rb.ranges().begin();
      for (const auto& r : ra.ranges()) {
        Index lo = r.lo;
        while (j != rb.ranges().end() && j->hi <= lo) ++j;
        for (auto k = j; k != rb.ranges().end() && k->lo < r.hi; ++k) {
          if (k->lo > lo) out.push_back({lo, k->lo});
          lo = std::max(lo, k->hi);
        }
        if (lo < r.hi) out.push_back({lo, r.hi});
      }
      break;
    }
  }
  return LevelSet(stage, std::move(out));
}

}  // namespace rankone
