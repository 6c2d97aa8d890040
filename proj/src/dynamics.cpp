#include "rankone/dynamics.hpp"

#include <algorithm>
#include <map>
#include <numeric>
#include <string>

namespace rankone {

namespace {

bool located_in(const StageTable& table, int stage, Index x, const LevelSet& target) {
  const Location loc = locate(table, stage, x, target.stage());
  const auto* level = std::get_if<LevelRef>(&loc);
  return level != nullptr && target.contains(level->level);
}

Rational abs_diff(const Rational& a, const Rational& b) { return a > b ? Rational(a - b) : Rational(b - a); }

class DisjointSets {
 public:
  explicit DisjointSets(std::size_t n) : parent_(n) { std::iota(parent_.begin(), parent_.end(), std::size_t{0}); }

  std::size_t find(std::size_t a) {
    while (parent_[a] != a) {
      parent_[a] = parent_[parent_[a]];
      a = parent_[a];
    }
    return a;
  }

  void unite(std::size_t a, std::size_t b) {
    a = find(a);
    b = find(b);
    if (a == b) return;
    if (a > b) std::swap(a, b);
    parent_[b] = a;  // root is the smallest member
  }

 private:
  std::vector<std::size_t> parent_;
};

}  // namespace

std::optional<Index> image_index(const StageTable& table, int stage, Index x, Index n) {
  const Index h = table.height(stage);
  if (x >= h) throw Error(Errc::stage_out_of_range, "index " + std::to_string(x) + " outside stage");
  if (n >= h - x) return std::nullopt;
  return x + n;
}

CorrBound correlation(const StageTable& table, const LevelSet& a, const LevelSet& b, std::int64_t n, int depth,
                      std::size_t cap) {
  if (n < 0) return correlation(table, b, a, -n, depth, cap);
  a.validate(table);
  b.validate(table);
  const Index power = static_cast<Index>(n);
  const Index top = table.height(depth);
  if (a.stage() > depth || b.stage() > depth) {
    throw Error(Errc::stage_out_of_range, "sets live below depth " + std::to_string(depth));
  }
  if (power >= top) {
    throw Error(Errc::depth_too_shallow, "power " + std::to_string(power) + " >= h_" + std::to_string(depth) +
                                             " = " + std::to_string(top));
  }

  // Work at the coarsest stage c at which x + n either stays inside the copy of
  // the stage-c tower (and then lands at the same relative level in every copy)
  // or leaves it. Only the latter need a per-copy walk.
  const int base = std::max({a.stage(), b.stage(), *table.first_stage_above(power, 1)});
  const int c = std::min(base, depth);
  const LevelSet ac = refine(table, a, c, cap);
  const Index hc = table.height(c);
  const Index card = ac.cardinality();
  if (card > cap) throw Error(Errc::cardinality_cap, "refined set exceeds cap");

  Index top_count = 0;
  if (power > 0) {
    const Index window_lo = hc > power ? hc - power : 0;
    const LevelSet window = LevelSet::interval(c, window_lo, hc);
    top_count = set_algebra(table, ac, window, SetOp::intersect, cap).cardinality();
  }
  const std::size_t copies = table.copy_count(c, depth);
  if (top_count != 0 && copies > (cap - std::min<Index>(card, cap)) / top_count) {
    throw Error(Errc::cardinality_cap, "correlation work at depth " + std::to_string(depth) + " exceeds cap");
  }
  const std::vector<Index> offsets = top_count == 0 ? std::vector<Index>{} : table.copy_offsets(c, depth, cap);

  Index interior_hits = 0;
  Index copy_hits = 0;
  Index unresolved = 0;
  for (const auto& r : ac.ranges()) {
    for (Index x = r.lo; x < r.hi; ++x) {
      if (x + power < hc) {
        if (located_in(table, c, x + power, b)) ++interior_hits;
        continue;
      }
      for (Index p : offsets) {
        const Index y = p + x + power;
        if (y >= top) {
          ++unresolved;
        } else if (located_in(table, depth, y, b)) {
          ++copy_hits;
        }
      }
    }
  }

  CorrBound out;
  out.depth = depth;
  out.lo = make_rational(interior_hits) * table.width(c) + make_rational(copy_hits) * table.width(depth);
  out.unresolved = make_rational(unresolved) * table.width(depth);
  out.hi = out.lo + out.unresolved;
  return out;
}

Rational default_tolerance(const StageTable& table, const LevelSet& a) {
  return measure(table, a) / Rational(1'000'000);
}

int default_depth_for(const StageTable& table, Index n, int min_stage) {
  const auto first = table.first_stage_above(n, 1);
  if (!first) {
    throw Error(Errc::depth_too_shallow,
                "power " + std::to_string(n) + " exceeds every materialized height; raise j_max");
  }
  return std::min(std::max(*first, min_stage) + 2, table.j_max());
}

CorrBound correlation_auto(const StageTable& table, const LevelSet& a, const LevelSet& b, std::int64_t n,
                           const Rational& tolerance, std::optional<int> start_depth, std::size_t cap) {
  const Index power = static_cast<Index>(n < 0 ? -n : n);
  int depth = start_depth.value_or(0);
  if (!start_depth) {
    const auto first = table.first_stage_above(power, std::max(a.stage(), b.stage()));
    if (!first) throw Error(Errc::depth_too_shallow, "power exceeds every materialized height");
    depth = *first;
  }
  CorrBound best = correlation(table, a, b, n, depth, cap);
  while (best.unresolved > tolerance && depth < table.j_max()) {
    try {
      best = correlation(table, a, b, n, depth + 1, cap);
    } catch (const Error& e) {
      if (e.code() == Errc::cardinality_cap) break;
      throw;
    }
    ++depth;
  }
  return best;
}

RigidityReport rigidity_report(const StageTable& table, int stage, const LevelSet& a, int depth) {
  const Stage& s = table.stage(stage);
  if (stage % 2 == 0) throw Error(Errc::usage_error, "rigidity is checked on odd stages");
  if (a.stage() > stage) throw Error(Errc::usage_error, "set must be a union of levels of stage <= j");
  if (!s.has_cut_data()) throw Error(Errc::stage_out_of_range, "stage has no cut data");

  RigidityReport rep;
  rep.stage = stage;
  rep.power = s.height;
  rep.corr = correlation(table, a, a, static_cast<std::int64_t>(s.height), depth);
  rep.set_measure = measure(table, a);
  rep.deficit_bound = rep.set_measure - rep.corr.lo;
  rep.allowed = rep.set_measure / make_rational(s.cuts) + rep.corr.unresolved;
  rep.pass = rep.deficit_bound <= rep.allowed;
  return rep;
}

HalfLimitReport half_limit_report(const StageTable& table, int stage, const LevelSet& a, const LevelSet& b,
                                  int depth) {
  const Stage& s = table.stage(stage);
  if (stage % 2 == 1) throw Error(Errc::usage_error, "the half limit is checked on even stages");
  if (a.stage() > stage || b.stage() > stage) {
    throw Error(Errc::usage_error, "sets must be unions of levels of stage <= j");
  }
  if (!s.has_cut_data()) throw Error(Errc::stage_out_of_range, "stage has no cut data");

  HalfLimitReport rep;
  rep.stage = stage;
  rep.power = s.height;
  rep.corr = correlation(table, a, b, static_cast<std::int64_t>(s.height), depth);
  rep.target = measure(table, set_algebra(table, a, b, SetOp::intersect)) / 2;
  rep.deviation_bound = std::max(abs_diff(rep.corr.lo, rep.target), abs_diff(rep.corr.hi, rep.target));
  rep.allowed = (measure(table, a) + measure(table, b)) / make_rational(s.cuts) + rep.corr.unresolved;
  rep.pass = rep.deviation_bound <= rep.allowed;
  return rep;
}

std::vector<LevelSet> residue_partition(const StageTable& table, Index n, int stage) {
  if (n < 1) throw Error(Errc::usage_error, "n must be >= 1");
  const Index h = table.height(stage);
  if (h % n != 0) {
    throw Error(Errc::divisibility_failed,
                "h_" + std::to_string(stage) + " = " + std::to_string(h) + " is not a multiple of " +
                    std::to_string(n));
  }
  std::vector<LevelSet> out;
  out.reserve(n);
  for (Index c = 0; c < n; ++c) {
    std::vector<LevelRange> ranges;
    ranges.reserve(h / n);
    for (Index l = c; l < h; l += n) ranges.push_back({l, l + 1});
    out.emplace_back(stage, std::move(ranges));
  }
  return out;
}

ComponentReport ergodic_components(const StageTable& table, Index n, int stage, int depth) {
  if (n < 1) throw Error(Errc::usage_error, "n must be >= 1");
  if (static_cast<Index>(stage) <= n) {
    throw Error(Errc::usage_error, "analysis stage must exceed n");
  }
  table.stage(stage);
  table.stage(depth);
  if (depth <= stage) throw Error(Errc::depth_too_shallow, "depth must exceed the analysis stage");
  const DivisibilityReport div = check_divisibility(table, n);
  if (!div.pass) {
    throw Error(Errc::divisibility_failed, "spacers or heights are not multiples of " + std::to_string(n));
  }
  if (n >= table.height(depth)) throw Error(Errc::depth_too_shallow, "n >= h_depth");

  const Index h = table.height(stage);
  DisjointSets sets(h);
  // Below the top window the image of every copy of level l is level l + n.
  for (Index l = 0; l + n < h; ++l) sets.unite(l, l + n);
  if (n > 0) {
    const auto offsets = table.copy_offsets(stage, depth, kDefaultCardinalityCap);
    const Index top = table.height(depth);
    for (Index l = (h > n ? h - n : 0); l < h; ++l) {
      for (Index p : offsets) {
        const Index y = p + l + n;
        if (y >= top) continue;
        const Location loc = locate(table, depth, y, stage);
        if (const auto* level = std::get_if<LevelRef>(&loc)) sets.unite(l, level->level);
      }
    }
  }

  std::map<std::size_t, std::vector<Index>> groups;
  for (Index l = 0; l < h; ++l) groups[sets.find(l)].push_back(l);

  ComponentReport rep;
  rep.n = n;
  rep.stage = stage;
  rep.depth = depth;
  rep.component_count = groups.size();
  for (auto& [root, members] : groups) rep.partition.push_back(LevelSet::from_indices(stage, std::move(members)));

  for (int k = stage; k <= table.j_max(); ++k) {
    if (table.height(k) % n == 0) {
      rep.residue_stage = k;
      break;
    }
  }
  if (rep.residue_stage && rep.component_count == n) {
    // Residues (mod n) of the copy positions of stage j inside stage K; a level
    // l then refines into the classes {(q + l) mod n}.
    std::vector<bool> copy_residue(n, false);
    for (Index p : table.copy_offsets(stage, *rep.residue_stage, kDefaultCardinalityCap)) copy_residue[p % n] = true;
    std::vector<Index> residues;
    for (Index q = 0; q < n; ++q)
      if (copy_residue[q]) residues.push_back(q);

    std::vector<bool> used(n, false);
    bool match = residues.size() == 1;
    for (const LevelSet& part : rep.partition) {
      if (!match) break;
      const Index cls = (residues[0] + part.ranges().front().lo) % n;
      for (const auto& r : part.ranges()) {
        for (Index l = r.lo; l < r.hi && match; ++l) match = (residues[0] + l) % n == cls;
      }
      match = match && !used[cls];
      used[cls] = true;
    }
    rep.residue_match = match;
  }
  return rep;
}

std::vector<CorrBound> decay_scan(const StageTable& table, const LevelSet& a, const LevelSet& b,
                                  const std::vector<Index>& powers, std::optional<int> depth, std::size_t cap) {
  std::vector<CorrBound> out;
  out.reserve(powers.size());
  const int min_stage = std::max(a.stage(), b.stage());
  for (Index n : powers) {
    const int d = depth.value_or(default_depth_for(table, n, min_stage));
    out.push_back(correlation(table, a, b, static_cast<std::int64_t>(n), d, cap));
  }
  return out;
}

}  // namespace rankone
