#pragma once

// Test-only brute force: towers are built by literally stacking columns and
// spacer floors, and orbits are read off the stacked floor list. Nothing here
// uses the offsets tables, binary-search descent or copy shortcuts of the
// library. T moves every floor but the top one onto the floor above it.

#include <cstdint>
#include <numeric>
#include <vector>

namespace oracle {

enum class Spacers { preset, none };

struct Recipe {
  std::int64_t h1 = 1;
  std::vector<std::int64_t> cuts;  // r_1, r_2, ...
  Spacers spacers = Spacers::preset;
};

inline Recipe default_recipe(int stages) {
  Recipe r;
  for (int j = 1; j <= stages; ++j) r.cuts.push_back(static_cast<std::int64_t>(j) * (j + 1));
  return r;
}

inline std::vector<std::int64_t> spacer_counts(const Recipe& recipe, int j, std::int64_t height) {
  const std::int64_t r = recipe.cuts[static_cast<std::size_t>(j - 1)];
  std::vector<std::int64_t> s(static_cast<std::size_t>(r), 0);
  if (recipe.spacers == Spacers::preset && j % 2 == 0) {
    for (std::int64_t i = 1; i <= r; ++i)
      if (2 * i > r) s[static_cast<std::size_t>(i - 1)] = height;
  }
  return s;
}

/// Floor labels of the stage-J tower relative to stage j: label[x] is the
/// stage-j level that floor x of stage J lies in, or -1 for a later spacer.
inline std::vector<std::int64_t> labels(const Recipe& recipe, int j, int J) {
  // Height of stage j by stacking from stage 1.
  std::int64_t h = recipe.h1;
  for (int k = 1; k < j; ++k) {
    std::int64_t next = 0;
    for (std::int64_t s : spacer_counts(recipe, k, h)) next += h + s;
    h = next;
  }
  std::vector<std::int64_t> tower(static_cast<std::size_t>(h));
  std::iota(tower.begin(), tower.end(), std::int64_t{0});
  for (int k = j; k < J; ++k) {
    const auto height = static_cast<std::int64_t>(tower.size());
    std::vector<std::int64_t> next;
    for (std::int64_t s : spacer_counts(recipe, k, height)) {
      next.insert(next.end(), tower.begin(), tower.end());
      next.insert(next.end(), static_cast<std::size_t>(s), -1);
    }
    tower = std::move(next);
  }
  return tower;
}

inline std::vector<std::int64_t> heights(const Recipe& recipe, int stages) {
  std::vector<std::int64_t> out;
  std::int64_t h = recipe.h1;
  for (int k = 1; k <= stages; ++k) {
    out.push_back(h);
    if (k == stages) break;
    std::int64_t next = 0;
    for (std::int64_t s : spacer_counts(recipe, k, h)) next += h + s;
    h = next;
  }
  return out;
}

/// Counts of floors x of stage J with label in A, split into those whose
/// image x + n is inside the tower and labelled in B, and those whose image
/// falls off the top.
struct Counts {
  std::int64_t hits = 0;
  std::int64_t unresolved = 0;
};

inline Counts correlate(const std::vector<std::int64_t>& label_a, const std::vector<bool>& in_a,
                        const std::vector<std::int64_t>& label_b, const std::vector<bool>& in_b, std::int64_t n) {
  Counts c;
  const auto top = static_cast<std::int64_t>(label_a.size());
  for (std::int64_t x = 0; x < top; ++x) {
    const std::int64_t la = label_a[static_cast<std::size_t>(x)];
    if (la < 0 || !in_a[static_cast<std::size_t>(la)]) continue;
    const std::int64_t y = x + n;
    if (y >= top) {
      ++c.unresolved;
      continue;
    }
    const std::int64_t lb = label_b[static_cast<std::size_t>(y)];
    if (lb >= 0 && in_b[static_cast<std::size_t>(lb)]) ++c.hits;
  }
  return c;
}

}  // namespace oracle
