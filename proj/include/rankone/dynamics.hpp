#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "rankone/tower_sets.hpp"

namespace rankone {

/// Certified interval for mu(T^n A ∩ B).
struct CorrBound {
  Rational lo;
  Rational hi;
  int depth = 0;
  Rational unresolved;

  Rational width() const { return hi - lo; }
  Rational midpoint() const { return (lo + hi) / 2; }
  bool contains(const Rational& v) const { return lo <= v && v <= hi; }
  bool contains(const CorrBound& inner) const { return lo <= inner.lo && inner.hi <= hi; }
};

/// x + n when it stays inside the stage-J tower, otherwise nullopt (the orbit
/// has to be followed at a deeper stage).
std::optional<Index> image_index(const StageTable& table, int stage, Index x, Index n);

/// Exact certified bound at a fixed depth. Negative powers use
/// mu(T^n A ∩ B) = mu(A ∩ T^{-n} B). Throws DepthTooShallow when |n| >= h_depth.
CorrBound correlation(const StageTable& table, const LevelSet& a, const LevelSet& b, std::int64_t n, int depth,
                      std::size_t cap = kDefaultCardinalityCap);

/// Deepens from `start_depth` (or the shallowest admissible depth) until the
/// unresolved mass is at most `tolerance`, the last stage is reached, or the cap
/// is hit; returns the tightest interval obtained.
CorrBound correlation_auto(const StageTable& table, const LevelSet& a, const LevelSet& b, std::int64_t n,
                           const Rational& tolerance, std::optional<int> start_depth = std::nullopt,
                           std::size_t cap = kDefaultCardinalityCap);

/// Default tolerance for correlation_auto: 10^-6 mu(A).
Rational default_tolerance(const StageTable& table, const LevelSet& a);

struct RigidityReport {
  int stage = 0;
  Index power = 0;
  CorrBound corr;
  Rational set_measure;
  Rational deficit_bound;  // mu(A) - corr.lo
  Rational allowed;        // mu(A)/r_j + unresolved
  bool pass = false;
};

RigidityReport rigidity_report(const StageTable& table, int stage, const LevelSet& a, int depth);

struct HalfLimitReport {
  int stage = 0;
  Index power = 0;
  CorrBound corr;
  Rational target;           // mu(A ∩ B) / 2
  Rational deviation_bound;  // max(|lo - target|, |hi - target|)
  Rational allowed;          // (mu(A) + mu(B))/r_j + unresolved
  bool pass = false;
};

HalfLimitReport half_limit_report(const StageTable& table, int stage, const LevelSet& a, const LevelSet& b,
                                  int depth);

struct ComponentReport {
  Index n = 1;
  int stage = 0;
  int depth = 0;
  std::size_t component_count = 0;
  std::vector<LevelSet> partition;
  /// Stage at which the residue classes were compared (least K >= stage with h_K = 0 mod n).
  std::optional<int> residue_stage;
  bool residue_match = false;
};

/// Weakly connected components of the graph on stage-j levels with an edge
/// A -> B whenever correlation(A, B, n, depth).lo > 0.
ComponentReport ergodic_components(const StageTable& table, Index n, int stage, int depth);

/// Y_c = {l < h_J : l = c mod n}, c = 0..n-1. Throws DivisibilityFailed unless n | h_J.
std::vector<LevelSet> residue_partition(const StageTable& table, Index n, int stage);

/// One correlation per power. With no fixed depth each power is evaluated at
/// two stages past the first stage taller than it (clamped to j_max).
std::vector<CorrBound> decay_scan(const StageTable& table, const LevelSet& a, const LevelSet& b,
                                  const std::vector<Index>& powers, std::optional<int> depth = std::nullopt,
                                  std::size_t cap = kDefaultCardinalityCap);

/// Depth used by decay_scan and the CLI when none is given.
int default_depth_for(const StageTable& table, Index n, int min_stage);

}  // namespace rankone
