#pragma once

#include <optional>
#include <vector>

#include "rankone/error.hpp"
#include "rankone/rational.hpp"

namespace rankone {

enum class SpacerRule { paper_preset, explicit_list };

/// Parameters of the cutting-and-stacking construction.
///
/// Stage j is cut into r_j = j * r'_j columns. With no explicit r'_j list the
/// default rule r'_j = j + 1 is used. `cuts`, when set, gives r_j directly and
/// takes precedence over `r_prime`.
struct ConstructionParams {
  Index h1 = 1;
  int j_max = 6;
  std::optional<std::vector<Index>> r_prime;
  std::optional<std::vector<Index>> cuts;
  SpacerRule spacer_rule = SpacerRule::paper_preset;
  std::vector<std::vector<Index>> explicit_spacers;
  Rational base_width{1};

  /// r_j for stage j (1-based), or nullopt when the rule does not cover j.
  std::optional<Index> cut_count(int j) const;
};

/// Spacer vector of the preset: zeros on odd stages; on even stages the first
/// half of the columns gets no spacers and the second half gets h_j each.
std::vector<Index> paper_preset_spacers(int j, Index height, Index cuts);

struct Stage {
  int index = 0;
  Index height = 0;
  Rational width;
  Rational measure;
  // Cut data; empty for the last stage when the rule does not reach it.
  Index cuts = 0;
  std::vector<Index> spacers;
  std::vector<Index> offsets;

  bool has_cut_data() const { return cuts != 0; }
  Index spacer_total() const;
};

/// Immutable per-stage data of a built construction.
class StageTable {
 public:
  StageTable(ConstructionParams params, std::vector<Stage> stages);

  int j_max() const { return static_cast<int>(stages_.size()); }
  const ConstructionParams& params() const { return params_; }

  /// 1-based; throws StageOutOfRange.
  const Stage& stage(int j) const;
  Index height(int j) const { return stage(j).height; }
  const Rational& width(int j) const { return stage(j).width; }
  const Rational& measure(int j) const { return stage(j).measure; }

  /// Heights of odd stages (rigidity powers) and even stages (half-limit powers).
  std::vector<Index> rigid_times() const;
  std::vector<Index> half_times() const;

  /// Sorted positions at which the stage-j tower is copied inside the stage-J
  /// tower: every sum o_j(i_j) + ... + o_{J-1}(i_{J-1}). Size is r_j ... r_{J-1}.
  std::vector<Index> copy_offsets(int j, int J, std::size_t cap) const;
  /// Number of copies without materializing them; saturates at SIZE_MAX.
  std::size_t copy_count(int j, int J) const;

  /// Least stage k in [from, j_max] with h_k > n, or nullopt.
  std::optional<int> first_stage_above(Index n, int from = 1) const;

  std::vector<Stage>::const_iterator begin() const { return stages_.begin(); }
  std::vector<Stage>::const_iterator end() const { return stages_.end(); }

 private:
  ConstructionParams params_;
  std::vector<Stage> stages_;
};

/// Throws InvalidParams (r_j < 2, spacer vector length mismatch, overflow) or
/// OddCutCount (preset spacers on an even stage with odd r_j).
StageTable build_stages(const ConstructionParams& params);

struct StageDivisibility {
  int stage = 0;
  bool height_ok = false;
  bool spacers_ok = false;
  bool pass() const { return height_ok && spacers_ok; }
};

struct DivisibilityReport {
  Index n = 1;
  int first_checked_stage = 0;
  std::vector<StageDivisibility> stages;
  /// Least stage from which every later materialized stage passes.
  std::optional<int> stable_from;
  bool pass = true;
};

/// Checks h_j = 0 and s_j(i) = 0 (mod n) for every stage n < j <= j_max.
DivisibilityReport check_divisibility(const StageTable& table, Index n);

}  // namespace rankone
