#include "rankone/construction.hpp"

#include <algorithm>
#include <limits>
#include <string>

namespace rankone {

namespace {

constexpr Index kIndexLimit = Index{1} << 62;

Index checked_add(Index a, Index b) {
  if (a > kIndexLimit - std::min(b, kIndexLimit)) {
    throw Error(Errc::invalid_params, "tower height overflows 64-bit indices");
  }
  return a + b;
}

}  // namespace

std::optional<Index> ConstructionParams::cut_count(int j) const {
  if (j < 1) return std::nullopt;
  const auto k = static_cast<std::size_t>(j - 1);
  if (cuts) {
    if (k < cuts->size()) return (*cuts)[k];
    return std::nullopt;
  }
  if (r_prime) {
    if (k < r_prime->size()) return static_cast<Index>(j) * (*r_prime)[k];
    return std::nullopt;
  }
  return static_cast<Index>(j) * static_cast<Index>(j + 1);
}

std::vector<Index> paper_preset_spacers(int j, Index height, Index cuts) {
  std::vector<Index> spacers(cuts, 0);
  if (j % 2 == 1) return spacers;
  if (cuts % 2 != 0) {
    throw Error(Errc::odd_cut_count,
                "even stage " + std::to_string(j) + " has odd cut count " + std::to_string(cuts));
  }
  std::fill(spacers.begin() + static_cast<std::ptrdiff_t>(cuts / 2), spacers.end(), height);
  return spacers;
}

Index Stage::spacer_total() const {
  Index total = 0;
  for (Index s : spacers) total += s;
  return total;
}

StageTable::StageTable(ConstructionParams params, std::vector<Stage> stages)
    : params_(std::move(params)), stages_(std::move(stages)) {}

const Stage& StageTable::stage(int j) const {
  if (j < 1 || j > j_max()) {
    throw Error(Errc::stage_out_of_range,
                "stage " + std::to_string(j) + " outside 1.." + std::to_string(j_max()));
  }
  return stages_[static_cast<std::size_t>(j - 1)];
}

std::vector<Index> StageTable::rigid_times() const {
  std::vector<Index> out;
  for (const auto& s : stages_)
    if (s.index % 2 == 1) out.push_back(s.height);
  return out;
}

std::vector<Index> StageTable::half_times() const {
  std::vector<Index> out;
  for (const auto& s : stages_)
    if (s.index % 2 == 0) out.push_back(s.height);
  return out;
}

std::size_t StageTable::copy_count(int j, int J) const {
  stage(j);
  stage(J);
  if (J < j) throw Error(Errc::stage_out_of_range, "target stage above source stage");
  std::size_t count = 1;
  for (int k = j; k < J; ++k) {
    const Index r = stage(k).cuts;
    if (count > std::numeric_limits<std::size_t>::max() / r) return std::numeric_limits<std::size_t>::max();
    count *= r;
  }
  return count;
}

std::vector<Index> StageTable::copy_offsets(int j, int J, std::size_t cap) const {
  const std::size_t count = copy_count(j, J);
  if (count > cap) {
    throw Error(Errc::cardinality_cap, std::to_string(count) + " copies of stage " + std::to_string(j) +
                                           " in stage " + std::to_string(J) + " exceed cap " +
                                           std::to_string(cap));
  }
  std::vector<Index> current{0};
  for (int k = j; k < J; ++k) {
    const Stage& s = stage(k);
    std::vector<Index> next;
    next.reserve(current.size() * s.cuts);
    for (Index o : s.offsets)
      for (Index p : current) next.push_back(o + p);
    current = std::move(next);
  }
  return current;
}

std::optional<int> StageTable::first_stage_above(Index n, int from) const {
  for (int k = std::max(from, 1); k <= j_max(); ++k)
    if (stage(k).height > n) return k;
  return std::nullopt;
}

StageTable build_stages(const ConstructionParams& params) {
  if (params.h1 < 1) throw Error(Errc::invalid_params, "h1 must be >= 1");
  if (params.j_max < 1) throw Error(Errc::invalid_params, "j_max must be >= 1");
  if (params.base_width <= 0) throw Error(Errc::invalid_params, "base_width must be positive");

  std::vector<Stage> stages;
  stages.reserve(static_cast<std::size_t>(params.j_max));
  Index height = params.h1;
  Rational width = params.base_width;

  for (int j = 1; j <= params.j_max; ++j) {
    Stage s;
    s.index = j;
    s.height = height;
    s.width = width;
    s.measure = width * make_rational(height);

    const bool last = j == params.j_max;
    std::optional<Index> r = params.cut_count(j);
    if (!r) {
      if (!last) throw Error(Errc::invalid_params, "no cut count r_" + std::to_string(j));
    } else {
      if (*r < 2) {
        throw Error(Errc::invalid_params, "r_" + std::to_string(j) + " = " + std::to_string(*r) + " < 2");
      }
      std::optional<std::vector<Index>> spacers;
      if (params.spacer_rule == SpacerRule::paper_preset) {
        spacers = paper_preset_spacers(j, height, *r);
      } else if (static_cast<std::size_t>(j) <= params.explicit_spacers.size()) {
        spacers = params.explicit_spacers[static_cast<std::size_t>(j - 1)];
        if (spacers->size() != *r) {
          throw Error(Errc::invalid_params, "spacer vector for stage " + std::to_string(j) + " has length " +
                                                std::to_string(spacers->size()) + ", expected " +
                                                std::to_string(*r));
        }
      } else if (!last) {
        throw Error(Errc::invalid_params, "no spacer vector for stage " + std::to_string(j));
      }

      if (spacers) {
        s.cuts = *r;
        s.spacers = std::move(*spacers);
        s.offsets.resize(s.cuts);
        Index offset = 0;
        for (std::size_t i = 0; i < s.cuts; ++i) {
          s.offsets[i] = offset;
          offset = checked_add(checked_add(offset, height), s.spacers[i]);
        }
        // offset now equals o_j(r_j) + h_j + s_j(r_j) = h_{j+1}.
        height = offset;
        width = width / make_rational(s.cuts);
      }
    }
    stages.push_back(std::move(s));
  }
  return StageTable(params, std::move(stages));
}

DivisibilityReport check_divisibility(const StageTable& table, Index n) {
  if (n < 1) throw Error(Errc::usage_error, "divisibility modulus must be >= 1");
  DivisibilityReport report;
  report.n = n;
  report.first_checked_stage = static_cast<int>(std::min<Index>(n + 1, static_cast<Index>(table.j_max()) + 1));

  std::vector<bool> ok(static_cast<std::size_t>(table.j_max()) + 1, false);
  for (const Stage& s : table) {
    StageDivisibility entry{s.index, s.height % n == 0, true};
    for (Index sp : s.spacers) entry.spacers_ok = entry.spacers_ok && sp % n == 0;
    ok[static_cast<std::size_t>(s.index)] = entry.pass();
    if (static_cast<Index>(s.index) > n) {
      report.stages.push_back(entry);
      report.pass = report.pass && entry.pass();
    }
  }
  for (int j = table.j_max(); j >= 1 && ok[static_cast<std::size_t>(j)]; --j) report.stable_from = j;
  return report;
}

}  // namespace rankone
