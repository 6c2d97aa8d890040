#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <random>
#include <vector>

#include "rankone/dynamics.hpp"

namespace rankone {

/// Counter-based generator: the stream for (seed, replica) is
/// splitmix64(key + counter * gamma), so replicas can be drawn in any order.
class ReplicaRng {
 public:
  using result_type = std::uint64_t;

  ReplicaRng(std::uint64_t seed, std::uint64_t replica)
      : key_(mix(seed ^ mix(replica + 0x632be59bd9b4e019ULL))) {}

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

  result_type operator()() { return mix(key_ + (++counter_) * 0x9e3779b97f4a7c15ULL); }

  /// 53 random bits, the numerator of a dyadic fraction in [0, 1).
  std::uint64_t bits53() { return (*this)() >> 11; }

  static std::uint64_t mix(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

 private:
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
};

/// Arithmetic on the in-level position; specialized for exact and double.
template <class Frac>
struct FracTraits;

template <>
struct FracTraits<Rational> {
  static Rational from_bits53(std::uint64_t k) { return Rational(BigInt(k), BigInt(1) << 53); }
  /// (column, remainder) with frac * r = column + remainder.
  static std::pair<Index, Rational> split(const Rational& frac, Index r) {
    Rational scaled = frac * make_rational(r);
    const Index column = floor_index(scaled);
    return {column, scaled - make_rational(column)};
  }
};

template <>
struct FracTraits<double> {
  static double from_bits53(std::uint64_t k) { return static_cast<double>(k) * 0x1.0p-53; }
  static std::pair<Index, double> split(double frac, Index r) {
    const double scaled = frac * static_cast<double>(r);
    const Index column = std::min<Index>(static_cast<Index>(std::floor(scaled)), r - 1);
    return {column, std::max(0.0, scaled - static_cast<double>(column))};
  }
};

/// A point of the base space: level l of stage J and its relative position
/// inside the level.
template <class Frac>
struct BasicPointCoord {
  int stage = 1;
  Index level = 0;
  Frac frac{};
  friend bool operator==(const BasicPointCoord&, const BasicPointCoord&) = default;
};

template <class Frac>
struct BasicConfiguration {
  LevelSet window;
  std::vector<BasicPointCoord<Frac>> points;
  std::uint64_t seed = 0;
  std::uint64_t replica = 0;
};

using PointCoord = BasicPointCoord<Rational>;
using Configuration = BasicConfiguration<Rational>;
using FastPointCoord = BasicPointCoord<double>;
using FastConfiguration = BasicConfiguration<double>;

template <class Frac>
struct BasicTransportResult {
  BasicConfiguration<Frac> moved;
  /// Points (pushed to max_depth) whose image is still outside the tower.
  std::vector<BasicPointCoord<Frac>> residual;
};

using TransportResult = BasicTransportResult<Rational>;

/// Moves a point one stage down: the column is read off the fraction.
template <class Frac>
void deepen_point(const StageTable& table, BasicPointCoord<Frac>& p) {
  const Stage& s = table.stage(p.stage);
  if (!s.has_cut_data()) throw Error(Errc::stage_out_of_range, "no stage below " + std::to_string(p.stage));
  auto [column, rest] = FracTraits<Frac>::split(p.frac, s.cuts);
  p.level += s.offsets[column];
  p.frac = std::move(rest);
  ++p.stage;
}

/// T^n of one point, or nullopt if it is still unresolved at max_depth (the
/// point itself is then left deepened to max_depth).
template <class Frac>
std::optional<BasicPointCoord<Frac>> transport_point(const StageTable& table, BasicPointCoord<Frac>& p, Index n,
                                                     int max_depth) {
  while (n >= table.height(p.stage) - p.level) {
    if (p.stage >= max_depth) return std::nullopt;
    deepen_point(table, p);
  }
  BasicPointCoord<Frac> out = p;
  out.level += n;
  return out;
}

/// Poisson process with intensity mu on the window: count ~ Poisson(mu(window)),
/// then i.i.d. points uniform on the window. Deterministic in (seed, replica).
template <class Frac = Rational>
BasicConfiguration<Frac> sample_configuration(const StageTable& table, const LevelSet& window, std::uint64_t seed,
                                              std::uint64_t replica = 0) {
  BasicConfiguration<Frac> config{window, {}, seed, replica};
  const Index levels = window.cardinality();
  if (levels == 0) return config;
  ReplicaRng rng(seed, replica);
  const double mean = to_double(measure(table, window));
  std::poisson_distribution<long long> count_dist(mean);
  const auto count = static_cast<std::size_t>(count_dist(rng));
  std::uniform_int_distribution<Index> level_dist(0, levels - 1);
  config.points.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    const Index level = window.nth(level_dist(rng));
    config.points.push_back({window.stage(), level, FracTraits<Frac>::from_bits53(rng.bits53())});
  }
  return config;
}

template <class Frac>
BasicTransportResult<Frac> transport(const StageTable& table, const BasicConfiguration<Frac>& config, std::int64_t n,
                                     int max_depth) {
  if (n < 0) throw Error(Errc::usage_error, "transport takes n >= 0");
  table.stage(max_depth);
  BasicTransportResult<Frac> out;
  out.moved.window = config.window;
  out.moved.seed = config.seed;
  out.moved.replica = config.replica;
  out.moved.points.reserve(config.points.size());
  for (auto p : config.points) {
    if (auto image = transport_point(table, p, static_cast<Index>(n), max_depth)) {
      out.moved.points.push_back(std::move(*image));
    } else {
      out.residual.push_back(std::move(p));
    }
  }
  return out;
}

template <class Frac>
bool point_in(const StageTable& table, BasicPointCoord<Frac> p, const LevelSet& set) {
  while (p.stage < set.stage()) deepen_point(table, p);
  const Location loc = locate(table, p.stage, p.level, set.stage());
  const auto* level = std::get_if<LevelRef>(&loc);
  return level != nullptr && set.contains(level->level);
}

/// The count observable N_A.
template <class Frac>
std::size_t count_in(const StageTable& table, const BasicConfiguration<Frac>& config, const LevelSet& set) {
  std::size_t count = 0;
  for (const auto& p : config.points)
    if (point_in(table, p, set)) ++count;
  return count;
}

/// Expected number of residual points when transporting a Poisson sample on
/// `window` by n with pushes down to max_depth.
Rational residual_mass_bound(const StageTable& table, const LevelSet& window, Index n, int max_depth);

struct McOptions {
  std::optional<int> max_depth;  // defaults to j_max
  Rational coverage_tolerance{1, 1000};
  bool exact_positions = true;
  unsigned threads = 0;  // 0: hardware concurrency
};

struct McCovariance {
  double estimate = 0;
  double stderr_ = 0;
  std::size_t samples = 0;
  CorrBound exact;  // mu(T^{-n} A ∩ B)
  Rational coverage_gap;
  std::size_t residual_points = 0;

  /// |estimate - midpoint| <= 4 stderr + width/2 + coverage_gap.
  bool consistent(double sigmas = 4.0) const;
};

/// Sample covariance of (N_A after transport by n, N_B before) over seeded
/// replicas, with the certified base correlation it should match.
McCovariance mc_covariance(const StageTable& table, const LevelSet& a, const LevelSet& b, std::int64_t n,
                           const LevelSet& window, std::size_t samples, std::uint64_t seed,
                           const McOptions& options = {});

struct WindowMoments {
  std::size_t samples = 0;
  double expected = 0;
  double mean = 0;
  double mean_stderr = 0;
  double variance = 0;
  double variance_stderr = 0;
};

WindowMoments window_count_moments(const StageTable& table, const LevelSet& window, std::size_t samples,
                                   std::uint64_t seed, unsigned threads = 0);

struct SuspensionRigidityReport {
  int stage = 0;
  Index power = 0;
  McCovariance cov;
  Rational set_measure;
  double threshold = 0;  // (1 - 1/r_j) mu(A) - 4 stderr - coverage_gap
  bool pass = false;
};

/// Default window for a set of stage a: the full tower two stages deeper (clamped).
LevelSet default_window(const StageTable& table, const LevelSet& a);

SuspensionRigidityReport suspension_rigidity_test(const StageTable& table, int stage, const LevelSet& a,
                                                  const LevelSet& window, std::size_t samples, std::uint64_t seed,
                                                  const McOptions& options = {});

}  // namespace rankone
