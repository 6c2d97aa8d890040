#include "rankone/poisson.hpp"

#include <algorithm>
#include <thread>

namespace rankone {

namespace {

struct ReplicaCounts {
  long long x = 0;
  long long y = 0;
  std::size_t residual = 0;
};

/// Runs fn(i) for i in [0, count) on up to `threads` workers. Results are
/// written by index, so the reduction never depends on scheduling.
template <class Fn>
void for_each_replica(std::size_t count, unsigned threads, Fn fn) {
  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  threads = static_cast<unsigned>(std::min<std::size_t>(threads, std::max<std::size_t>(count, 1)));
  if (threads <= 1) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::vector<std::jthread> workers;
  workers.reserve(threads);
  for (unsigned t = 0; t < threads; ++t) {
    workers.emplace_back([=, &fn] {
      for (std::size_t i = t; i < count; i += threads) fn(i);
    });
  }
}

template <class Frac>
std::vector<ReplicaCounts> run_replicas(const StageTable& table, const LevelSet& a, const LevelSet& b,
                                        Index n, const LevelSet& window, std::size_t samples, std::uint64_t seed,
                                        int max_depth, unsigned threads) {
  std::vector<ReplicaCounts> counts(samples);
  for_each_replica(samples, threads, [&](std::size_t i) {
    const auto config = sample_configuration<Frac>(table, window, seed, i);
    const auto moved = transport(table, config, static_cast<std::int64_t>(n), max_depth);
    counts[i].x = static_cast<long long>(count_in(table, moved.moved, a));
    counts[i].y = static_cast<long long>(count_in(table, config, b));
    counts[i].residual = moved.residual.size();
  });
  return counts;
}

}  // namespace

bool McCovariance::consistent(double sigmas) const {
  const double mid = to_double(exact.midpoint());
  const double slack = sigmas * stderr_ + to_double(exact.width()) / 2 + to_double(coverage_gap);
  return std::abs(estimate - mid) <= slack;
}

Rational residual_mass_bound(const StageTable& table, const LevelSet& window, Index n, int max_depth) {
  if (window.is_empty() || n == 0) return Rational(0);
  return correlation(table, window, window, static_cast<std::int64_t>(n), max_depth).unresolved;
}

McCovariance mc_covariance(const StageTable& table, const LevelSet& a, const LevelSet& b, std::int64_t n,
                           const LevelSet& window, std::size_t samples, std::uint64_t seed,
                           const McOptions& options) {
  if (n < 0) return mc_covariance(table, b, a, -n, window, samples, seed, options);
  if (samples < 2) throw Error(Errc::usage_error, "mc_covariance needs at least 2 samples");
  a.validate(table);
  b.validate(table);
  window.validate(table);
  const int max_depth = options.max_depth.value_or(table.j_max());
  if (max_depth < window.stage()) throw Error(Errc::usage_error, "max_depth above the window stage");

  McCovariance out;
  out.samples = samples;
  out.exact = correlation(table, b, a, n, max_depth);
  out.coverage_gap = measure(table, set_algebra(table, b, window, SetOp::subtract)) + out.exact.unresolved;
  if (out.coverage_gap > options.coverage_tolerance) {
    throw Error(Errc::coverage_too_small, "coverage gap " + to_string(out.coverage_gap) + " exceeds tolerance " +
                                              to_string(options.coverage_tolerance));
  }

  const auto counts = options.exact_positions
                          ? run_replicas<Rational>(table, a, b, static_cast<Index>(n), window, samples, seed,
                                                   max_depth, options.threads)
                          : run_replicas<double>(table, a, b, static_cast<Index>(n), window, samples, seed,
                                                 max_depth, options.threads);

  double mean_x = 0, mean_y = 0;
  for (const auto& c : counts) {
    mean_x += static_cast<double>(c.x);
    mean_y += static_cast<double>(c.y);
    out.residual_points += c.residual;
  }
  const auto count = static_cast<double>(samples);
  mean_x /= count;
  mean_y /= count;
  double mean_z = 0;
  for (const auto& c : counts) mean_z += (static_cast<double>(c.x) - mean_x) * (static_cast<double>(c.y) - mean_y);
  mean_z /= count;
  double var_z = 0;
  for (const auto& c : counts) {
    const double z = (static_cast<double>(c.x) - mean_x) * (static_cast<double>(c.y) - mean_y) - mean_z;
    var_z += z * z;
  }
  var_z /= count - 1;
  out.estimate = mean_z * count / (count - 1);
  out.stderr_ = std::sqrt(var_z / count);
  return out;
}

WindowMoments window_count_moments(const StageTable& table, const LevelSet& window, std::size_t samples,
                                   std::uint64_t seed, unsigned threads) {
  if (samples < 2) throw Error(Errc::usage_error, "need at least 2 samples");
  std::vector<long long> counts(samples);
  for_each_replica(samples, threads, [&](std::size_t i) {
    counts[i] = static_cast<long long>(sample_configuration<double>(table, window, seed, i).points.size());
  });

  WindowMoments m;
  m.samples = samples;
  m.expected = to_double(measure(table, window));
  const auto count = static_cast<double>(samples);
  for (long long c : counts) m.mean += static_cast<double>(c);
  m.mean /= count;
  double m2 = 0, m4 = 0;
  for (long long c : counts) {
    const double d = static_cast<double>(c) - m.mean;
    m2 += d * d;
    m4 += d * d * d * d;
  }
  m2 /= count;
  m4 /= count;
  m.variance = m2 * count / (count - 1);
  m.mean_stderr = std::sqrt(m.variance / count);
  m.variance_stderr = std::sqrt(std::max(0.0, m4 - m2 * m2) / count);
  return m;
}

LevelSet default_window(const StageTable& table, const LevelSet& a) {
  return LevelSet::full_tower(table, std::min(a.stage() + 2, table.j_max()));
}

SuspensionRigidityReport suspension_rigidity_test(const StageTable& table, int stage, const LevelSet& a,
                                                  const LevelSet& window, std::size_t samples, std::uint64_t seed,
                                                  const McOptions& options) {
  const Stage& s = table.stage(stage);
  if (stage % 2 == 0) throw Error(Errc::usage_error, "suspension rigidity is tested at odd stages");
  if (!s.has_cut_data()) throw Error(Errc::stage_out_of_range, "stage has no cut data");

  SuspensionRigidityReport rep;
  rep.stage = stage;
  rep.power = s.height;
  rep.cov = mc_covariance(table, a, a, static_cast<std::int64_t>(s.height), window, samples, seed, options);
  rep.set_measure = measure(table, a);
  const double r = static_cast<double>(s.cuts);
  rep.threshold = (1.0 - 1.0 / r) * to_double(rep.set_measure) - 4.0 * rep.cov.stderr_ - to_double(rep.cov.coverage_gap);
  rep.pass = rep.cov.estimate >= rep.threshold;
  return rep;
}

}  // namespace rankone
