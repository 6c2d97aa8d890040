#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "rankone/poisson.hpp"

using namespace rankone;

namespace {

const StageTable& table() {
  static const StageTable t = [] {
    ConstructionParams p;
    p.j_max = 6;
    return build_stages(p);
  }();
  return t;
}

}  // namespace

TEST_CASE("sampling is deterministic per (seed, replica)") {
  const LevelSet w = LevelSet::full_tower(table(), 3);
  const auto a = sample_configuration(table(), w, 5, 17);
  const auto b = sample_configuration(table(), w, 5, 17);
  CHECK(a.points == b.points);
  bool differs = false;
  for (std::uint64_t r = 0; r < 20 && !differs; ++r) {
    differs = sample_configuration(table(), w, 5, r).points != sample_configuration(table(), w, 6, r).points;
  }
  CHECK(differs);
  for (const auto& p : a.points) {
    CHECK(p.stage == 3);
    CHECK(w.contains(p.level));
    CHECK(p.frac >= 0);
    CHECK(p.frac < 1);
  }
}

TEST_CASE("empty window gives empty configurations") {
  for (std::uint64_t r = 0; r < 50; ++r) CHECK(sample_configuration(table(), LevelSet::empty(3), 1, r).points.empty());
}

TEST_CASE("sample mean of counts on the stage-3 tower") {
  const std::size_t samples = 100'000;
  const auto m = window_count_moments(table(), LevelSet::full_tower(table(), 3), samples, 1);
  CHECK(m.expected == doctest::Approx(1.5));
  CHECK(std::abs(m.mean - 1.5) <= 4 * std::sqrt(1.5 / static_cast<double>(samples)));
}

TEST_CASE("transport examples") {
  Configuration c;
  c.window = LevelSet::full_tower(table(), 3);
  c.points = {{3, 0, Rational(1, 10)}};
  auto moved = transport(table(), c, 2, 6);
  REQUIRE(moved.moved.points.size() == 1);
  CHECK(moved.moved.points[0] == PointCoord{3, 2, Rational(1, 10)});

  c.points = {{3, 17, Rational(3, 10)}};
  moved = transport(table(), c, 1, 6);
  REQUIRE(moved.moved.points.size() == 1);
  CHECK(moved.moved.points[0] == PointCoord{4, 72, Rational(3, 5)});

  c.points = {{3, 4, Rational(1, 3)}, {3, 17, Rational(9, 10)}};
  moved = transport(table(), c, 0, 6);
  CHECK(moved.moved.points == c.points);
  CHECK(moved.residual.empty());
}

TEST_CASE("transport conserves points and tracks residuals") {
  const LevelSet w = LevelSet::full_tower(table(), 3);
  std::size_t residual = 0, total = 0;
  const std::size_t replicas = 20'000;
  const Index n = 200;  // leaves the stage-4 tower from the top 200 floors
  for (std::uint64_t r = 0; r < replicas; ++r) {
    const auto c = sample_configuration(table(), w, 3, r);
    const auto t = transport(table(), c, static_cast<std::int64_t>(n), 4);
    CHECK(t.moved.points.size() + t.residual.size() == c.points.size());
    residual += t.residual.size();
    total += c.points.size();
    for (const auto& p : t.residual) CHECK(p.stage == 4);
  }
  // residual frequency against the certified expected residual mass
  const double bound = to_double(residual_mass_bound(table(), w, n, 4));
  const double mean = static_cast<double>(residual) / replicas;
  CHECK(bound > 0);
  CHECK(mean <= bound + 5 * std::sqrt(bound / replicas));
  CHECK(mean >= bound - 5 * std::sqrt(bound / replicas));
  CHECK(total > 0);
}

TEST_CASE("count_in") {
  Configuration empty;
  empty.window = LevelSet::full_tower(table(), 2);
  CHECK(count_in(table(), empty, LevelSet::single(2, 0)) == 0);

  Configuration one = empty;
  one.points = {{2, 0, Rational(1, 2)}};
  CHECK(count_in(table(), one, LevelSet::single(2, 0)) == 1);
  CHECK(count_in(table(), one, LevelSet::single(2, 1)) == 0);
  // frac 1/2 of level 0 at stage 2 is column 4 of six: floor 6 of stage 3
  CHECK(count_in(table(), one, LevelSet::single(3, 6)) == 1);
  CHECK(count_in(table(), one, LevelSet::single(3, 0)) == 0);
}

TEST_CASE("pointwise transport agrees with the set preimage") {
  // #points of T^n(omega) in A equals #points of omega in T^{-n}A, computed on
  // resolved points with T^{-n}A taken at the deepest stage.
  const LevelSet w = LevelSet::full_tower(table(), 4);
  const LevelSet a = LevelSet::from_indices(3, {0, 5, 17});
  const Index n = 7;
  const int depth = 5;
  const LevelSet a_deep = refine(table(), a, depth);
  std::vector<LevelRange> pre;
  for (const auto& r : a_deep.ranges())
    for (Index y = r.lo; y < r.hi; ++y)
      if (y >= n) pre.push_back({y - n, y - n + 1});
  const LevelSet preimage(depth, pre);
  for (std::uint64_t r = 0; r < 300; ++r) {
    const auto c = sample_configuration(table(), w, 9, r);
    const auto t = transport(table(), c, static_cast<std::int64_t>(n), depth);
    REQUIRE(t.residual.empty());
    CHECK(count_in(table(), t.moved, a) == count_in(table(), c, preimage));
  }
}

TEST_CASE("mc_covariance matches exact correlations") {
  McOptions opts;
  const LevelSet c2 = LevelSet::single(2, 0);
  const LevelSet w4 = LevelSet::full_tower(table(), 4);

  const auto shifted = mc_covariance(table(), c2, c2, 2, w4, 100'000, 42, opts);
  CHECK(shifted.exact.lo == Rational(1, 4));
  CHECK(shifted.exact.hi == Rational(1, 4));
  CHECK(shifted.coverage_gap == 0);
  CHECK(shifted.consistent());

  const auto variance = mc_covariance(table(), c2, c2, 0, w4, 50'000, 7, opts);
  CHECK(variance.exact.lo == Rational(1, 2));
  CHECK(variance.consistent());

  const auto disjoint = mc_covariance(table(), c2, LevelSet::single(2, 1), 0, w4, 50'000, 8, opts);
  CHECK(disjoint.exact.hi == 0);
  CHECK(disjoint.consistent());
  CHECK(std::abs(disjoint.estimate) <= 4 * disjoint.stderr_);
}

TEST_CASE("mc_covariance is reproducible across thread counts and precision modes") {
  const LevelSet c2 = LevelSet::single(2, 0);
  const LevelSet w4 = LevelSet::full_tower(table(), 4);
  McOptions one;
  one.threads = 1;
  McOptions four;
  four.threads = 4;
  const auto a = mc_covariance(table(), c2, c2, 2, w4, 5'000, 3, one);
  const auto b = mc_covariance(table(), c2, c2, 2, w4, 5'000, 3, four);
  CHECK(a.estimate == b.estimate);
  CHECK(a.stderr_ == b.stderr_);
  McOptions fast = one;
  fast.exact_positions = false;
  const auto c = mc_covariance(table(), c2, c2, 2, w4, 5'000, 3, fast);
  CHECK(c.estimate == a.estimate);  // level membership is exact either way
}

TEST_CASE("coverage gap is computed and enforced") {
  const LevelSet c2 = LevelSet::single(2, 0);
  const LevelSet small_window = LevelSet::interval(2, 1, 2);
  try {
    mc_covariance(table(), c2, c2, 2, small_window, 100, 1);
    FAIL("expected CoverageTooSmall");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::coverage_too_small);
  }
  McOptions loose;
  loose.coverage_tolerance = 1;
  const auto cov = mc_covariance(table(), c2, c2, 2, small_window, 100, 1, loose);
  CHECK(cov.coverage_gap == Rational(1, 2));
}

TEST_CASE("suspension rigidity") {
  const LevelSet a = LevelSet::single(3, 0);
  const auto rep = suspension_rigidity_test(table(), 3, a, default_window(table(), a), 100'000, 42);
  CHECK(rep.power == 18);
  CHECK(rep.cov.exact.lo >= Rational(11, 144));
  CHECK(rep.cov.exact.hi <= Rational(12, 144));
  CHECK(rep.pass);
  CHECK(std::abs(rep.cov.estimate - to_double(rep.cov.exact.midpoint())) <=
        4 * rep.cov.stderr_ + to_double(rep.cov.exact.width()) / 2 + to_double(rep.cov.coverage_gap));

  const auto empty = suspension_rigidity_test(table(), 3, LevelSet::empty(3), default_window(table(), a), 1000, 1);
  CHECK(empty.cov.estimate == 0);
  CHECK(empty.pass);

  try {
    suspension_rigidity_test(table(), 2, LevelSet::single(2, 0), LevelSet::full_tower(table(), 4), 1000, 1);
    FAIL("expected UsageError");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::usage_error);
  }
}
