#include "rankone/verify.hpp"

#include <algorithm>
#include <functional>
#include <random>
#include <sstream>

#include "rankone/poisson.hpp"

namespace rankone {

namespace {

std::string fmt_double(double v) {
  std::ostringstream out;
  out.precision(6);
  out << v;
  return out.str();
}

std::string interval(const CorrBound& c) { return "[" + to_string(c.lo) + ", " + to_string(c.hi) + "]"; }

class CheckList {
 public:
  void run(const std::string& name, const std::function<Check()>& body) {
    Check check;
    try {
      check = body();
    } catch (const std::exception& e) {
      check.pass = false;
      check.observed = e.what();
    }
    check.name = name;
    checks_.push_back(std::move(check));
  }

  std::vector<Check> take_sorted() {
    std::sort(checks_.begin(), checks_.end(), [](const Check& a, const Check& b) { return a.name < b.name; });
    return std::move(checks_);
  }

 private:
  std::vector<Check> checks_;
};

void exact_checks(const StageTable& table, const VerifyOptions& options, CheckList& list) {
  list.run("construction.height_recurrence", [&] {
    bool ok = true;
    for (const Stage& s : table) {
      if (!s.has_cut_data()) continue;
      const Index from_offsets = s.offsets.back() + s.height + s.spacers.back();
      const Index from_sum = s.height * s.cuts + s.spacer_total();
      ok = ok && from_offsets == from_sum;
      if (s.index < table.j_max()) ok = ok && from_sum == table.height(s.index + 1);
    }
    std::string heights;
    for (const Stage& s : table) heights += (heights.empty() ? "" : ",") + std::to_string(s.height);
    return Check{"", ok, "h=[" + heights + "]", "offset and sum recurrences agree", "exact"};
  });

  list.run("construction.measure_growth", [&] {
    bool ok = true;
    std::string ratios;
    for (int j = 1; j < table.j_max(); ++j) {
      const Stage& s = table.stage(j);
      const Rational ratio = table.measure(j + 1) / s.measure;
      const Rational expected = 1 + make_rational(s.spacer_total()) / make_rational(s.height * s.cuts);
      ok = ok && ratio == expected;
      ratios += (ratios.empty() ? "" : ",") + to_string(ratio);
    }
    return Check{"", ok, "m_{j+1}/m_j=[" + ratios + "]", "1 + sum(s_j)/(h_j r_j)", "exact"};
  });

  for (Index n = 1; n <= 4 && static_cast<int>(n) < table.j_max(); ++n) {
    list.run("construction.divisibility.n=" + std::to_string(n), [&, n] {
      const auto rep = check_divisibility(table, n);
      std::string failing;
      for (const auto& st : rep.stages)
        if (!st.pass()) failing += (failing.empty() ? "" : ",") + std::to_string(st.stage);
      return Check{"", rep.pass, failing.empty() ? "all stages pass" : "failing stages " + failing,
                   "h_j, s_j(i) = 0 mod n for j > n", "exact"};
    });
  }

  for (int j = 1; j < table.j_max(); ++j) {
    const int depth = std::min(j + 2, table.j_max());
    const LevelSet base = LevelSet::single(j, 0);
    if (j % 2 == 1) {
      list.run("dynamics.rigidity.stage=" + std::to_string(j), [&, j, depth, base] {
        const auto rep = rigidity_report(table, j, base, depth);
        return Check{"", rep.pass, "deficit " + to_string(rep.deficit_bound) + ", corr " + interval(rep.corr),
                     "deficit <= mu(A)/r_j + unresolved", to_string(rep.allowed)};
      });
    } else {
      list.run("dynamics.half_limit.stage=" + std::to_string(j), [&, j, depth, base] {
        const auto rep = half_limit_report(table, j, base, base, depth);
        return Check{"", rep.pass, "corr " + interval(rep.corr), "target " + to_string(rep.target),
                     to_string(rep.allowed)};
      });
    }
  }

  for (Index n = 1; n <= 4; ++n) {
    const int stage = static_cast<int>(n) + 2;
    const int depth = std::min(stage + 2, table.j_max());
    if (depth <= stage) break;
    list.run("dynamics.components.n=" + std::to_string(n), [&, n, stage, depth] {
      const auto rep = ergodic_components(table, n, stage, depth);
      const bool ok = rep.component_count == n && rep.residue_match;
      return Check{"", ok,
                   "count " + std::to_string(rep.component_count) +
                       (rep.residue_match ? ", residues match" : ", residues differ"),
                   std::to_string(n) + " components = residue classes mod n", "exact"};
    });
  }

  list.run("dynamics.interval_nesting", [&] {
    const auto trials = random_nesting_trials(table, options.nesting_trials, options.seed);
    std::size_t nested = 0;
    for (const auto& t : trials) {
      const auto coarse = correlation(table, t.a, t.b, static_cast<std::int64_t>(t.n), t.depth);
      const auto fine = correlation(table, t.a, t.b, static_cast<std::int64_t>(t.n), t.depth + 1);
      if (coarse.contains(fine)) ++nested;
    }
    return Check{"", !trials.empty() && nested == trials.size(),
                 std::to_string(nested) + "/" + std::to_string(trials.size()) + " nested",
                 "CorrBound(J+1) within CorrBound(J)", "exact"};
  });
}

void statistical_checks(const StageTable& table, const VerifyOptions& options, CheckList& list) {
  McOptions mc;
  mc.threads = options.threads;

  list.run("poisson.moments", [&] {
    const LevelSet window = LevelSet::full_tower(table, std::min(4, table.j_max()));
    const auto m = window_count_moments(table, window, options.samples, options.seed, options.threads);
    const bool ok = std::abs(m.mean - m.expected) <= 5 * m.mean_stderr &&
                    std::abs(m.variance - m.expected) <= 5 * m.variance_stderr;
    return Check{"", ok, "mean " + fmt_double(m.mean) + ", var " + fmt_double(m.variance),
                 fmt_double(m.expected), "5 stderr"};
  });

  if (table.j_max() < 4) return;
  const LevelSet c2 = LevelSet::single(2, 0);
  const Rational mu = measure(table, c2);

  list.run("poisson.suspension_vs_base", [&] {
    const auto cov = mc_covariance(table, c2, c2, 2, LevelSet::full_tower(table, 4), options.samples,
                                   options.seed, mc);
    return Check{"", cov.consistent(), fmt_double(cov.estimate) + " +- " + fmt_double(cov.stderr_),
                 interval(cov.exact), "4 stderr + width/2 + " + to_string(cov.coverage_gap)};
  });

  list.run("poisson.half_regime.stage=2", [&] {
    const auto cov = mc_covariance(table, c2, c2, static_cast<std::int64_t>(table.height(2)),
                                   default_window(table, c2), options.samples, options.seed, mc);
    const double target = to_double(mu) / 2;
    const double slack = 4 * cov.stderr_ + to_double(cov.coverage_gap);
    return Check{"", std::abs(cov.estimate - target) <= slack, fmt_double(cov.estimate), fmt_double(target),
                 fmt_double(slack)};
  });

  if (table.j_max() < 5) return;
  list.run("poisson.rigidity.stage=3", [&] {
    const auto rep = suspension_rigidity_test(table, 3, c2, default_window(table, c2), options.samples,
                                              options.seed, mc);
    return Check{"", rep.pass, fmt_double(rep.cov.estimate), ">= " + fmt_double(rep.threshold),
                 "4 stderr + coverage gap"};
  });
}

}  // namespace

bool VerifyReport::pass() const {
  return !checks.empty() && std::all_of(checks.begin(), checks.end(), [](const Check& c) { return c.pass; });
}

std::vector<NestingTrial> random_nesting_trials(const StageTable& table, std::size_t count, std::uint64_t seed) {
  std::vector<NestingTrial> out;
  if (table.j_max() < 4) return out;
  std::mt19937_64 rng(seed);
  auto pick = [&](Index lo, Index hi) { return std::uniform_int_distribution<Index>(lo, hi)(rng); };
  auto random_set = [&](int stage) {
    const Index h = table.height(stage);
    std::vector<LevelRange> ranges;
    const Index pieces = pick(0, 3);
    for (Index k = 0; k < pieces; ++k) {
      const Index lo = pick(0, h - 1);
      ranges.push_back({lo, std::min(h, lo + pick(1, 3))});
    }
    return LevelSet(stage, std::move(ranges));
  };
  out.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    NestingTrial t;
    t.depth = static_cast<int>(pick(3, static_cast<Index>(table.j_max() - 1)));
    t.n = pick(0, table.height(t.depth - 1) - 1);
    t.a = random_set(static_cast<int>(pick(static_cast<Index>(t.depth - 2), static_cast<Index>(t.depth - 1))));
    t.b = random_set(static_cast<int>(pick(static_cast<Index>(t.depth - 2), static_cast<Index>(t.depth - 1))));
    out.push_back(std::move(t));
  }
  return out;
}

VerifyReport run_verify(const ConstructionParams& params, const VerifyOptions& options) {
  VerifyReport report;
  report.params = params;
  std::optional<StageTable> table;
  try {
    table.emplace(build_stages(params));
  } catch (const Error& e) {
    report.checks.push_back(Check{"construction.build", false, e.what(), "valid construction", "exact"});
    return report;
  }
  report.checks.push_back(Check{"construction.build", true, std::to_string(table->j_max()) + " stages",
                                "valid construction", "exact"});

  CheckList exact;
  exact_checks(*table, options, exact);
  for (auto& c : exact.take_sorted()) report.checks.push_back(std::move(c));
  CheckList statistical;
  statistical_checks(*table, options, statistical);
  for (auto& c : statistical.take_sorted()) report.checks.push_back(std::move(c));
  return report;
}

json report_to_json(const VerifyReport& report) {
  json checks = json::array();
  for (const auto& c : report.checks) {
    checks.push_back({{"name", c.name},
                      {"status", c.pass ? "pass" : "fail"},
                      {"observed", c.observed},
                      {"expected", c.expected},
                      {"tolerance", c.tolerance}});
  }
  return {{"params", params_to_json(report.params)}, {"checks", checks}, {"pass", report.pass()}};
}

}  // namespace rankone
