#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "rankone/verify.hpp"

using namespace rankone;

namespace {

const StageTable& table() {
  static const StageTable t = build_stages(ConstructionParams{});
  return t;
}

Errc code_of(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  return Errc::usage_error;
}

}  // namespace

TEST_CASE("rationals serialize as p/q") {
  CHECK(to_string(Rational(1, 4)) == "1/4");
  CHECK(to_string(Rational(6, 4)) == "3/2");
  CHECK(to_string(Rational(0)) == "0/1");
  CHECK(to_string(Rational(3)) == "3/1");
  CHECK(parse_rational("2/8") == Rational(1, 4));
  CHECK(parse_rational("5") == 5);
  CHECK(parse_rational("0.25") == Rational(1, 4));
  CHECK(code_of([] { parse_rational("1/0"); }) == Errc::parse_error);
  CHECK(code_of([] { parse_rational("x/2"); }) == Errc::parse_error);
}

TEST_CASE("config parsing") {
  const auto p = params_from_json(json::parse(
      R"({"h1": 2, "j_max": 4, "r_prime": [2, 3, 4, 5], "spacers": "paper", "base_width": "1/3"})"));
  CHECK(p.h1 == 2);
  CHECK(p.j_max == 4);
  CHECK(p.cut_count(3) == Index{12});
  CHECK(p.base_width == Rational(1, 3));
  const StageTable t = build_stages(p);
  CHECK(t.height(2) == 4);

  const auto d = params_from_json(json::parse(R"({"r_prime": "j+1"})"));
  CHECK_FALSE(d.r_prime.has_value());
  CHECK(d.j_max == 6);

  const auto e = params_from_json(json::parse(R"({"j_max": 2, "r_prime": [2], "spacers": [[0, 0]]})"));
  CHECK(e.spacer_rule == SpacerRule::explicit_list);
  CHECK(build_stages(e).measure(2) == 1);

  const auto r = params_from_json(json::parse(R"({"j_max": 3, "r": [2, 5]})"));
  CHECK(code_of([&] { build_stages(r); }) == Errc::odd_cut_count);

  CHECK(code_of([] { params_from_json(json::parse(R"({"spacers": [[0, -1]]})")); }) == Errc::invalid_params);
  CHECK(code_of([] { params_from_json(json::parse(R"({"spacers": "weird"})")); }) == Errc::parse_error);
  CHECK(code_of([] { params_from_json(json::parse(R"({"colour": 1})")); }) == Errc::parse_error);
  CHECK(code_of([] { params_from_json(json::parse(R"({"base_width": 1})")); }) == Errc::parse_error);

  const json round = params_to_json(p);
  CHECK(params_to_json(params_from_json(round)) == round);
}

TEST_CASE("set syntax") {
  const LevelSet s = parse_level_set("stage=3,levels=0..2,5,9", table());
  CHECK(s.stage() == 3);
  CHECK(s.indices() == std::vector<Index>{0, 1, 2, 5, 9});
  CHECK(parse_level_set("stage=4", table()) == LevelSet::full_tower(table(), 4));
  CHECK(parse_level_set("stage=2,levels=", table()).is_empty());
  CHECK(parse_level_set("levels=1,stage=2", table()) == LevelSet::single(2, 1));
  CHECK(code_of([] { parse_level_set("stage=3,levels=18", table()); }) == Errc::stage_out_of_range);
  CHECK(code_of([] { parse_level_set("stage=9", table()); }) == Errc::stage_out_of_range);
  CHECK(code_of([] { parse_level_set("levels=1", table()); }) == Errc::parse_error);
  CHECK(code_of([] { parse_level_set("stage=3,levels=4..2", table()); }) == Errc::parse_error);
  CHECK(code_of([] { parse_level_set("stage=x", table()); }) == Errc::parse_error);
}

TEST_CASE("level set JSON round trip") {
  const LevelSet s = parse_level_set("stage=3,levels=0..2,5,9", table());
  const json doc = level_set_to_json(s);
  CHECK(doc.dump() == R"({"ranges":[[0,2],[5,5],[9,9]],"stage":3})");
  CHECK(level_set_from_json(doc) == s);
}

TEST_CASE("correlation JSON uses rational strings") {
  const CorrBound c = correlation(table(), LevelSet::single(3, 0), LevelSet::single(3, 0), 18, 4);
  const json doc = corr_to_json(c);
  CHECK(doc["lo"] == "11/144");
  CHECK(doc["hi"] == "1/12");
  CHECK(doc["unresolved"] == "1/144");
  CHECK(doc["depth"] == 4);
}

TEST_CASE("CSV quoting follows RFC 4180") {
  CHECK(csv_field("plain") == "plain");
  CHECK(csv_field("a,b") == "\"a,b\"");
  CHECK(csv_field("say \"hi\"") == "\"say \"\"hi\"\"\"");
  CHECK(csv_row({"1", "1/4", "x,y"}) == "1,1/4,\"x,y\"\r\n");
}

TEST_CASE("verify: default preset passes") {
  VerifyOptions opts;
  opts.samples = 20'000;
  opts.nesting_trials = 30;
  const VerifyReport report = run_verify(ConstructionParams{}, opts);
  for (const auto& c : report.checks) {
    INFO(c.name << ": " << c.observed);
    CHECK(c.pass);
  }
  CHECK(report.exit_code() == 0);
  CHECK(report.checks.front().name == "construction.build");
  // exact checks precede statistical ones, each group sorted by name
  std::size_t first_stat = 0;
  while (first_stat < report.checks.size() && report.checks[first_stat].name.rfind("poisson.", 0) != 0) ++first_stat;
  for (std::size_t i = first_stat; i < report.checks.size(); ++i) CHECK(report.checks[i].name.rfind("poisson.", 0) == 0);
  CHECK(std::is_sorted(report.checks.begin() + 1, report.checks.begin() + static_cast<std::ptrdiff_t>(first_stat),
                       [](const Check& a, const Check& b) { return a.name < b.name; }));
  const json doc = report_to_json(report);
  CHECK(doc["pass"] == true);
  CHECK(doc["params"]["spacers"] == "paper");
}

TEST_CASE("verify: zeroed even-stage spacers fail the half-limit checks") {
  ConstructionParams p;
  p.spacer_rule = SpacerRule::explicit_list;
  for (int j = 1; j <= p.j_max; ++j) p.explicit_spacers.emplace_back(*p.cut_count(j), 0);
  VerifyOptions opts;
  opts.samples = 20'000;
  opts.nesting_trials = 10;
  const VerifyReport report = run_verify(p, opts);
  CHECK(report.exit_code() != 0);
  bool saw_half = false;
  for (const auto& c : report.checks) {
    if (c.name.find("half_limit") != std::string::npos || c.name.find("half_regime") != std::string::npos) {
      saw_half = true;
      CHECK_FALSE(c.pass);
    }
    if (c.name.find("rigidity") != std::string::npos) CHECK(c.pass);
  }
  CHECK(saw_half);
}

TEST_CASE("verify: construction errors surface in the report") {
  ConstructionParams p;
  p.j_max = 4;
  p.cuts = std::vector<Index>{2, 5, 12};
  const VerifyReport report = run_verify(p);
  REQUIRE(report.checks.size() == 1);
  CHECK(report.checks[0].name == "construction.build");
  CHECK_FALSE(report.checks[0].pass);
  CHECK(report.checks[0].observed.find("OddCutCount") != std::string::npos);
  CHECK(report.exit_code() == 1);
}

TEST_CASE("random nesting trials respect their bounds") {
  ConstructionParams p;
  p.j_max = 8;
  const StageTable t = build_stages(p);
  const auto trials = random_nesting_trials(t, 100, 5);
  CHECK(trials.size() == 100);
  for (const auto& tr : trials) {
    CHECK(tr.depth + 1 <= t.j_max());
    CHECK(tr.n < t.height(tr.depth - 1));
    CHECK(tr.a.stage() < tr.depth);
  }
}
