// rankone: builds the cutting-and-stacking construction and runs the exact and
// statistical checks from the command line.

#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "rankone/poisson.hpp"
#include "rankone/verify.hpp"

namespace {

using namespace rankone;

struct GlobalOptions {
  std::string config;
  std::string format = "json";
  std::uint64_t seed = 42;
  std::optional<int> depth;
  std::optional<std::string> tolerance;
  std::optional<Index> h1;
  std::optional<int> j_max;
  std::optional<std::string> r_prime;
  std::optional<std::string> spacers;
  std::optional<std::string> base_width;
};

std::vector<Index> parse_list(const std::string& text) {
  std::vector<Index> out;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const auto comma = text.find(',', pos);
    const std::string item = text.substr(pos, comma == std::string::npos ? std::string::npos : comma - pos);
    if (!item.empty()) {
      try {
        std::size_t used = 0;
        out.push_back(std::stoull(item, &used));
        if (used != item.size()) throw std::invalid_argument(item);
      } catch (const std::exception&) {
        throw Error(Errc::parse_error, "bad integer \"" + item + "\" in list");
      }
    }
    if (comma == std::string::npos) break;
    pos = comma + 1;
  }
  return out;
}

ConstructionParams resolve_params(const GlobalOptions& g) {
  ConstructionParams p = g.config.empty() ? ConstructionParams{} : load_params(g.config);
  if (g.h1) p.h1 = *g.h1;
  if (g.j_max) p.j_max = *g.j_max;
  if (g.r_prime) {
    if (*g.r_prime == "j+1") p.r_prime.reset(); else p.r_prime = parse_list(*g.r_prime);
  }
  if (g.base_width) p.base_width = parse_rational(*g.base_width);
  if (g.spacers) {
    if (*g.spacers == "paper") {
      p.spacer_rule = SpacerRule::paper_preset;
    } else if (*g.spacers == "none") {
      p.spacer_rule = SpacerRule::explicit_list;
      p.explicit_spacers.clear();
      for (int j = 1; j <= p.j_max; ++j) {
        const auto r = p.cut_count(j);
        if (!r) break;
        p.explicit_spacers.emplace_back(*r, 0);
      }
    } else {
      json doc;
      try {
        doc = json::parse(*g.spacers);
      } catch (const json::parse_error&) {
        throw Error(Errc::parse_error, "--spacers must be paper, none or a JSON list of lists");
      }
      const ConstructionParams parsed = params_from_json(json{{"spacers", doc}});
      p.spacer_rule = parsed.spacer_rule;
      p.explicit_spacers = parsed.explicit_spacers;
    }
  }
  return p;
}

class Output {
 public:
  explicit Output(const GlobalOptions& g, const ConstructionParams& params) : csv_(g.format == "csv") {
    doc_["params"] = params_to_json(params);
    if (csv_) std::cerr << "params: " << doc_["params"].dump() << "\n";
  }

  json& doc() { return doc_; }
  bool csv() const { return csv_; }

  void row(const std::vector<std::string>& fields) { rows_ += csv_row(fields); }

  void flush() const {
    if (csv_) {
      std::cout << csv_row({"n", "lo", "hi", "target", "deviation_bound"}) << rows_;
    } else {
      std::cout << doc_.dump() << "\n";
    }
  }

 private:
  bool csv_;
  json doc_;
  std::string rows_;
};

Rational abs_diff(const Rational& a, const Rational& b) { return a > b ? Rational(a - b) : Rational(b - a); }

std::string deviation(const CorrBound& c, const Rational& target) {
  return to_string(std::max(abs_diff(c.lo, target), abs_diff(c.hi, target)));
}

void put_corr(json& doc, const CorrBound& c) {
  doc.update(corr_to_json(c));
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Rank-one cutting-and-stacking construction: exact correlations, ergodic components and "
               "Poisson suspension checks"};
  app.require_subcommand(1);
  GlobalOptions g;
  app.add_option("--config", g.config, "JSON construction config")->check(CLI::ExistingFile);
  app.add_option("--format", g.format, "Output format")->check(CLI::IsMember({"json", "csv"}));
  app.add_option("--seed", g.seed, "RNG seed");
  app.add_option("--depth", g.depth, "Stage J at which orbits are resolved");
  app.add_option("--tolerance", g.tolerance, "Auto-deepen until unresolved mass <= p/q");
  app.add_option("--h1", g.h1, "Stage-1 height");
  app.add_option("--j-max", g.j_max, "Number of stages");
  app.add_option("--r-prime", g.r_prime, "r'_j list \"2,3,4\" or \"j+1\"");
  app.add_option("--spacers", g.spacers, "paper | none | JSON list of spacer vectors");
  app.add_option("--base-width", g.base_width, "Width of E_1 as p/q");

  auto* stages_cmd = app.add_subcommand("stages", "Print the stage table");

  std::string set_a, set_b;
  std::int64_t power = 0;
  auto* correlate_cmd = app.add_subcommand("correlate", "Certified interval for mu(T^n A ∩ B)");
  correlate_cmd->add_option("--a", set_a, "Set A, e.g. stage=2,levels=0")->required();
  correlate_cmd->add_option("--b", set_b, "Set B")->required();
  correlate_cmd->add_option("--n", power, "Power n")->required();

  int stage = 0;
  auto* rigidity_cmd = app.add_subcommand("rigidity", "Rigidity along h_j for an odd stage");
  rigidity_cmd->add_option("--stage", stage, "Odd stage j")->required();
  rigidity_cmd->add_option("--a", set_a, "Set A (default: stage-j level 0)");

  auto* half_cmd = app.add_subcommand("half-limit", "Weak limit I/2 along h_j for an even stage");
  half_cmd->add_option("--stage", stage, "Even stage j")->required();
  half_cmd->add_option("--a", set_a, "Set A (default: stage-j level 0)");
  half_cmd->add_option("--b", set_b, "Set B (default: A)");

  Index comp_n = 1;
  bool with_partition = false;
  auto* comp_cmd = app.add_subcommand("components", "Count ergodic components of T^n");
  comp_cmd->add_option("--n", comp_n, "Power n")->required();
  comp_cmd->add_option("--stage", stage, "Analysis stage j > n")->required();
  comp_cmd->add_flag("--partition", with_partition, "Include the partition as level sets");

  std::string powers = "rigid";
  auto* scan_cmd = app.add_subcommand("scan", "Correlations along a list of powers");
  scan_cmd->add_option("--powers", powers, "rigid | half | comma-separated list");
  scan_cmd->add_option("--a", set_a, "Set A (default: C_2)");
  scan_cmd->add_option("--b", set_b, "Set B (default: A)");

  auto* poisson_cmd = app.add_subcommand("poisson", "Poisson suspension simulation");
  poisson_cmd->require_subcommand(1);
  std::string window;
  std::size_t samples = 100'000;
  std::optional<int> max_depth;
  bool fast = false;
  auto* cov_cmd = poisson_cmd->add_subcommand("cov", "Monte Carlo covariance of count observables");
  cov_cmd->add_option("--a", set_a, "Set A")->required();
  cov_cmd->add_option("--b", set_b, "Set B")->required();
  cov_cmd->add_option("--n", power, "Power n")->required();
  cov_cmd->add_option("--window", window, "Sampling window, e.g. stage=4");
  cov_cmd->add_option("--samples", samples, "Replicas");
  cov_cmd->add_option("--seed", g.seed, "RNG seed");
  cov_cmd->add_option("--max-depth", max_depth, "Deepest stage used to resolve transported points");
  cov_cmd->add_flag("--fast", fast, "Double-precision in-level positions");
  auto* prig_cmd = poisson_cmd->add_subcommand("rigidity", "Rigidity of the suspension along h_j");
  prig_cmd->add_option("--stage", stage, "Odd stage j")->required();
  prig_cmd->add_option("--a", set_a, "Set A")->required();
  prig_cmd->add_option("--window", window, "Sampling window");
  prig_cmd->add_option("--samples", samples, "Replicas");
  prig_cmd->add_option("--seed", g.seed, "RNG seed");
  prig_cmd->add_option("--max-depth", max_depth, "Deepest stage used to resolve transported points");
  prig_cmd->add_flag("--fast", fast, "Double-precision in-level positions");

  std::size_t nesting_trials = 100;
  auto* verify_cmd = app.add_subcommand("verify", "Run every check and report pass/fail");
  verify_cmd->add_option("--samples", samples, "Replicas per statistical check");
  verify_cmd->add_option("--trials", nesting_trials, "Randomized interval-nesting trials");

  CLI11_PARSE(app, argc, argv);

  try {
    const ConstructionParams params = resolve_params(g);

    if (verify_cmd->parsed()) {
      VerifyOptions opts;
      opts.seed = g.seed;
      opts.samples = samples;
      opts.nesting_trials = nesting_trials;
      const VerifyReport report = run_verify(params, opts);
      if (g.format == "csv") {
        std::cerr << "params: " << params_to_json(params).dump() << "\n";
        std::cout << csv_row({"name", "status", "observed", "expected", "tolerance"});
        for (const auto& c : report.checks)
          std::cout << csv_row({c.name, c.pass ? "pass" : "fail", c.observed, c.expected, c.tolerance});
      } else {
        std::cout << report_to_json(report).dump() << "\n";
      }
      return report.exit_code();
    }

    const StageTable table = build_stages(params);
    Output out(g, params);
    auto set_or = [&](const std::string& text, LevelSet fallback) {
      return text.empty() ? fallback : parse_level_set(text, table);
    };
    int exit_code = 0;

    if (stages_cmd->parsed()) {
      out.doc()["stages"] = stage_table_to_json(table);
      if (out.csv()) {
        std::cout << csv_row({"j", "h", "r", "spacer_total", "w", "m"});
        for (const Stage& s : table) {
          std::cout << csv_row({std::to_string(s.index), std::to_string(s.height),
                                s.has_cut_data() ? std::to_string(s.cuts) : "",
                                s.has_cut_data() ? std::to_string(s.spacer_total()) : "", to_string(s.width),
                                to_string(s.measure)});
        }
        return 0;
      }
    } else if (correlate_cmd->parsed()) {
      const LevelSet a = parse_level_set(set_a, table);
      const LevelSet b = parse_level_set(set_b, table);
      const Index abs_n = static_cast<Index>(power < 0 ? -power : power);
      CorrBound c;
      if (g.tolerance) {
        c = correlation_auto(table, a, b, power, parse_rational(*g.tolerance), g.depth);
      } else {
        c = correlation(table, a, b, power, g.depth.value_or(default_depth_for(table, abs_n, std::max(a.stage(), b.stage()))));
      }
      put_corr(out.doc(), c);
      out.row({std::to_string(power), to_string(c.lo), to_string(c.hi), "", ""});
    } else if (rigidity_cmd->parsed()) {
      const LevelSet a = set_or(set_a, LevelSet::single(stage, 0));
      const auto rep = rigidity_report(table, stage, a, g.depth.value_or(default_depth_for(table, table.height(stage), stage)));
      auto& d = out.doc();
      d["stage"] = rep.stage;
      d["power"] = rep.power;
      put_corr(d, rep.corr);
      d["measure"] = to_string(rep.set_measure);
      d["deficit_bound"] = to_string(rep.deficit_bound);
      d["allowed"] = to_string(rep.allowed);
      d["pass"] = rep.pass;
      out.row({std::to_string(rep.power), to_string(rep.corr.lo), to_string(rep.corr.hi),
               to_string(rep.set_measure), to_string(rep.deficit_bound)});
      exit_code = rep.pass ? 0 : 1;
    } else if (half_cmd->parsed()) {
      const LevelSet a = set_or(set_a, LevelSet::single(stage, 0));
      const LevelSet b = set_or(set_b, a);
      const auto rep = half_limit_report(table, stage, a, b, g.depth.value_or(default_depth_for(table, table.height(stage), stage)));
      auto& d = out.doc();
      d["stage"] = rep.stage;
      d["power"] = rep.power;
      put_corr(d, rep.corr);
      d["target"] = to_string(rep.target);
      d["deviation_bound"] = to_string(rep.deviation_bound);
      d["allowed"] = to_string(rep.allowed);
      d["pass"] = rep.pass;
      out.row({std::to_string(rep.power), to_string(rep.corr.lo), to_string(rep.corr.hi), to_string(rep.target),
               to_string(rep.deviation_bound)});
      exit_code = rep.pass ? 0 : 1;
    } else if (comp_cmd->parsed()) {
      const int depth = g.depth.value_or(std::min(stage + 2, table.j_max()));
      const auto rep = ergodic_components(table, comp_n, stage, depth);
      auto& d = out.doc();
      d["n"] = rep.n;
      d["stage"] = rep.stage;
      d["depth"] = rep.depth;
      d["component_count"] = rep.component_count;
      d["residue_match"] = rep.residue_match;
      d["residue_stage"] = rep.residue_stage ? json(*rep.residue_stage) : json(nullptr);
      json sizes = json::array();
      for (const auto& part : rep.partition) sizes.push_back(part.cardinality());
      d["component_sizes"] = sizes;
      if (with_partition) {
        json parts = json::array();
        for (const auto& part : rep.partition) parts.push_back(level_set_to_json(part));
        d["partition"] = parts;
      }
      if (out.csv()) {
        std::cout << csv_row({"n", "stage", "depth", "component_count", "residue_match"})
                  << csv_row({std::to_string(rep.n), std::to_string(rep.stage), std::to_string(rep.depth),
                              std::to_string(rep.component_count), rep.residue_match ? "true" : "false"});
        return 0;
      }
    } else if (scan_cmd->parsed()) {
      const LevelSet a = set_or(set_a, LevelSet::single(std::min(2, table.j_max()), 0));
      const LevelSet b = set_or(set_b, a);
      std::vector<Index> list;
      Rational target = measure(table, set_algebra(table, a, b, SetOp::intersect));
      bool has_target = true;
      if (powers == "rigid") {
        list = table.rigid_times();
      } else if (powers == "half") {
        list = table.half_times();
        target /= 2;
      } else {
        list = parse_list(powers);
        has_target = false;
      }
      // Powers too large for the materialized stages are dropped.
      std::erase_if(list, [&](Index n) { return !table.first_stage_above(n, 1); });
      const auto bounds = decay_scan(table, a, b, list, g.depth);
      json rows = json::array();
      for (std::size_t i = 0; i < list.size(); ++i) {
        json row = corr_to_json(bounds[i]);
        row["n"] = list[i];
        if (has_target) {
          row["target"] = to_string(target);
          row["deviation_bound"] = deviation(bounds[i], target);
        }
        rows.push_back(row);
        out.row({std::to_string(list[i]), to_string(bounds[i].lo), to_string(bounds[i].hi),
                 has_target ? to_string(target) : "", has_target ? deviation(bounds[i], target) : ""});
      }
      out.doc()["scan"] = rows;
    } else if (cov_cmd->parsed() || prig_cmd->parsed()) {
      McOptions mc;
      mc.max_depth = max_depth;
      mc.exact_positions = !fast;
      if (g.tolerance) mc.coverage_tolerance = parse_rational(*g.tolerance);
      const LevelSet a = parse_level_set(set_a, table);
      const LevelSet w = set_or(window, default_window(table, a));
      auto& d = out.doc();
      McCovariance cov;
      bool pass = false;
      if (cov_cmd->parsed()) {
        const LevelSet b = parse_level_set(set_b, table);
        cov = mc_covariance(table, a, b, power, w, samples, g.seed, mc);
        pass = cov.consistent();
      } else {
        const auto rep = suspension_rigidity_test(table, stage, a, w, samples, g.seed, mc);
        cov = rep.cov;
        pass = rep.pass;
        power = static_cast<std::int64_t>(rep.power);
        d["threshold"] = rep.threshold;
      }
      d["estimate"] = cov.estimate;
      d["stderr"] = cov.stderr_;
      d["exact_lo"] = to_string(cov.exact.lo);
      d["exact_hi"] = to_string(cov.exact.hi);
      d["coverage_gap"] = to_string(cov.coverage_gap);
      d["samples"] = cov.samples;
      d["seed"] = g.seed;
      d["pass"] = pass;
      out.row({std::to_string(power), to_string(cov.exact.lo), to_string(cov.exact.hi),
               std::to_string(cov.estimate), std::to_string(cov.stderr_)});
      exit_code = pass ? 0 : 1;
    }
    out.flush();
    return exit_code;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}
