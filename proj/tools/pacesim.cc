// Copyright 2026 The Pacesim Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// pacesim: command-line driver.
//
// Exit codes: 0 ok, 1 a check failed, 2 bad configuration or usage,
// 3 I/O failure, 4 solver capacity exceeded, 5 environment cannot be
// replayed, 6 internal error.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <fmt/format.h>

#include "CLI11.hpp"
#include "json.hpp"
#include "pacesim/errors.h"
#include "pacesim/experiments.h"
#include "pacesim/svg.h"

namespace fs = std::filesystem;
using Json = nlohmann::ordered_json;

namespace pacesim {
namespace {

enum Exit { kOk = 0, kCheckFailed = 1, kUsage = 2, kIo = 3, kCapacity = 4,
            kEnvironment = 5, kInternal = 6 };

std::ofstream OpenForWrite(const fs::path& path) {
  if (path.has_parent_path()) {
    std::error_code ec;
    fs::create_directories(path.parent_path(), ec);
    if (ec) throw IoError(path.parent_path().string() + ": " + ec.message());
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError(path.string() + ": cannot open for writing");
  return out;
}

void WriteText(const fs::path& path, const std::string& text) {
  std::ofstream out = OpenForWrite(path);
  out << text;
  if (!out.flush()) throw IoError(path.string() + ": write failed");
}

// "-" sends the document to stdout.
void EmitJson(const std::string& target, const Json& doc) {
  const std::string text = doc.dump(2) + "\n";
  if (target == "-") {
    std::cout << text;
  } else {
    WriteText(target, text);
  }
}

Json ToJson(const InvariantTally& t) {
  return {{"epochs_checked", t.epochs_checked},
          {"epoch_failures", t.epoch_failures},
          {"epoch_min_slack", t.epochs_checked ? Json(t.epoch_min_slack) : Json()},
          {"stopping_checked", t.stopping_checked},
          {"stopping_failures", t.stopping_failures},
          {"conformance_failures", t.conformance_failures}};
}

Json ToJson(const RunSummary& s) {
  Json agents = Json::array();
  for (const AgentSummary& a : s.agents) {
    agents.push_back({{"budget", std::isfinite(a.budget) ? Json(a.budget) : Json()},
                      {"mean_value", a.mean_value},
                      {"mean_spend", a.mean_spend},
                      {"mean_liquid_value", a.mean_liquid_value}});
  }
  Json j = {{"scenario", s.scenario},
            {"replications", s.replications},
            {"horizon", s.horizon},
            {"agents", agents},
            {"welfare_mean", s.welfare_mean},
            {"welfare_standard_error", s.welfare_standard_error}};
  if (s.reference_welfare) {
    j["reference_welfare"] = *s.reference_welfare;
    j["welfare_ratio"] = *s.reference_ratio;
  }
  j["invariants"] = ToJson(s.invariants);
  return j;
}

Json ToJson(const CheckResult& r) {
  return {{"checker", r.checker},
          {"trials", r.trials},
          {"statistic", r.statistic},
          {"bound", r.bound},
          {"pass", r.pass}};
}

bool InvariantsHold(const InvariantTally& t) {
  return t.epoch_failures == 0 && t.stopping_failures == 0 &&
         t.conformance_failures == 0;
}

void PrintRun(const RunSummary& s) {
  fmt::print("scenario {}  T={}  replications={}\n", s.scenario, s.horizon,
             s.replications);
  fmt::print("{:>6} {:>14} {:>14} {:>14} {:>14}\n", "agent", "budget", "value",
             "spend", "liquid");
  for (std::size_t k = 0; k < s.agents.size(); ++k) {
    const AgentSummary& a = s.agents[k];
    fmt::print("{:>6} {:>14.6g} {:>14.6g} {:>14.6g} {:>14.6g}\n", k, a.budget,
               a.mean_value, a.mean_spend, a.mean_liquid_value);
  }
  fmt::print("liquid welfare {:.6g} (se {:.3g})\n", s.welfare_mean,
             s.welfare_standard_error);
  if (s.reference_ratio) {
    fmt::print("reference welfare {:.6g}  ratio {:.6g}\n", *s.reference_welfare,
               *s.reference_ratio);
  }
  const InvariantTally& t = s.invariants;
  fmt::print("epochs {} (failures {})  stopping {} (failures {})  "
             "conformance failures {}\n",
             t.epochs_checked, t.epoch_failures, t.stopping_checked,
             t.stopping_failures, t.conformance_failures);
}

struct Common {
  std::string config;
  std::vector<std::string> overrides;
  std::string json;
};

void AddCommon(CLI::App* cmd, Common& c) {
  cmd->add_option("config", c.config, "Scenario JSON file")->required();
  cmd->add_option("--set", c.overrides, "Override, e.g. agents.0.budget=50");
  cmd->add_option("--json", c.json, "Write the JSON report here ('-' for stdout)");
}

int CmdRun(const Common& c, const std::string& out_dir, bool summary_only,
           std::optional<std::size_t> reps) {
  const Scenario s = LoadScenario(c.config, c.overrides);
  const std::size_t r = reps.value_or(s.replications);
  const fs::path dir(out_dir);
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw IoError(dir.string() + ": " + ec.message());
  TraceSink sink;
  if (!summary_only) {
    sink = [&](std::size_t rep, const Trace& trace) {
      std::ofstream out = OpenForWrite(dir / fmt::format("trace_{:04d}.csv", rep));
      WriteTraceCsv(out, trace);
      if (!out.flush()) throw IoError("trace write failed");
    };
  }
  const RunSummary sum = RunScenario(s, r, sink);
  const Json doc = ToJson(sum);
  WriteText(dir / "summary.json", doc.dump(2) + "\n");
  if (!c.json.empty()) EmitJson(c.json, doc);
  if (c.json != "-") PrintRun(sum);
  return InvariantsHold(sum.invariants) ? kOk : kCheckFailed;
}

int CmdWelfare(const Common& c, std::optional<std::size_t> reps) {
  const Scenario s = LoadScenario(c.config, c.overrides);
  const WelfareReport w = RunWelfare(s, reps.value_or(s.replications));
  const bool pass = w.bound.pass && w.spend.pass && InvariantsHold(w.run.invariants);
  Json doc = ToJson(w.run);
  doc["optimum"] = w.optimum.optimum;
  doc["welfare_bound"] = {{"mean", w.bound.mean},
                          {"standard_error", w.bound.standard_error},
                          {"lower", w.bound.lower},
                          {"bound", w.bound.bound},
                          {"margin", w.bound.margin},
                          {"ratio", w.bound.ratio},
                          {"pass", w.bound.pass}};
  doc["spend_below_welfare"] = {{"mean_gap", w.spend.mean_gap},
                                {"standard_error", w.spend.standard_error},
                                {"pass", w.spend.pass}};
  doc["pass"] = pass;
  if (!c.json.empty()) EmitJson(c.json, doc);
  if (c.json != "-") {
    PrintRun(w.run);
    fmt::print("ex-ante optimum {:.6g}  ratio {:.4f}\n", w.optimum.optimum,
               w.bound.ratio);
    fmt::print("lower {:.6g} vs bound {:.6g}: {}\n", w.bound.lower, w.bound.bound,
               w.bound.pass ? "pass" : "FAIL");
    fmt::print("spend <= welfare: {}\n", w.spend.pass ? "pass" : "FAIL");
  }
  return pass ? kOk : kCheckFailed;
}

int CmdRegret(const Common& c, const std::string& curves, std::size_t curve_points,
              const std::string& svg) {
  const Scenario s = LoadScenario(c.config, c.overrides);
  const RegretExperiment e = RunRegret(s);
  Json points = Json::array();
  bool pass = true;
  for (const RegretPoint& p : e.points) {
    pass = pass && p.sgd_within_bound;
    points.push_back({{"horizon", p.horizon},
                      {"replications", p.replications},
                      {"value_regret", p.value_regret},
                      {"value_regret_se", p.value_regret_se},
                      {"sgd_regret", p.sgd_regret},
                      {"sgd_regret_se", p.sgd_regret_se},
                      {"mean_stopped_rounds", p.mean_stopped_rounds},
                      {"path_length", p.bounds.path_length},
                      {"reg1_bound", p.bounds.reg1_bound},
                      {"regret_bound", p.bounds.regret_bound},
                      {"weak_regret_bound", p.bounds.weak_regret_bound},
                      {"lipschitz", p.bounds.smoothness.lipschitz},
                      {"delta", p.bounds.delta},
                      {"weak_delta", p.bounds.weak_delta},
                      {"sgd_within_bound", p.sgd_within_bound}});
  }
  Json doc = {{"scenario", e.scenario},
              {"points", points},
              {"exponent", e.exponent ? Json(*e.exponent) : Json()},
              {"switches", e.switches},
              {"path_length", e.path_length},
              {"path_cap", e.mu_cap * static_cast<double>(e.switches)},
              {"pass", pass}};
  if (!curves.empty()) {
    std::string text = "mu,spend,value,objective,w\n";
    for (const CurveRow& r : CurveDump(s, curve_points)) {
      text += fmt::format("{:.17g},{:.17g},{:.17g},{:.17g},{:.17g}\n", r.mu,
                          r.spend, r.value, r.objective, r.w);
    }
    WriteText(curves, text);
  }
  if (!svg.empty()) {
    std::vector<double> rounds(e.learner_path.size());
    for (std::size_t t = 0; t < rounds.size(); ++t) rounds[t] = static_cast<double>(t + 1);
    WriteText(svg, LinePlotSvg(fmt::format("{}: multipliers", e.scenario), "round",
                               "mu", {{"learner", rounds, e.learner_path},
                                      {"perfect", rounds, e.perfect_path}}));
  }
  if (!c.json.empty()) EmitJson(c.json, doc);
  if (c.json != "-") {
    fmt::print("scenario {}\n", e.scenario);
    fmt::print("{:>8} {:>5} {:>12} {:>10} {:>12} {:>12} {:>8}\n", "T", "reps",
               "value_regret", "se", "sgd_regret", "reg1_bound", "stopped");
    for (const RegretPoint& p : e.points) {
      fmt::print("{:>8} {:>5} {:>12.5g} {:>10.3g} {:>12.5g} {:>12.5g} {:>8.1f}\n",
                 p.horizon, p.replications, p.value_regret, p.value_regret_se,
                 p.sgd_regret, p.bounds.reg1_bound, p.mean_stopped_rounds);
    }
    if (e.exponent) fmt::print("fitted exponent {:.4f}\n", *e.exponent);
    fmt::print("switches {}  path length {:.6g} (cap {:.6g})\n", e.switches,
               e.path_length, e.mu_cap * static_cast<double>(e.switches));
  }
  return pass ? kOk : kCheckFailed;
}

std::vector<fs::path> BundledScenarios() {
  std::vector<fs::path> out;
  const fs::path root(PACESIM_SCENARIO_DIR);
  std::error_code ec;
  for (fs::recursive_directory_iterator it(root, ec), end; !ec && it != end;
       it.increment(ec)) {
    if (it->is_regular_file() && it->path().extension() == ".json") {
      out.push_back(it->path());
    }
  }
  if (ec) throw IoError(root.string() + ": " + ec.message());
  std::sort(out.begin(), out.end());
  return out;
}

int CmdVerify(const std::string& suite, VerifyOptions o, const std::string& json) {
  if (o.scenarios.empty()) o.scenarios = BundledScenarios();
  const std::vector<CheckResult> results = RunVerifySuite(suite, o);
  bool pass = true;
  Json doc = Json::array();
  for (const CheckResult& r : results) {
    pass = pass && r.pass;
    doc.push_back(ToJson(r));
  }
  if (!json.empty()) EmitJson(json, doc);
  if (json != "-") {
    fmt::print("{:<28} {:>9} {:>14} {:>14} {}\n", "checker", "trials", "statistic",
               "bound", "result");
    for (const CheckResult& r : results) {
      fmt::print("{:<28} {:>9} {:>14.6g} {:>14.6g} {}\n", r.checker, r.trials,
                 r.statistic, r.bound, r.pass ? "pass" : "FAIL");
    }
  }
  return pass ? kOk : kCheckFailed;
}

int CmdCounterexample(double mu_cap, std::int64_t horizon, bool paced,
                      const std::string& json) {
  const CounterexampleReport r = RunCounterexample(mu_cap, horizon, paced);
  const Json doc = {{"mu_cap", r.mu_cap},
                    {"horizon", r.horizon},
                    {"paced", r.paced},
                    {"realized_welfare", r.realized_welfare},
                    {"reference_welfare", r.reference_welfare},
                    {"optimum", r.optimum},
                    {"ratio", r.ratio},
                    {"ratio_to_optimum", r.ratio_to_optimum}};
  if (!json.empty()) EmitJson(json, doc);
  if (json != "-") {
    fmt::print("mu_cap {}  T {}  {}\n", r.mu_cap, r.horizon,
               r.paced ? "both paced" : "scripted");
    fmt::print("realized {:.6g}  reference {:.6g}  ratio {:.6g}\n",
               r.realized_welfare, r.reference_welfare, r.ratio);
    fmt::print("ex-ante optimum {:.6g}  ratio {:.6g}\n", r.optimum,
               r.ratio_to_optimum);
  }
  return kOk;
}

int Main(int argc, char** argv) {
  CLI::App app{"Budget-paced auction simulator"};
  app.require_subcommand(1);

  Common run_c, welfare_c, regret_c;
  std::string out_dir;
  bool summary_only = false;
  std::optional<std::size_t> run_reps, welfare_reps;
  CLI::App* run = app.add_subcommand("run", "Simulate a scenario and write traces");
  AddCommon(run, run_c);
  run->add_option("--out", out_dir, "Output directory")->required();
  run->add_flag("--summary-only", summary_only, "Skip per-replication trace CSVs");
  run->add_option("--replications", run_reps, "Override the replication count");

  CLI::App* welfare =
      app.add_subcommand("welfare", "Compare realized welfare with the ex-ante optimum");
  AddCommon(welfare, welfare_c);
  welfare->add_option("--replications", welfare_reps, "Override the replication count");

  std::string curves, svg;
  std::size_t curve_points = 201;
  CLI::App* regret = app.add_subcommand("regret", "Dynamic regret of agent 0");
  AddCommon(regret, regret_c);
  regret->add_option("--curves", curves, "CSV of Z, V, H, W over the multiplier range");
  regret->add_option("--curve-points", curve_points, "Grid size for --curves")
      ->check(CLI::Range(2, 100000));
  regret->add_option("--svg", svg, "SVG plot of learner and perfect multipliers");

  std::string suite, verify_json;
  VerifyOptions vo;
  std::vector<std::string> scenario_paths;
  CLI::App* verify = app.add_subcommand("verify", "Run a verification suite");
  verify->add_option("suite", suite, "One of: concentration, sgd, lipint, gsp-core, "
                                     "mbb-core, epoch-lemma, stopping-bound, rk, all")
      ->required();
  verify->add_flag("--negative", vo.negative, "Run the negative control instead");
  verify->add_option("--trials", vo.trials, "Trials or replications (0: default)");
  verify->add_option("--seed", vo.seed, "Seed");
  verify->add_option("--scenarios", scenario_paths,
                     "Scenario files for the market-level suites");
  verify->add_option("--json", verify_json, "Write the JSON report here ('-' for stdout)");

  double mu_cap = 99.0;
  std::int64_t horizon = 1000;
  bool paced = false;
  std::string ce_json;
  CLI::App* ce = app.add_subcommand("counterexample",
                                    "Welfare of the two-agent counterexample");
  ce->add_option("--mu-cap", mu_cap, "Multiplier cap")->check(CLI::PositiveNumber);
  ce->add_option("--horizon", horizon, "Rounds")->check(CLI::NonNegativeNumber);
  ce->add_flag("--paced", paced, "Both agents run the pacing algorithm");
  ce->add_option("--json", ce_json, "Write the JSON report here ('-' for stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kUsage;
  }

  ConfigureWorkersFromEnvironment();
  try {
    if (*run) return CmdRun(run_c, out_dir, summary_only, run_reps);
    if (*welfare) return CmdWelfare(welfare_c, welfare_reps);
    if (*regret) return CmdRegret(regret_c, curves, curve_points, svg);
    if (*verify) {
      for (const auto& p : scenario_paths) vo.scenarios.emplace_back(p);
      return CmdVerify(suite, vo, verify_json);
    }
    return CmdCounterexample(mu_cap, horizon, paced, ce_json);
  } catch (const IoError& e) {
    fmt::print(stderr, "error: {}\n", e.what());
    return kIo;
  } catch (const CapacityError& e) {
    fmt::print(stderr, "error: {}\n", e.what());
    return kCapacity;
  } catch (const EnvironmentError& e) {
    fmt::print(stderr, "error: {}\n", e.what());
    return kEnvironment;
  } catch (const InvariantViolation& e) {
    fmt::print(stderr, "invariant violated: {}\n", e.what());
    return kCheckFailed;
  } catch (const Error& e) {
    // ConfigError, StatisticsError, PreconditionError and the rest all stem
    // from the inputs.
    fmt::print(stderr, "error: {}\n", e.what());
    return kUsage;
  } catch (const std::exception& e) {
    fmt::print(stderr, "internal error: {}\n", e.what());
    return kInternal;
  }
}

}  // namespace
}  // namespace pacesim

int main(int argc, char** argv) { return pacesim::Main(argc, argv); }
