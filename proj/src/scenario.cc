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

#include "pacesim/scenario.h"

#include <charconv>
#include <cmath>
#include <fstream>
#include <initializer_list>
#include <iterator>
#include <limits>
#include <map>
#include <set>
#include <sstream>

#include <fmt/format.h>

#include "json.hpp"
#include "pacesim/constants.h"
#include "pacesim/errors.h"

namespace pacesim {

namespace {

using nlohmann::json;

constexpr double kInf = std::numeric_limits<double>::infinity();

std::string Join(const std::string& path, const std::string& part) {
  return path.empty() ? part : path + "." + part;
}

// ---- line index ----

struct LineCursor {
  int line = 1;
  int last_token_line = 1;  // line of the last non-blank character read
};

// Counts lines as the JSON lexer consumes characters.
class CountingIterator {
 public:
  using iterator_category = std::input_iterator_tag;
  using value_type = char;
  using difference_type = std::ptrdiff_t;
  using pointer = const char*;
  using reference = const char&;

  CountingIterator(const char* p, LineCursor* cursor) : p_(p), cursor_(cursor) {}
  reference operator*() const { return *p_; }
  CountingIterator& operator++() {
    const char c = *p_;
    if (c != ' ' && c != '\t' && c != '\r' && c != '\n') {
      cursor_->last_token_line = cursor_->line;
    }
    if (c == '\n') ++cursor_->line;
    ++p_;
    return *this;
  }
  CountingIterator operator++(int) {
    CountingIterator old = *this;
    ++*this;
    return old;
  }
  bool operator==(const CountingIterator& o) const { return p_ == o.p_; }
  bool operator!=(const CountingIterator& o) const { return p_ != o.p_; }

 private:
  const char* p_;
  LineCursor* cursor_;
};

// Records the line of every key and array element, keyed by dotted path.
class LineIndexer : public nlohmann::json_sax<json> {
 public:
  explicit LineIndexer(const LineCursor* cursor) : cursor_(cursor) {}

  std::map<std::string, int> lines;

  bool null() override { return Value(); }
  bool boolean(bool) override { return Value(); }
  bool number_integer(number_integer_t) override { return Value(); }
  bool number_unsigned(number_unsigned_t) override { return Value(); }
  bool number_float(number_float_t, const string_t&) override { return Value(); }
  bool string(string_t&) override { return Value(); }
  bool binary(binary_t&) override { return Value(); }
  bool start_object(std::size_t) override {
    Value();
    stack_.push_back({false, 0, "", current_});
    return true;
  }
  bool key(string_t& k) override {
    stack_.back().key = k;
    lines.emplace(Join(stack_.back().path, k), cursor_->last_token_line);
    return true;
  }
  bool end_object() override {
    stack_.pop_back();
    return true;
  }
  bool start_array(std::size_t) override {
    Value();
    stack_.push_back({true, 0, "", current_});
    return true;
  }
  bool end_array() override {
    stack_.pop_back();
    return true;
  }
  bool parse_error(std::size_t, const std::string&,
                   const nlohmann::detail::exception&) override {
    return false;
  }

 private:
  struct Frame {
    bool array;
    std::size_t next;
    std::string key;
    std::string path;
  };

  bool Value() {
    if (stack_.empty()) {
      current_.clear();
      return true;
    }
    Frame& f = stack_.back();
    current_ = f.array ? Join(f.path, std::to_string(f.next++))
                       : Join(f.path, f.key);
    lines.emplace(current_, cursor_->last_token_line);
    return true;
  }

  const LineCursor* cursor_;
  std::vector<Frame> stack_;
  std::string current_;
};

// ---- typed access with path-anchored errors ----

class Reader {
 public:
  Reader(std::string source, std::map<std::string, int> lines,
         std::set<std::string> overridden)
      : source_(std::move(source)),
        lines_(std::move(lines)),
        overridden_(std::move(overridden)) {}

  [[noreturn]] void Fail(const std::string& path, const std::string& msg) const {
    if (overridden_.count(path)) {
      throw ConfigError(fmt::format("{}: --set {}: {}", source_, path, msg));
    }
    // Fall back to the nearest enclosing value that has a line.
    std::string p = path;
    while (true) {
      const auto it = lines_.find(p);
      if (it != lines_.end()) {
        throw ConfigError(
            fmt::format("{}:{}: {}: {}", source_, it->second, path, msg));
      }
      const auto dot = p.rfind('.');
      if (dot == std::string::npos) break;
      p.resize(dot);
    }
    throw ConfigError(fmt::format("{}: {}: {}", source_, path.empty() ? "<root>" : path, msg));
  }

  void Keys(const json& obj, const std::string& path,
            std::initializer_list<std::string_view> allowed) const {
    if (!obj.is_object()) Fail(path, "expected an object");
    for (const auto& [k, v] : obj.items()) {
      bool ok = false;
      for (std::string_view a : allowed) ok = ok || k == a;
      if (!ok) Fail(Join(path, k), "unknown key");
    }
  }

  const json* Find(const json& obj, const std::string& key) const {
    const auto it = obj.find(key);
    return it == obj.end() ? nullptr : &*it;
  }

  const json& Require(const json& obj, const std::string& path,
                      const std::string& key) const {
    const json* v = Find(obj, key);
    if (v == nullptr) Fail(path, "missing required key '" + key + "'");
    return *v;
  }

  double Number(const json& v, const std::string& path) const {
    if (!v.is_number()) Fail(path, "expected a number");
    const double x = v.get<double>();
    if (!std::isfinite(x)) Fail(path, "expected a finite number");
    return x;
  }

  double NonNegative(const json& v, const std::string& path) const {
    const double x = Number(v, path);
    if (x < 0.0) Fail(path, "must be non-negative");
    return x;
  }

  double Positive(const json& v, const std::string& path) const {
    const double x = Number(v, path);
    if (!(x > 0.0)) Fail(path, "must be positive");
    return x;
  }

  std::int64_t Integer(const json& v, const std::string& path,
                       std::int64_t min) const {
    if (!v.is_number_integer()) Fail(path, "expected an integer");
    const std::int64_t x = v.get<std::int64_t>();
    if (x < min) Fail(path, fmt::format("must be at least {}", min));
    return x;
  }

  std::string String(const json& v, const std::string& path) const {
    if (!v.is_string()) Fail(path, "expected a string");
    return v.get<std::string>();
  }

  const json& Array(const json& v, const std::string& path,
                    bool non_empty) const {
    if (!v.is_array()) Fail(path, "expected an array");
    if (non_empty && v.empty()) Fail(path, "must not be empty");
    return v;
  }

  std::vector<double> Numbers(const json& v, const std::string& path) const {
    std::vector<double> out;
    std::size_t i = 0;
    for (const json& x : Array(v, path, false)) {
      out.push_back(NonNegative(x, Join(path, std::to_string(i++))));
    }
    return out;
  }

 private:
  std::string source_;
  std::map<std::string, int> lines_;
  std::set<std::string> overridden_;
};

// ---- overrides ----

void ApplyOverride(json& doc, const std::string& assignment,
                   std::string_view source, std::set<std::string>& touched) {
  const auto eq = assignment.find('=');
  if (eq == std::string::npos || eq == 0) {
    throw ConfigError(fmt::format("{}: --set expects path=value, got '{}'",
                                  source, assignment));
  }
  const std::string path = assignment.substr(0, eq);
  const std::string text = assignment.substr(eq + 1);
  json value = json::parse(text, nullptr, false);
  if (value.is_discarded()) value = text;

  json* node = &doc;
  std::string walked;
  std::stringstream parts(path);
  std::string part;
  std::vector<std::string> segments;
  while (std::getline(parts, part, '.')) segments.push_back(part);
  for (std::size_t i = 0; i < segments.size(); ++i) {
    const std::string& seg = segments[i];
    walked = Join(walked, seg);
    if (seg.empty()) {
      throw ConfigError(fmt::format("{}: --set {}: empty path segment", source, path));
    }
    if (node->is_array()) {
      std::size_t idx = 0;
      const auto [ptr, ec] = std::from_chars(seg.data(), seg.data() + seg.size(), idx);
      if (ec != std::errc() || ptr != seg.data() + seg.size() || idx >= node->size()) {
        throw ConfigError(fmt::format("{}: --set {}: no array element '{}'",
                                      source, path, seg));
      }
      node = &(*node)[idx];
    } else if (node->is_object() || node->is_null()) {
      node = &(*node)[seg];
    } else {
      throw ConfigError(fmt::format("{}: --set {}: '{}' is not a container",
                                    source, path, walked));
    }
  }
  *node = std::move(value);
  touched.insert(path);
}

// ---- sections ----

std::vector<ValuePoint> ParseSupport(const Reader& r, const json& model,
                                     const std::string& path) {
  r.Keys(model, path, {"support"});
  const std::string sp = Join(path, "support");
  const json& support = r.Array(r.Require(model, path, "support"), sp, true);
  std::vector<ValuePoint> points;
  std::size_t width = 0;
  for (std::size_t i = 0; i < support.size(); ++i) {
    const std::string pp = Join(sp, std::to_string(i));
    const json& p = support[i];
    r.Keys(p, pp, {"prob", "values", "label"});
    ValuePoint v;
    v.prob = r.NonNegative(r.Require(p, pp, "prob"), Join(pp, "prob"));
    if (v.prob > 1.0) r.Fail(Join(pp, "prob"), "must be at most 1");
    v.values = r.Numbers(r.Require(p, pp, "values"), Join(pp, "values"));
    if (v.values.empty()) r.Fail(Join(pp, "values"), "must not be empty");
    if (i == 0) width = v.values.size();
    if (v.values.size() != width) {
      r.Fail(Join(pp, "values"),
             fmt::format("has {} entries, the first point has {}",
                         v.values.size(), width));
    }
    if (const json* l = r.Find(p, "label")) v.label = r.String(*l, Join(pp, "label"));
    points.push_back(std::move(v));
  }
  try {
    ValueModel check(points);
  } catch (const ConfigError& e) {
    r.Fail(sp, e.what());
  }
  return points;
}

AgentEntry ParseAgent(const Reader& r, const json& a, const std::string& path) {
  AgentEntry e;
  if (!a.is_object()) r.Fail(path, "expected an object");
  if (const json* script = r.Find(a, "script")) {
    r.Keys(a, path, {"script", "budget"});
    const std::string sp = Join(path, "script");
    r.Keys(*script, sp, {"kind", "bid"});
    e.pacing = false;
    const std::string kind = r.String(r.Require(*script, sp, "kind"), Join(sp, "kind"));
    if (kind == "fixed") {
      e.script.kind = Script::Kind::kFixed;
      e.script.bid = r.NonNegative(r.Require(*script, sp, "bid"), Join(sp, "bid"));
    } else if (kind == "truthful") {
      e.script.kind = Script::Kind::kTruthful;
      if (r.Find(*script, "bid")) r.Fail(Join(sp, "bid"), "truthful scripts take no bid");
    } else {
      r.Fail(Join(sp, "kind"), "expected 'fixed' or 'truthful'");
    }
    e.budget = kInf;
    if (const json* b = r.Find(a, "budget")) e.budget = r.Positive(*b, Join(path, "budget"));
    return e;
  }
  r.Keys(a, path, {"budget", "learning_rate", "mu_cap"});
  e.budget = r.Positive(r.Require(a, path, "budget"), Join(path, "budget"));
  if (const json* v = r.Find(a, "learning_rate")) {
    e.learning_rate = r.Positive(*v, Join(path, "learning_rate"));
  }
  if (const json* v = r.Find(a, "mu_cap")) {
    e.mu_cap = r.NonNegative(*v, Join(path, "mu_cap"));
  }
  return e;
}

}  // namespace

SimulationConfig Scenario::AtHorizon(std::int64_t T) const {
  const ValueModel model(support);
  const double vbar = model.value_cap();
  const double scale = horizon > 0 ? static_cast<double>(T) / static_cast<double>(horizon) : 1.0;
  std::vector<ParticipantSpec> specs;
  for (const AgentEntry& a : agents) {
    const double budget = T == horizon ? a.budget : a.budget * scale;
    if (!a.pacing) {
      specs.push_back(ParticipantSpec::Scripted(a.script, budget));
      continue;
    }
    AgentConfig c = DefaultAgentConfig(budget, T, vbar);
    if (a.learning_rate) c.learning_rate = *a.learning_rate;
    if (a.mu_cap) c.mu_cap = *a.mu_cap;
    specs.push_back(ParticipantSpec::Pacing(c));
  }
  SimulationConfig cfg{Mechanism(format, feasible, agents.size()),
                       std::move(specs), model, T, seed};
  cfg.Validate();
  return cfg;
}

Scenario ParseScenario(std::string_view text, std::string_view source,
                       std::span<const std::string> overrides) {
  const std::string src(source);
  json doc;
  try {
    doc = json::parse(text.begin(), text.end());
  } catch (const json::parse_error& e) {
    throw ConfigError(fmt::format("{}: {}", src, e.what()));
  }
  LineCursor cursor;
  LineIndexer indexer(&cursor);
  json::sax_parse(CountingIterator(text.data(), &cursor),
                  CountingIterator(text.data() + text.size(), &cursor),
                  &indexer);
  std::set<std::string> touched;
  for (const std::string& o : overrides) ApplyOverride(doc, o, src, touched);
  const Reader r(src, std::move(indexer.lines), std::move(touched));

  r.Keys(doc, "", {"name", "mechanism", "agents", "value_model", "horizon",
                   "seed", "replications", "smoothing", "benchmark", "regret"});
  Scenario s;
  if (const json* v = r.Find(doc, "name")) s.name = r.String(*v, "name");

  const json& mech = r.Require(doc, "", "mechanism");
  r.Keys(mech, "mechanism", {"type", "click_rates"});
  const std::string type = r.String(r.Require(mech, "mechanism", "type"), "mechanism.type");
  try {
    s.format = ParseFormat(type);
  } catch (const ConfigError& e) {
    r.Fail("mechanism.type", e.what());
  }
  if (const json* rates = r.Find(mech, "click_rates")) {
    try {
      s.feasible = FeasibleSet::Polymatroid(r.Numbers(*rates, "mechanism.click_rates"));
    } catch (const ConfigError& e) {
      r.Fail("mechanism.click_rates", e.what());
    }
  } else if (s.format == AuctionFormat::kGsp) {
    r.Fail("mechanism", "gsp needs click_rates");
  }

  const json& agents = r.Array(r.Require(doc, "", "agents"), "agents", true);
  for (std::size_t k = 0; k < agents.size(); ++k) {
    s.agents.push_back(ParseAgent(r, agents[k], Join("agents", std::to_string(k))));
  }
  s.support = ParseSupport(r, r.Require(doc, "", "value_model"), "value_model");
  if (s.support.front().values.size() != s.agents.size()) {
    r.Fail("value_model.support",
           fmt::format("profiles have {} values for {} agents",
                       s.support.front().values.size(), s.agents.size()));
  }
  s.horizon = r.Integer(r.Require(doc, "", "horizon"), "horizon", 0);
  if (const json* v = r.Find(doc, "seed")) {
    s.seed = static_cast<std::uint64_t>(r.Integer(*v, "seed", 0));
  }
  if (const json* v = r.Find(doc, "replications")) {
    s.replications = static_cast<std::size_t>(r.Integer(*v, "replications", 1));
  }
  const double vbar = ValueModel(s.support).value_cap();
  s.smoothing = kDefaultSmoothingFraction * vbar;
  if (const json* v = r.Find(doc, "smoothing")) {
    r.Keys(*v, "smoothing", {"eta"});
    s.smoothing = r.NonNegative(r.Require(*v, "smoothing", "eta"), "smoothing.eta");
  }
  if (const json* v = r.Find(doc, "benchmark")) {
    r.Keys(*v, "benchmark", {"reference_rule"});
    const std::string rp = "benchmark.reference_rule";
    const json& rows = r.Array(r.Require(*v, "benchmark", "reference_rule"), rp, true);
    if (rows.size() != s.support.size()) {
      r.Fail(rp, fmt::format("has {} rows for {} support points", rows.size(),
                             s.support.size()));
    }
    ExAnteRule rule;
    for (std::size_t i = 0; i < rows.size(); ++i) {
      const std::string row_path = Join(rp, std::to_string(i));
      std::vector<double> row = r.Numbers(rows[i], row_path);
      if (row.size() != s.agents.size()) r.Fail(row_path, "needs one entry per agent");
      if (!s.feasible.Contains(row)) r.Fail(row_path, "is not a feasible allocation");
      rule.allocation.push_back(std::move(row));
    }
    s.reference_rule = std::move(rule);
  }
  if (const json* v = r.Find(doc, "regret")) {
    r.Keys(*v, "regret", {"horizons", "replications", "switch"});
    RegretSettings rs;
    if (const json* h = r.Find(*v, "horizons")) {
      const json& list = r.Array(*h, "regret.horizons", true);
      for (std::size_t i = 0; i < list.size(); ++i) {
        rs.horizons.push_back(r.Integer(list[i], Join("regret.horizons", std::to_string(i)), 1));
      }
    } else {
      rs.horizons = {std::max<std::int64_t>(s.horizon, 1)};
    }
    if (const json* reps = r.Find(*v, "replications")) {
      rs.replications = static_cast<std::size_t>(r.Integer(*reps, "regret.replications", 1));
    }
    if (const json* sw = r.Find(*v, "switch")) {
      r.Keys(*sw, "regret.switch", {"segment", "value_models"});
      rs.segment = static_cast<std::size_t>(
          r.Integer(r.Require(*sw, "regret.switch", "segment"), "regret.switch.segment", 1));
      const std::string mp = "regret.switch.value_models";
      const json& models = r.Array(r.Require(*sw, "regret.switch", "value_models"), mp, true);
      for (std::size_t i = 0; i < models.size(); ++i) {
        const std::string p = Join(mp, std::to_string(i));
        std::vector<ValuePoint> pts = ParseSupport(r, models[i], p);
        if (pts.front().values.size() != s.agents.size()) {
          r.Fail(p, "profiles need one value per agent");
        }
        rs.alternates.emplace_back(std::move(pts));
      }
    }
    s.regret = std::move(rs);
  }
  try {
    s.simulation();
  } catch (const ConfigError& e) {
    r.Fail("agents", e.what());
  }
  return s;
}

Scenario LoadScenario(const std::filesystem::path& path,
                      std::span<const std::string> overrides) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  if (in.bad()) throw IoError("error reading " + path.string());
  return ParseScenario(buf.str(), path.string(), overrides);
}

EnvironmentSchedule ScenarioEnvironment(const Scenario& s, std::int64_t T) {
  if (s.agents.empty() || !s.agents.front().pacing) {
    throw EnvironmentError("agent 0 must be the pacing learner");
  }
  for (std::size_t k = 1; k < s.agents.size(); ++k) {
    const AgentEntry& a = s.agents[k];
    if (a.pacing) {
      throw EnvironmentError(fmt::format(
          "agent {} adapts to the learner; its bids cannot be replayed", k));
    }
    if (std::isfinite(a.budget)) {
      throw EnvironmentError(fmt::format(
          "agent {} has a finite budget, so its bids depend on the history", k));
    }
  }
  auto step = [&](const std::vector<ValuePoint>& support) {
    std::vector<EnvironmentAtom> atoms;
    for (const ValuePoint& p : support) {
      EnvironmentAtom atom{p.prob, p.values[0], {}};
      for (std::size_t k = 1; k < s.agents.size(); ++k) {
        const Script& script = s.agents[k].script;
        atom.competing_bids.push_back(
            script.kind == Script::Kind::kFixed ? script.bid : p.values[k]);
      }
      atoms.push_back(std::move(atom));
    }
    return EnvironmentStep(s.format, s.feasible, std::move(atoms), s.smoothing);
  };
  const std::size_t rounds = static_cast<std::size_t>(std::max<std::int64_t>(T, 0));
  if (!s.regret || s.regret->alternates.empty()) {
    return EnvironmentSchedule::Stationary(step(s.support), rounds);
  }
  std::vector<EnvironmentStep> steps = {step(s.support)};
  for (const ValueModel& m : s.regret->alternates) steps.push_back(step(m.support()));
  return EnvironmentSchedule::Switching(std::move(steps), rounds, s.regret->segment);
}

}  // namespace pacesim
