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

#include <fmt/format.h>

#include <charconv>
#include <istream>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

#include "pacesim/errors.h"
#include "pacesim/market.h"

namespace pacesim {

namespace {

constexpr std::string_view kHeader =
    "round,agent,value,multiplier,bid,allocation,payment,remaining_budget";

struct Row {
  std::size_t round = 0;
  std::size_t agent = 0;
  double value = 0.0;
  MultiplierStatus status = MultiplierStatus::kNone;
  double multiplier = 0.0;
  double bid = 0.0;
  double allocation = 0.0;
  double payment = 0.0;
  double remaining = 0.0;
};

[[noreturn]] void Fail(std::size_t line, const std::string& what) {
  throw ConfigError("trace line " + std::to_string(line) + ": " + what);
}

double ParseDouble(std::string_view s, std::size_t line) {
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) {
    Fail(line, "bad number '" + std::string(s) + "'");
  }
  return v;
}

std::size_t ParseIndex(std::string_view s, std::size_t line) {
  std::size_t v = 0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) {
    Fail(line, "bad integer '" + std::string(s) + "'");
  }
  return v;
}

}  // namespace

void WriteTraceCsv(std::ostream& out, const Trace& trace) {
  fmt::memory_buffer buf;
  fmt::format_to(std::back_inserter(buf), "{}\n", kHeader);
  for (std::size_t t = 0; t < trace.num_rounds; ++t) {
    for (std::size_t k = 0; k < trace.num_agents; ++k) {
      const std::size_t i = trace.at(t, k);
      fmt::format_to(std::back_inserter(buf), "{},{},{:.17g},", t + 1, k,
                     trace.values[i]);
      switch (trace.status[i]) {
        case MultiplierStatus::kActive:
          fmt::format_to(std::back_inserter(buf), "{:.17g}",
                         trace.multipliers[i]);
          break;
        case MultiplierStatus::kStopped:
          fmt::format_to(std::back_inserter(buf), "stopped");
          break;
        case MultiplierStatus::kNone:
          break;
      }
      fmt::format_to(std::back_inserter(buf), ",{:.17g},{:.17g},{:.17g},{:.17g}\n",
                     trace.bids[i], trace.allocations[i], trace.payments[i],
                     trace.remaining[i]);
    }
  }
  out.write(buf.data(), static_cast<std::streamsize>(buf.size()));
}

Trace ReadTraceCsv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || line != kHeader) {
    Fail(1, "expected header '" + std::string(kHeader) + "'");
  }
  std::vector<Row> rows;
  std::size_t rounds = 0;
  std::size_t agents = 0;
  std::size_t lineno = 1;
  std::vector<std::string_view> cells;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    cells.clear();
    std::string_view rest(line);
    while (true) {
      const std::size_t comma = rest.find(',');
      cells.push_back(rest.substr(0, comma));
      if (comma == std::string_view::npos) break;
      rest.remove_prefix(comma + 1);
    }
    if (cells.size() != 8) Fail(lineno, "expected 8 columns");
    Row r;
    r.round = ParseIndex(cells[0], lineno);
    r.agent = ParseIndex(cells[1], lineno);
    if (r.round == 0) Fail(lineno, "rounds are numbered from 1");
    r.value = ParseDouble(cells[2], lineno);
    if (cells[3] == "stopped") {
      r.status = MultiplierStatus::kStopped;
    } else if (!cells[3].empty()) {
      r.status = MultiplierStatus::kActive;
      r.multiplier = ParseDouble(cells[3], lineno);
    }
    r.bid = ParseDouble(cells[4], lineno);
    r.allocation = ParseDouble(cells[5], lineno);
    r.payment = ParseDouble(cells[6], lineno);
    r.remaining = ParseDouble(cells[7], lineno);
    rounds = std::max(rounds, r.round);
    agents = std::max(agents, r.agent + 1);
    rows.push_back(r);
  }
  if (rows.size() != rounds * agents) {
    Fail(lineno, "trace is not a complete round x agent grid");
  }
  Trace trace(rounds, agents);
  std::vector<bool> seen(rows.size(), false);
  for (const Row& r : rows) {
    const std::size_t i = trace.at(r.round - 1, r.agent);
    if (seen[i]) Fail(lineno, "duplicate entry for round " +
                                  std::to_string(r.round) + ", agent " +
                                  std::to_string(r.agent));
    seen[i] = true;
    trace.values[i] = r.value;
    trace.status[i] = r.status;
    if (r.status == MultiplierStatus::kActive) trace.multipliers[i] = r.multiplier;
    trace.bids[i] = r.bid;
    trace.allocations[i] = r.allocation;
    trace.payments[i] = r.payment;
    trace.remaining[i] = r.remaining;
    if (r.round == 1) trace.budgets[r.agent] = r.remaining;
  }
  return trace;
}

}  // namespace pacesim
