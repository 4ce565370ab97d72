// Copyright 2026 The p2pckpt Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "p2pckpt/experiment/config.h"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <memory>
#include <set>
#include <sstream>
#include <system_error>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <fmt/format.h>

#include "p2pckpt/sim/trace.h"

namespace p2pckpt::experiment {
namespace {

namespace pt = boost::property_tree;

std::string_view Trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

std::vector<std::string_view> SplitList(std::string_view s) {
  std::vector<std::string_view> out;
  while (true) {
    const auto comma = s.find(',');
    out.push_back(Trim(s.substr(0, comma)));
    if (comma == std::string_view::npos) break;
    s.remove_prefix(comma + 1);
  }
  return out;
}

double ParseNumber(std::string_view s, std::string_view what) {
  s = Trim(s);
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (s.empty() || ec != std::errc() || ptr != s.data() + s.size() || !std::isfinite(v)) {
    throw ConfigError(fmt::format("{}: '{}' is not a number", what, s));
  }
  return v;
}

long ParseInteger(std::string_view s, std::string_view what) {
  s = Trim(s);
  long v = 0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (s.empty() || ec != std::errc() || ptr != s.data() + s.size()) {
    throw ConfigError(fmt::format("{}: '{}' is not an integer", what, s));
  }
  return v;
}

bool ParseBool(std::string_view s, std::string_view what) {
  s = Trim(s);
  if (s == "true" || s == "yes" || s == "on" || s == "1") return true;
  if (s == "false" || s == "no" || s == "off" || s == "0") return false;
  throw ConfigError(fmt::format("{}: '{}' is not a boolean", what, s));
}

bool IsNone(std::string_view s) {
  s = Trim(s);
  return s == "none" || s == "off" || s.empty();
}

std::vector<double> DurationList(std::string_view s, std::string_view what) {
  std::vector<double> out;
  for (auto item : SplitList(s)) {
    try {
      out.push_back(parse_duration(item));
    } catch (const ConfigError& e) {
      throw ConfigError(fmt::format("{}: {}", what, e.what()));
    }
  }
  return out;
}

using Handler = void (*)(ScenarioConfig&, std::string_view, const std::filesystem::path&);

const std::map<std::string, Handler, std::less<>>& Handlers() {
  static const std::map<std::string, Handler, std::less<>> table = {
      {"scenario.name", [](ScenarioConfig& c, std::string_view v, const auto&) { c.name = std::string(Trim(v)); }},
      {"churn.mtbf", [](ScenarioConfig& c, std::string_view v, const auto&) { c.mtbfs = DurationList(v, "churn.mtbf"); }},
      {"churn.rate",
       [](ScenarioConfig& c, std::string_view v, const auto&) {
         c.mtbfs.clear();
         for (auto item : SplitList(v)) {
           const double r = ParseNumber(item, "churn.rate");
           if (!(r > 0.0)) throw ConfigError("churn.rate: rates must be positive");
           c.mtbfs.push_back(1.0 / r);
         }
       }},
      {"churn.doubling_period",
       [](ScenarioConfig& c, std::string_view v, const auto&) {
         if (IsNone(v)) {
           c.doubling_period.reset();
         } else {
           c.doubling_period = parse_duration(v);
         }
       }},
      {"churn.trace",
       [](ScenarioConfig& c, std::string_view v, const std::filesystem::path& base) {
         if (IsNone(v)) {
           c.trace.reset();
           return;
         }
         std::filesystem::path p{std::string(Trim(v))};
         c.trace = p.is_absolute() ? p : base / p;
       }},
      {"churn.population",
       [](ScenarioConfig& c, std::string_view v, const auto&) {
         c.world.population = static_cast<std::size_t>(std::max(0L, ParseInteger(v, "churn.population")));
       }},
      {"churn.degree",
       [](ScenarioConfig& c, std::string_view v, const auto&) {
         c.world.degree = static_cast<std::size_t>(std::max(0L, ParseInteger(v, "churn.degree")));
       }},
      {"churn.stabilization", [](ScenarioConfig& c, std::string_view v, const auto&) { c.world.stabilization_period = parse_duration(v); }},
      {"churn.warmup", [](ScenarioConfig& c, std::string_view v, const auto&) { c.world.warmup = parse_duration(v); }},
      {"job.peers",
       [](ScenarioConfig& c, std::string_view v, const auto&) {
         c.peers.clear();
         for (auto item : SplitList(v)) c.peers.push_back(static_cast<int>(ParseInteger(item, "job.peers")));
       }},
      {"job.work", [](ScenarioConfig& c, std::string_view v, const auto&) { c.work_seconds = parse_duration(v); }},
      {"overheads.checkpoint",
       [](ScenarioConfig& c, std::string_view v, const auto&) { c.checkpoint_overheads = DurationList(v, "overheads.checkpoint"); }},
      {"overheads.download",
       [](ScenarioConfig& c, std::string_view v, const auto&) { c.download_overheads = DurationList(v, "overheads.download"); }},
      {"policies.adaptive", [](ScenarioConfig& c, std::string_view v, const auto&) { c.adaptive = ParseBool(v, "policies.adaptive"); }},
      {"policies.fixed",
       [](ScenarioConfig& c, std::string_view v, const auto&) {
         if (IsNone(v)) {
           c.fixed_intervals.clear();
         } else {
           c.fixed_intervals = DurationList(v, "policies.fixed");
         }
       }},
      {"policies.none", [](ScenarioConfig& c, std::string_view v, const auto&) { c.no_checkpointing = ParseBool(v, "policies.none"); }},
      {"estimator.window",
       [](ScenarioConfig& c, std::string_view v, const auto&) {
         c.world.window_capacity = static_cast<std::size_t>(std::max(0L, ParseInteger(v, "estimator.window")));
       }},
      {"estimator.formula",
       [](ScenarioConfig& c, std::string_view v, const auto&) {
         try {
           c.estimator.formula = est::parse_overhead_formula(Trim(v));
         } catch (const std::invalid_argument& e) {
           throw ConfigError(fmt::format("estimator.formula: {}", e.what()));
         }
       }},
      {"estimator.calibration", [](ScenarioConfig& c, std::string_view v, const auto&) { c.estimator.calibration_seconds = parse_duration(v); }},
      {"estimator.calibration_interval",
       [](ScenarioConfig& c, std::string_view v, const auto&) { c.estimator.calibration_interval = parse_duration(v); }},
      {"estimator.prior_mtbf",
       [](ScenarioConfig& c, std::string_view v, const auto&) {
         const double m = parse_duration(v);
         if (!(m > 0.0)) throw ConfigError("estimator.prior_mtbf must be positive");
         c.estimator.prior_rate = 1.0 / m;
       }},
      {"estimator.freshness_periods",
       [](ScenarioConfig& c, std::string_view v, const auto&) {
         c.estimator.freshness_periods = static_cast<int>(ParseInteger(v, "estimator.freshness_periods"));
       }},
      {"estimator.noise", [](ScenarioConfig& c, std::string_view v, const auto&) { c.estimator.measurement_noise = ParseNumber(v, "estimator.noise"); }},
      {"estimator.cpu_baseline",
       [](ScenarioConfig& c, std::string_view v, const auto&) { c.estimator.cpu_baseline = ParseNumber(v, "estimator.cpu_baseline"); }},
      {"estimator.message_rate",
       [](ScenarioConfig& c, std::string_view v, const auto&) { c.estimator.message_rate = ParseNumber(v, "estimator.message_rate"); }},
      {"run.seeds",
       [](ScenarioConfig& c, std::string_view v, const auto&) {
         const long n = ParseInteger(v, "run.seeds");
         if (n < 1) throw ConfigError("run.seeds must be at least 1");
         set_seed_count(c, static_cast<int>(n));
       }},
      {"run.seed_list",
       [](ScenarioConfig& c, std::string_view v, const auto&) {
         c.seeds.clear();
         for (auto item : SplitList(v)) {
           const long s = ParseInteger(item, "run.seed_list");
           if (s < 0) throw ConfigError("run.seed_list entries must be non-negative");
           c.seeds.push_back(static_cast<std::uint64_t>(s));
         }
       }},
      {"run.max_wall_factor", [](ScenarioConfig& c, std::string_view v, const auto&) { c.wall_cap_factor = ParseNumber(v, "run.max_wall_factor"); }},
  };
  return table;
}

}  // namespace

double parse_duration(std::string_view text) {
  std::string_view s = Trim(text);
  if (s.empty()) throw ConfigError("empty duration");
  double scale = 1.0;
  switch (s.back()) {
    case 's':
      s.remove_suffix(1);
      break;
    case 'm':
      scale = 60.0;
      s.remove_suffix(1);
      break;
    case 'h':
      scale = 3600.0;
      s.remove_suffix(1);
      break;
    case 'd':
      scale = 86400.0;
      s.remove_suffix(1);
      break;
    default:
      break;
  }
  double v = 0.0;
  s = Trim(s);
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (s.empty() || ec != std::errc() || ptr != s.data() + s.size() || !std::isfinite(v)) {
    throw ConfigError(fmt::format("'{}' is not a duration", Trim(text)));
  }
  return v * scale;
}

void set_seed_count(ScenarioConfig& config, int n) {
  config.seeds.clear();
  for (int i = 1; i <= n; ++i) config.seeds.push_back(static_cast<std::uint64_t>(i));
}

void ScenarioConfig::validate() const {
  if (name.empty() || name.find_first_of(",\n\"") != std::string::npos) {
    throw ConfigError("scenario.name must be non-empty and free of commas and quotes");
  }
  if (mtbfs.empty()) throw ConfigError("churn.mtbf needs at least one value");
  for (double m : mtbfs) {
    if (!(m > 0.0)) throw ConfigError("churn.mtbf values must be positive");
  }
  if (doubling_period && !(*doubling_period > 0.0)) {
    throw ConfigError("churn.doubling_period must be positive");
  }
  if (trace && doubling_period) throw ConfigError("churn.trace cannot be combined with doubling");
  try {
    world.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(fmt::format("churn: {}", e.what()));
  }
  if (peers.empty()) throw ConfigError("job.peers needs at least one value");
  for (int k : peers) {
    if (k < 1) throw ConfigError("job.peers values must be at least 1");
    if (static_cast<std::size_t>(k) >= world.population) {
      throw ConfigError("job.peers must be smaller than churn.population");
    }
  }
  if (!(work_seconds > 0.0)) throw ConfigError("job.work must be positive");
  if (checkpoint_overheads.empty() || download_overheads.empty()) {
    throw ConfigError("overheads need at least one value each");
  }
  for (double v : checkpoint_overheads) {
    if (!(v >= 0.0)) throw ConfigError("overheads.checkpoint must be non-negative");
  }
  for (double v : download_overheads) {
    if (!(v >= 0.0)) throw ConfigError("overheads.download must be non-negative");
  }
  if (!adaptive && fixed_intervals.empty() && !no_checkpointing) {
    throw ConfigError("at least one policy must be enabled");
  }
  for (double f : fixed_intervals) {
    if (!(f > 0.0)) throw ConfigError("policies.fixed intervals must be positive");
  }
  if (std::set<double>(fixed_intervals.begin(), fixed_intervals.end()).size() != fixed_intervals.size()) {
    throw ConfigError("policies.fixed intervals must be distinct");
  }
  try {
    estimator.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(fmt::format("estimator: {}", e.what()));
  }
  if (seeds.empty()) throw ConfigError("at least one seed is required");
  if (std::set<std::uint64_t>(seeds.begin(), seeds.end()).size() != seeds.size()) {
    throw ConfigError("seeds must be distinct");
  }
  if (!(wall_cap_factor >= 1.0)) throw ConfigError("run.max_wall_factor must be at least 1");
}

ScenarioConfig parse_config(std::istream& in, const std::filesystem::path& base_dir) {
  // The INI reader only knows ';' comments; map '#' lines onto them.
  std::stringstream text;
  std::string line;
  while (std::getline(in, line)) {
    const auto t = Trim(line);
    if (!t.empty() && t.front() == '#') {
      text << ";\n";
    } else {
      text << line << '\n';
    }
  }

  pt::ptree tree;
  try {
    pt::read_ini(text, tree);
  } catch (const pt::ini_parser_error& e) {
    throw ConfigError(fmt::format("line {}: {}", e.line(), e.message()));
  }

  ScenarioConfig config;
  set_seed_count(config, kDefaultSeedCount);
  const auto& handlers = Handlers();
  for (const auto& [section, body] : tree) {
    if (body.empty()) {
      throw ConfigError(fmt::format("key '{}' must appear inside a [section]", section));
    }
    for (const auto& [key, value] : body) {
      const std::string full = section + "." + key;
      const auto it = handlers.find(full);
      if (it == handlers.end()) throw ConfigError(fmt::format("unknown setting '{}'", full));
      it->second(config, value.data(), base_dir);
    }
  }
  config.validate();
  return config;
}

ScenarioConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw std::system_error(std::make_error_code(std::errc::no_such_file_or_directory),
                            "cannot open config " + path.string());
  }
  auto base = path.parent_path();
  if (base.empty()) base = ".";
  return parse_config(in, base);
}

std::vector<Scenario> expand(const ScenarioConfig& config) {
  config.validate();
  std::shared_ptr<const sim::SessionTrace> trace;
  if (config.trace) {
    trace = std::make_shared<const sim::SessionTrace>(sim::ingest_trace(*config.trace));
  }

  std::vector<sim::CheckpointPolicy> policies;
  if (config.adaptive) policies.emplace_back(sim::AdaptiveInterval{});
  for (double f : config.fixed_intervals) policies.emplace_back(sim::FixedInterval{f});
  if (config.no_checkpointing) policies.emplace_back(sim::NoCheckpointing{});

  const bool sweep_mtbf = config.mtbfs.size() > 1 && !trace;
  const bool sweep_peers = config.peers.size() > 1;
  const bool sweep_v = config.checkpoint_overheads.size() > 1;
  const bool sweep_td = config.download_overheads.size() > 1;

  std::vector<Scenario> out;
  const std::vector<double> mtbfs = trace ? std::vector<double>{trace->mean_duration()} : config.mtbfs;
  for (double mtbf : mtbfs) {
    for (int k : config.peers) {
      for (double v : config.checkpoint_overheads) {
        for (double td : config.download_overheads) {
          Scenario s;
          s.id = config.name;
          if (sweep_mtbf) s.id += fmt::format("/mtbf={:g}s", mtbf);
          if (sweep_peers) s.id += fmt::format("/k={}", k);
          if (sweep_v) s.id += fmt::format("/V={:g}s", v);
          if (sweep_td) s.id += fmt::format("/Td={:g}s", td);
          if (trace) {
            s.churn = sim::ChurnSchedule::replay(trace);
          } else if (config.doubling_period) {
            s.churn = sim::ChurnSchedule::doubling(1.0 / mtbf, *config.doubling_period);
          } else {
            s.churn = sim::ChurnSchedule::constant(1.0 / mtbf);
          }
          s.world = config.world;
          s.job = sim::JobSpec{k, config.work_seconds};
          s.truth = sim::TrueOverheads{v, td};
          s.estimator = config.estimator;
          s.policies = policies;
          s.seeds = config.seeds;
          s.max_wall_seconds = config.wall_cap_factor * config.work_seconds;
          out.push_back(std::move(s));
        }
      }
    }
  }
  return out;
}

}  // namespace p2pckpt::experiment
