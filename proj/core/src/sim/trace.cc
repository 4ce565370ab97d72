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

#include "p2pckpt/sim/trace.h"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <numeric>
#include <string_view>
#include <system_error>

namespace p2pckpt::sim {
namespace {

std::string_view Trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

bool ParseDecimal(std::string_view s, double& out) {
  s = Trim(s);
  if (s.empty()) return false;
  if (s.front() == '+') s.remove_prefix(1);
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
  return ec == std::errc() && ptr == s.data() + s.size() && std::isfinite(out);
}

}  // namespace

double SessionTrace::mean_duration() const {
  if (sessions.empty()) return 0.0;
  double sum = 0.0;
  for (const auto& s : sessions) sum += s.duration;
  return sum / static_cast<double>(sessions.size());
}

TraceParseError::TraceParseError(const std::string& source, std::size_t line,
                                 const std::string& what)
    : std::runtime_error(source + ":" + std::to_string(line) + ": " + what), line_(line) {}

SessionTrace parse_trace(std::istream& in, const std::string& source) {
  SessionTrace trace;
  std::string raw;
  std::size_t line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    const std::string_view line = Trim(raw);
    if (line.empty() || line.front() == '#') continue;
    const auto comma = line.find(',');
    if (comma == std::string_view::npos || line.find(',', comma + 1) != std::string_view::npos) {
      throw TraceParseError(source, line_no, "expected two comma-separated fields");
    }
    Session s;
    if (!ParseDecimal(line.substr(0, comma), s.start)) {
      throw TraceParseError(source, line_no, "malformed session start");
    }
    if (!ParseDecimal(line.substr(comma + 1), s.duration)) {
      throw TraceParseError(source, line_no, "malformed session duration");
    }
    if (!(s.duration > 0.0)) {
      throw TraceParseError(source, line_no, "session duration must be positive");
    }
    trace.sessions.push_back(s);
  }
  if (trace.sessions.empty()) throw TraceParseError(source, 0, "trace contains no sessions");
  std::stable_sort(trace.sessions.begin(), trace.sessions.end(),
                   [](const Session& a, const Session& b) { return a.start < b.start; });
  return trace;
}

SessionTrace ingest_trace(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw std::system_error(std::make_error_code(std::errc::no_such_file_or_directory),
                            "cannot open trace " + path.string());
  }
  return parse_trace(in, path.string());
}

TraceStats summarize(const SessionTrace& trace) {
  TraceStats st;
  st.sessions = trace.sessions.size();
  if (st.sessions == 0) return st;
  std::vector<double> d;
  d.reserve(st.sessions);
  double end = trace.sessions.front().start;
  for (const auto& s : trace.sessions) {
    d.push_back(s.duration);
    end = std::max(end, s.start + s.duration);
  }
  st.span = end - trace.sessions.front().start;
  st.mean = trace.mean_duration();
  double ss = 0.0;
  for (double x : d) ss += (x - st.mean) * (x - st.mean);
  st.stddev = st.sessions > 1 ? std::sqrt(ss / static_cast<double>(st.sessions - 1)) : 0.0;
  std::sort(d.begin(), d.end());
  st.min = d.front();
  st.max = d.back();
  const std::size_t mid = d.size() / 2;
  st.median = d.size() % 2 ? d[mid] : 0.5 * (d[mid - 1] + d[mid]);
  return st;
}

}  // namespace p2pckpt::sim
