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

#ifndef P2PCKPT_SIM_TRACE_H_
#define P2PCKPT_SIM_TRACE_H_

// Session traces: one session per line, "start_seconds,duration_seconds",
// '#' starts a comment line.

#include <cstddef>
#include <filesystem>
#include <istream>
#include <stdexcept>
#include <string>
#include <vector>

namespace p2pckpt::sim {

struct Session {
  double start = 0.0;
  double duration = 0.0;
};

struct SessionTrace {
  std::vector<Session> sessions;  // sorted by start

  double mean_duration() const;
};

class TraceParseError : public std::runtime_error {
 public:
  TraceParseError(const std::string& source, std::size_t line, const std::string& what);
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

// Throws TraceParseError (line 0 for whole-file problems such as an empty trace).
SessionTrace parse_trace(std::istream& in, const std::string& source = "<stream>");

// Also throws std::system_error-derived errors when the file cannot be opened.
SessionTrace ingest_trace(const std::filesystem::path& path);

struct TraceStats {
  std::size_t sessions = 0;
  double mean = 0.0;
  double stddev = 0.0;
  double median = 0.0;
  double min = 0.0;
  double max = 0.0;
  double span = 0.0;  // last start + duration - first start
};

TraceStats summarize(const SessionTrace& trace);

}  // namespace p2pckpt::sim

#endif  // P2PCKPT_SIM_TRACE_H_
