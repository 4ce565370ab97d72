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

#ifndef P2PCKPT_SIM_WORLD_H_
#define P2PCKPT_SIM_WORLD_H_

// Churning peer population on a ring overlay. Peers take uniformly random
// ring positions and each knows its `degree` live successors. A departure is
// noticed at the next stabilization round by the peers that listed the
// departed one as a successor; each records the session lifetime and shares
// it with its neighbours and their neighbours (two successor hops). A joining
// peer copies its successor's lifetime window.

#include <cstddef>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <queue>
#include <span>
#include <unordered_map>
#include <unordered_set>
#include <variant>
#include <vector>

#include "p2pckpt/estimators.h"
#include "p2pckpt/sim/churn.h"
#include "p2pckpt/sim/rng.h"
#include "p2pckpt/sim/sim_time.h"

namespace p2pckpt::sim {

using PeerId = std::uint32_t;

struct WorldConfig {
  std::size_t population = 1000;
  std::size_t degree = 4;
  double stabilization_period = 30.0;
  // Churn runs this long before time 0 so lifetime windows start warm.
  double warmup = 86400.0;
  std::size_t window_capacity = est::kDefaultWindowCapacity;

  void validate() const;
};

struct PeerState {
  PeerId id = 0;
  bool alive = false;
  bool participant = false;
  SimTime session_start;
  SimTime departure = SimTime::never();  // scheduled while alive, actual afterwards
  std::uint64_t ring_position = 0;

  double lifetime_seconds() const { return (departure - session_start).seconds(); }
};

struct Observation {
  PeerId peer = 0;
  double lifetime = 0.0;
  SimTime departed;
};

struct Departure {
  PeerId peer;
};
struct StabilizationRound {};
struct JobTimer {
  std::uint64_t epoch;
};
struct DownloadMeasured {
  double seconds;
};
struct InjectedFailure {};

using EventPayload =
    std::variant<Departure, StabilizationRound, JobTimer, DownloadMeasured, InjectedFailure>;

struct Event {
  SimTime time;
  std::uint64_t seq = 0;
  EventPayload payload;
};

// Min-queue on (time, insertion sequence).
class EventQueue {
 public:
  void push(SimTime at, EventPayload payload);
  bool empty() const { return heap_.empty(); }
  const Event& top() const { return heap_.top(); }
  Event pop();
  std::size_t size() const { return heap_.size(); }

 private:
  struct Later {
    bool operator()(const Event& a, const Event& b) const {
      return a.time != b.time ? a.time > b.time : a.seq > b.seq;
    }
  };
  std::priority_queue<Event, std::vector<Event>, Later> heap_;
  std::uint64_t next_seq_ = 0;
};

class SimWorld {
 public:
  SimWorld(WorldConfig config, ChurnSchedule schedule, std::uint64_t seed);

  SimTime now() const { return now_; }
  const WorldConfig& config() const { return config_; }
  const ChurnSchedule& schedule() const { return sampler_.schedule(); }

  // Advances to the next departure or externally scheduled event, applying
  // churn and stabilization along the way. Returns nullopt and parks the
  // clock at `limit` if nothing happens before it.
  std::optional<Event> step(SimTime limit = SimTime::never());

  void schedule(SimTime at, EventPayload payload);

  const PeerState& peer(PeerId id) const { return peers_.at(id); }
  std::size_t peer_count() const { return peers_.size(); }
  std::size_t alive_count() const { return alive_.size(); }
  std::span<const PeerId> alive_peers() const { return alive_; }
  bool is_alive(PeerId id) const { return peers_.at(id).alive; }

  void set_participant(PeerId id, bool on) { peers_.at(id).participant = on; }

  // Uniform live peer accepted by `accept`; nullopt if none qualifies.
  std::optional<PeerId> random_alive(Rng& rng, const std::function<bool(PeerId)>& accept) const;

  // Live successors of a live peer on the ring.
  std::vector<PeerId> neighbors(PeerId id) const;

  // Lifetime window of a live peer.
  const est::LifetimeWindow& window(PeerId id) const { return windows_.at(id); }

  // Departures among the successors `id` had before they left, not yet
  // noticed; consumes them. Successor lists repair themselves as the ring
  // changes.
  std::vector<Observation> detect_failures(PeerId id);

  // Ends a live peer's session now.
  void force_departure(PeerId id);

  std::uint64_t departures() const { return departures_; }
  std::uint64_t observations_recorded() const { return observations_; }

 private:
  void Populate();
  PeerId Arrive();
  void Depart(PeerId id);
  void RunStabilization();
  void Deliver(PeerId receiver, const Observation& o);
  std::vector<PeerId> Successors(PeerId id, std::size_t count) const;

  WorldConfig config_;
  Rng churn_rng_;
  Rng overlay_rng_;
  LifetimeSampler sampler_;
  SimTime now_;
  EventQueue queue_;
  std::vector<PeerState> peers_;
  std::vector<PeerId> alive_;
  std::vector<std::size_t> alive_pos_;
  std::map<std::uint64_t, PeerId> ring_;
  std::unordered_map<PeerId, est::LifetimeWindow> windows_;
  std::unordered_map<PeerId, std::vector<PeerId>> pending_;  // watcher -> departed
  std::vector<PeerId> dirty_;
  std::unordered_set<std::uint64_t> delivered_this_round_;
  std::uint64_t departures_ = 0;
  std::uint64_t observations_ = 0;
};

}  // namespace p2pckpt::sim

#endif  // P2PCKPT_SIM_WORLD_H_
