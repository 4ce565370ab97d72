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

#include "p2pckpt/sim/world.h"

#include <algorithm>
#include <stdexcept>

namespace p2pckpt::sim {

void WorldConfig::validate() const {
  if (population < 2) throw std::invalid_argument("population must hold at least two peers");
  if (degree < 1) throw std::invalid_argument("overlay degree must be at least 1");
  if (!(stabilization_period > 0.0)) {
    throw std::invalid_argument("stabilization period must be positive");
  }
  if (!(warmup >= 0.0)) throw std::invalid_argument("warm-up must be non-negative");
  if (window_capacity < 1) throw std::invalid_argument("window capacity must be positive");
}

void EventQueue::push(SimTime at, EventPayload payload) {
  heap_.push(Event{at, next_seq_++, std::move(payload)});
}

Event EventQueue::pop() {
  Event e = heap_.top();
  heap_.pop();
  return e;
}

SimWorld::SimWorld(WorldConfig config, ChurnSchedule schedule, std::uint64_t seed)
    : config_(config),
      churn_rng_(make_stream(seed, Stream::kChurn)),
      overlay_rng_(make_stream(seed, Stream::kOverlay)),
      sampler_(std::move(schedule), churn_rng_),
      now_(SimTime::from_seconds(-config.warmup)) {
  config_.validate();
  Populate();
}

void SimWorld::Populate() {
  peers_.reserve(config_.population * 4);
  for (std::size_t i = 0; i < config_.population; ++i) Arrive();
  queue_.push(now_ + SimTime::from_seconds(config_.stabilization_period), StabilizationRound{});
}

PeerId SimWorld::Arrive() {
  PeerState p;
  p.id = static_cast<PeerId>(peers_.size());
  p.alive = true;
  p.session_start = now_;
  p.departure = saturating_add(now_, SimTime::from_seconds(sampler_.draw(now_.seconds(), churn_rng_)));
  if (p.departure == now_) p.departure = now_ + SimTime::from_ticks(1);
  do {
    p.ring_position = overlay_rng_.next();
  } while (ring_.contains(p.ring_position));
  const auto slot = ring_.emplace(p.ring_position, p.id).first;
  alive_pos_.push_back(alive_.size());
  alive_.push_back(p.id);
  // A joining peer starts from its successor's lifetime history.
  auto successor = std::next(slot);
  if (successor == ring_.end()) successor = ring_.begin();
  if (successor->second != p.id) {
    windows_.emplace(p.id, windows_.at(successor->second));
  } else {
    windows_.emplace(p.id, est::LifetimeWindow(config_.window_capacity));
  }
  if (!p.departure.is_never()) queue_.push(p.departure, Departure{p.id});
  const PeerId id = p.id;
  peers_.push_back(std::move(p));
  return id;
}

std::vector<PeerId> SimWorld::neighbors(PeerId id) const {
  return Successors(id, config_.degree);
}

std::vector<PeerId> SimWorld::Successors(PeerId id, std::size_t count) const {
  const PeerState& self = peers_.at(id);
  if (!self.alive) throw std::logic_error("departed peers have no neighbours");
  count = std::min(count, ring_.size() - 1);
  std::vector<PeerId> out;
  out.reserve(count);
  auto it = ring_.upper_bound(self.ring_position);
  while (out.size() < count) {
    if (it == ring_.end()) it = ring_.begin();
    out.push_back(it->second);
    ++it;
  }
  return out;
}

void SimWorld::Depart(PeerId id) {
  PeerState& p = peers_[id];
  // Peers holding `id` in their successor list are its live predecessors.
  const std::size_t watchers = std::min(config_.degree, ring_.size() - 1);
  auto it = ring_.find(p.ring_position);
  for (std::size_t j = 0; j < watchers; ++j) {
    if (it == ring_.begin()) it = ring_.end();
    --it;
    pending_[it->second].push_back(id);
    dirty_.push_back(it->second);
  }
  ring_.erase(p.ring_position);

  p.alive = false;
  p.departure = now_;
  ++departures_;

  const std::size_t pos = alive_pos_[id];
  alive_[pos] = alive_.back();
  alive_pos_[alive_[pos]] = pos;
  alive_.pop_back();
  windows_.erase(id);
  pending_.erase(id);

  // Keep the population stationary.
  Arrive();
}

void SimWorld::force_departure(PeerId id) {
  if (!peers_.at(id).alive) throw std::logic_error("peer already departed");
  Depart(id);
}

std::vector<Observation> SimWorld::detect_failures(PeerId id) {
  std::vector<Observation> found;
  const auto it = pending_.find(id);
  if (it == pending_.end()) return found;
  for (PeerId gone : it->second) {
    const PeerState& other = peers_[gone];
    found.push_back(Observation{other.id, other.lifetime_seconds(), other.departure});
  }
  pending_.erase(it);
  return found;
}

void SimWorld::Deliver(PeerId receiver, const Observation& o) {
  const std::uint64_t key = (std::uint64_t{receiver} << 32) | o.peer;
  if (!delivered_this_round_.insert(key).second) return;
  if (!(o.lifetime > 0.0)) return;
  windows_.at(receiver).record(o.lifetime);
  ++observations_;
}

void SimWorld::RunStabilization() {
  std::sort(dirty_.begin(), dirty_.end());
  dirty_.erase(std::unique(dirty_.begin(), dirty_.end()), dirty_.end());
  std::vector<PeerId> batch;
  batch.swap(dirty_);
  delivered_this_round_.clear();
  for (PeerId id : batch) {
    if (!peers_[id].alive) continue;
    const auto seen = detect_failures(id);
    if (seen.empty()) continue;
    // Neighbours and their neighbours are the next 2 * degree successors.
    const auto audience = Successors(id, 2 * config_.degree);
    for (const auto& o : seen) {
      Deliver(id, o);
      for (PeerId n : audience) Deliver(n, o);
    }
  }
}

void SimWorld::schedule(SimTime at, EventPayload payload) {
  if (at < now_) throw std::logic_error("cannot schedule an event in the past");
  queue_.push(at, std::move(payload));
}

std::optional<Event> SimWorld::step(SimTime limit) {
  while (!queue_.empty()) {
    if (queue_.top().time > limit) break;
    Event e = queue_.pop();
    now_ = e.time;
    if (const auto* d = std::get_if<Departure>(&e.payload)) {
      const PeerState& p = peers_[d->peer];
      if (!p.alive || p.departure != e.time) continue;  // stale
      Depart(d->peer);
      return e;
    }
    if (std::holds_alternative<StabilizationRound>(e.payload)) {
      RunStabilization();
      queue_.push(now_ + SimTime::from_seconds(config_.stabilization_period), StabilizationRound{});
      continue;
    }
    return e;
  }
  if (!limit.is_never()) now_ = std::max(now_, limit);
  return std::nullopt;
}

std::optional<PeerId> SimWorld::random_alive(Rng& rng,
                                             const std::function<bool(PeerId)>& accept) const {
  if (alive_.empty()) return std::nullopt;
  for (int attempt = 0; attempt < 64; ++attempt) {
    const PeerId c = alive_[rng.below(alive_.size())];
    if (accept(c)) return c;
  }
  std::vector<PeerId> ok;
  for (PeerId c : alive_) {
    if (accept(c)) ok.push_back(c);
  }
  if (ok.empty()) return std::nullopt;
  std::sort(ok.begin(), ok.end());
  return ok[rng.below(ok.size())];
}

}  // namespace p2pckpt::sim
