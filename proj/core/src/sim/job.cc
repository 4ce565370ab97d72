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

#include "p2pckpt/sim/job.h"

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>

#include <fmt/format.h>

#include "p2pckpt/policy.h"
#include "p2pckpt/sim/rng.h"

namespace p2pckpt::sim {

void JobSpec::validate() const {
  if (peers < 1) throw std::invalid_argument("job needs at least one peer");
  if (!(work_seconds > 0.0)) throw std::invalid_argument("job work must be positive");
}

void TrueOverheads::validate() const {
  if (!(checkpoint >= 0.0) || !(download >= 0.0)) {
    throw std::invalid_argument("overheads must be non-negative");
  }
}

void EstimatorSettings::validate() const {
  if (!(calibration_seconds > 0.0)) throw std::invalid_argument("calibration length must be positive");
  if (!(calibration_interval > 0.0)) {
    throw std::invalid_argument("calibration checkpoint interval must be positive");
  }
  if (!(prior_rate > 0.0)) throw std::invalid_argument("prior failure rate must be positive");
  if (freshness_periods < 1) throw std::invalid_argument("freshness horizon must be at least one period");
  if (!(measurement_noise >= 0.0 && measurement_noise < 1.0)) {
    throw std::invalid_argument("measurement noise must lie in [0, 1)");
  }
  if (!(cpu_baseline > 0.0 && cpu_baseline <= 1.0)) {
    throw std::invalid_argument("CPU baseline must lie in (0, 1]");
  }
  if (!(message_rate > 0.0)) throw std::invalid_argument("message rate must be positive");
}

std::string policy_id(const CheckpointPolicy& policy) {
  if (std::holds_alternative<AdaptiveInterval>(policy)) return "adaptive";
  if (std::holds_alternative<NoCheckpointing>(policy)) return "none";
  return fmt::format("fixed-{:g}s", std::get<FixedInterval>(policy).seconds);
}

namespace {

enum class Phase { kRunning, kCheckpointing, kRestoring, kDone };
enum class Calibration { kPhase1, kPhase2, kDone };

class JobRunner {
 public:
  JobRunner(SimWorld& world, const JobSpec& spec, const CheckpointPolicy& policy,
            const TrueOverheads& truth, const EstimatorSettings& settings,
            const RunOptions& options, std::uint64_t seed)
      : world_(world),
        spec_(spec),
        policy_(policy),
        truth_(truth),
        settings_(settings),
        options_(options),
        job_rng_(make_stream(seed, Stream::kJob)),
        noise_rng_(make_stream(seed, Stream::kMeasurement)),
        adaptive_(std::holds_alternative<AdaptiveInterval>(policy)),
        work_(SimTime::from_seconds(spec.work_seconds)),
        checkpoint_cost_(SimTime::from_seconds(truth.checkpoint)),
        restore_cost_(SimTime::from_seconds(truth.download)),
        calibration_seconds_(settings.calibration_seconds) {}

  JobOutcome Run();

 private:
  bool Calibrating() const { return adaptive_ && calibration_ != Calibration::kDone; }
  double Noise() {
    return 1.0 + noise_rng_.uniform(-settings_.measurement_noise, settings_.measurement_noise);
  }

  void Submit();
  void StartSegment();
  void StartCheckpoint();
  void OnTimer();
  void OnSegmentEnd();
  void OnCheckpointEnd();
  void OnRestoreEnd();
  void FinishCalibration();
  void OnFailure(PeerId failed);
  void Arm(SimTime duration);
  PeerId Recruit();
  void Reestimate(bool exchange);
  est::PiggybackBundle LocalBundle(PeerId p) const;

  SimWorld& world_;
  const JobSpec& spec_;
  const CheckpointPolicy& policy_;
  const TrueOverheads& truth_;
  const EstimatorSettings& settings_;
  const RunOptions& options_;
  Rng job_rng_;
  Rng noise_rng_;
  const bool adaptive_;
  const SimTime work_;
  const SimTime checkpoint_cost_;
  const SimTime restore_cost_;

  SimTime submitted_;
  Phase phase_ = Phase::kRunning;
  std::uint64_t epoch_ = 0;
  SimTime phase_start_;
  SimTime saved_;
  SimTime unsaved_;  // finished segments not yet committed
  SimTime segment_;  // planned work of the running segment
  bool checkpoint_after_ = true;
  SimTime interval_ = SimTime::never();

  std::vector<PeerId> participants_;
  std::map<PeerId, est::EstimatorState> estimators_;
  est::GlobalEstimate global_{};
  bool have_global_ = false;

  Calibration calibration_ = Calibration::kDone;
  double calibration_seconds_;
  SimTime calibration_start_;
  SimTime calibration_running_;
  int calibration_commits_ = 0;
  std::map<PeerId, std::pair<double, double>> baseline_;  // P1, messages per second
  bool background_download_pending_ = false;

  double interval_sum_ = 0.0;
  long interval_count_ = 0;
  JobOutcome out_;
};

void JobRunner::Arm(SimTime duration) {
  ++epoch_;
  phase_start_ = world_.now();
  world_.schedule(world_.now() + duration, JobTimer{epoch_});
}

PeerId JobRunner::Recruit() {
  const auto pick = world_.random_alive(job_rng_, [this](PeerId id) {
    return !world_.peer(id).participant;
  });
  if (!pick) throw std::runtime_error("no live non-participant peer available");
  world_.set_participant(*pick, true);
  return *pick;
}

void JobRunner::Submit() {
  while (world_.now() < SimTime::zero()) {
    // Warm-up: churn and stabilization only.
    if (auto e = world_.step(SimTime::zero()); !e) break;
  }
  submitted_ = world_.now();
  if (world_.alive_count() < static_cast<std::size_t>(spec_.peers)) {
    throw std::runtime_error(fmt::format("job wants {} peers but only {} are alive", spec_.peers,
                                         world_.alive_count()));
  }
  for (int i = 0; i < spec_.peers; ++i) {
    const PeerId p = Recruit();
    participants_.push_back(p);
    estimators_[p] = est::EstimatorState{};
  }
  for (double f : options_.injected_failures) {
    world_.schedule(submitted_ + SimTime::from_seconds(f), InjectedFailure{});
  }
  if (adaptive_) {
    calibration_ = Calibration::kPhase1;
    ++out_.calibrations;
  }
  StartSegment();
}

void JobRunner::StartSegment() {
  const SimTime remaining = work_ - saved_ - unsaved_;
  SimTime length;
  if (adaptive_ && calibration_ == Calibration::kPhase1) {
    length = SimTime::from_seconds(calibration_seconds_);
    checkpoint_after_ = false;
  } else if (adaptive_ && calibration_ == Calibration::kPhase2) {
    length = SimTime::from_seconds(settings_.calibration_interval);
    checkpoint_after_ = true;
  } else {
    if (const auto* f = std::get_if<FixedInterval>(&policy_)) {
      interval_ = SimTime::from_seconds(f->seconds);
    } else if (std::holds_alternative<NoCheckpointing>(policy_)) {
      interval_ = SimTime::never();
    }
    length = interval_;
    checkpoint_after_ = true;
    if (!interval_.is_never()) {
      interval_sum_ += interval_.seconds();
      ++interval_count_;
    }
  }
  length = std::max(std::min(length, remaining), SimTime::from_ticks(1));
  phase_ = Phase::kRunning;
  segment_ = length;
  Arm(length);
}

void JobRunner::StartCheckpoint() {
  phase_ = Phase::kCheckpointing;
  Arm(checkpoint_cost_);
}

void JobRunner::OnTimer() {
  switch (phase_) {
    case Phase::kRunning:
      OnSegmentEnd();
      break;
    case Phase::kCheckpointing:
      OnCheckpointEnd();
      break;
    case Phase::kRestoring:
      OnRestoreEnd();
      break;
    case Phase::kDone:
      break;
  }
}

void JobRunner::OnSegmentEnd() {
  unsaved_ += segment_;
  if (calibration_ == Calibration::kPhase2) calibration_running_ += segment_;
  if (saved_ + unsaved_ >= work_) {
    phase_ = Phase::kDone;
    return;
  }
  if (adaptive_ && calibration_ == Calibration::kPhase1) {
    // Phase 1 observed t seconds of checkpoint-free execution.
    baseline_.clear();
    for (PeerId p : participants_) {
      baseline_[p] = {settings_.cpu_baseline * Noise(), settings_.message_rate * Noise()};
    }
    calibration_ = Calibration::kPhase2;
    calibration_start_ = world_.now();
    calibration_running_ = SimTime::zero();
    calibration_commits_ = 0;
    StartSegment();
    return;
  }
  if (checkpoint_after_) {
    StartCheckpoint();
  } else {
    StartSegment();
  }
}

void JobRunner::OnCheckpointEnd() {
  out_.accounting.checkpointing += checkpoint_cost_;
  saved_ += unsaved_;
  unsaved_ = SimTime::zero();
  ++out_.checkpoints;
  if (options_.keep_commit_log) out_.commit_log.push_back(saved_);
  if (calibration_ == Calibration::kPhase2) {
    ++calibration_commits_;
    // The window closes on the first commit once t seconds have passed.
    if (world_.now() - calibration_start_ >= SimTime::from_seconds(calibration_seconds_)) {
      FinishCalibration();
      StartSegment();
      return;
    }
  }
  if (adaptive_ && calibration_ == Calibration::kDone) {
    Reestimate(true);
    if (background_download_pending_) {
      background_download_pending_ = false;
      world_.schedule(world_.now() + restore_cost_, DownloadMeasured{truth_.download});
    }
  }
  StartSegment();
}

void JobRunner::OnRestoreEnd() {
  out_.accounting.restoring += restore_cost_;
  if (adaptive_ && calibration_ == Calibration::kDone) {
    for (PeerId p : participants_) {
      est::update_download_time(estimators_[p], est::DownloadEvent::restart(truth_.download));
    }
    // Restart coordination reaches every participant, so bundles ride along.
    Reestimate(true);
  }
  StartSegment();
}

void JobRunner::FinishCalibration() {
  const double window = (world_.now() - calibration_start_).seconds();
  const double useful = calibration_running_.seconds();
  for (PeerId p : participants_) {
    const auto [cpu, message_rate] = baseline_.at(p);
    est::CalibrationRecord rec;
    rec.cpu_without = cpu;
    rec.messages_without = message_rate * window;
    rec.cpu_with = settings_.cpu_baseline * (useful / window) * Noise();
    rec.messages_with = settings_.message_rate * useful * Noise();
    rec.phase_seconds = window;
    rec.checkpoints = calibration_commits_;
    auto& st = estimators_[p];
    st.v_hat = est::estimate_checkpoint_overhead(rec, settings_.formula);
    st.calibrated = true;
    est::update_download_time(st, est::DownloadEvent::init());
  }
  calibration_ = Calibration::kDone;
  background_download_pending_ = true;
  Reestimate(false);
}

est::PiggybackBundle JobRunner::LocalBundle(PeerId p) const {
  const auto& st = estimators_.at(p);
  est::PiggybackBundle b;
  b.mu_hat = est::failure_rate_or_prior(world_.window(p), settings_.prior_rate).rate;
  b.v_hat = st.v_hat;
  b.td_hat = st.td_hat;
  b.origin = p;
  b.stamp = world_.now().seconds();
  return b;
}

void JobRunner::Reestimate(bool exchange) {
  std::vector<est::PiggybackBundle> local;
  local.reserve(participants_.size());
  for (PeerId p : participants_) local.push_back(LocalBundle(p));
  if (exchange) {
    for (PeerId p : participants_) {
      for (const auto& b : local) {
        if (b.origin != p) estimators_[p].receive(b);
      }
    }
  }
  const double now = world_.now().seconds();
  const double horizon = interval_.is_never()
                             ? std::numeric_limits<double>::infinity()
                             : settings_.freshness_periods * interval_.seconds();
  double best = std::numeric_limits<double>::infinity();
  std::vector<est::PiggybackBundle> received;
  for (std::size_t i = 0; i < participants_.size(); ++i) {
    received.clear();
    for (const auto& [origin, b] : estimators_[participants_[i]].received) received.push_back(b);
    const auto g = est::aggregate_global(local[i], received, now, horizon);
    policy::PolicyParams params{g.mu, spec_.peers, g.v, g.td};
    const double interval = policy::optimal_lambda(params).interval;
    // Any participant may trigger the coordinated checkpoint; the earliest wins.
    if (interval < best) {
      best = interval;
      global_ = g;
    }
  }
  have_global_ = true;
  interval_ = std::max(SimTime::from_seconds(best), SimTime::from_ticks(1));
}

void JobRunner::OnFailure(PeerId failed) {
  const SimTime now = world_.now();
  switch (phase_) {
    case Phase::kRunning:
      out_.accounting.wasted += unsaved_ + (now - phase_start_);
      break;
    case Phase::kCheckpointing:
      out_.accounting.checkpointing += now - phase_start_;
      out_.accounting.wasted += unsaved_;
      break;
    case Phase::kRestoring:
      out_.accounting.restoring += now - phase_start_;
      break;
    case Phase::kDone:
      return;
  }
  unsaved_ = SimTime::zero();
  ++out_.restarts;

  auto it = std::find(participants_.begin(), participants_.end(), failed);
  world_.set_participant(failed, false);
  estimators_.erase(failed);
  const PeerId fresh = Recruit();
  *it = fresh;
  est::EstimatorState st;
  if (have_global_) {
    st.v_hat = global_.v;
    st.td_hat = global_.td;
    st.calibrated = true;
  }
  estimators_[fresh] = st;

  if (Calibrating()) {
    // Calibration restarts from phase 1 once the job is restored.
    calibration_ = Calibration::kPhase1;
    ++out_.calibrations;
  }
  phase_ = Phase::kRestoring;
  Arm(restore_cost_);
}

JobOutcome JobRunner::Run() {
  spec_.validate();
  truth_.validate();
  settings_.validate();
  Submit();
  const SimTime cap = saturating_add(submitted_, SimTime::from_seconds(options_.max_wall_seconds));
  while (phase_ != Phase::kDone) {
    auto e = world_.step(cap);
    if (!e) {
      out_.capped = true;
      break;
    }
    if (const auto* d = std::get_if<Departure>(&e->payload)) {
      if (world_.peer(d->peer).participant) OnFailure(d->peer);
    } else if (const auto* t = std::get_if<JobTimer>(&e->payload)) {
      if (t->epoch == epoch_) OnTimer();
    } else if (const auto* m = std::get_if<DownloadMeasured>(&e->payload)) {
      for (PeerId p : participants_) {
        auto& st = estimators_[p];
        if (st.calibrated) est::update_download_time(st, est::DownloadEvent::background(m->seconds));
      }
    } else if (std::holds_alternative<InjectedFailure>(e->payload)) {
      const PeerId victim = participants_[job_rng_.below(participants_.size())];
      world_.force_departure(victim);
      OnFailure(victim);
    }
  }

  out_.wall = world_.now() - submitted_;
  out_.wall_time = out_.wall.seconds();
  if (!out_.capped) out_.accounting.useful = work_;
  out_.mean_interval = interval_count_ > 0 ? interval_sum_ / static_cast<double>(interval_count_) : 0.0;
  if (adaptive_ && have_global_) {
    out_.mu_hat = global_.mu;
    out_.v_hat = global_.v;
    out_.td_hat = global_.td;
  } else {
    double sum = 0.0;
    for (PeerId p : participants_) {
      sum += est::failure_rate_or_prior(world_.window(p), settings_.prior_rate).rate;
    }
    out_.mu_hat = sum / static_cast<double>(participants_.size());
  }
  for (PeerId p : participants_) world_.set_participant(p, false);
  return out_;
}

}  // namespace

JobOutcome run_job(SimWorld& world, const JobSpec& spec, const CheckpointPolicy& policy,
                   const TrueOverheads& truth, const EstimatorSettings& settings,
                   const RunOptions& options, std::uint64_t seed) {
  if (const auto* f = std::get_if<FixedInterval>(&policy); f && !(f->seconds > 0.0)) {
    throw std::invalid_argument("fixed checkpoint interval must be positive");
  }
  JobRunner runner(world, spec, policy, truth, settings, options, seed);
  return runner.Run();
}

}  // namespace p2pckpt::sim
