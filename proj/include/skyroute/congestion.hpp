#pragma once

// Recharging-pad occupancy, background traffic and waiting-time estimates.
//
// Pads are assigned FIFO: every arrival (background or ours) takes the pad
// that frees earliest, ties going to the lower pad index. Background arrivals
// at the same second as ours are served first.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "skyroute/error.hpp"
#include "skyroute/model.hpp"
#include "skyroute/rng.hpp"

namespace skyroute {

struct BackgroundArrival {
  Seconds arrival_s = 0;
  Seconds occupy_s = 0;
};

struct TrafficRecord {
  std::string station_id;
  Seconds arrival_s = 0;
  Seconds occupy_s = 0;
};

struct PadInterval {
  int pad = 0;
  Seconds start = 0;
  Seconds end = 0;
  bool background = true;
};

/// Snapshot of one station: node, time and busy-pad count.
struct NodeState {
  std::string node_id;
  Seconds timestamp_s = 0;
  int busy_pads = 0;
};

/// A possible arrival time with its probability.
struct TimedArrival {
  Seconds at = 0;
  double p = 1.0;
};

class StationSchedule {
 public:
  StationSchedule() = default;
  StationSchedule(std::string node_id, int pads, std::vector<BackgroundArrival> background = {})
      : node_id_(std::move(node_id)), release_(static_cast<std::size_t>(std::max(pads, 0)), 0),
        pending_(std::move(background)) {
    if (pads < 1) throw ValidationError("station '" + node_id_ + "' has no pads to schedule");
    for (const auto& a : pending_)
      if (a.occupy_s <= 0 || a.arrival_s < 0)
        throw ValidationError("invalid background arrival at station '" + node_id_ + "'");
    std::stable_sort(pending_.begin(), pending_.end(),
                     [](const BackgroundArrival& a, const BackgroundArrival& b) { return a.arrival_s < b.arrival_s; });
  }

  const std::string& node_id() const { return node_id_; }
  int pads() const { return static_cast<int>(release_.size()); }
  std::span<const BackgroundArrival> background() const { return pending_; }
  const std::vector<PadInterval>& log() const { return log_; }

  /// Applies every background arrival with arrival_s <= t.
  void advance_to(Seconds t) {
    while (next_ < pending_.size() && pending_[next_].arrival_s <= t) {
      const auto& a = pending_[next_++];
      const std::size_t pad = earliest_pad(release_);
      const Seconds start = std::max(a.arrival_s, release_[pad]);
      release_[pad] = start + a.occupy_s;
      log_.push_back({static_cast<int>(pad), start, release_[pad], true});
    }
  }

  /// Release times of pads still busy at t (events applied up to t).
  std::vector<Seconds> pad_release_times(Seconds t) const {
    std::vector<Seconds> out;
    for (Seconds r : simulated_release(t))
      if (r > t) out.push_back(r);
    std::sort(out.begin(), out.end());
    return out;
  }

  /// Pads whose logged occupancy covers t, counting intervals logged so far.
  int busy_pads(Seconds t) const {
    int busy = 0;
    for (const auto& iv : log_)
      if (iv.start <= t && t < iv.end) ++busy;
    return busy;
  }

  NodeState state(Seconds t) const {
    return {node_id_, t, static_cast<int>(pad_release_times(t).size())};
  }

  /// Seconds an arrival at `arrival_s` waits for a pad. Does not mutate.
  Seconds wait_time(Seconds arrival_s) const {
    const auto rel = simulated_release(arrival_s);
    const Seconds earliest = *std::min_element(rel.begin(), rel.end());
    return std::max<Seconds>(0, earliest - arrival_s);
  }

  /// Queues an arrival, occupies the first pad to free up and returns the wait.
  Seconds admit(Seconds arrival_s, Seconds duration_s) {
    advance_to(arrival_s);
    const std::size_t pad = earliest_pad(release_);
    const Seconds start = std::max(arrival_s, release_[pad]);
    release_[pad] = start + duration_s;
    log_.push_back({static_cast<int>(pad), start, release_[pad], false});
    return start - arrival_s;
  }

  /// Occupies a pad that must be free at start_s.
  void occupy_pad(Seconds start_s, Seconds duration_s) {
    advance_to(start_s);
    for (std::size_t pad = 0; pad < release_.size(); ++pad) {
      if (release_[pad] <= start_s) {
        release_[pad] = start_s + duration_s;
        log_.push_back({static_cast<int>(pad), start_s, release_[pad], false});
        return;
      }
    }
    throw NoFreePad("no free pad at station '" + node_id_ + "' at t=" + std::to_string(start_s));
  }

 private:
  static std::size_t earliest_pad(const std::vector<Seconds>& release) {
    return static_cast<std::size_t>(std::min_element(release.begin(), release.end()) - release.begin());
  }

  std::vector<Seconds> simulated_release(Seconds t) const {
    std::vector<Seconds> rel = release_;
    for (std::size_t i = next_; i < pending_.size() && pending_[i].arrival_s <= t; ++i) {
      const std::size_t pad = earliest_pad(rel);
      rel[pad] = std::max(pending_[i].arrival_s, rel[pad]) + pending_[i].occupy_s;
    }
    return rel;
  }

  std::string node_id_;
  std::vector<Seconds> release_;
  std::vector<BackgroundArrival> pending_;
  std::size_t next_ = 0;
  std::vector<PadInterval> log_;
};

inline Seconds wait_time(const StationSchedule& schedule, Seconds arrival_s) { return schedule.wait_time(arrival_s); }

/// Expected wait over a discrete arrival-time distribution, by enumeration.
inline double expected_wait_time(const StationSchedule& schedule, std::span<const TimedArrival> arrivals) {
  double e = 0.0;
  for (const auto& a : arrivals) e += a.p * static_cast<double>(schedule.wait_time(a.at));
  return e;
}

/// Exact expected wait of a tagged arrival at time t at a station with c pads
/// fed by Poisson background traffic (rate lambda, fixed occupancy D) that
/// starts empty at t = 0.
///
/// With deterministic occupancy the count in system obeys
///   Q(s + D) = A(s, s + D] + max(Q(s) - c, 0),
/// and the tagged arrival waits more than kD + r (0 <= r < D) iff
///   X_r = A(t + r - D, t] + max(Q(t + r - D) - c, 0) >= (k + 1) c,
/// so E[W] = integral over r in [0, D] of E[floor(X_r / c)].
/// Q is tracked on a grid of D / kSteps; E[W] is interpolated linearly
/// between grid times.
class PoissonWaitEstimator {
 public:
  static constexpr int kSteps = 120;

  PoissonWaitEstimator(double rate_per_h, Seconds occupy_s, int pads)
      : lambda_(rate_per_h / 3600.0), occupy_(static_cast<double>(occupy_s)), pads_(pads), h_(occupy_ / kSteps) {
    if (rate_per_h < 0.0 || occupy_s <= 0 || pads < 1) throw ValidationError("invalid Poisson traffic parameters");
    tail_.reserve(kSteps + 1);
    for (int i = 0; i <= kSteps; ++i) tail_.push_back(poisson_pmf(lambda_ * (occupy_ - i * h_)));
  }

  double rate_per_h() const { return lambda_ * 3600.0; }
  int pads() const { return pads_; }

  double expected_wait(double t) {
    if (t <= 0.0 || lambda_ == 0.0) return 0.0;
    const double pos = t / h_;
    const auto j = static_cast<std::size_t>(pos);
    const double frac = pos - static_cast<double>(j);
    const double a = at_grid(j);
    if (frac == 0.0) return a;
    return a + frac * (at_grid(j + 1) - a);
  }

  double expected_wait(std::span<const TimedArrival> arrivals) {
    double e = 0.0;
    for (const auto& a : arrivals) e += a.p * expected_wait(static_cast<double>(a.at));
    return e;
  }

 private:
  using Pmf = std::vector<double>;

  static Pmf poisson_pmf(double mu) {
    if (mu <= 0.0) return {1.0};
    const auto hi = static_cast<std::size_t>(mu + 12.0 * std::sqrt(mu) + 25.0);
    Pmf p(hi + 1);
    for (std::size_t k = 0; k <= hi; ++k)
      p[k] = std::exp(static_cast<double>(k) * std::log(mu) - mu - std::lgamma(static_cast<double>(k) + 1.0));
    return p;
  }

  static void trim(Pmf& p) {
    while (p.size() > 1 && p.back() < 1e-16) p.pop_back();
  }

  // Law of Q at grid time k * h.
  const Pmf& queue_at(std::size_t k) {
    while (queue_.size() <= k) {
      const std::size_t n = queue_.size();
      if (n < static_cast<std::size_t>(kSteps)) {
        queue_.push_back(poisson_pmf(lambda_ * static_cast<double>(n) * h_));
        continue;
      }
      const Pmf& prev = queue_[n - kSteps];
      const Pmf& arrivals = tail_.front();
      Pmf next(std::max<std::size_t>(prev.size(), 1) + arrivals.size(), 0.0);
      for (std::size_t q = 0; q < prev.size(); ++q) {
        const std::size_t carried = q > static_cast<std::size_t>(pads_) ? q - pads_ : 0;
        for (std::size_t a = 0; a < arrivals.size(); ++a) next[carried + a] += prev[q] * arrivals[a];
      }
      trim(next);
      queue_.push_back(std::move(next));
    }
    return queue_[k];
  }

  // E[floor((Y + Z) / c)] with Y ~ pmf y and Z = max(Q - c, 0), Q ~ pmf q.
  double floor_mean(const Pmf& y, const Pmf* q) const {
    const std::size_t c = static_cast<std::size_t>(pads_);
    Pmf z{1.0};
    if (q != nullptr) {
      z.assign(q->size() > c ? q->size() - c : 1, 0.0);
      for (std::size_t v = 0; v < q->size(); ++v) z[v > c ? v - c : 0] += (*q)[v];
    }
    double e = 0.0;
    for (std::size_t zi = 0; zi < z.size(); ++zi) {
      if (z[zi] == 0.0) continue;
      double inner = 0.0;
      for (std::size_t yi = 0; yi < y.size(); ++yi) inner += y[yi] * static_cast<double>((yi + zi) / c);
      e += z[zi] * inner;
    }
    return e;
  }

  double at_grid(std::size_t j) {
    if (auto it = memo_.find(j); it != memo_.end()) return it->second;
    double integral = 0.0;
    for (int i = 0; i <= kSteps; ++i) {
      const auto s = static_cast<std::int64_t>(j) + i - kSteps;  // grid index of t + r - D
      double f;
      if (s <= 0) {
        f = floor_mean(poisson_pmf(lambda_ * static_cast<double>(j) * h_), nullptr);
      } else {
        f = floor_mean(tail_[static_cast<std::size_t>(i)], &queue_at(static_cast<std::size_t>(s)));
      }
      integral += (i == 0 || i == kSteps ? 0.5 : 1.0) * f;
    }
    integral *= h_;
    memo_.emplace(j, integral);
    return integral;
  }

  double lambda_;
  double occupy_;
  int pads_;
  double h_;
  std::vector<Pmf> tail_;  // tail_[i]: arrivals in a window of length D - i*h
  std::vector<Pmf> queue_;
  std::map<std::size_t, double> memo_;
};

/// Samples one Poisson background realization on [0, horizon_s).
inline std::vector<BackgroundArrival> poisson_arrivals(double rate_per_h, Seconds occupy_s, Seconds horizon_s, Rng& rng) {
  std::vector<BackgroundArrival> out;
  if (rate_per_h <= 0.0) return out;
  const double rate = rate_per_h / 3600.0;
  double t = exponential(rng, rate);
  while (t < static_cast<double>(horizon_s)) {
    out.push_back({static_cast<Seconds>(std::floor(t)), occupy_s});
    t += exponential(rng, rate);
  }
  return out;
}

/// Pad schedules for every recharge station of a network.
class TrafficSchedules {
 public:
  TrafficSchedules() = default;

  TrafficSchedules(const SkywayNetwork& net, const std::vector<TrafficRecord>& records) {
    std::vector<std::vector<BackgroundArrival>> per(net.size());
    for (const auto& r : records) {
      const auto idx = net.index_of(r.station_id);
      if (!idx) throw ValidationError("traffic references unknown station '" + r.station_id + "'");
      if (!net.station(*idx).recharge || net.station(*idx).pads < 1)
        throw ValidationError("traffic at station '" + r.station_id + "' which has no pads");
      per[*idx].push_back({r.arrival_s, r.occupy_s});
    }
    schedules_.reserve(net.size());
    for (StationIndex i = 0; i < net.size(); ++i) {
      const Station& s = net.station(i);
      schedules_.emplace_back(s.id, std::max(s.pads, 1), std::move(per[i]));
    }
  }

  const StationSchedule& at(StationIndex i) const { return schedules_.at(i); }
  StationSchedule& at(StationIndex i) { return schedules_.at(i); }
  std::size_t size() const { return schedules_.size(); }

  Seconds wait_time(StationIndex i, Seconds arrival) const {
    if (schedules_.empty()) return 0;
    return schedules_[i].wait_time(arrival);
  }

  double expected_wait(StationIndex i, std::span<const TimedArrival> arrivals) const {
    if (schedules_.empty()) return 0.0;
    return expected_wait_time(schedules_[i], arrivals);
  }

 private:
  std::vector<StationSchedule> schedules_;
};

/// Planner-side wait model for Poisson background traffic at every station.
class PoissonWaitModel {
 public:
  PoissonWaitModel(const SkywayNetwork& net, double rate_per_h, Seconds occupy_s) : net_(&net) {
    for (const auto& s : net.stations())
      if (s.pads >= 1 && !estimators_.count(s.pads))
        estimators_.emplace(s.pads, std::make_unique<PoissonWaitEstimator>(rate_per_h, occupy_s, s.pads));
  }

  double expected_wait(StationIndex i, std::span<const TimedArrival> arrivals) const {
    auto it = estimators_.find(net_->station(i).pads);
    if (it == estimators_.end()) return 0.0;
    return it->second->expected_wait(arrivals);
  }

 private:
  const SkywayNetwork* net_;
  // Estimators memoize internally; the model is const to callers.
  std::map<int, std::unique_ptr<PoissonWaitEstimator>> estimators_;
};

/// No background traffic anywhere.
struct NoTraffic {
  double expected_wait(StationIndex, std::span<const TimedArrival>) const { return 0.0; }
};

}  // namespace skyroute
