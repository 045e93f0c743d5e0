#pragma once

// Wind-triangle ground speed and the time-slotted stochastic wind field.

#include <cmath>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "skyroute/error.hpp"
#include "skyroute/geo.hpp"
#include "skyroute/model.hpp"
#include "skyroute/rng.hpp"

namespace skyroute {

/// Wind speed and the bearing it blows FROM.
struct WindState {
  double speed_kmh = 0.0;
  double bearing_deg = 0.0;

  friend bool operator==(const WindState&, const WindState&) = default;
};

struct WindOutcome {
  WindState state;
  double p = 1.0;
};

struct WindDistribution {
  std::vector<WindOutcome> outcomes;

  static WindDistribution calm() { return {{{{0.0, 0.0}, 1.0}}}; }
  static WindDistribution constant(WindState w) { return {{{w, 1.0}}}; }

  bool degenerate() const { return outcomes.size() == 1; }

  void validate() const {
    if (outcomes.empty()) throw ValidationError("empty wind distribution");
    double total = 0.0;
    for (const auto& o : outcomes) {
      if (!(o.p > 0.0)) throw ValidationError("wind outcome probability must be > 0");
      if (!(o.state.speed_kmh >= 0.0)) throw ValidationError("wind speed must be >= 0");
      if (!(o.state.bearing_deg >= 0.0 && o.state.bearing_deg < 360.0))
        throw ValidationError("wind bearing must be in [0, 360)");
      total += o.p;
    }
    if (std::abs(total - 1.0) > 1e-9) throw ValidationError("wind probabilities do not sum to 1");
  }
};

inline std::string segment_key(std::string_view from, std::string_view to) {
  std::string key(from);
  key += "→";
  key += to;
  return key;
}

/// Per-slot wind distributions: a global default plus per-segment overrides
/// keyed "from→to". Times past the last slot reuse the last slot.
struct WindField {
  Seconds slot_len_s = 900;
  std::vector<WindDistribution> default_slots;
  std::unordered_map<std::string, std::vector<WindDistribution>> segment_slots;

  static WindField calm(Seconds slot_len = 900) {
    WindField f;
    f.slot_len_s = slot_len;
    f.default_slots = {WindDistribution::calm()};
    return f;
  }

  std::size_t slot_of(Seconds t) const { return t <= 0 ? 0 : static_cast<std::size_t>(t / slot_len_s); }

  const std::vector<WindDistribution>* slots_for(std::string_view from, std::string_view to) const {
    auto it = segment_slots.find(segment_key(from, to));
    if (it != segment_slots.end()) return &it->second;
    if (!default_slots.empty()) return &default_slots;
    return nullptr;
  }

  void validate() const {
    if (slot_len_s <= 0) throw ValidationError("wind slot length must be > 0");
    for (const auto& d : default_slots) d.validate();
    for (const auto& [key, slots] : segment_slots) {
      if (slots.empty()) throw ValidationError("segment " + key + " has no wind slots");
      for (const auto& d : slots) d.validate();
    }
  }
};

/// Wind field resolved against one network: constant-time lookup by segment.
class BoundWind {
 public:
  BoundWind(const SkywayNetwork& net, const WindField& field) : field_(&field) {
    field.validate();
    slots_.reserve(net.segments().size());
    keys_.reserve(net.segments().size());
    for (const Segment& s : net.segments()) {
      const auto& from = net.station(s.from).id;
      const auto& to = net.station(s.to).id;
      const auto* slots = field.slots_for(from, to);
      if (slots == nullptr || slots->empty())
        throw ValidationError("no wind distribution for segment " + segment_key(from, to));
      slots_.push_back(slots);
      keys_.push_back(fnv1a(segment_key(from, to)));
    }
  }

  const WindField& field() const { return *field_; }

  const WindDistribution& at(SegmentIndex seg, Seconds t) const {
    const auto& slots = *slots_.at(seg);
    return slots[std::min(field_->slot_of(t), slots.size() - 1)];
  }

  std::size_t slot_index(SegmentIndex seg, Seconds t) const {
    return std::min(field_->slot_of(t), slots_.at(seg)->size() - 1);
  }

  std::uint64_t segment_hash(SegmentIndex seg) const { return keys_.at(seg); }

 private:
  const WindField* field_;
  std::vector<const std::vector<WindDistribution>*> slots_;
  std::vector<std::uint64_t> keys_;
};

/// Ground speed over a track of `bearing_deg` flown at `air_speed_kmh`, or
/// nullopt when the crosswind exceeds the airspeed or the drone cannot make
/// forward progress.
inline std::optional<double> ground_speed(double air_speed_kmh, const WindState& wind, double bearing_deg) {
  const double delta = normalize_signed(bearing_deg - wind.bearing_deg);
  const double rel = 180.0 - std::abs(delta);
  const double headtail = wind.speed_kmh * cos_deg(rel);  // negative: headwind
  const double cross = wind.speed_kmh * sin_deg(rel);
  const double disc = air_speed_kmh * air_speed_kmh - cross * cross;
  if (disc < 0.0) return std::nullopt;
  const double gs = headtail + std::sqrt(disc);
  if (!(gs > 0.0)) return std::nullopt;
  return gs;
}

/// Flight time in seconds for `distance_km`, or nullopt when infeasible.
inline std::optional<double> travel_time(double distance_km, double air_speed_kmh, const WindState& wind,
                                         double bearing_deg) {
  const auto gs = ground_speed(air_speed_kmh, wind, bearing_deg);
  if (!gs) return std::nullopt;
  return distance_km / *gs * 3600.0;
}

struct TimedOutcome {
  double seconds = 0.0;
  double p = 1.0;
};

struct TravelEstimate {
  double expected_s = 0.0;
  double p_infeasible = 0.0;
  std::vector<TimedOutcome> outcomes;  // feasible outcomes, renormalized
};

/// Expected flight time over the feasible outcomes of one distribution.
/// Throws AllInfeasible when no outcome can be flown.
inline TravelEstimate expected_travel_time(const Segment& seg, const WindDistribution& dist, double air_speed_kmh) {
  TravelEstimate est;
  double feasible_mass = 0.0;
  for (const auto& o : dist.outcomes) {
    if (auto t = travel_time(seg.distance_km, air_speed_kmh, o.state, seg.bearing_deg)) {
      est.outcomes.push_back({*t, o.p});
      feasible_mass += o.p;
    } else {
      est.p_infeasible += o.p;
    }
  }
  if (est.outcomes.empty()) throw AllInfeasible("every wind outcome on the segment is infeasible");
  for (auto& o : est.outcomes) {
    o.p /= feasible_mass;
    est.expected_s += o.p * o.seconds;
  }
  if (est.outcomes.size() == 1) est.expected_s = est.outcomes.front().seconds;
  return est;
}

inline TravelEstimate expected_travel_time(const BoundWind& wind, SegmentIndex seg, const Segment& s,
                                           Seconds depart, double air_speed_kmh) {
  return expected_travel_time(s, wind.at(seg, depart), air_speed_kmh);
}

/// Draws one outcome with the distribution's probabilities.
inline WindState sample_wind(const WindDistribution& dist, Rng& rng) {
  const double u = uniform01(rng);
  double cum = 0.0;
  for (const auto& o : dist.outcomes) {
    cum += o.p;
    if (u < cum) return o.state;
  }
  return dist.outcomes.back().state;
}

inline WindState sample_wind(const BoundWind& wind, SegmentIndex seg, Seconds t, Rng& rng) {
  return sample_wind(wind.at(seg, t), rng);
}

/// Ground-truth weather: one realization of a wind field fixed by a seed.
/// The same (segment, slot) always yields the same state.
class WindTruth {
 public:
  WindTruth(const BoundWind& wind, std::uint64_t seed) : wind_(&wind), seed_(seed) {}

  WindState at(SegmentIndex seg, Seconds t) const {
    const auto& dist = wind_->at(seg, t);
    if (dist.degenerate()) return dist.outcomes.front().state;
    Rng rng(mix_seed(seed_, mix_seed(wind_->segment_hash(seg), wind_->slot_index(seg, t))));
    return sample_wind(dist, rng);
  }

  const BoundWind& bound() const { return *wind_; }
  std::uint64_t seed() const { return seed_; }

 private:
  const BoundWind* wind_;
  std::uint64_t seed_;
};

}  // namespace skyroute
