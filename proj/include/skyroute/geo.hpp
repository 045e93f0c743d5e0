#pragma once

#include <algorithm>
#include <cmath>
#include <numbers>

namespace skyroute {

inline constexpr double kEarthRadiusKm = 6371.0;

struct LatLon {
  double lat = 0.0;  // degrees
  double lon = 0.0;  // degrees
};

struct GreatCircle {
  double distance_km = 0.0;
  double bearing_deg = 0.0;  // initial bearing, [0, 360)
};

inline double deg2rad(double deg) { return deg * std::numbers::pi / 180.0; }
inline double rad2deg(double rad) { return rad * 180.0 / std::numbers::pi; }

/// Wraps an angle into [0, 360).
inline double normalize_bearing(double deg) {
  double r = std::fmod(deg, 360.0);
  if (r < 0.0) r += 360.0;
  if (r >= 360.0) r -= 360.0;
  return r;
}

/// Wraps an angle into (-180, 180].
inline double normalize_signed(double deg) {
  double r = normalize_bearing(deg);
  if (r > 180.0) r -= 360.0;
  return r;
}

// Exact at multiples of 90 degrees so the pure head/tail/crosswind cases
// carry no trigonometric rounding.
inline double cos_deg(double deg) {
  const double r = normalize_bearing(deg);
  if (r == 0.0) return 1.0;
  if (r == 90.0 || r == 270.0) return 0.0;
  if (r == 180.0) return -1.0;
  return std::cos(deg2rad(r));
}

inline double sin_deg(double deg) {
  const double r = normalize_bearing(deg);
  if (r == 0.0 || r == 180.0) return 0.0;
  if (r == 90.0) return 1.0;
  if (r == 270.0) return -1.0;
  return std::sin(deg2rad(r));
}

/// Haversine distance and initial bearing on a sphere of radius 6371 km.
inline GreatCircle great_circle(LatLon a, LatLon b) {
  const double phi1 = deg2rad(a.lat);
  const double phi2 = deg2rad(b.lat);
  const double dphi = phi2 - phi1;
  const double dlambda = deg2rad(b.lon - a.lon);

  const double s1 = std::sin(dphi / 2.0);
  const double s2 = std::sin(dlambda / 2.0);
  const double h = s1 * s1 + std::cos(phi1) * std::cos(phi2) * s2 * s2;
  const double c = 2.0 * std::atan2(std::sqrt(h), std::sqrt(std::max(0.0, 1.0 - h)));

  const double y = std::sin(dlambda) * std::cos(phi2);
  const double x = std::cos(phi1) * std::sin(phi2) - std::sin(phi1) * std::cos(phi2) * std::cos(dlambda);
  return {kEarthRadiusKm * c, normalize_bearing(rad2deg(std::atan2(y, x)))};
}

}  // namespace skyroute
