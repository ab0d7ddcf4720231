#pragma once

#include <cmath>

namespace slpos {

// Right-handed Cartesian coordinates in meters, z up.
struct Position {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;
};

inline Position operator+(const Position& a, const Position& b) {
  return {a.x + b.x, a.y + b.y, a.z + b.z};
}

inline Position operator-(const Position& a, const Position& b) {
  return {a.x - b.x, a.y - b.y, a.z - b.z};
}

inline Position operator*(double s, const Position& p) {
  return {s * p.x, s * p.y, s * p.z};
}

inline bool operator==(const Position& a, const Position& b) {
  return a.x == b.x && a.y == b.y && a.z == b.z;
}

inline double dot(const Position& a, const Position& b) {
  return a.x * b.x + a.y * b.y + a.z * b.z;
}

inline double norm(const Position& p) { return std::sqrt(dot(p, p)); }

inline double distance(const Position& a, const Position& b) {
  return norm(a - b);
}

// Planar distance, ignoring z.
inline double horizontal_distance(const Position& a, const Position& b) {
  return std::hypot(a.x - b.x, a.y - b.y);
}

inline bool all_finite(const Position& p) {
  return std::isfinite(p.x) && std::isfinite(p.y) && std::isfinite(p.z);
}

}  // namespace slpos
