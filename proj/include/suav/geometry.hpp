#pragma once

#include <cmath>
#include <numbers>

namespace suav {

/// Point or displacement in the world frame, meters. z is up.
struct Vec3 {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;

  constexpr Vec3 operator+(const Vec3& o) const { return {x + o.x, y + o.y, z + o.z}; }
  constexpr Vec3 operator-(const Vec3& o) const { return {x - o.x, y - o.y, z - o.z}; }
  constexpr Vec3 operator*(double s) const { return {x * s, y * s, z * s}; }
  constexpr Vec3 operator/(double s) const { return {x / s, y / s, z / s}; }
  constexpr Vec3& operator+=(const Vec3& o) {
    x += o.x;
    y += o.y;
    z += o.z;
    return *this;
  }
  constexpr bool operator==(const Vec3&) const = default;

  double norm() const { return std::sqrt(x * x + y * y + z * z); }
  double norm_xy() const { return std::hypot(x, y); }
  bool finite() const { return std::isfinite(x) && std::isfinite(y) && std::isfinite(z); }
};

constexpr Vec3 operator*(double s, const Vec3& v) { return v * s; }

constexpr double dot(const Vec3& a, const Vec3& b) { return a.x * b.x + a.y * b.y + a.z * b.z; }

inline double distance(const Vec3& a, const Vec3& b) { return (a - b).norm(); }

/// Lexicographic order on (x, y, z); used to canonicalize segment endpoints.
constexpr bool lex_less(const Vec3& a, const Vec3& b) {
  if (a.x != b.x) return a.x < b.x;
  if (a.y != b.y) return a.y < b.y;
  return a.z < b.z;
}

/// Wraps an angle to (-pi, pi].
inline double wrap_angle(double a) {
  constexpr double two_pi = 2.0 * std::numbers::pi;
  a = std::fmod(a, two_pi);
  if (a <= -std::numbers::pi) a += two_pi;
  if (a > std::numbers::pi) a -= two_pi;
  return a;
}

/// Signed counter-clockwise angle rotating planar vector (ax, ay) onto (bx, by), in (-pi, pi].
inline double signed_angle(double ax, double ay, double bx, double by) {
  const double cross = ax * by - ay * bx;
  const double d = ax * bx + ay * by;
  if (cross == 0.0 && d < 0.0) return std::numbers::pi;
  return std::atan2(cross, d);
}

constexpr double deg2rad(double deg) { return deg * std::numbers::pi / 180.0; }

}  // namespace suav
