#include "suav/env.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <utility>

#include "suav/errors.hpp"

namespace suav {

namespace {

// Bisection stops once the bracket spans less than this many meters of segment.
constexpr double kSegmentTolM = 1e-6;

double ipow(double base, int n) {
  double r = 1.0;
  for (int i = 0; i < n; ++i) r *= base;
  return r;
}

bool boxes_overlap(const Vec3& alo, const Vec3& ahi, const Vec3& blo, const Vec3& bhi) {
  return alo.x <= bhi.x && ahi.x >= blo.x && alo.y <= bhi.y && ahi.y >= blo.y && alo.z <= bhi.z &&
         ahi.z >= blo.z;
}

// Segment expressed in the prism's normalized frame: u(t) = u0 + t * du.
struct NormalizedSegment {
  std::array<double, 3> u0;
  std::array<double, 3> du;
  std::array<int, 3> pow2;  // 2 * exponent
};

NormalizedSegment normalize(const Vec3& a, const Vec3& b, const Prism& prism) {
  const Vec3 d = b - a;
  const Vec3 r = a - prism.center;
  return {{r.x / prism.semi_axes.x, r.y / prism.semi_axes.y, r.z / prism.semi_axes.z},
          {d.x / prism.semi_axes.x, d.y / prism.semi_axes.y, d.z / prism.semi_axes.z},
          {2 * prism.exponents[0], 2 * prism.exponents[1], 2 * prism.exponents[2]}};
}

double value_at(const NormalizedSegment& s, double t) {
  double g = 0.0;
  for (int i = 0; i < 3; ++i) g += ipow(s.u0[i] + t * s.du[i], s.pow2[i]);
  return g;
}

double slope_at(const NormalizedSegment& s, double t) {
  double g = 0.0;
  for (int i = 0; i < 3; ++i) g += s.pow2[i] * ipow(s.u0[i] + t * s.du[i], s.pow2[i] - 1) * s.du[i];
  return g;
}

bool hits_ellipsoid(const NormalizedSegment& s) {
  double qa = 0.0, qb = 0.0, qc = 0.0;
  for (int i = 0; i < 3; ++i) {
    qa += s.du[i] * s.du[i];
    qb += 2.0 * s.u0[i] * s.du[i];
    qc += s.u0[i] * s.u0[i];
  }
  double t = 0.0;
  if (qa > 0.0) t = std::clamp(-qb / (2.0 * qa), 0.0, 1.0);
  return (qa * t + qb) * t + qc <= 1.0;
}

// Each term of gamma along a segment is an even power of an affine function of t, so the sum is
// convex in t and its derivative is monotone; bisect on the derivative sign.
bool hits_superellipsoid(const NormalizedSegment& s, double length) {
  if (value_at(s, 0.0) <= 1.0 || value_at(s, 1.0) <= 1.0) return true;
  if (slope_at(s, 0.0) >= 0.0 || slope_at(s, 1.0) <= 0.0) return false;
  double lo = 0.0, hi = 1.0;
  const double tol = length > 0.0 ? kSegmentTolM / length : 1.0;
  while (hi - lo > tol) {
    const double mid = 0.5 * (lo + hi);
    if (value_at(s, mid) <= 1.0) return true;
    if (slope_at(s, mid) > 0.0)
      hi = mid;
    else
      lo = mid;
  }
  return value_at(s, 0.5 * (lo + hi)) <= 1.0;
}

}  // namespace

void validate(const Prism& prism, const char* field) {
  if (!prism.center.finite()) throw ValidationError(field, "center must be finite");
  if (!(prism.semi_axes.x > 0 && prism.semi_axes.y > 0 && prism.semi_axes.z > 0) ||
      !prism.semi_axes.finite())
    throw ValidationError(field, "semi-axes must be strictly positive");
  for (int e : prism.exponents)
    if (e < 1) throw ValidationError(field, "shape exponents must be integers >= 1");
}

void validate(const PrivacyRegion& region, const char* field) {
  if (!region.center.finite()) throw ValidationError(field, "center must be finite");
  if (!(region.c1 > 0.0 && region.c1 < region.c2))
    throw ValidationError(field, "radii must satisfy 0 < c1 < c2");
}

void validate(const Environment& env) {
  const Vec3 ext = env.bounds.extent();
  if (!env.bounds.lo.finite() || !env.bounds.hi.finite() || !(ext.x > 0 && ext.y > 0 && ext.z > 0))
    throw ValidationError("bounds", "box must be finite and non-degenerate");
  if (!(env.z_min < env.z_max)) throw ValidationError("altitude", "z_min must be below z_max");
  double tallest = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < env.prisms.size(); ++i) {
    const auto& p = env.prisms[i];
    const std::string name = "prisms[" + std::to_string(i) + "]";
    validate(p, name.c_str());
    if (!boxes_overlap(p.box_min(), p.box_max(), env.bounds.lo, env.bounds.hi))
      throw ValidationError(name, "prism does not intersect the bounds");
    tallest = std::max(tallest, p.top());
  }
  for (std::size_t i = 0; i < env.privacy_regions.size(); ++i) {
    const std::string name = "privacy_regions[" + std::to_string(i) + "]";
    validate(env.privacy_regions[i], name.c_str());
  }
  if (!env.sun.position.finite() || !env.sun.drift.finite())
    throw ValidationError("sun", "position and drift must be finite");
  if (env.sun.position.z <= tallest) throw ValidationError("sun", "sun must be above every obstacle top");
  if (env.sun.elevation < 0.0 || env.sun.elevation > std::numbers::pi / 2 + 1e-12)
    throw ValidationError("sun", "elevation must lie in [0, pi/2]");
}

double gamma(const Vec3& p, const Prism& prism) {
  const Vec3 r = p - prism.center;
  return ipow(r.x / prism.semi_axes.x, 2 * prism.exponents[0]) +
         ipow(r.y / prism.semi_axes.y, 2 * prism.exponents[1]) +
         ipow(r.z / prism.semi_axes.z, 2 * prism.exponents[2]);
}

bool is_collision(const Vec3& p, const Environment& env) {
  if (!env.bounds.contains(p)) return true;
  if (p.z < env.z_min || p.z > env.z_max) return true;
  return std::any_of(env.prisms.begin(), env.prisms.end(),
                     [&](const Prism& prism) { return gamma(p, prism) <= 1.0; });
}

bool segment_hits_prism(const Vec3& a, const Vec3& b, const Prism& prism) {
  // Canonical endpoint order makes the floating-point evaluation identical for (a,b) and (b,a).
  const auto [p, q] = lex_less(b, a) ? std::pair{b, a} : std::pair{a, b};
  const Vec3 lo{std::min(p.x, q.x), std::min(p.y, q.y), std::min(p.z, q.z)};
  const Vec3 hi{std::max(p.x, q.x), std::max(p.y, q.y), std::max(p.z, q.z)};
  if (!boxes_overlap(lo, hi, prism.box_min(), prism.box_max())) return false;
  const auto seg = normalize(p, q, prism);
  if (prism.exponents == std::array<int, 3>{1, 1, 1}) return hits_ellipsoid(seg);
  return hits_superellipsoid(seg, distance(p, q));
}

bool segment_hits_sphere(const Vec3& a, const Vec3& b, const Vec3& center, double radius) {
  const auto [p, q] = lex_less(b, a) ? std::pair{b, a} : std::pair{a, b};
  const Vec3 d = q - p;
  const double dd = dot(d, d);
  double t = 0.0;
  if (dd > 0.0) t = std::clamp(dot(center - p, d) / dd, 0.0, 1.0);
  return distance(p + d * t, center) <= radius;
}

bool segment_blocked(const Environment& env, const Vec3& a, const Vec3& b) {
  return std::any_of(env.prisms.begin(), env.prisms.end(),
                     [&](const Prism& prism) { return segment_hits_prism(a, b, prism); });
}

bool in_shadow(const Environment& env, const Vec3& p, double t) {
  return segment_blocked(env, env.sun.position_at(t), p);
}

Environment inflated(const Environment& env, double margin) {
  Environment out = env;
  for (auto& p : out.prisms) p.semi_axes = p.semi_axes + Vec3{margin, margin, margin};
  return out;
}

double radial_clearance(const Vec3& p, const Prism& prism) {
  const Vec3 w = p - prism.center;
  const double r = w.norm();
  if (r == 0.0) return -std::min({prism.semi_axes.x, prism.semi_axes.y, prism.semi_axes.z});
  // gamma(center + s*w) grows monotonically in s >= 0; find s* with gamma = 1.
  const auto g = [&](double s) { return gamma(prism.center + w * s, prism); };
  double lo = 0.0, hi = 1.0;
  while (g(hi) < 1.0) hi *= 2.0;
  for (int i = 0; i < 80 && hi - lo > 1e-15 * hi; ++i) {
    const double mid = 0.5 * (lo + hi);
    (g(mid) < 1.0 ? lo : hi) = mid;
  }
  const double s_surface = 0.5 * (lo + hi);
  return r * (1.0 - s_surface);
}

}  // namespace suav
