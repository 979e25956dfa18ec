#pragma once

#include <array>
#include <vector>

#include "suav/geometry.hpp"

namespace suav {

/// Superellipsoid enclosing an urban construction.
///
/// gamma(p) = ((x-x0)/a)^(2d) + ((y-y0)/b)^(2e) + ((z-z0)/c)^(2f). Exponents of one give an
/// ellipsoid; large exponents approach a box. Points with gamma <= 1 are inside.
struct Prism {
  Vec3 center;
  Vec3 semi_axes{1.0, 1.0, 1.0};
  std::array<int, 3> exponents{1, 1, 1};

  Vec3 box_min() const { return center - semi_axes; }
  Vec3 box_max() const { return center + semi_axes; }
  double top() const { return center.z + semi_axes.z; }
};

/// Point-like sun. The position drives shadow tests; azimuth and elevation drive incidence.
struct SunModel {
  Vec3 position{250.0, 800.0, 1800.0};
  double azimuth = 0.0;                  // rad
  double elevation = std::numbers::pi / 2;  // rad
  Vec3 drift;                            // m/s, zero for a static sun

  Vec3 position_at(double t) const { return position + drift * t; }
};

/// Spherical privacy region: intensity 1 inside radius c1, 0 beyond c2, linear between.
struct PrivacyRegion {
  Vec3 center;
  double c1 = 1.0;
  double c2 = 2.0;
};

struct Box {
  Vec3 lo;
  Vec3 hi;

  bool contains(const Vec3& p) const {
    return p.x >= lo.x && p.x <= hi.x && p.y >= lo.y && p.y <= hi.y && p.z >= lo.z && p.z <= hi.z;
  }
  Vec3 center() const { return (lo + hi) * 0.5; }
  Vec3 extent() const { return hi - lo; }
};

struct Environment {
  Box bounds{{0, 0, 0}, {100, 100, 100}};
  std::vector<Prism> prisms;
  std::vector<PrivacyRegion> privacy_regions;
  SunModel sun;
  double z_min = 0.0;
  double z_max = 100.0;
};

/// Throws ValidationError naming the offending field.
void validate(const Prism& prism, const char* field = "prism");
void validate(const PrivacyRegion& region, const char* field = "privacy_region");
void validate(const Environment& env);

double gamma(const Vec3& p, const Prism& prism);

/// Outside the bounds, outside the altitude band, or inside (gamma <= 1) any prism.
bool is_collision(const Vec3& p, const Environment& env);

/// True iff the closed segment a-b touches the closed interior of the prism.
bool segment_hits_prism(const Vec3& a, const Vec3& b, const Prism& prism);

bool segment_hits_sphere(const Vec3& a, const Vec3& b, const Vec3& center, double radius);

/// True iff the closed segment a-b intersects any prism. Symmetric in (a, b) bit for bit.
bool segment_blocked(const Environment& env, const Vec3& a, const Vec3& b);

/// Shadow indicator: the sun-to-p segment is occluded by a prism.
bool in_shadow(const Environment& env, const Vec3& p, double t);

/// Copy of env with every prism grown by `margin` meters along each semi-axis.
Environment inflated(const Environment& env, double margin);

/// Signed distance from p to the prism surface measured along the ray from the prism center.
/// Positive outside, zero on the surface, negative inside.
double radial_clearance(const Vec3& p, const Prism& prism);

}  // namespace suav
