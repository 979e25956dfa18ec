#include <doctest.h>

#include <random>
#include <vector>

#include "suav/control.hpp"
#include "suav/errors.hpp"

using namespace suav;

namespace {

constexpr double pi = std::numbers::pi;

UavState at(double x, double y, double heading, double z = 0.0) {
  UavState s;
  s.position = {x, y, z};
  s.heading = heading;
  return s;
}

// Point at arc length `s` along the polyline, from a 1 cm resampling.
Vec3 resampled_arc_point(const std::vector<Vec3>& path, double s) {
  double acc = 0.0;
  Vec3 prev = path.front();
  for (std::size_t i = 0; i + 1 < path.size(); ++i) {
    const double seg = distance(path[i], path[i + 1]);
    const int n = std::max(1, static_cast<int>(std::ceil(seg / 0.01)));
    for (int k = 1; k <= n; ++k) {
      const Vec3 p = path[i] + (path[i + 1] - path[i]) * (double(k) / n);
      acc += distance(prev, p);
      prev = p;
      if (acc >= s) return p;
    }
  }
  return path.back();
}

double arc_length_to(const std::vector<Vec3>& path, std::size_t idx) {
  double s = 0.0;
  for (std::size_t i = 0; i < idx; ++i) s += distance(path[i], path[i + 1]);
  return s;
}

}  // namespace

TEST_CASE("kinematics fixed point and straight flight") {
  const ControlLimits lim;
  const UavState s = at(3, 4, 0.7, 50);
  const StepResult r = step_kinematics_3d(s, {0, 0, 0}, 0.1, lim, 0, 100);
  CHECK(r.state.position == s.position);
  CHECK(r.state.heading == s.heading);
  CHECK_FALSE(r.clamped);

  const StepResult f = step_kinematics_3d(at(0, 0, 0, 50), {12, 0, 0}, 1.0, lim, 0, 100);
  CHECK(f.state.position.x == 12.0);
  CHECK(f.state.position.y == 0.0);
  CHECK(f.state.speed == 12.0);
}

TEST_CASE("kinematics follows the closed-form circle") {
  const ControlLimits lim;
  const double v = 12, w = 0.6, dt = 1e-3, x0 = 5, y0 = -3, th0 = 0.4;
  UavState s = at(x0, y0, th0, 20);
  const int steps = 10000;
  for (int i = 0; i < steps; ++i) s = step_kinematics_planar(s, {v, w, 0}, dt, lim).state;
  const double t = steps * dt;
  const double x = x0 + v / w * (std::sin(th0 + w * t) - std::sin(th0));
  const double y = y0 - v / w * (std::cos(th0 + w * t) - std::cos(th0));
  CHECK(std::hypot(s.position.x - x, s.position.y - y) < 1e-6);
  CHECK(s.position.z == 20.0);
  CHECK(std::abs(wrap_angle(s.heading - (th0 + w * t))) < 1e-9);
}

TEST_CASE("inputs and altitude are clamped") {
  const ControlLimits lim;
  const StepResult r = step_kinematics_3d(at(0, 0, 0, 98), {50, 10, 9}, 1.0, lim, 0, 100);
  CHECK(r.clamped);
  CHECK(r.applied.v == lim.v_max);
  CHECK(r.applied.u == lim.u_max);
  CHECK(r.applied.vz == lim.vz_max);
  CHECK(r.state.position.z == 100.0);

  const StepResult p = step_kinematics_planar(at(0, 0, 0, 40), {-3, -10, 2}, 0.1, lim);
  CHECK(p.clamped);
  CHECK(p.applied.v == lim.v_min);
  CHECK(p.applied.u == -lim.u_max);
  CHECK(p.state.position.z == 40.0);

  CHECK_THROWS_AS(step_kinematics_planar(at(0, 0, 0), {1, 0, 0}, 0.0, lim), std::invalid_argument);
}

TEST_CASE("limit validation") {
  CHECK_NOTHROW(validate(ControlLimits{}));
  CHECK_NOTHROW(validate(AvoidanceParams{}));
  ControlLimits l;
  l.cruise = 25;
  CHECK_THROWS_AS(validate(l), ValidationError);
  AvoidanceParams a;
  a.trigger = 80;
  CHECK_THROWS_AS(validate(a), ValidationError);
  a = {};
  a.alpha_safe = pi / 2;
  CHECK_THROWS_AS(validate(a), ValidationError);
}

TEST_CASE("lookahead on a straight path") {
  const std::vector<Vec3> path{{0, 0, 0}, {100, 0, 0}, {200, 0, 0}};
  const Lookahead la = pursuit_lookahead(path, {100, 0, 0}, 20);
  CHECK(la.target == Vec3{120, 0, 0});
  CHECK(la.nearest == 1u);
  CHECK(pursuit_lookahead(path, {250, 3, 0}, 20).target == path.back());
  CHECK(pursuit_lookahead(path, {190, 0, 0}, 20).target == path.back());
  CHECK(pursuit_lookahead(path, {0, 0, 0}, 20, 1).nearest == 1u);
  CHECK_THROWS_AS(pursuit_lookahead(std::vector<Vec3>{}, {0, 0, 0}, 20), std::invalid_argument);
}

TEST_CASE("lookahead matches a dense arc-length oracle on a zig-zag") {
  std::vector<Vec3> path;
  for (int i = 0; i <= 12; ++i) path.push_back({10.0 * i, (i % 2) * 10.0, i * 1.0});
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> ux(-5, 125), uy(-5, 15), uL(1, 40);
  for (int trial = 0; trial < 200; ++trial) {
    const Vec3 p{ux(rng), uy(rng), 5};
    const double L = uL(rng);
    const Lookahead la = pursuit_lookahead(path, p, L);
    const Vec3 expect = resampled_arc_point(path, arc_length_to(path, la.nearest) + L);
    CHECK(distance(la.target, expect) < 0.02);
    for (std::size_t i = 0; i < path.size(); ++i) CHECK(distance(path[la.nearest], p) <= distance(path[i], p));
  }
}

TEST_CASE("pursuit command") {
  const ControlLimits lim;
  const Command ahead = pursuit_command(at(0, 0, 0), {20, 0, 0}, 20, lim);
  CHECK(ahead.u == 0.0);
  CHECK(ahead.v == 12.0);

  const Command side = pursuit_command(at(0, 0, 0), {0, 20, 0}, 20, lim);
  CHECK(side.u == doctest::Approx(1.2).epsilon(1e-12));
  const Command right = pursuit_command(at(0, 0, 0), {0, -20, 0}, 20, lim);
  CHECK(right.u == doctest::Approx(-1.2).epsilon(1e-12));

  const Command climb = pursuit_command(at(0, 0, 0, 10), {20, 0, 11}, 20, lim);
  CHECK(climb.vz == doctest::Approx(1.0));
  const Command dive = pursuit_command(at(0, 0, 0, 10), {20, 0, -40}, 20, lim);
  CHECK(dive.vz == -lim.vz_max);

  const Command behind = pursuit_command(at(0, 0, 0), {-20, 1e-9, 0}, 5, lim);
  CHECK(std::abs(behind.u) <= lim.u_max);
}

TEST_CASE("pure pursuit converges from a 5 m lateral offset") {
  const ControlLimits lim;
  // Waypoints at grid spacing, as the planners produce them.
  std::vector<Vec3> path;
  for (int i = 0; i <= 40; ++i) path.push_back({10.0 * i, 0, 0});
  UavState s = at(0, 5, 0);
  const double dt = 0.01;
  double last_large = 0.0;
  for (int i = 1; i <= 1000; ++i) {
    const Lookahead la = pursuit_lookahead(path, s.position, 20);
    s = step_kinematics_planar(s, pursuit_command(s, la.target, 20, lim), dt, lim).state;
    if (std::abs(s.position.y) >= 0.5) last_large = i * dt;
  }
  CHECK(last_large < 10.0);
  CHECK(std::abs(s.position.y) < 0.5);
  CHECK(s.position.x > 100.0);
}

TEST_CASE("sensing range, altitude and field of view") {
  const AvoidanceParams params;
  const std::vector<MovingObstacle> far{{{100, 0, 0}, 5, {}, false}};
  CHECK(sense_obstacles(far, at(0, 0, 0), params).empty());
  const std::vector<MovingObstacle> above{{{20, 0, 10}, 5, {}, false}};
  CHECK(sense_obstacles(above, at(0, 0, 0), params).empty());
  const std::vector<MovingObstacle> behind{{{-20, 0, 0}, 5, {}, false}};
  CHECK(sense_obstacles(behind, at(0, 0, 0), params).empty());

  const std::vector<MovingObstacle> ahead{{{30, 0, 0}, 6, {1, 2, 0}, false}};
  const auto d = sense_obstacles(ahead, at(0, 0, 0), params);
  REQUIRE(d.size() == 1u);
  CHECK(d[0].alpha1 == doctest::Approx(std::asin(6.0 / 30.0)));
  CHECK(d[0].alpha2 == doctest::Approx(-std::asin(6.0 / 30.0)));
  CHECK(d[0].distance == doctest::Approx(24.0));
  CHECK(d[0].velocity == Vec3{1, 2, 0});

  // A sphere cut off-center shows its smaller cross-section.
  const std::vector<MovingObstacle> offset{{{30, 0, 3}, 5, {}, false}};
  const auto e = sense_obstacles(offset, at(0, 0, 0), params);
  REQUIRE(e.size() == 1u);
  CHECK(e[0].distance == doctest::Approx(26.0));
}

TEST_CASE("tangent angles match boundary sampling") {
  const AvoidanceParams params;
  std::mt19937_64 rng(23);
  std::uniform_real_distribution<double> u(-40, 40), ang(-pi, pi), rad(2, 12), uz(-1, 1);
  int checked = 0;
  while (checked < 300) {
    const UavState s = at(u(rng), u(rng), ang(rng));
    const MovingObstacle o{s.position + Vec3{u(rng), u(rng), uz(rng)}, rad(rng), {}, false};
    const std::vector<MovingObstacle> obs{o};
    const auto det = sense_obstacles(obs, s, params);
    if (det.empty() || det[0].distance < 1.0) continue;
    ++checked;
    const double re = std::sqrt(o.radius * o.radius - std::pow(o.center.z - s.position.z, 2));
    const double cx = o.center.x - s.position.x, cy = o.center.y - s.position.y;
    const double beta = signed_angle(std::cos(s.heading), std::sin(s.heading), cx, cy);
    // Bearings are measured from the center direction so the cone never wraps.
    double hi = -10, lo = 10;
    for (int k = 0; k < 10000; ++k) {
      const double phi = 2 * pi * k / 10000;
      const double a = beta + signed_angle(cx, cy, cx + re * std::cos(phi), cy + re * std::sin(phi));
      hi = std::max(hi, a);
      lo = std::min(lo, a);
    }
    CHECK(std::abs(det[0].alpha1 - hi) < 1e-3);
    CHECK(std::abs(det[0].alpha2 - lo) < 1e-3);
  }
}

TEST_CASE("avoidance: candidate aligned with the heading gives no turn") {
  const AvoidanceParams params;
  const ControlLimits lim;
  Detection det;
  det.alpha1 = -params.alpha_safe;
  det.alpha2 = -params.alpha_safe - 0.6;
  const Avoidance a = avoidance_command(at(0, 0, 0), det, 0, 1, params, lim);
  CHECK(a.side == 1);
  CHECK(a.eps1 == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(a.command.u == 0.0);
  CHECK(a.command.v == doctest::Approx(lim.v_max - lim.cruise));
}

TEST_CASE("avoidance steers toward the chosen candidate") {
  const AvoidanceParams params;
  const ControlLimits lim;
  // Obstacle off to the left: the right-hand boundary needs the smaller correction.
  Detection det;
  det.alpha1 = 0.5;
  det.alpha2 = 0.2;
  const Avoidance a = avoidance_command(at(0, 0, 0), det, 0, 1, params, lim);
  CHECK(a.side == 2);
  // Heading lies counter-clockwise of the candidate (angle from candidate to heading in (0, pi]).
  CHECK(a.eps2 > 0.0);
  CHECK(a.command.u == -lim.u_max);

  Detection mirror;
  mirror.alpha1 = -0.2;
  mirror.alpha2 = -0.5;
  const Avoidance b = avoidance_command(at(0, 0, 0), mirror, 0, 1, params, lim);
  CHECK(b.side == 1);
  CHECK(b.eps1 < 0.0);
  CHECK(b.command.u == lim.u_max);
}

TEST_CASE("avoidance breaks near-ties toward the sun") {
  const AvoidanceParams params;
  const ControlLimits lim;
  Detection det;
  det.alpha1 = 0.25;
  det.alpha2 = -0.25;
  const Avoidance north = avoidance_command(at(0, 0, 0), det, 0, 1, params, lim);
  CHECK(std::abs(std::abs(north.eps1) - std::abs(north.eps2)) < params.theta);
  CHECK(north.side == 1);
  CHECK(north.command.u == lim.u_max);

  const Avoidance south = avoidance_command(at(0, 0, 0), det, 0, -1, params, lim);
  CHECK(south.side == 2);
  CHECK(south.command.u == -lim.u_max);
}

TEST_CASE("avoidance adds the obstacle velocity") {
  const AvoidanceParams params;
  const ControlLimits lim;
  Detection det;
  det.alpha1 = -params.alpha_safe;
  det.alpha2 = -params.alpha_safe - 0.6;
  det.velocity = {3, 0, 0};
  const Avoidance a = avoidance_command(at(0, 0, 0), det, 0, 1, params, lim);
  CHECK(a.command.v == doctest::Approx(lim.v_max - lim.cruise + 3));
}

TEST_CASE("switching laws") {
  const AvoidanceParams params;
  const UavState s = at(0, 0, 0);
  const Vec3 aligned{50, 0, 0};
  Detection d;

  d.distance = params.trigger;
  CHECK(supervisor_step(Mode::Tracking, std::vector<Detection>{d}, s, aligned, params) == Mode::Avoiding);
  d.distance = params.trigger + 0.1;
  CHECK(supervisor_step(Mode::Tracking, std::vector<Detection>{d}, s, aligned, params) == Mode::Tracking);
  CHECK(supervisor_step(Mode::Tracking, {}, s, aligned, params) == Mode::Tracking);

  d.distance = 2 * params.trigger;
  CHECK(supervisor_step(Mode::Avoiding, std::vector<Detection>{d}, s, aligned, params) == Mode::Tracking);
  d.distance = params.trigger / 2;
  CHECK(supervisor_step(Mode::Avoiding, std::vector<Detection>{d}, s, aligned, params) == Mode::Avoiding);
  CHECK(supervisor_step(Mode::Avoiding, {}, s, {0, 50, 0}, params) == Mode::Avoiding);
  CHECK(supervisor_step(Mode::Avoiding, {}, s, {50, 3, 0}, params) == Mode::Tracking);
}

TEST_CASE("nearest detection and reorientation") {
  std::vector<Detection> dets(3);
  dets[0].distance = 12;
  dets[1].distance = 4;
  dets[2].distance = 9;
  CHECK(nearest_detection(dets) == &dets[1]);
  CHECK(nearest_detection(std::vector<Detection>{}) == nullptr);

  const ControlLimits lim;
  CHECK(reorient_command(at(0, 0, 0), {0, 10, 0}, lim).u == lim.u_max);
  CHECK(reorient_command(at(0, 0, 0), {0, -10, 0}, lim).u == -lim.u_max);
  CHECK(reorient_command(at(0, 0, 0), {10, 0, 0}, lim).u == 0.0);
}
