#include "suav/control.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "suav/errors.hpp"

namespace suav {

namespace {

struct Deriv {
  double x, y, z, th;
};

Deriv unicycle(double th, const Command& c) { return {c.v * std::cos(th), c.v * std::sin(th), c.vz, c.u}; }

StepResult integrate(const UavState& s, const Command& cmd, double dt, const ControlLimits& limits, bool planar,
                     double z_min, double z_max) {
  if (!(dt > 0.0)) throw std::invalid_argument("dt must be positive");
  StepResult r;
  Command c;
  c.v = std::clamp(cmd.v, limits.v_min, limits.v_max);
  c.u = std::clamp(cmd.u, -limits.u_max, limits.u_max);
  c.vz = planar ? 0.0 : std::clamp(cmd.vz, -limits.vz_max, limits.vz_max);
  r.clamped = c.v != cmd.v || c.u != cmd.u || (!planar && c.vz != cmd.vz);

  // Inputs are held over the step, so the derivative depends on the heading only.
  const double th = s.heading;
  const Deriv k1 = unicycle(th, c);
  const Deriv k2 = unicycle(th + 0.5 * dt * k1.th, c);
  const Deriv k3 = unicycle(th + 0.5 * dt * k2.th, c);
  const Deriv k4 = unicycle(th + dt * k3.th, c);
  const double w = dt / 6.0;

  r.state = s;
  r.state.position.x += w * (k1.x + 2.0 * k2.x + 2.0 * k3.x + k4.x);
  r.state.position.y += w * (k1.y + 2.0 * k2.y + 2.0 * k3.y + k4.y);
  if (!planar) {
    const double z = s.position.z + dt * c.vz;
    r.state.position.z = std::clamp(z, z_min, z_max);
    if (r.state.position.z != z) r.clamped = true;
  }
  r.state.heading = wrap_angle(th + dt * c.u);
  r.state.speed = c.v;
  r.applied = c;
  return r;
}

double sign(double x) { return x > 0.0 ? 1.0 : (x < 0.0 ? -1.0 : 0.0); }

}  // namespace

void validate(const ControlLimits& l) {
  if (!(l.v_min >= 0.0)) throw ValidationError("limits.v_min", "must be non-negative");
  if (!(l.v_min < l.cruise && l.cruise < l.v_max)) throw ValidationError("limits.cruise", "must lie strictly between v_min and v_max");
  if (!(l.u_max > 0.0)) throw ValidationError("limits.u_max", "must be positive");
  if (!(l.vz_max > 0.0)) throw ValidationError("limits.vz_max", "must be positive");
}

void validate(const AvoidanceParams& p) {
  if (!(p.alpha_safe > 0.0 && p.alpha_safe < std::numbers::pi / 2))
    throw ValidationError("avoidance.alpha_safe", "must lie in (0, 90) degrees");
  if (!(p.theta >= 0.0)) throw ValidationError("avoidance.theta", "must be non-negative");
  if (!(p.sensor_range > 0.0)) throw ValidationError("avoidance.sensor_range", "must be positive");
  if (!(p.trigger > 0.0 && p.trigger <= p.sensor_range))
    throw ValidationError("avoidance.trigger", "must lie in (0, sensor_range]");
  if (!(p.align_tolerance > 0.0)) throw ValidationError("avoidance.align_tolerance", "must be positive");
}

StepResult step_kinematics_3d(const UavState& s, const Command& cmd, double dt, const ControlLimits& limits,
                              double z_min, double z_max) {
  return integrate(s, cmd, dt, limits, false, z_min, z_max);
}

StepResult step_kinematics_planar(const UavState& s, const Command& cmd, double dt, const ControlLimits& limits) {
  return integrate(s, cmd, dt, limits, true, 0.0, 0.0);
}

Lookahead pursuit_lookahead(std::span<const Vec3> path, const Vec3& p, double L, std::size_t from) {
  if (path.empty()) throw std::invalid_argument("pursuit_lookahead needs a non-empty path");
  from = std::min(from, path.size() - 1);
  std::size_t best = from;
  double best_d = distance(path[from], p);
  for (std::size_t i = from + 1; i < path.size(); ++i) {
    const double d = distance(path[i], p);
    if (d < best_d) {
      best_d = d;
      best = i;
    }
  }
  double remaining = L;
  for (std::size_t i = best; i + 1 < path.size(); ++i) {
    const double seg = distance(path[i], path[i + 1]);
    if (seg >= remaining && seg > 0.0) return {path[i] + (path[i + 1] - path[i]) * (remaining / seg), best};
    remaining -= seg;
  }
  return {path.back(), best};
}

Command pursuit_command(const UavState& s, const Vec3& target, double L, const ControlLimits& limits) {
  const Vec3 d = target - s.position;
  const double alpha = signed_angle(std::cos(s.heading), std::sin(s.heading), d.x, d.y);
  Command c;
  c.v = limits.cruise;
  c.u = std::clamp(limits.cruise * 2.0 * std::sin(alpha) / L, -limits.u_max, limits.u_max);
  c.vz = std::clamp(d.z, -limits.vz_max, limits.vz_max);
  return c;
}

std::vector<Detection> sense_obstacles(std::span<const MovingObstacle> obstacles, const UavState& s,
                                       const AvoidanceParams& params) {
  std::vector<Detection> out;
  const double hx = std::cos(s.heading), hy = std::sin(s.heading);
  for (std::size_t i = 0; i < obstacles.size(); ++i) {
    const auto& o = obstacles[i];
    const Vec3 d = o.center - s.position;
    if (std::abs(d.z) >= o.radius) continue;
    const double re = std::sqrt(o.radius * o.radius - d.z * d.z);
    const double r = d.norm_xy();
    if (r > params.sensor_range || r == 0.0) continue;
    // Forward half-plane: the center lies ahead of the vehicle.
    if (d.x * hx + d.y * hy <= 0.0) continue;
    const double beta = signed_angle(hx, hy, d.x, d.y);
    const double half = re >= r ? std::numbers::pi / 2 : std::asin(re / r);
    Detection det;
    det.id = i;
    det.alpha1 = beta + half;
    det.alpha2 = beta - half;
    det.velocity = {o.velocity.x, o.velocity.y, 0.0};
    det.range = r;
    det.distance = r - re;
    out.push_back(det);
  }
  return out;
}

Avoidance avoidance_command(const UavState& s, const Detection& det, double sun_x, double sun_y,
                            const AvoidanceParams& params, const ControlLimits& limits) {
  const double mag = limits.v_max - limits.cruise;
  const double b1 = s.heading + det.alpha1 + params.alpha_safe;
  const double b2 = s.heading + det.alpha2 - params.alpha_safe;
  const double c1x = det.velocity.x + mag * std::cos(b1), c1y = det.velocity.y + mag * std::sin(b1);
  const double c2x = det.velocity.x + mag * std::cos(b2), c2y = det.velocity.y + mag * std::sin(b2);
  const double hx = std::cos(s.heading), hy = std::sin(s.heading);

  Avoidance a;
  a.eps1 = signed_angle(c1x, c1y, hx, hy);
  a.eps2 = signed_angle(c2x, c2y, hx, hy);
  if (std::abs(std::abs(a.eps1) - std::abs(a.eps2)) >= params.theta) {
    a.side = std::abs(a.eps2) < std::abs(a.eps1) ? 2 : 1;
  } else {
    const double s1 = std::abs(signed_angle(c1x, c1y, sun_x, sun_y));
    const double s2 = std::abs(signed_angle(c2x, c2y, sun_x, sun_y));
    a.side = s2 < s1 ? 2 : 1;
  }
  const double eps = a.side == 1 ? a.eps1 : a.eps2;
  const double cx = a.side == 1 ? c1x : c2x;
  const double cy = a.side == 1 ? c1y : c2y;
  a.command.u = -limits.u_max * sign(eps);
  a.command.v = std::clamp(std::hypot(cx, cy), limits.v_min, limits.v_max);
  return a;
}

const Detection* nearest_detection(std::span<const Detection> detections) {
  const Detection* best = nullptr;
  for (const auto& d : detections)
    if (!best || d.distance < best->distance) best = &d;
  return best;
}

Mode supervisor_step(Mode current, std::span<const Detection> detections, const UavState& s, const Vec3& target,
                     const AvoidanceParams& params) {
  const Detection* near = nearest_detection(detections);
  const bool close = near && near->distance <= params.trigger;
  if (current == Mode::Tracking) return close ? Mode::Avoiding : Mode::Tracking;
  if (close) return Mode::Avoiding;
  const Vec3 d = target - s.position;
  const double off = signed_angle(std::cos(s.heading), std::sin(s.heading), d.x, d.y);
  return std::abs(off) <= params.align_tolerance ? Mode::Tracking : Mode::Avoiding;
}

Command reorient_command(const UavState& s, const Vec3& target, const ControlLimits& limits) {
  const Vec3 d = target - s.position;
  const double off = signed_angle(std::cos(s.heading), std::sin(s.heading), d.x, d.y);
  Command c;
  c.v = limits.cruise;
  c.u = limits.u_max * sign(off);
  return c;
}

}  // namespace suav
