#include "suav/sim.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>

#include "suav/errors.hpp"

namespace suav {

const char* to_string(PlannerKind kind) {
  switch (kind) {
    case PlannerKind::Energy:
      return "energy";
    case PlannerKind::Time:
      return "time";
    case PlannerKind::Shortest:
      return "shortest";
    case PlannerKind::Privacy:
      return "privacy";
  }
  return "?";
}

const char* to_string(ControllerMode mode) {
  switch (mode) {
    case ControllerMode::Hybrid:
      return "hybrid";
    case ControllerMode::ReactiveOnly:
      return "reactive-only";
    case ControllerMode::TrackOnly:
      return "track-only";
  }
  return "?";
}

const char* to_string(Mode mode) { return mode == Mode::Tracking ? "tracking" : "avoiding"; }

const char* to_string(EventKind kind) {
  switch (kind) {
    case EventKind::ModeSwitch:
      return "mode_switch";
    case EventKind::Clamp:
      return "clamp";
    case EventKind::Replan:
      return "replan";
    case EventKind::Collision:
      return "collision";
    case EventKind::BatteryDepleted:
      return "battery_depleted";
    case EventKind::Arrived:
      return "arrived";
    case EventKind::Timeout:
      return "timeout";
  }
  return "?";
}

void validate(const Scenario& sc) {
  validate(sc.env);
  validate(sc.energy.consumption);
  validate(sc.energy.harvest);
  validate(sc.battery);
  validate(sc.limits);
  validate(sc.avoidance);
  if (!(sc.grid.resolution > 0.0)) throw ValidationError("grid.resolution", "must be positive");
  if (!(sc.grid.margin >= 0.0)) throw ValidationError("grid.margin", "must be non-negative");
  if (!(sc.lookahead > 0.0)) throw ValidationError("lookahead", "must be positive");
  if (!(sc.dt > 0.0)) throw ValidationError("dt", "must be positive");
  if (!(sc.max_time > 0.0)) throw ValidationError("max_time", "must be positive");
  if (!sc.start.finite() || is_collision(sc.start, sc.env)) throw ValidationError("start", "must be collision-free");
  if (!sc.goal.finite() || is_collision(sc.goal, sc.env)) throw ValidationError("goal", "must be collision-free");
  for (std::size_t i = 0; i < sc.obstacles.size(); ++i) {
    const auto& o = sc.obstacles[i];
    const std::string field = "obstacles[" + std::to_string(i) + "]";
    if (!(o.radius > 0.0)) throw ValidationError(field + ".radius", "must be positive");
    if (o.velocity.z != 0.0) throw ValidationError(field + ".velocity", "must be planar");
    if (!(o.velocity.norm() < sc.limits.cruise))
      throw ValidationError(field + ".velocity", "speed must stay below the cruise speed");
  }
  if (sc.grid.planar && (sc.start.z != sc.grid.planar_z || sc.goal.z != sc.grid.planar_z))
    throw ValidationError("grid.planar_z", "start and goal must fly at the planar altitude");
}

std::vector<MovingObstacle> step_obstacles(const std::vector<MovingObstacle>& obs, double dt) {
  if (!(dt > 0.0)) throw std::invalid_argument("dt must be positive");
  std::vector<MovingObstacle> out = obs;
  for (auto& o : out) o.center = o.center + o.velocity * dt;
  return out;
}

bool scenario_shadow(const Scenario& sc, const Vec3& p, double t) {
  if (in_shadow(sc.env, p, t)) return true;
  const Vec3 sun = sc.env.sun.position_at(t);
  return std::any_of(sc.obstacles.begin(), sc.obstacles.end(), [&](const MovingObstacle& o) {
    return segment_hits_sphere(sun, p, o.center_at(t), o.radius);
  });
}

double obstacle_clearance(const Scenario& sc, const Vec3& p, double t) {
  double best = sc.env.bounds.extent().norm();
  for (const auto& prism : sc.env.prisms) best = std::min(best, radial_clearance(p, prism));
  for (const auto& o : sc.obstacles) best = std::min(best, distance(p, o.center_at(t)) - o.radius);
  return best;
}

Path plan_route(const Scenario& sc, const NavGrid& grid, const Vec3& start, const BatteryState& battery) {
  switch (sc.planner) {
    case PlannerKind::Energy:
      return plan_energy_efficient(grid, battery, start, sc.goal);
    case PlannerKind::Time:
      return plan_time_efficient(grid, battery, start, sc.goal);
    case PlannerKind::Shortest: {
      // Report the route against the real battery even though the search ignored it.
      Path p = plan_shortest(grid, start, sc.goal);
      annotate_path(grid, battery, p);
      return p;
    }
    case PlannerKind::Privacy:
      break;
  }
  throw std::invalid_argument("plan_route handles grid planners only");
}

namespace {

std::vector<Vec3> initial_route(const Scenario& sc, ControllerMode mode) {
  std::vector<Vec3> route;
  if (mode == ControllerMode::ReactiveOnly) {
    const double len = distance(sc.start, sc.goal);
    const int n = std::max(1, static_cast<int>(std::ceil(len / sc.grid.resolution)));
    for (int i = 0; i <= n; ++i) route.push_back(sc.start + (sc.goal - sc.start) * (static_cast<double>(i) / n));
    return route;
  }
  try {
    if (sc.planner == PlannerKind::Privacy) {
      for (const auto& tp : plan_privacy_dp(sc.env, sc.start, sc.goal, sc.privacy).trajectory) {
        if (route.empty() || !(route.back() == tp.p)) route.push_back(tp.p);
      }
    } else {
      const NavGrid grid = build_grid(sc.env, sc.grid, sc.energy);
      route = plan_route(sc, grid, sc.start, sc.battery).waypoints;
    }
  } catch (const PlanningFailed&) {
    throw;
  } catch (const Error& e) {
    throw PlanningFailed(e.what());
  }
  if (route.empty() || !(route.front() == sc.start)) route.insert(route.begin(), sc.start);
  return route;
}

// Known prisms as seen by a range sensor: the circle enclosing the footprint, at the vehicle's
// altitude whenever the prism spans it.
std::vector<MovingObstacle> sensed_world(const Scenario& sc, ControllerMode mode, double t, double z) {
  std::vector<MovingObstacle> out;
  out.reserve(sc.obstacles.size() + sc.env.prisms.size());
  for (const auto& o : sc.obstacles) {
    MovingObstacle m = o;
    m.center = o.center_at(t);
    out.push_back(m);
  }
  if (mode == ControllerMode::ReactiveOnly) {
    for (const auto& p : sc.env.prisms) {
      if (std::abs(z - p.center.z) >= p.semi_axes.z) continue;
      MovingObstacle m;
      m.center = {p.center.x, p.center.y, z};
      m.radius = std::hypot(p.semi_axes.x, p.semi_axes.y);
      m.known_to_planner = true;
      out.push_back(m);
    }
  }
  return out;
}

}  // namespace

SimResult run_scenario(const Scenario& sc, ControllerMode mode) {
  validate(sc);
  SimResult result;
  SimLog& log = result.log;
  std::vector<Vec3> route = initial_route(sc, mode);
  log.planned = route;

  std::optional<NavGrid> grid;  // built lazily for replanning
  const bool planar = sc.grid.planar;
  const double dt = sc.dt;
  const auto& sun = sc.env.sun;

  UavState s;
  s.position = sc.start;
  s.battery = sc.battery;
  {
    const Vec3 target = pursuit_lookahead(route, s.position, sc.lookahead).target;
    const Vec3 d = target - s.position;
    s.heading = d.norm_xy() > 0.0 ? std::atan2(d.y, d.x) : 0.0;
  }

  std::size_t hint = 0;
  const auto max_steps = static_cast<std::size_t>(std::ceil(sc.max_time / dt - 1e-9));
  for (std::size_t k = 0;; ++k) {
    const double t = static_cast<double>(k) * dt;
    LogRecord rec;
    rec.t = t;
    rec.position = s.position;
    rec.heading = s.heading;
    rec.battery = s.battery.energy;
    rec.shadow = scenario_shadow(sc, s.position, t);
    rec.mode = s.mode;
    rec.min_dist = obstacle_clearance(sc, s.position, t);

    if (rec.min_dist <= 0.0) {
      log.events.push_back({k, EventKind::Collision, "clearance " + std::to_string(rec.min_dist) + " m"});
      log.records.push_back(rec);
      break;
    }
    if (distance(s.position, sc.goal) <= sc.arrival_radius()) {
      log.events.push_back({k, EventKind::Arrived, ""});
      log.records.push_back(rec);
      break;
    }
    if (k >= max_steps) {
      log.events.push_back({k, EventKind::Timeout, ""});
      log.records.push_back(rec);
      break;
    }

    const Lookahead look = pursuit_lookahead(route, s.position, sc.lookahead, hint);
    hint = look.nearest;
    const auto world = sensed_world(sc, mode, t, s.position.z);
    const auto detections = sense_obstacles(world, s, sc.avoidance);

    const Mode next = mode == ControllerMode::TrackOnly
                          ? Mode::Tracking
                          : supervisor_step(s.mode, detections, s, look.target, sc.avoidance);
    Vec3 target = look.target;
    if (next != s.mode) {
      log.events.push_back({k, EventKind::ModeSwitch, to_string(next)});
      if (next == Mode::Tracking && sc.replan && mode == ControllerMode::Hybrid &&
          sc.planner != PlannerKind::Privacy) {
        try {
          if (!grid) grid = build_grid(sc.env, sc.grid, sc.energy);
          const auto node = grid->nearest(s.position);
          if (node && grid->is_free(*node)) {
            std::vector<Vec3> fresh = plan_route(sc, *grid, grid->position(*node), s.battery).waypoints;
            fresh.insert(fresh.begin(), s.position);
            route = std::move(fresh);
            hint = 0;
            target = pursuit_lookahead(route, s.position, sc.lookahead, hint).target;
            log.events.push_back({k, EventKind::Replan, std::to_string(route.size()) + " waypoints"});
          }
        } catch (const Error&) {
          // Keep the original route when no new plan exists.
        }
      }
    }
    s.mode = next;
    rec.mode = next;

    Command cmd;
    if (s.mode == Mode::Tracking) {
      cmd = pursuit_command(s, target, sc.lookahead, sc.limits);
    } else {
      const Detection* near = nearest_detection(detections);
      if (near && near->distance <= sc.avoidance.trigger) {
        const Vec3 to_sun = sun.position_at(t) - s.position;
        const double n = to_sun.norm_xy();
        const double sx = n > 0.0 ? to_sun.x / n : 1.0;
        const double sy = n > 0.0 ? to_sun.y / n : 0.0;
        cmd = avoidance_command(s, *near, sx, sy, sc.avoidance, sc.limits).command;
      } else {
        cmd = reorient_command(s, target, sc.limits);
      }
    }

    const StepResult step = planar ? step_kinematics_planar(s, cmd, dt, sc.limits)
                                   : step_kinematics_3d(s, cmd, dt, sc.limits, std::max(sc.env.z_min, sc.env.bounds.lo.z),
                                                        std::min(sc.env.z_max, sc.env.bounds.hi.z));
    if (step.clamped) log.events.push_back({k, EventKind::Clamp, ""});

    const Command& a = step.applied;
    const double e_out = consumption_power(a.v, a.vz, sc.energy.consumption) * dt;
    const double cos_theta = incidence_cosine(0.0, s.heading, sun.azimuth, sun.elevation);
    const double e_gain = harvest_power(sc.energy, cos_theta, rec.shadow, s.position.z) * dt;
    BatteryState charged;
    try {
      charged = battery_step(s.battery, e_out, e_gain);
    } catch (const BatteryDepleted& e) {
      log.events.push_back({k, EventKind::BatteryDepleted, e.what()});
      log.records.push_back(rec);
      break;
    }
    rec.v = a.v;
    rec.u = a.u;
    rec.vz = a.vz;
    log.records.push_back(rec);

    const Mode keep = s.mode;
    s = step.state;
    s.mode = keep;
    s.battery = charged;
  }

  result.metrics = compute_metrics(log, sc);
  return result;
}

Metrics compute_metrics(const SimLog& log, const Scenario& sc) {
  if (log.records.empty()) throw std::invalid_argument("compute_metrics needs a non-empty log");
  Metrics m;
  const auto& recs = log.records;
  const auto& sun = sc.env.sun;
  m.initial_battery = recs.front().battery;
  m.final_battery = recs.back().battery;
  m.min_separation = std::numeric_limits<double>::infinity();
  double charge = m.initial_battery;
  for (std::size_t k = 0; k < recs.size(); ++k) {
    const LogRecord& r = recs[k];
    m.min_separation = std::min(m.min_separation, r.min_dist);
    if (k + 1 == recs.size()) break;
    const double out = consumption_power(r.v, r.vz, sc.energy.consumption) * sc.dt;
    const double cos_theta = incidence_cosine(0.0, r.heading, sun.azimuth, sun.elevation);
    const double gain = harvest_power(sc.energy, cos_theta, r.shadow, r.position.z) * sc.dt;
    const double unclamped = charge - out + gain;
    if (unclamped > sc.battery.capacity) {
      m.clamp_loss += unclamped - sc.battery.capacity;
      charge = sc.battery.capacity;
    } else {
      charge = unclamped;
    }
    m.e_out += out;
    m.e_gain += gain;
    m.length += distance(r.position, recs[k + 1].position);
    if (r.shadow) m.shadow_time += sc.dt;
    if (recs[k + 1].mode != r.mode) ++m.mode_switches;
  }
  m.total_time = recs.back().t - recs.front().t;
  m.net_cost = m.e_out - (m.e_gain - m.clamp_loss);
  m.collision = m.min_separation <= 0.0;
  m.arrived = std::any_of(log.events.begin(), log.events.end(),
                          [](const SimEvent& e) { return e.kind == EventKind::Arrived; });
  return m;
}

double energy_audit_residual(const SimLog& log, const Metrics& m) {
  if (log.records.empty()) return 0.0;
  const double delta = log.records.front().battery - log.records.back().battery;
  return delta - (m.e_out - m.e_gain + m.clamp_loss);
}

}  // namespace suav
