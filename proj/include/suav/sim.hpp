#pragma once

#include <string>
#include <vector>

#include "suav/control.hpp"
#include "suav/energy.hpp"
#include "suav/env.hpp"
#include "suav/grid.hpp"
#include "suav/planners.hpp"
#include "suav/privacy.hpp"

namespace suav {

enum class PlannerKind { Energy, Time, Shortest, Privacy };
enum class ControllerMode { Hybrid, ReactiveOnly, TrackOnly };

const char* to_string(PlannerKind kind);
const char* to_string(ControllerMode mode);
const char* to_string(Mode mode);

struct Scenario {
  std::string name = "scenario";
  Environment env;
  EnergyModel energy;
  BatteryState battery;
  GridSpec grid;
  DpOptions privacy;
  ControlLimits limits;
  AvoidanceParams avoidance;
  double lookahead = 20.0;  // L, m
  Vec3 start;
  Vec3 goal;
  std::vector<MovingObstacle> obstacles;  // unknown to the planner
  double dt = 0.05;                       // s
  double max_time = 600.0;                // s
  PlannerKind planner = PlannerKind::Energy;
  bool replan = false;

  double arrival_radius() const { return grid.resolution; }
};

/// Throws ValidationError naming the first offending field.
void validate(const Scenario& sc);

/// State at t, and the inputs held over [t, t + dt). The last record carries zero inputs.
struct LogRecord {
  double t = 0.0;
  Vec3 position;
  double heading = 0.0;
  double v = 0.0;
  double u = 0.0;
  double vz = 0.0;
  double battery = 0.0;
  bool shadow = false;
  Mode mode = Mode::Tracking;
  double min_dist = 0.0;
};

enum class EventKind { ModeSwitch, Clamp, Replan, Collision, BatteryDepleted, Arrived, Timeout };

const char* to_string(EventKind kind);

struct SimEvent {
  std::size_t step = 0;
  EventKind kind = EventKind::Arrived;
  std::string detail;
};

struct SimLog {
  std::vector<LogRecord> records;
  std::vector<SimEvent> events;
  std::vector<Vec3> planned;  // waypoints the tracker followed first
};

struct Metrics {
  double total_time = 0.0;   // s
  double e_out = 0.0;        // J
  double e_gain = 0.0;       // J, before clamping
  double clamp_loss = 0.0;   // J
  double net_cost = 0.0;     // e_out - (e_gain - clamp_loss)
  double initial_battery = 0.0;
  double final_battery = 0.0;
  double length = 0.0;       // m
  double shadow_time = 0.0;  // s
  double min_separation = 0.0;  // m
  bool collision = false;
  bool arrived = false;
  int mode_switches = 0;
};

struct SimResult {
  SimLog log;
  Metrics metrics;
};

/// Deterministic fixed-step run. Plans once on the known prisms (except in reactive-only mode),
/// then senses, switches, steers, integrates, and books energy every step.
/// Throws PlanningFailed when the initial plan fails.
SimResult run_scenario(const Scenario& sc, ControllerMode mode = ControllerMode::Hybrid);

/// Straight-line advance of every center by velocity * dt.
std::vector<MovingObstacle> step_obstacles(const std::vector<MovingObstacle>& obs, double dt);

/// Sun occluded at p and time t by a prism or by an unknown sphere at its position at t.
bool scenario_shadow(const Scenario& sc, const Vec3& p, double t);

/// Clearance from p to the nearest prism or sphere at time t; negative inside.
double obstacle_clearance(const Scenario& sc, const Vec3& p, double t);

/// Totals recomputed from the logged motion alone.
Metrics compute_metrics(const SimLog& log, const Scenario& sc);

/// (initial - final logged battery) - (e_out - e_gain + clamp_loss); zero when the books close.
double energy_audit_residual(const SimLog& log, const Metrics& m);

/// Plans on the known map with the scenario's planner.
Path plan_route(const Scenario& sc, const NavGrid& grid, const Vec3& start, const BatteryState& battery);

}  // namespace suav
