#pragma once

#include <cstddef>
#include <numbers>
#include <span>
#include <vector>

#include "suav/energy.hpp"
#include "suav/geometry.hpp"

namespace suav {

enum class Mode { Tracking, Avoiding };

struct UavState {
  Vec3 position;
  double heading = 0.0;  // rad, (-pi, pi]
  double speed = 0.0;    // m/s
  BatteryState battery;
  Mode mode = Mode::Tracking;
};

struct ControlLimits {
  double v_min = 0.0;                           // m/s
  double v_max = 20.0;                          // m/s
  double u_max = 120.0 * std::numbers::pi / 180.0;  // rad/s
  double cruise = 12.0;                         // V, m/s
  double vz_max = 3.0;                          // m/s
};

void validate(const ControlLimits& limits);

struct Command {
  double v = 0.0;   // m/s
  double u = 0.0;   // rad/s, heading rate
  double vz = 0.0;  // m/s
};

struct StepResult {
  UavState state;
  Command applied;       // command after clamping
  bool clamped = false;  // inputs or altitude had to be clamped
};

/// RK4 advance of x' = v cos(theta), y' = v sin(theta), z' = vz, theta' = u over dt.
/// Inputs are clamped to the limits and z to [z_min, z_max].
StepResult step_kinematics_3d(const UavState& s, const Command& cmd, double dt, const ControlLimits& limits,
                              double z_min, double z_max);

/// Same as the 3D step with the altitude held.
StepResult step_kinematics_planar(const UavState& s, const Command& cmd, double dt, const ControlLimits& limits);

/// Sphere obstacle moving at a constant planar velocity.
struct MovingObstacle {
  Vec3 center;
  double radius = 1.0;
  Vec3 velocity;
  bool known_to_planner = false;

  Vec3 center_at(double t) const { return center + velocity * t; }
};

struct AvoidanceParams {
  double alpha_safe = 40.0 * std::numbers::pi / 180.0;  // rad
  double theta = 10.0 * std::numbers::pi / 180.0;       // selection threshold, rad
  double sensor_range = 50.0;                           // m
  double trigger = 30.0;                                // D, m
  double align_tolerance = 5.0 * std::numbers::pi / 180.0;  // rad
};

void validate(const AvoidanceParams& params);

struct Detection {
  std::size_t id = 0;
  double alpha1 = 0.0;  // body-frame angle of the left tangent, rad
  double alpha2 = 0.0;  // body-frame angle of the right tangent, alpha2 <= alpha1
  Vec3 velocity;        // obstacle velocity, planar
  double range = 0.0;   // planar distance to the center, m
  double distance = 0.0;  // planar distance to the boundary, m (d_i)
};

struct Lookahead {
  Vec3 target;
  std::size_t nearest = 0;  // index of the waypoint closest to p
};

/// Point at arc length L past the waypoint nearest to p, searching waypoints from index `from` on.
/// Saturates at the final waypoint.
Lookahead pursuit_lookahead(std::span<const Vec3> path, const Vec3& p, double L, std::size_t from = 0);

/// Pure pursuit: u = clamp(V * 2 sin(alpha) / L, +-u_max) toward p*, v = V. The vertical rate
/// closes the altitude gap to p* proportionally.
Command pursuit_command(const UavState& s, const Vec3& target, double L, const ControlLimits& limits);

/// Spheres cut by the horizontal plane of the vehicle, within sensor range and reaching into the
/// forward half-plane.
std::vector<Detection> sense_obstacles(std::span<const MovingObstacle> obstacles, const UavState& s,
                                       const AvoidanceParams& params);

struct Avoidance {
  Command command;
  int side = 1;  // 1 or 2, the chosen cone boundary
  double eps1 = 0.0;
  double eps2 = 0.0;
};

/// Sliding-mode steering onto one boundary of the enlarged vision cone. sun_x, sun_y is the
/// planar direction of the sun.
Avoidance avoidance_command(const UavState& s, const Detection& det, double sun_x, double sun_y,
                            const AvoidanceParams& params, const ControlLimits& limits);

/// Closest detection by boundary distance, or nullptr.
const Detection* nearest_detection(std::span<const Detection> detections);

/// Switching laws between path tracking and reactive avoidance.
Mode supervisor_step(Mode current, std::span<const Detection> detections, const UavState& s, const Vec3& target,
                     const AvoidanceParams& params);

/// Bang-bang turn toward p* at cruise speed, used while avoiding with nothing inside the trigger.
Command reorient_command(const UavState& s, const Vec3& target, const ControlLimits& limits);

}  // namespace suav
