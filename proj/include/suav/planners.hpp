#pragma once

#include <functional>
#include <vector>

#include "suav/energy.hpp"
#include "suav/grid.hpp"

namespace suav {

/// Grid route with per-edge costs and the residual battery at every waypoint.
struct Path {
  std::vector<NavGrid::Index> nodes;
  std::vector<Vec3> waypoints;
  std::vector<GridEdge> edges;   // edges[i] joins waypoints[i] and waypoints[i + 1]
  std::vector<double> battery;   // charge on arrival at each waypoint, J
  double search_cost = 0.0;      // value of the objective the planner minimized
  double e_out = 0.0;            // J
  double e_gain = 0.0;           // J, harvested before clamping
  double clamp_loss = 0.0;       // J of harvest discarded at full charge
  double duration = 0.0;         // s
  double length = 0.0;           // m
  double shadow_time = 0.0;      // s

  /// Consumption minus the harvest that actually reached the battery.
  double net_cost() const { return e_out - (e_gain - clamp_loss); }
};

/// Minimizes net expenditure sum(E_out - E_gain) while every prefix keeps the battery in
/// [floor, capacity]. Per-edge search cost is floored at zero; the battery tracks signed energy.
Path plan_energy_efficient(const NavGrid& grid, const BatteryState& battery, const Vec3& start,
                           const Vec3& goal);

/// Minimizes flight time under the same battery constraint.
Path plan_time_efficient(const NavGrid& grid, const BatteryState& battery, const Vec3& start,
                         const Vec3& goal);

/// Minimum Euclidean length over the grid, ignoring energy.
Path plan_shortest(const NavGrid& grid, const Vec3& start, const Vec3& goal);

using EdgeCost = std::function<double(NavGrid::Index from, const GridEdge& edge)>;

/// Plain Dijkstra with no heuristic. Throws std::invalid_argument on a negative edge cost.
Path dijkstra_oracle(const NavGrid& grid, const EdgeCost& edge_cost, const Vec3& start, const Vec3& goal);

/// Per-edge search costs used by the planners, exposed so oracles can use the same objective.
double energy_search_cost(const GridEdge& e);

/// Lower bounds on cost per meter of straight-line distance, used as A* heuristics.
double energy_cost_per_meter(const EnergyModel& model);
double time_cost_per_meter(const EnergyModel& model);

/// Fills battery profile and totals for a node sequence, starting from `battery`.
void annotate_path(const NavGrid& grid, const BatteryState& battery, Path& path);

}  // namespace suav
