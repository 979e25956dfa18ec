#pragma once

#include <array>
#include <cstdint>
#include <limits>
#include <optional>
#include <vector>

#include "suav/env.hpp"

namespace suav {

struct TimedPoint {
  double t = 0.0;
  Vec3 p;
};

using Trajectory = std::vector<TimedPoint>;

/// 1 within c1 of the center, 0 beyond c2, linear in distance between.
double privacy_intensity(const Vec3& p, const PrivacyRegion& region);

double summed_intensity(const Vec3& p, const std::vector<PrivacyRegion>& regions);

/// Trapezoidal time integral of the summed intensity along the samples. Throws
/// std::invalid_argument unless timestamps strictly increase.
double total_privacy_risk(const Trajectory& traj, const std::vector<PrivacyRegion>& regions);

/// Inserts `substeps - 1` evenly spaced samples inside every interval.
Trajectory densify(const Trajectory& traj, int substeps);

struct DpOptions {
  int layers = 20;            // M
  double horizon = 100.0;     // T_max, s
  double max_speed = 10.0;    // v_max, m/s
  double intensity_scale = 1.0;
  bool planar = false;        // restrict the lattice to the goal's altitude
  int quadrature = 16;        // Simpson sub-intervals per stage integral (even)

  double step_time() const { return horizon / layers; }
  double cell() const { return max_speed * step_time(); }
};

/// Time-layered value table for privacy-aware routing toward a fixed goal.
///
/// Lattice points sit at goal + cell * (i, j, k). Each layer step lasts delta = T_max / M and moves
/// to one of the 26 neighbours (8 when planar) or holds position. V(M, goal) = 0 and
/// V(i, p) = min over admissible moves of stage risk + V(i + 1, successor).
class PrivacyDp {
 public:
  using Node = std::uint32_t;
  static constexpr int kMoves = 27;  // move 0 holds, the rest follow (dx, dy, dz) lexicographically
  static constexpr double kUnreachable = std::numeric_limits<double>::infinity();

  PrivacyDp(const Environment& env, const Vec3& goal, const DpOptions& options);

  const DpOptions& options() const { return options_; }
  std::size_t node_count() const { return admissible_.size(); }
  Node goal_node() const { return goal_node_; }
  Vec3 position(Node n) const;
  bool admissible(Node n) const { return admissible_[n] != 0; }
  std::optional<Node> node_at(const Vec3& p) const;

  /// Successor of n under move m, if the move is allowed.
  std::optional<Node> successor(Node n, int move) const;
  /// Risk accumulated over one layer step for move m out of n (scaled), or kUnreachable.
  double stage_cost(Node n, int move) const { return stage_[n * kMoves + move]; }

  /// V(i, n), kUnreachable when n is not in the layer's reachable set.
  double value(int layer, Node n) const { return value_[layer * node_count() + n]; }
  /// Minimizing move stored for (i, n), or -1.
  int best_move(int layer, Node n) const { return policy_[layer * node_count() + n]; }

 private:
  Environment env_;
  DpOptions options_;
  Vec3 goal_;
  std::array<int, 3> lo_{}, count_{};
  Node goal_node_ = 0;
  std::vector<char> admissible_;
  std::vector<double> stage_;
  std::vector<double> value_;
  std::vector<std::int8_t> policy_;

  Node index(int i, int j, int k) const {
    return static_cast<Node>(((k - lo_[2]) * count_[1] + (j - lo_[1])) * count_[0] + (i - lo_[0]));
  }
};

/// Lattice displacement for move m, in cells.
std::array<int, 3> dp_move(int move);

struct DpPlan {
  Trajectory trajectory;  // one sample per layer boundary, t from 0 to t_f
  std::vector<PrivacyDp::Node> nodes;
  double final_time = 0.0;
  double risk = 0.0;      // V(i0, start)
  int start_layer = 0;    // i0
};

/// Reads the optimal trajectory off a built table. Ties over i0 favour the later layer (shorter
/// flight). Throws Unreachable when start is in no layer's reachable set.
DpPlan extract_plan(const PrivacyDp& dp, const Vec3& start);

DpPlan plan_privacy_dp(const Environment& env, const Vec3& start, const Vec3& goal, const DpOptions& options);

/// Shortest Euclidean route over the same lattice and constraints, one move per layer step.
/// The comparison baseline for the privacy planner.
DpPlan plan_privacy_baseline(const PrivacyDp& dp, const Vec3& start);

}  // namespace suav
