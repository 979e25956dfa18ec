#include "suav/privacy.hpp"

#include <algorithm>
#include <cmath>
#include <queue>
#include <stdexcept>

#include "suav/errors.hpp"

namespace suav {

namespace {

double segment_center_distance(const Vec3& a, const Vec3& b, const Vec3& c) {
  const Vec3 d = b - a;
  const double dd = dot(d, d);
  const double t = dd > 0.0 ? std::clamp(dot(c - a, d) / dd, 0.0, 1.0) : 0.0;
  return distance(a + d * t, c);
}

}  // namespace

double privacy_intensity(const Vec3& p, const PrivacyRegion& region) {
  const double dist = distance(p, region.center);
  if (dist >= region.c2) return 0.0;
  if (dist <= region.c1) return 1.0;
  return (dist - region.c2) / (region.c1 - region.c2);
}

double summed_intensity(const Vec3& p, const std::vector<PrivacyRegion>& regions) {
  double s = 0.0;
  for (const auto& r : regions) s += privacy_intensity(p, r);
  return s;
}

double total_privacy_risk(const Trajectory& traj, const std::vector<PrivacyRegion>& regions) {
  double risk = 0.0;
  for (std::size_t i = 1; i < traj.size(); ++i) {
    const double dt = traj[i].t - traj[i - 1].t;
    if (!(dt > 0.0)) throw std::invalid_argument("trajectory timestamps must strictly increase");
    risk += 0.5 * dt * (summed_intensity(traj[i - 1].p, regions) + summed_intensity(traj[i].p, regions));
  }
  return risk;
}

Trajectory densify(const Trajectory& traj, int substeps) {
  if (traj.size() < 2 || substeps <= 1) return traj;
  Trajectory out;
  out.reserve((traj.size() - 1) * substeps + 1);
  for (std::size_t i = 0; i + 1 < traj.size(); ++i) {
    const auto& a = traj[i];
    const auto& b = traj[i + 1];
    for (int s = 0; s < substeps; ++s) {
      const double f = static_cast<double>(s) / substeps;
      out.push_back({a.t + (b.t - a.t) * f, a.p + (b.p - a.p) * f});
    }
  }
  out.push_back(traj.back());
  return out;
}

std::array<int, 3> dp_move(int move) {
  if (move == 0) return {0, 0, 0};
  // Moves 1..26 enumerate {-1,0,1}^3 lexicographically, skipping the origin.
  int code = move <= 13 ? move - 1 : move;
  return {code / 9 - 1, (code / 3) % 3 - 1, code % 3 - 1};
}

PrivacyDp::PrivacyDp(const Environment& env, const Vec3& goal, const DpOptions& options)
    : env_(env), options_(options), goal_(goal) {
  if (options.layers < 1) throw ValidationError("privacy.layers", "must be at least 1");
  if (!(options.horizon > 0.0)) throw ValidationError("privacy.horizon", "must be positive");
  if (!(options.max_speed > 0.0)) throw ValidationError("privacy.max_speed", "must be positive");
  if (!(options.intensity_scale > 0.0)) throw ValidationError("privacy.intensity_scale", "must be positive");
  if (options.quadrature < 2 || options.quadrature % 2 != 0)
    throw ValidationError("privacy.quadrature", "must be a positive even number");

  const double h = options.cell();
  const double zlo = std::max(env.bounds.lo.z, env.z_min);
  const double zhi = std::min(env.bounds.hi.z, env.z_max);
  const double lo[3] = {env.bounds.lo.x, env.bounds.lo.y, zlo};
  const double hi[3] = {env.bounds.hi.x, env.bounds.hi.y, zhi};
  const double g[3] = {goal.x, goal.y, goal.z};
  for (int a = 0; a < 3; ++a) {
    lo_[a] = static_cast<int>(std::ceil((lo[a] - g[a]) / h - 1e-9));
    const int top = static_cast<int>(std::floor((hi[a] - g[a]) / h + 1e-9));
    count_[a] = std::max(0, top - lo_[a] + 1);
  }
  if (options.planar) {
    lo_[2] = 0;
    count_[2] = 1;
  }
  const std::size_t n = static_cast<std::size_t>(count_[0]) * count_[1] * count_[2];
  if (n == 0 || is_collision(goal, env)) throw ValidationError("privacy.goal", "goal lies outside the free space");

  admissible_.assign(n, 0);
  for (Node i = 0; i < n; ++i) {
    const Vec3 p = position(i);
    if (is_collision(p, env)) continue;
    const bool core = std::any_of(env.privacy_regions.begin(), env.privacy_regions.end(),
                                  [&](const PrivacyRegion& r) { return distance(p, r.center) <= r.c1; });
    if (!core) admissible_[i] = 1;
  }
  goal_node_ = *node_at(goal);
  if (!admissible_[goal_node_]) throw ValidationError("privacy.goal", "goal violates a hard constraint");

  const double delta = options.step_time();
  const int q = options.quadrature;
  stage_.assign(n * kMoves, kUnreachable);
  for (Node i = 0; i < n; ++i) {
    if (!admissible_[i]) continue;
    const Vec3 a = position(i);
    for (int m = 0; m < kMoves; ++m) {
      const auto next = successor(i, m);
      if (!next) continue;
      const Vec3 b = position(*next);
      double sum = 0.0;
      for (int s = 0; s <= q; ++s) {
        const double w = (s == 0 || s == q) ? 1.0 : (s % 2 ? 4.0 : 2.0);
        sum += w * summed_intensity(a + (b - a) * (static_cast<double>(s) / q), env.privacy_regions);
      }
      stage_[i * kMoves + m] = options.intensity_scale * delta * sum / (3.0 * q);
    }
  }

  const int M = options.layers;
  value_.assign((M + 1) * n, kUnreachable);
  policy_.assign((M + 1) * n, -1);
  value_[M * n + goal_node_] = 0.0;
  for (int layer = M - 1; layer >= 0; --layer) {
    const double* next_v = &value_[(layer + 1) * n];
    for (Node i = 0; i < n; ++i) {
      if (!admissible_[i]) continue;
      double best = kUnreachable;
      int best_m = -1;
      int best_len = 0;
      Node best_succ = 0;
      for (int m = 0; m < kMoves; ++m) {
        const double c = stage_[i * kMoves + m];
        if (c == kUnreachable) continue;
        const Node succ = *successor(i, m);
        if (next_v[succ] == kUnreachable) continue;
        const double total = c + next_v[succ];
        const auto d = dp_move(m);
        const int len = d[0] * d[0] + d[1] * d[1] + d[2] * d[2];
        // Ties go to the shorter move, then to the lower successor index.
        if (total < best || (total == best && (len < best_len || (len == best_len && succ < best_succ)))) {
          best = total;
          best_m = m;
          best_len = len;
          best_succ = succ;
        }
      }
      value_[layer * n + i] = best;
      policy_[layer * n + i] = static_cast<std::int8_t>(best_m);
    }
  }
}

Vec3 PrivacyDp::position(Node n) const {
  const int i = static_cast<int>(n % count_[0]) + lo_[0];
  const int j = static_cast<int>((n / count_[0]) % count_[1]) + lo_[1];
  const int k = static_cast<int>(n / (static_cast<Node>(count_[0]) * count_[1])) + lo_[2];
  const double h = options_.cell();
  return goal_ + Vec3{i * h, j * h, k * h};
}

std::optional<PrivacyDp::Node> PrivacyDp::node_at(const Vec3& p) const {
  const double h = options_.cell();
  const Vec3 r = (p - goal_) / h;
  const double c[3] = {r.x, r.y, r.z};
  int idx[3];
  for (int a = 0; a < 3; ++a) {
    idx[a] = static_cast<int>(std::lround(c[a]));
    if (std::abs(c[a] - idx[a]) > 1e-6) return std::nullopt;
    if (idx[a] < lo_[a] || idx[a] >= lo_[a] + count_[a]) return std::nullopt;
  }
  return index(idx[0], idx[1], idx[2]);
}

std::optional<PrivacyDp::Node> PrivacyDp::successor(Node n, int move) const {
  if (!admissible_[n]) return std::nullopt;
  const auto d = dp_move(move);
  if (options_.planar && d[2] != 0) return std::nullopt;
  const int i = static_cast<int>(n % count_[0]) + lo_[0] + d[0];
  const int j = static_cast<int>((n / count_[0]) % count_[1]) + lo_[1] + d[1];
  const int k = static_cast<int>(n / (static_cast<Node>(count_[0]) * count_[1])) + lo_[2] + d[2];
  if (i < lo_[0] || j < lo_[1] || k < lo_[2] || i >= lo_[0] + count_[0] || j >= lo_[1] + count_[1] ||
      k >= lo_[2] + count_[2])
    return std::nullopt;
  const Node m = index(i, j, k);
  if (!admissible_[m]) return std::nullopt;
  if (move == 0) return m;
  const Vec3 a = position(n);
  const Vec3 b = position(m);
  if (segment_blocked(env_, a, b)) return std::nullopt;
  for (const auto& r : env_.privacy_regions)
    if (segment_center_distance(a, b, r.center) <= r.c1) return std::nullopt;
  return m;
}

namespace {

DpPlan follow(const PrivacyDp& dp, PrivacyDp::Node start, int i0, const std::vector<int>& moves) {
  DpPlan plan;
  plan.start_layer = i0;
  const double delta = dp.options().step_time();
  PrivacyDp::Node cur = start;
  plan.nodes.push_back(cur);
  plan.trajectory.push_back({0.0, dp.position(cur)});
  for (std::size_t s = 0; s < moves.size(); ++s) {
    plan.risk += dp.stage_cost(cur, moves[s]);
    cur = *dp.successor(cur, moves[s]);
    plan.nodes.push_back(cur);
    plan.trajectory.push_back({(s + 1) * delta, dp.position(cur)});
  }
  plan.final_time = moves.size() * delta;
  return plan;
}

}  // namespace

DpPlan extract_plan(const PrivacyDp& dp, const Vec3& start) {
  const auto s = dp.node_at(start);
  if (!s) throw std::invalid_argument("start is not a lattice point of the privacy planner");
  const int M = dp.options().layers;
  int i0 = -1;
  double best = PrivacyDp::kUnreachable;
  for (int i = 0; i < M; ++i) {
    const double v = dp.value(i, *s);
    if (v == PrivacyDp::kUnreachable) continue;
    if (v <= best) {
      best = v;
      i0 = i;
    }
  }
  if (i0 < 0) throw Unreachable();
  std::vector<int> moves;
  PrivacyDp::Node cur = *s;
  for (int i = i0; i < M; ++i) {
    const int m = dp.best_move(i, cur);
    moves.push_back(m);
    cur = *dp.successor(cur, m);
  }
  DpPlan plan = follow(dp, *s, i0, moves);
  plan.risk = best;
  return plan;
}

DpPlan plan_privacy_dp(const Environment& env, const Vec3& start, const Vec3& goal, const DpOptions& options) {
  const PrivacyDp dp(env, goal, options);
  return extract_plan(dp, start);
}

DpPlan plan_privacy_baseline(const PrivacyDp& dp, const Vec3& start) {
  const auto s = dp.node_at(start);
  if (!s || !dp.admissible(*s)) throw Unreachable();
  const std::size_t n = dp.node_count();
  std::vector<double> dist(n, PrivacyDp::kUnreachable);
  std::vector<int> via(n, -1);
  std::vector<PrivacyDp::Node> parent(n, 0);
  using Entry = std::pair<double, PrivacyDp::Node>;
  std::priority_queue<Entry, std::vector<Entry>, std::greater<>> open;
  dist[*s] = 0.0;
  open.emplace(0.0, *s);
  const double h = dp.options().cell();
  while (!open.empty()) {
    const auto [d, u] = open.top();
    open.pop();
    if (d > dist[u]) continue;
    if (u == dp.goal_node()) break;
    for (int m = 1; m < PrivacyDp::kMoves; ++m) {
      const auto v = dp.successor(u, m);
      if (!v) continue;
      const auto mv = dp_move(m);
      const double len = h * std::sqrt(double(mv[0] * mv[0] + mv[1] * mv[1] + mv[2] * mv[2]));
      if (d + len < dist[*v]) {
        dist[*v] = d + len;
        via[*v] = m;
        parent[*v] = u;
        open.emplace(dist[*v], *v);
      }
    }
  }
  if (dist[dp.goal_node()] == PrivacyDp::kUnreachable) throw Unreachable();
  std::vector<int> moves;
  for (PrivacyDp::Node cur = dp.goal_node(); cur != *s; cur = parent[cur]) moves.push_back(via[cur]);
  std::reverse(moves.begin(), moves.end());
  return follow(dp, *s, dp.options().layers - static_cast<int>(moves.size()), moves);
}

}  // namespace suav
