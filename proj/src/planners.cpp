#include "suav/planners.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <queue>
#include <stdexcept>
#include <tuple>

#include "suav/errors.hpp"

namespace suav {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

struct Endpoints {
  NavGrid::Index start;
  NavGrid::Index goal;
};

Endpoints resolve(const NavGrid& grid, const Vec3& start, const Vec3& goal) {
  const auto s = grid.nearest(start);
  if (!s || !grid.is_free(*s)) throw NodeInObstacle("start");
  const auto g = grid.nearest(goal);
  if (!g || !grid.is_free(*g)) throw NodeInObstacle("goal");
  return {*s, *g};
}

// Upper envelope of achievable harvest power for the heuristic.
double peak_harvest(const EnergyModel& model) {
  const double peak = model.harvest.peak_power();
  return model.model == HarvestModel::Altitude ? peak * std::exp(model.harvest.max_transmittance) : peak;
}

template <class F>
double min_over_primitives(F per_meter) {
  double best = kInf;
  for (int dk = -1; dk <= 1; ++dk)
    for (int dj = -1; dj <= 1; ++dj)
      for (int di = -1; di <= 1; ++di) {
        if (di == 0 && dj == 0 && dk == 0) continue;
        best = std::min(best, per_meter(std::hypot(di, dj), static_cast<double>(dk)));
      }
  return best;
}

enum class Objective { Energy, Time, Length };

double edge_objective(Objective obj, const GridEdge& e) {
  switch (obj) {
    case Objective::Energy:
      return energy_search_cost(e);
    case Objective::Time:
      return e.duration;
    case Objective::Length:
      return e.length;
  }
  return 0.0;
}

struct Label {
  NavGrid::Index node;
  double g;
  double battery;
  std::int64_t parent;
  bool dead = false;
};

bool dominates(const Label& a, const Label& b) {
  const double eps_g = 1e-12 * std::max(1.0, std::abs(b.g));
  const double eps_b = std::isfinite(b.battery) ? 1e-12 * std::max(1.0, std::abs(b.battery)) : 0.0;
  return a.g <= b.g + eps_g && a.battery >= b.battery - eps_b;
}

// Label-setting A* over (node, residual battery). A node may hold several labels as long as none
// dominates another on (cost so far, battery); the first goal label popped is optimal.
Path constrained_search(const NavGrid& grid, const BatteryState* battery, Objective obj,
                        const Vec3& start, const Vec3& goal) {
  const auto [s, t] = resolve(grid, start, goal);
  double rate = 1.0;
  if (obj == Objective::Energy) rate = energy_cost_per_meter(grid.energy());
  if (obj == Objective::Time) rate = time_cost_per_meter(grid.energy());
  const Vec3 goal_pos = grid.position(t);
  const auto h = [&](NavGrid::Index n) { return rate * distance(grid.position(n), goal_pos); };

  std::vector<Label> labels;
  std::vector<std::vector<std::uint32_t>> front(grid.size());
  using Entry = std::tuple<double, NavGrid::Index, std::uint32_t>;  // f, node, label
  std::priority_queue<Entry, std::vector<Entry>, std::greater<>> open;

  const double b0 = battery ? battery->energy : kInf;
  labels.push_back({s, 0.0, b0, -1});
  front[s].push_back(0);
  open.emplace(h(s), s, 0);

  while (!open.empty()) {
    const auto [f, node, id] = open.top();
    open.pop();
    if (labels[id].dead) continue;
    if (node == t) {
      Path path;
      for (std::int64_t cur = id; cur >= 0; cur = labels[cur].parent) path.nodes.push_back(labels[cur].node);
      std::reverse(path.nodes.begin(), path.nodes.end());
      path.search_cost = labels[id].g;
      annotate_path(grid, battery ? *battery : BatteryState{kInf, kInf, -kInf}, path);
      return path;
    }
    const Label cur = labels[id];
    const auto nbrs = grid.neighbors(node);
    for (const GridEdge& e : nbrs) {
      Label next{e.to, cur.g + edge_objective(obj, e), cur.battery, static_cast<std::int64_t>(id)};
      if (battery) {
        next.battery = std::min(battery->capacity, cur.battery - e.e_out + e.e_gain);
        if (next.battery < battery->floor) continue;
      }
      auto& fr = front[e.to];
      bool dominated = false;
      for (std::uint32_t other : fr)
        if (dominates(labels[other], next)) {
          dominated = true;
          break;
        }
      if (dominated) continue;
      std::erase_if(fr, [&](std::uint32_t other) {
        if (!dominates(next, labels[other])) return false;
        labels[other].dead = true;
        return true;
      });
      const auto nid = static_cast<std::uint32_t>(labels.size());
      labels.push_back(next);
      fr.push_back(nid);
      open.emplace(next.g + h(e.to), e.to, nid);
    }
  }
  throw NoPath(battery ? "goal unreachable under the battery constraint" : "goal unreachable");
}

}  // namespace

double energy_search_cost(const GridEdge& e) { return std::max(0.0, e.e_out - e.e_gain); }

double energy_cost_per_meter(const EnergyModel& model) {
  const double harvest = peak_harvest(model);
  return std::max(0.0, min_over_primitives([&](double horizontal, double dz) {
    const MotionSegment seg = make_segment(horizontal, dz, model.consumption);
    const double net = consumption_energy(seg, model.consumption) - harvest * seg.duration;
    return net / std::hypot(horizontal, dz);
  }));
}

double time_cost_per_meter(const EnergyModel& model) {
  return min_over_primitives([&](double horizontal, double dz) {
    return make_segment(horizontal, dz, model.consumption).duration / std::hypot(horizontal, dz);
  });
}

void annotate_path(const NavGrid& grid, const BatteryState& battery, Path& path) {
  path.waypoints.clear();
  path.edges.clear();
  path.battery.clear();
  path.e_out = path.e_gain = path.clamp_loss = path.duration = path.length = path.shadow_time = 0.0;
  if (path.nodes.empty()) return;
  double charge = battery.energy;
  path.waypoints.push_back(grid.position(path.nodes.front()));
  path.battery.push_back(charge);
  for (std::size_t i = 0; i + 1 < path.nodes.size(); ++i) {
    const auto nbrs = grid.neighbors(path.nodes[i]);
    const auto it = std::find_if(nbrs.begin(), nbrs.end(),
                                 [&](const GridEdge& e) { return e.to == path.nodes[i + 1]; });
    if (it == nbrs.end()) throw std::logic_error("path nodes are not grid neighbours");
    const GridEdge& e = *it;
    path.edges.push_back(e);
    path.waypoints.push_back(grid.position(e.to));
    const double unclamped = charge - e.e_out + e.e_gain;
    if (unclamped > battery.capacity) {
      path.clamp_loss += unclamped - battery.capacity;
      charge = battery.capacity;
    } else {
      charge = unclamped;
    }
    path.battery.push_back(charge);
    path.e_out += e.e_out;
    path.e_gain += e.e_gain;
    path.duration += e.duration;
    path.length += e.length;
    path.shadow_time += e.duration * (1.0 - e.lit_fraction);
  }
}

Path plan_energy_efficient(const NavGrid& grid, const BatteryState& battery, const Vec3& start,
                           const Vec3& goal) {
  return constrained_search(grid, &battery, Objective::Energy, start, goal);
}

Path plan_time_efficient(const NavGrid& grid, const BatteryState& battery, const Vec3& start,
                         const Vec3& goal) {
  return constrained_search(grid, &battery, Objective::Time, start, goal);
}

Path plan_shortest(const NavGrid& grid, const Vec3& start, const Vec3& goal) {
  return constrained_search(grid, nullptr, Objective::Length, start, goal);
}

Path dijkstra_oracle(const NavGrid& grid, const EdgeCost& edge_cost, const Vec3& start, const Vec3& goal) {
  const auto [s, t] = resolve(grid, start, goal);
  std::vector<double> dist(grid.size(), kInf);
  std::vector<std::int64_t> parent(grid.size(), -1);
  using Entry = std::pair<double, NavGrid::Index>;
  std::priority_queue<Entry, std::vector<Entry>, std::greater<>> open;
  dist[s] = 0.0;
  open.emplace(0.0, s);
  while (!open.empty()) {
    const auto [d, u] = open.top();
    open.pop();
    if (d > dist[u]) continue;
    if (u == t) break;
    for (const GridEdge& e : grid.neighbors(u)) {
      const double c = edge_cost(u, e);
      if (c < 0.0) throw std::invalid_argument("dijkstra_oracle requires non-negative edge costs");
      if (d + c < dist[e.to]) {
        dist[e.to] = d + c;
        parent[e.to] = u;
        open.emplace(dist[e.to], e.to);
      }
    }
  }
  if (dist[t] == kInf) throw NoPath();
  Path path;
  for (std::int64_t cur = t; cur >= 0; cur = parent[cur]) path.nodes.push_back(static_cast<NavGrid::Index>(cur));
  std::reverse(path.nodes.begin(), path.nodes.end());
  path.search_cost = dist[t];
  annotate_path(grid, BatteryState{kInf, kInf, -kInf}, path);
  return path;
}

}  // namespace suav
