#pragma once

// Shared builders and independent oracles for the test suites.

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <queue>
#include <random>
#include <tuple>
#include <vector>

#include "suav/env.hpp"
#include "suav/grid.hpp"
#include "suav/planners.hpp"
#include "suav/privacy.hpp"
#include "suav/sim.hpp"

namespace suav::testing {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

inline BatteryState unlimited_battery() { return {kInf, kInf, -kInf}; }

inline const EdgeCost by_length = [](NavGrid::Index, const GridEdge& e) { return e.length; };
inline const EdgeCost by_energy = [](NavGrid::Index, const GridEdge& e) { return energy_search_cost(e); };
inline const EdgeCost by_time = [](NavGrid::Index, const GridEdge& e) { return e.duration; };

inline Prism tower(double x, double y, double hx, double hy, double height) {
  return Prism{{x, y, height / 2}, {hx, hy, height / 2}, {8, 8, 8}};
}

inline void aim(Environment& env, const Vec3& from) {
  const Vec3 d = env.sun.position - from;
  env.sun.azimuth = std::atan2(d.y, d.x);
  env.sun.elevation = std::atan2(d.z, d.norm_xy());
}

struct RandomWorld {
  Environment env;
  GridSpec spec;
  Vec3 start, goal;
};

// Cubic world with up to 15 nodes per side and a handful of random prisms. Start and goal are
// drawn among free nodes.
inline RandomWorld random_world(std::mt19937_64& rng) {
  std::uniform_int_distribution<int> side(6, 15);
  RandomWorld w;
  w.spec.resolution = 10;
  w.spec.margin = 1;
  const int nx = side(rng), ny = side(rng), nz = std::uniform_int_distribution<int>(3, 15)(rng);
  w.env.bounds = {{0, 0, 0}, {10.0 * (nx - 1), 10.0 * (ny - 1), 10.0 * (nz - 1)}};
  w.env.z_min = 0;
  w.env.z_max = w.env.bounds.hi.z;
  w.env.sun.position = {0.3 * w.env.bounds.hi.x, 2.0 * w.env.bounds.hi.y + 200, 4.0 * w.env.bounds.hi.z + 300};
  aim(w.env, w.env.bounds.center());

  std::uniform_real_distribution<double> ux(0, w.env.bounds.hi.x), uy(0, w.env.bounds.hi.y),
      uz(0, w.env.bounds.hi.z), axis(10, 30);
  std::uniform_int_distribution<int> count(1, 6), expo(0, 3);
  const int exps[] = {1, 2, 4, 8};
  for (int i = count(rng); i > 0; --i) {
    Prism p;
    p.center = {ux(rng), uy(rng), uz(rng)};
    p.semi_axes = {axis(rng), axis(rng), axis(rng)};
    const int e = exps[expo(rng)];
    p.exponents = {e, e, e};
    w.env.prisms.push_back(p);
  }
  return w;
}

// Picks two distinct free nodes of the grid, or returns false.
inline bool pick_endpoints(const NavGrid& g, std::mt19937_64& rng, Vec3& a, Vec3& b) {
  std::vector<NavGrid::Index> free;
  for (NavGrid::Index n = 0; n < g.size(); ++n)
    if (g.is_free(n)) free.push_back(n);
  if (free.size() < 2) return false;
  std::uniform_int_distribution<std::size_t> pick(0, free.size() - 1);
  const auto i = pick(rng);
  auto j = pick(rng);
  while (j == i) j = pick(rng);
  a = g.position(free[i]);
  b = g.position(free[j]);
  return true;
}

// Minimum duration over (node, charge) states, charge rounded to `quantum`. Rounding up is
// optimistic and gives a lower bound; rounding down gives an upper bound.
inline double constrained_time_oracle(const NavGrid& g, const BatteryState& battery, NavGrid::Index s,
                                      NavGrid::Index t, double quantum, bool round_up) {
  const auto q = [&](double e) {
    return static_cast<long long>(round_up ? std::ceil(e / quantum - 1e-12) : std::floor(e / quantum + 1e-12));
  };
  using State = std::pair<NavGrid::Index, long long>;
  std::map<State, double> best;
  using Entry = std::tuple<double, NavGrid::Index, long long>;
  std::priority_queue<Entry, std::vector<Entry>, std::greater<>> open;
  const long long cap = q(battery.capacity);
  const long long q0 = std::min(cap, q(battery.energy));
  best[{s, q0}] = 0.0;
  open.emplace(0.0, s, q0);
  while (!open.empty()) {
    const auto [d, u, e] = open.top();
    open.pop();
    if (d > best[{u, e}]) continue;
    if (u == t) return d;
    for (const GridEdge& edge : g.neighbors(u)) {
      const double charge = std::min(battery.capacity, e * quantum - edge.e_out + edge.e_gain);
      if (charge < battery.floor - (round_up ? quantum : 0.0)) continue;
      const long long ne = std::min(cap, q(charge));
      const double nd = d + edge.duration;
      auto it = best.find({edge.to, ne});
      if (it != best.end() && it->second <= nd) continue;
      best[{edge.to, ne}] = nd;
      open.emplace(nd, edge.to, ne);
    }
  }
  return kInf;
}

// Charge along a node sequence recomputed from the grid edges.
inline std::vector<double> replay_battery(const NavGrid& g, const BatteryState& b, const Path& path) {
  std::vector<double> out{b.energy};
  double charge = b.energy;
  for (std::size_t i = 0; i + 1 < path.nodes.size(); ++i) {
    for (const GridEdge& e : g.neighbors(path.nodes[i]))
      if (e.to == path.nodes[i + 1]) {
        charge = std::min(b.capacity, charge - e.e_out + e.e_gain);
        break;
      }
    out.push_back(charge);
  }
  return out;
}

// Two corridors of equal length around a central block. The sun sits far to +y, so the block
// shades the southern corridor while the northern one stays lit.
inline Scenario fork_scenario() {
  Scenario sc;
  sc.name = "fork";
  sc.env.bounds = {{0, 0, 0}, {200, 100, 100}};
  sc.env.z_min = 0;
  sc.env.z_max = 100;
  sc.env.sun.position = {100, 2000, 800};
  sc.env.prisms.push_back(tower(100, 50, 40, 25, 40));
  aim(sc.env, {100, 50, 20});
  sc.grid.resolution = 10;
  sc.grid.margin = 2;
  sc.grid.planar = true;
  sc.grid.planar_z = 20;
  sc.battery = {670, 670, 50};
  sc.start = {0, 50, 20};
  sc.goal = {200, 50, 20};
  sc.max_time = 120;
  return sc;
}

struct PrivacyCase {
  Environment env;
  Vec3 start, goal;
  DpOptions options;
};

// 9 x 9 x 3 lattice with 10 m cells, M = 12, one region just north of the straight line.
inline PrivacyCase privacy_lattice_case() {
  PrivacyCase c;
  c.env.bounds = {{0, 0, 0}, {80, 80, 20}};
  c.env.z_min = 0;
  c.env.z_max = 20;
  c.env.privacy_regions.push_back({{40, 48, 10}, 5, 25});
  c.options.layers = 12;
  c.options.horizon = 12;
  c.options.max_speed = 10;
  c.start = {0, 40, 10};
  c.goal = {80, 40, 10};
  return c;
}

// Planar map with an L-shaped no-fly zone. The short way round passes a privacy region; the long
// way round is clear of it.
inline PrivacyCase privacy_l_shape_case() {
  PrivacyCase c;
  c.env.bounds = {{0, 0, 0}, {200, 200, 40}};
  c.env.z_min = 0;
  c.env.z_max = 40;
  c.env.prisms.push_back(tower(100, 100, 10, 60, 40));
  c.env.prisms.push_back(tower(130, 160, 30, 10, 40));
  c.env.privacy_regions.push_back({{100, 20, 10}, 8, 60});
  c.options.layers = 40;
  c.options.horizon = 80;
  c.options.max_speed = 10;
  c.options.planar = true;
  c.start = {0, 100, 10};
  c.goal = {200, 100, 10};
  return c;
}

}  // namespace suav::testing
