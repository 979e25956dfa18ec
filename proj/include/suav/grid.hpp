#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "suav/energy.hpp"
#include "suav/env.hpp"

namespace suav {

struct GridSpec {
  double resolution = 10.0;  // m
  double margin = 2.0;       // m of clearance every free node keeps from each prism surface
  bool planar = false;       // single layer at planar_z with 8-connectivity
  double planar_z = 0.0;
};

/// Directed motion primitive between two lattice neighbours, with its cost at the planning snapshot.
struct GridEdge {
  std::uint32_t to = 0;
  double length = 0.0;        // m
  double e_out = 0.0;         // J
  double e_gain = 0.0;        // J
  double duration = 0.0;      // s
  double lit_fraction = 1.0;  // share of the edge flown in sunlight
};

/// Axis-aligned lattice over the free space with precomputed 26- (or 8-) neighbour edges.
/// Immutable after build_grid; safe to share between concurrent planner calls.
class NavGrid {
 public:
  using Index = std::uint32_t;

  double resolution() const { return resolution_; }
  bool planar() const { return planar_; }
  int nx() const { return nx_; }
  int ny() const { return ny_; }
  int nz() const { return nz_; }
  std::size_t size() const { return free_.size(); }
  std::size_t free_count() const { return free_count_; }
  std::size_t edge_count() const { return edges_.size(); }
  const EnergyModel& energy() const { return energy_; }

  Index index(int i, int j, int k) const { return static_cast<Index>((k * ny_ + j) * nx_ + i); }
  Vec3 position(Index n) const;
  bool is_free(Index n) const { return free_[n] != 0; }
  bool is_lit(Index n) const { return lit_[n] != 0; }
  std::span<const GridEdge> neighbors(Index n) const {
    return {edges_.data() + offsets_[n], edges_.data() + offsets_[n + 1]};
  }

  /// Nearest lattice node to p, if p lies inside the lattice footprint.
  std::optional<Index> nearest(const Vec3& p) const;

 private:
  friend NavGrid build_grid(const Environment&, const GridSpec&, const EnergyModel&);

  Vec3 origin_;
  double resolution_ = 1.0;
  bool planar_ = false;
  int nx_ = 0, ny_ = 0, nz_ = 0;
  std::vector<char> free_;
  std::vector<char> lit_;
  std::vector<std::uint32_t> offsets_;
  std::vector<GridEdge> edges_;
  std::size_t free_count_ = 0;
  EnergyModel energy_;
};

/// Discretizes env. Free nodes clear every prism by spec.margin; an edge is kept only when its
/// straight segment misses every inflated prism. Throws EmptyGrid when nothing is free.
NavGrid build_grid(const Environment& env, const GridSpec& spec, const EnergyModel& model = {});

inline NavGrid build_grid(const Environment& env, double resolution) {
  GridSpec spec;
  spec.resolution = resolution;
  return build_grid(env, spec);
}

}  // namespace suav
