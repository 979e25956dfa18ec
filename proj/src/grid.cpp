#include "suav/grid.hpp"

#include <algorithm>
#include <cmath>

#include "suav/errors.hpp"

namespace suav {

namespace {

int lattice_count(double lo, double hi, double res) {
  return static_cast<int>(std::floor((hi - lo) / res + 1e-9)) + 1;
}

}  // namespace

Vec3 NavGrid::position(Index n) const {
  const int i = static_cast<int>(n % nx_);
  const int j = static_cast<int>((n / nx_) % ny_);
  const int k = static_cast<int>(n / (static_cast<Index>(nx_) * ny_));
  return origin_ + Vec3{i * resolution_, j * resolution_, k * resolution_};
}

std::optional<NavGrid::Index> NavGrid::nearest(const Vec3& p) const {
  const Vec3 r = (p - origin_) / resolution_;
  const int i = static_cast<int>(std::lround(r.x));
  const int j = static_cast<int>(std::lround(r.y));
  const int k = planar_ ? 0 : static_cast<int>(std::lround(r.z));
  if (i < 0 || j < 0 || k < 0 || i >= nx_ || j >= ny_ || k >= nz_) return std::nullopt;
  if (planar_ && std::abs(p.z - origin_.z) > 0.5 * resolution_) return std::nullopt;
  return index(i, j, k);
}

NavGrid build_grid(const Environment& env, const GridSpec& spec, const EnergyModel& model) {
  if (!(spec.resolution > 0.0)) throw ValidationError("grid.resolution", "must be positive");
  for (const auto& p : env.prisms) {
    const double smallest = std::min({p.semi_axes.x, p.semi_axes.y, p.semi_axes.z});
    if (spec.resolution > smallest + 1e-9)
      throw ValidationError("grid.resolution", "must not exceed the smallest prism semi-axis");
  }

  const Environment grown = inflated(env, spec.margin);
  const double res = spec.resolution;

  NavGrid g;
  g.resolution_ = res;
  g.planar_ = spec.planar;
  g.energy_ = model;
  const double z_lo = std::max(env.bounds.lo.z, env.z_min);
  const double z_hi = std::min(env.bounds.hi.z, env.z_max);
  g.origin_ = {env.bounds.lo.x, env.bounds.lo.y, spec.planar ? spec.planar_z : z_lo};
  g.nx_ = lattice_count(env.bounds.lo.x, env.bounds.hi.x, res);
  g.ny_ = lattice_count(env.bounds.lo.y, env.bounds.hi.y, res);
  g.nz_ = spec.planar ? 1 : (z_hi >= z_lo ? lattice_count(z_lo, z_hi, res) : 0);

  const std::size_t n = static_cast<std::size_t>(g.nx_) * g.ny_ * g.nz_;
  g.free_.assign(n, 0);
  g.lit_.assign(n, 0);
  for (NavGrid::Index idx = 0; idx < n; ++idx) {
    const Vec3 p = g.position(idx);
    if (is_collision(p, grown)) continue;
    g.free_[idx] = 1;
    g.lit_[idx] = in_shadow(env, p, 0.0) ? 0 : 1;
    ++g.free_count_;
  }
  if (g.free_count_ == 0) throw EmptyGrid();

  // Sun angles are fixed at the planning snapshot; the panel is assumed level (zero bank).
  const auto& sun = env.sun;

  // Shadow state of edge midpoints, shared by both directions: 0 unknown, 1 lit, 2 shadow.
  const int mx = 2 * g.nx_ - 1, my = 2 * g.ny_ - 1, mz = std::max(1, 2 * g.nz_ - 1);
  std::vector<char> mid_state(static_cast<std::size_t>(mx) * my * mz, 0);

  const int dz_lo = spec.planar ? 0 : -1;
  const int dz_hi = spec.planar ? 0 : 1;
  g.offsets_.assign(n + 1, 0);
  for (int k = 0; k < g.nz_; ++k) {
    for (int j = 0; j < g.ny_; ++j) {
      for (int i = 0; i < g.nx_; ++i) {
        const NavGrid::Index from = g.index(i, j, k);
        g.offsets_[from] = static_cast<std::uint32_t>(g.edges_.size());
        if (!g.free_[from]) continue;
        const Vec3 a = g.position(from);
        for (int dk = dz_lo; dk <= dz_hi; ++dk) {
          for (int dj = -1; dj <= 1; ++dj) {
            for (int di = -1; di <= 1; ++di) {
              if (di == 0 && dj == 0 && dk == 0) continue;
              const int ii = i + di, jj = j + dj, kk = k + dk;
              if (ii < 0 || jj < 0 || kk < 0 || ii >= g.nx_ || jj >= g.ny_ || kk >= g.nz_) continue;
              const NavGrid::Index to = g.index(ii, jj, kk);
              if (!g.free_[to]) continue;
              const Vec3 b = g.position(to);
              if (segment_blocked(grown, a, b)) continue;

              const std::size_t mid_idx =
                  (static_cast<std::size_t>(2 * k + dk) * my + (2 * j + dj)) * mx + (2 * i + di);
              const Vec3 mid = (a + b) * 0.5;
              if (mid_state[mid_idx] == 0) mid_state[mid_idx] = in_shadow(env, mid, 0.0) ? 2 : 1;
              const double lit_mid = mid_state[mid_idx] == 1 ? 1.0 : 0.0;

              GridEdge e;
              e.to = to;
              e.length = distance(a, b);
              const Vec3 d = b - a;
              const MotionSegment seg = make_segment(d.norm_xy(), d.z, model.consumption);
              e.duration = seg.duration;
              e.e_out = consumption_energy(seg, model.consumption);
              e.lit_fraction = (g.lit_[from] + 2.0 * lit_mid + g.lit_[to]) / 4.0;
              const double heading = std::atan2(d.y, d.x);
              const double cos_theta = incidence_cosine(0.0, heading, sun.azimuth, sun.elevation);
              e.e_gain = harvest_power(model, cos_theta, false, mid.z) * e.lit_fraction * e.duration;
              g.edges_.push_back(e);
            }
          }
        }
      }
    }
  }
  g.offsets_[n] = static_cast<std::uint32_t>(g.edges_.size());
  return g;
}

}  // namespace suav
