#include "suav/energy.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "suav/errors.hpp"

namespace suav {

void validate(const ConsumptionParams& p) {
  const double values[] = {p.level_power, p.climb_power, p.descent_power,
                           p.cruise_speed, p.climb_speed, p.descent_speed};
  for (double v : values)
    if (!(v > 0.0) || !std::isfinite(v)) throw ValidationError("consumption", "all powers and speeds must be positive");
  if (!(p.descent_power <= p.level_power && p.level_power <= p.climb_power))
    throw ValidationError("consumption", "powers must satisfy P_down <= P_level <= P_up");
}

void validate(const HarvestParams& p) {
  if (!(p.efficiency > 0.0 && p.efficiency <= 1.0)) throw ValidationError("harvest.efficiency", "must lie in (0, 1]");
  if (!(p.spectral_density > 0.0)) throw ValidationError("harvest.spectral_density", "must be positive");
  if (!(p.panel_area > 0.0)) throw ValidationError("harvest.panel_area", "must be positive");
  if (!(p.cloud_bottom < p.cloud_top)) throw ValidationError("harvest.cloud", "cloud bottom must lie below cloud top");
  if (!(p.absorption >= 0.0)) throw ValidationError("harvest.absorption", "must be non-negative");
  if (!(p.scale_height > 0.0)) throw ValidationError("harvest.scale_height", "must be positive");
}

void validate(const BatteryState& b) {
  if (!(b.floor <= b.energy && b.energy <= b.capacity))
    throw ValidationError("battery", "charge must satisfy floor <= energy <= capacity");
}

MotionSegment make_segment(double horizontal, double dz, const ConsumptionParams& params) {
  MotionSegment seg;
  seg.horizontal = std::abs(horizontal);
  seg.dz = dz;
  seg.kind = dz > 0.0 ? MotionKind::Climb : (dz < 0.0 ? MotionKind::Descend : MotionKind::Level);
  const double t_level = seg.horizontal / params.cruise_speed;
  const double t_vert = dz > 0.0 ? dz / params.climb_speed : -dz / params.descent_speed;
  seg.duration = std::max(t_level, t_vert);
  return seg;
}

double consumption_energy(const MotionSegment& seg, const ConsumptionParams& params) {
  const MotionSegment s = make_segment(seg.horizontal, seg.dz, params);
  double power = 0.0;
  if (s.horizontal > 0.0) power += params.level_power;
  if (s.kind == MotionKind::Climb) power += params.climb_power;
  if (s.kind == MotionKind::Descend) power += params.descent_power;
  return power * s.duration;
}

double consumption_power(double v, double vz, const ConsumptionParams& params) {
  double power = 0.0;
  if (v > 0.0) power += params.level_power;
  if (vz > 0.0) power += params.climb_power;
  if (vz < 0.0) power += params.descent_power;
  return power;
}

double incidence_cosine(double bank, double heading, double azimuth, double elevation) {
  const double c = std::cos(bank) * std::sin(elevation) -
                   std::cos(elevation) * std::sin(azimuth - heading) * std::sin(bank);
  return std::clamp(c, -1.0, 1.0);
}

double harvest_power_clear(double cos_theta, bool shadowed, const HarvestParams& hp) {
  if (shadowed || cos_theta < 0.0) return 0.0;
  return hp.efficiency * hp.spectral_density * hp.panel_area * cos_theta;
}

double harvest_power_cloud(double z, const HarvestParams& hp) {
  const double peak = hp.peak_power();
  if (z >= hp.cloud_top) return peak;
  if (z >= hp.cloud_bottom) return peak * std::exp(-hp.absorption * (hp.cloud_top - z));
  return peak * std::exp(-hp.absorption * (hp.cloud_top - hp.cloud_bottom));
}

double harvest_power_altitude(double z, const HarvestParams& hp) {
  if (!(hp.scale_height > 0.0)) throw std::invalid_argument("scale height must be positive");
  return hp.peak_power() * std::exp(hp.max_transmittance - hp.absorption * std::exp(-z / hp.scale_height));
}

double harvest_power(const EnergyModel& model, double cos_theta, bool shadowed, double z) {
  if (shadowed) return 0.0;
  switch (model.model) {
    case HarvestModel::ClearSky:
      return harvest_power_clear(cos_theta, false, model.harvest);
    case HarvestModel::Cloud:
      return harvest_power_cloud(z, model.harvest);
    case HarvestModel::Altitude:
      return harvest_power_altitude(z, model.harvest);
  }
  return 0.0;
}

BatteryState battery_step(const BatteryState& b, double e_out, double e_gain) {
  if (e_out < 0.0 || e_gain < 0.0) throw std::invalid_argument("energy flows must be non-negative");
  BatteryState next = b;
  next.energy = std::min(b.capacity, b.energy - e_out + e_gain);
  if (next.energy < b.floor) throw BatteryDepleted(next.energy, b.floor);
  return next;
}

}  // namespace suav
