#pragma once

namespace suav {

/// Electrical power drawn in each flight regime and the speeds at which those regimes fly.
struct ConsumptionParams {
  double level_power = 30.0;    // W, P(v) at cruise speed
  double climb_power = 34.0;    // W
  double descent_power = 26.0;  // W
  double cruise_speed = 12.0;   // m/s
  double climb_speed = 3.0;     // m/s
  double descent_speed = 3.0;   // m/s
};

struct HarvestParams {
  double efficiency = 0.2;          // eta
  double spectral_density = 380.0;  // G, W/m^2
  double panel_area = 0.3;          // S, m^2
  double cloud_top = 1000.0;        // H_up, m
  double cloud_bottom = 700.0;      // H_down, m
  double absorption = 0.01;         // beta_c
  double max_transmittance = 0.8978;  // alpha_c
  double scale_height = 8000.0;       // delta_c, m

  /// eta * G * S, the unattenuated panel output at normal incidence.
  double peak_power() const { return efficiency * spectral_density * panel_area; }
};

enum class HarvestModel { ClearSky, Cloud, Altitude };

struct EnergyModel {
  ConsumptionParams consumption;
  HarvestParams harvest;
  HarvestModel model = HarvestModel::ClearSky;
};

struct BatteryState {
  double energy = 670.0;    // J, current charge
  double capacity = 670.0;  // J, E_Batt
  double floor = 50.0;      // J, E_min
};

enum class MotionKind { Level, Climb, Descend };

struct MotionSegment {
  MotionKind kind = MotionKind::Level;
  double horizontal = 0.0;  // m
  double dz = 0.0;          // m, signed
  double duration = 0.0;    // s
};

void validate(const ConsumptionParams& p);
void validate(const HarvestParams& p);
void validate(const BatteryState& b);

/// Builds a segment for a horizontal run combined with an altitude change. A combined move flies
/// both components at once, so it lasts as long as the slower of the two.
MotionSegment make_segment(double horizontal, double dz, const ConsumptionParams& params);

/// Energy drawn over the segment (E_out, J). Level and vertical powers add while both are active.
double consumption_energy(const MotionSegment& seg, const ConsumptionParams& params);

/// Power drawn while flying at horizontal speed v with vertical rate vz.
double consumption_power(double v, double vz, const ConsumptionParams& params);

double incidence_cosine(double bank, double heading, double azimuth, double elevation);

double harvest_power_clear(double cos_theta, bool shadowed, const HarvestParams& hp);
double harvest_power_cloud(double z, const HarvestParams& hp);
double harvest_power_altitude(double z, const HarvestParams& hp);

/// Dispatches on the scenario's harvest model. Shadowed points never harvest.
double harvest_power(const EnergyModel& model, double cos_theta, bool shadowed, double z);

/// Applies one consumption/harvest exchange, clamping at capacity.
/// Throws BatteryDepleted when the result falls below the floor.
BatteryState battery_step(const BatteryState& b, double e_out, double e_gain);

}  // namespace suav
