#include <doctest.h>

#include <cmath>
#include <numbers>

#include "suav/energy.hpp"
#include "suav/errors.hpp"

using namespace suav;

namespace {
constexpr double pi = std::numbers::pi;
}

TEST_CASE("consumption energy of pure moves") {
  const ConsumptionParams p;
  CHECK(consumption_energy(make_segment(120, 0, p), p) == doctest::Approx(300.0).epsilon(1e-15));
  CHECK(consumption_energy(make_segment(0, 12, p), p) == doctest::Approx(136.0).epsilon(1e-15));
  CHECK(consumption_energy(make_segment(0, 0, p), p) == 0.0);
  CHECK(consumption_energy(make_segment(0, -12, p), p) == doctest::Approx(104.0));
}

TEST_CASE("combined moves last as long as the slower component") {
  const ConsumptionParams p;
  const MotionSegment fast_climb = make_segment(120, 3, p);
  CHECK(fast_climb.kind == MotionKind::Climb);
  CHECK(fast_climb.duration == doctest::Approx(10.0));
  CHECK(consumption_energy(fast_climb, p) == doctest::Approx(640.0));

  const MotionSegment slow_climb = make_segment(12, 30, p);
  CHECK(slow_climb.duration == doctest::Approx(10.0));
  CHECK(consumption_energy(slow_climb, p) == doctest::Approx(640.0));

  const MotionSegment down = make_segment(10, -10, p);
  CHECK(down.kind == MotionKind::Descend);
  CHECK(down.duration == doctest::Approx(10.0 / 3.0));
  CHECK(consumption_energy(down, p) == doctest::Approx(56.0 * 10.0 / 3.0));
}

TEST_CASE("consumption power by regime") {
  const ConsumptionParams p;
  CHECK(consumption_power(12, 0, p) == 30.0);
  CHECK(consumption_power(0, 1, p) == 34.0);
  CHECK(consumption_power(12, -1, p) == 56.0);
  CHECK(consumption_power(0, 0, p) == 0.0);
}

TEST_CASE("consumption parameter validation") {
  ConsumptionParams p;
  CHECK_NOTHROW(validate(p));
  p.descent_power = 40;
  CHECK_THROWS_AS(validate(p), ValidationError);
  p = {};
  p.cruise_speed = 0;
  CHECK_THROWS_AS(validate(p), ValidationError);
}

TEST_CASE("incidence cosine") {
  CHECK(incidence_cosine(0, 0, 0, pi / 2) == doctest::Approx(1.0));
  CHECK(incidence_cosine(0, 0, 0, pi / 6) == doctest::Approx(0.5));
  CHECK(incidence_cosine(pi / 2, 0.3, 0.3 - pi / 2, 0) == doctest::Approx(1.0));
  CHECK(incidence_cosine(pi / 2, 0.0, pi / 2, 0) == doctest::Approx(-1.0));
}

TEST_CASE("clear-sky harvest") {
  const HarvestParams hp;
  CHECK(harvest_power_clear(1.0, false, hp) == 22.8);
  CHECK(harvest_power_clear(0.5, false, hp) == doctest::Approx(11.4));
  CHECK(harvest_power_clear(1.0, true, hp) == 0.0);
  CHECK(harvest_power_clear(0.3, true, hp) == 0.0);
  CHECK(harvest_power_clear(-0.5, false, hp) == 0.0);
  CHECK(harvest_power_clear(0.0, false, hp) == 0.0);
}

TEST_CASE("cloud harvest") {
  const HarvestParams hp;
  CHECK(harvest_power_cloud(1000, hp) == doctest::Approx(22.8).epsilon(1e-15));
  CHECK(harvest_power_cloud(1500, hp) == doctest::Approx(22.8).epsilon(1e-15));
  CHECK(harvest_power_cloud(700, hp) == doctest::Approx(22.8 * std::exp(-3.0)).epsilon(1e-12));
  CHECK(harvest_power_cloud(700, hp) == doctest::Approx(1.1351).epsilon(1e-4));
  CHECK(harvest_power_cloud(100, hp) == harvest_power_cloud(700, hp));
  CHECK(harvest_power_cloud(850, hp) == doctest::Approx(22.8 * std::exp(-1.5)));

  const double top_below = harvest_power_cloud(std::nextafter(1000.0, 0.0), hp);
  const double bottom_below = harvest_power_cloud(std::nextafter(700.0, 0.0), hp);
  CHECK(std::abs(top_below - harvest_power_cloud(1000, hp)) <= 1e-12);
  CHECK(std::abs(bottom_below - harvest_power_cloud(700, hp)) <= 1e-12);
}

TEST_CASE("altitude harvest") {
  const HarvestParams hp;
  const double peak = hp.peak_power();
  CHECK(harvest_power_altitude(0, hp) == doctest::Approx(peak * std::exp(hp.max_transmittance - hp.absorption)));
  CHECK(harvest_power_altitude(1e7, hp) == doctest::Approx(peak * std::exp(hp.max_transmittance)));
  double prev = harvest_power_altitude(0, hp);
  for (int i = 1; i <= 1000; ++i) {
    const double v = harvest_power_altitude(10.0 * i, hp);
    CHECK(v >= prev);
    prev = v;
  }
}

TEST_CASE("harvest dispatch") {
  EnergyModel m;
  CHECK(harvest_power(m, 1.0, false, 0) == 22.8);
  CHECK(harvest_power(m, 1.0, true, 0) == 0.0);
  m.model = HarvestModel::Cloud;
  CHECK(harvest_power(m, -1.0, false, 1200) == doctest::Approx(22.8));
  CHECK(harvest_power(m, 1.0, true, 1200) == 0.0);
  m.model = HarvestModel::Altitude;
  CHECK(harvest_power(m, 1.0, false, 0) == harvest_power_altitude(0, m.harvest));
}

TEST_CASE("battery step") {
  const BatteryState b{660, 670, 50};
  CHECK(battery_step(b, 5, 20).energy == 670.0);
  CHECK(battery_step({100, 670, 50}, 0, 0).energy == 100.0);
  CHECK(battery_step({100, 670, 50}, 30, 10).energy == 80.0);
  CHECK_THROWS_AS(battery_step({60, 670, 50}, 20, 0), BatteryDepleted);
  CHECK(battery_step({60, 670, 50}, 10, 0).energy == 50.0);
  CHECK_THROWS_AS(battery_step(b, -1, 0), std::invalid_argument);
  CHECK_THROWS_AS(battery_step(b, 0, -1), std::invalid_argument);
}

TEST_CASE("battery validation") {
  CHECK_NOTHROW(validate(BatteryState{}));
  CHECK_THROWS_AS(validate(BatteryState{40, 670, 50}), ValidationError);
  CHECK_THROWS_AS(validate(BatteryState{700, 670, 50}), ValidationError);
}
