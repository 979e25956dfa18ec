#include "suav/scenario.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "suav/errors.hpp"

namespace suav {

namespace {

using json = nlohmann::ordered_json;

constexpr double kDeg = 180.0 / std::numbers::pi;

// Object reader that remembers which keys were consumed so leftovers can be rejected.
class Reader {
 public:
  Reader(const json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j.is_object()) throw ValidationError(where(), "expected an object");
  }

  std::string field(const char* key) const { return path_.empty() ? key : path_ + "." + key; }

  const json* get(const char* key) {
    seen_.insert(key);
    const auto it = j_.find(key);
    return it == j_.end() ? nullptr : &*it;
  }

  void number(const char* key, double& out) {
    if (const json* v = get(key)) out = as_number(*v, field(key));
  }
  void degrees(const char* key, double& out) {
    if (const json* v = get(key)) out = as_number(*v, field(key)) / kDeg;
  }
  void integer(const char* key, int& out) {
    if (const json* v = get(key)) {
      if (!v->is_number_integer()) throw ValidationError(field(key), "expected an integer");
      out = v->get<int>();
    }
  }
  void boolean(const char* key, bool& out) {
    if (const json* v = get(key)) {
      if (!v->is_boolean()) throw ValidationError(field(key), "expected true or false");
      out = v->get<bool>();
    }
  }
  void vec(const char* key, Vec3& out) {
    if (const json* v = get(key)) out = as_vec(*v, field(key));
  }

  void finish() const {
    for (const auto& [k, v] : j_.items())
      if (!seen_.count(k)) throw ValidationError(field(k.c_str()), "unknown key");
  }

  static double as_number(const json& v, const std::string& field) {
    if (!v.is_number()) throw ValidationError(field, "expected a number");
    const double x = v.get<double>();
    if (!std::isfinite(x)) throw ValidationError(field, "must be finite");
    return x;
  }

  static Vec3 as_vec(const json& v, const std::string& field) {
    if (!v.is_array() || v.size() != 3) throw ValidationError(field, "expected [x, y, z]");
    return {as_number(v[0], field + "[0]"), as_number(v[1], field + "[1]"), as_number(v[2], field + "[2]")};
  }

 private:
  std::string where() const { return path_.empty() ? "scenario" : path_; }

  const json& j_;
  std::string path_;
  std::set<std::string> seen_;
};

template <class F>
void each(Reader& r, const char* key, F&& f) {
  const json* arr = r.get(key);
  if (!arr) return;
  if (!arr->is_array()) throw ValidationError(r.field(key), "expected a list");
  for (std::size_t i = 0; i < arr->size(); ++i) f((*arr)[i], r.field(key) + "[" + std::to_string(i) + "]");
}

HarvestModel harvest_model(const std::string& name, const std::string& field) {
  if (name == "clear_sky") return HarvestModel::ClearSky;
  if (name == "cloud") return HarvestModel::Cloud;
  if (name == "altitude") return HarvestModel::Altitude;
  throw ValidationError(field, "expected clear_sky, cloud or altitude");
}

const char* harvest_name(HarvestModel m) {
  switch (m) {
    case HarvestModel::ClearSky:
      return "clear_sky";
    case HarvestModel::Cloud:
      return "cloud";
    case HarvestModel::Altitude:
      return "altitude";
  }
  return "clear_sky";
}

PlannerKind planner_kind(const std::string& name, const std::string& field) {
  for (PlannerKind k : {PlannerKind::Energy, PlannerKind::Time, PlannerKind::Shortest, PlannerKind::Privacy})
    if (name == to_string(k)) return k;
  throw ValidationError(field, "expected energy, time, shortest or privacy");
}

std::string string_at(const json& v, const std::string& field) {
  if (!v.is_string()) throw ValidationError(field, "expected a string");
  return v.get<std::string>();
}

Scenario from_json(const json& root) {
  Scenario sc;
  Reader r(root, "");
  if (const json* v = r.get("name")) sc.name = string_at(*v, "name");

  if (const json* v = r.get("bounds")) {
    Reader b(*v, "bounds");
    b.vec("lo", sc.env.bounds.lo);
    b.vec("hi", sc.env.bounds.hi);
    b.finish();
  }
  if (const json* v = r.get("altitude")) {
    Reader a(*v, "altitude");
    a.number("min", sc.env.z_min);
    a.number("max", sc.env.z_max);
    a.finish();
  }
  each(r, "prisms", [&](const json& item, const std::string& field) {
    Reader p(item, field);
    Prism prism;
    p.vec("center", prism.center);
    p.vec("semi_axes", prism.semi_axes);
    if (const json* e = p.get("exponents")) {
      if (!e->is_array() || e->size() != 3) throw ValidationError(field + ".exponents", "expected three integers");
      for (int i = 0; i < 3; ++i) {
        if (!(*e)[i].is_number_integer()) throw ValidationError(field + ".exponents", "expected three integers");
        prism.exponents[i] = (*e)[i].get<int>();
      }
    }
    p.finish();
    validate(prism, field.c_str());
    sc.env.prisms.push_back(prism);
  });
  each(r, "privacy_regions", [&](const json& item, const std::string& field) {
    Reader p(item, field);
    PrivacyRegion region;
    p.vec("center", region.center);
    p.number("c1", region.c1);
    p.number("c2", region.c2);
    p.finish();
    validate(region, field.c_str());
    sc.env.privacy_regions.push_back(region);
  });
  if (const json* v = r.get("sun")) {
    Reader s(*v, "sun");
    s.vec("position", sc.env.sun.position);
    s.degrees("azimuth_deg", sc.env.sun.azimuth);
    s.degrees("elevation_deg", sc.env.sun.elevation);
    s.vec("drift", sc.env.sun.drift);
    s.finish();
  }
  if (const json* v = r.get("energy")) {
    Reader e(*v, "energy");
    if (const json* m = e.get("model")) sc.energy.model = harvest_model(string_at(*m, "energy.model"), "energy.model");
    auto& c = sc.energy.consumption;
    e.number("level_power", c.level_power);
    e.number("climb_power", c.climb_power);
    e.number("descent_power", c.descent_power);
    e.number("cruise_speed", c.cruise_speed);
    e.number("climb_speed", c.climb_speed);
    e.number("descent_speed", c.descent_speed);
    auto& h = sc.energy.harvest;
    e.number("efficiency", h.efficiency);
    e.number("spectral_density", h.spectral_density);
    e.number("panel_area", h.panel_area);
    e.number("cloud_top", h.cloud_top);
    e.number("cloud_bottom", h.cloud_bottom);
    e.number("absorption", h.absorption);
    e.number("max_transmittance", h.max_transmittance);
    e.number("scale_height", h.scale_height);
    e.finish();
  }
  if (const json* v = r.get("battery")) {
    Reader b(*v, "battery");
    b.number("energy", sc.battery.energy);
    b.number("capacity", sc.battery.capacity);
    b.number("floor", sc.battery.floor);
    b.finish();
  }
  if (const json* v = r.get("grid")) {
    Reader g(*v, "grid");
    g.number("resolution", sc.grid.resolution);
    g.number("margin", sc.grid.margin);
    g.boolean("planar", sc.grid.planar);
    g.number("planar_z", sc.grid.planar_z);
    g.finish();
  }
  if (const json* v = r.get("privacy")) {
    Reader p(*v, "privacy");
    p.integer("layers", sc.privacy.layers);
    p.number("horizon", sc.privacy.horizon);
    p.number("max_speed", sc.privacy.max_speed);
    p.number("intensity_scale", sc.privacy.intensity_scale);
    p.boolean("planar", sc.privacy.planar);
    p.integer("quadrature", sc.privacy.quadrature);
    p.finish();
  }
  if (const json* v = r.get("limits")) {
    Reader l(*v, "limits");
    l.number("v_min", sc.limits.v_min);
    l.number("v_max", sc.limits.v_max);
    l.degrees("u_max_deg", sc.limits.u_max);
    l.number("cruise", sc.limits.cruise);
    l.number("vz_max", sc.limits.vz_max);
    l.finish();
  }
  if (const json* v = r.get("avoidance")) {
    Reader a(*v, "avoidance");
    a.degrees("alpha_safe_deg", sc.avoidance.alpha_safe);
    a.degrees("theta_deg", sc.avoidance.theta);
    a.number("sensor_range", sc.avoidance.sensor_range);
    a.number("trigger", sc.avoidance.trigger);
    a.degrees("align_tolerance_deg", sc.avoidance.align_tolerance);
    a.finish();
  }
  r.number("lookahead", sc.lookahead);
  r.vec("start", sc.start);
  r.vec("goal", sc.goal);
  each(r, "obstacles", [&](const json& item, const std::string& field) {
    Reader o(item, field);
    MovingObstacle ob;
    o.vec("center", ob.center);
    o.number("radius", ob.radius);
    o.vec("velocity", ob.velocity);
    o.finish();
    sc.obstacles.push_back(ob);
  });
  r.number("dt", sc.dt);
  r.number("max_time", sc.max_time);
  if (const json* v = r.get("planner")) sc.planner = planner_kind(string_at(*v, "planner"), "planner");
  r.boolean("replan", sc.replan);
  r.finish();

  validate(sc);
  return sc;
}

double round12(double x) {
  if (x == 0.0 || !std::isfinite(x)) return x == 0.0 ? 0.0 : x;
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.12g", x);
  return std::strtod(buf, nullptr);
}

json to_json(const Scenario& sc, bool canonical) {
  const auto n = [&](double x) { return canonical ? round12(x) : x; };
  const auto v = [&](const Vec3& p) { return json::array({n(p.x), n(p.y), n(p.z)}); };
  json j;
  j["name"] = sc.name;
  j["bounds"] = {{"lo", v(sc.env.bounds.lo)}, {"hi", v(sc.env.bounds.hi)}};
  j["altitude"] = {{"min", n(sc.env.z_min)}, {"max", n(sc.env.z_max)}};
  j["prisms"] = json::array();
  for (const auto& p : sc.env.prisms)
    j["prisms"].push_back({{"center", v(p.center)},
                           {"semi_axes", v(p.semi_axes)},
                           {"exponents", {p.exponents[0], p.exponents[1], p.exponents[2]}}});
  j["privacy_regions"] = json::array();
  for (const auto& p : sc.env.privacy_regions)
    j["privacy_regions"].push_back({{"center", v(p.center)}, {"c1", n(p.c1)}, {"c2", n(p.c2)}});
  const auto& sun = sc.env.sun;
  j["sun"] = {{"position", v(sun.position)},
              {"azimuth_deg", n(sun.azimuth * kDeg)},
              {"elevation_deg", n(sun.elevation * kDeg)},
              {"drift", v(sun.drift)}};
  const auto& c = sc.energy.consumption;
  const auto& h = sc.energy.harvest;
  j["energy"] = {{"model", harvest_name(sc.energy.model)},
                 {"level_power", n(c.level_power)},
                 {"climb_power", n(c.climb_power)},
                 {"descent_power", n(c.descent_power)},
                 {"cruise_speed", n(c.cruise_speed)},
                 {"climb_speed", n(c.climb_speed)},
                 {"descent_speed", n(c.descent_speed)},
                 {"efficiency", n(h.efficiency)},
                 {"spectral_density", n(h.spectral_density)},
                 {"panel_area", n(h.panel_area)},
                 {"cloud_top", n(h.cloud_top)},
                 {"cloud_bottom", n(h.cloud_bottom)},
                 {"absorption", n(h.absorption)},
                 {"max_transmittance", n(h.max_transmittance)},
                 {"scale_height", n(h.scale_height)}};
  j["battery"] = {{"energy", n(sc.battery.energy)}, {"capacity", n(sc.battery.capacity)}, {"floor", n(sc.battery.floor)}};
  j["grid"] = {{"resolution", n(sc.grid.resolution)},
               {"margin", n(sc.grid.margin)},
               {"planar", sc.grid.planar},
               {"planar_z", n(sc.grid.planar_z)}};
  j["privacy"] = {{"layers", sc.privacy.layers},
                  {"horizon", n(sc.privacy.horizon)},
                  {"max_speed", n(sc.privacy.max_speed)},
                  {"intensity_scale", n(sc.privacy.intensity_scale)},
                  {"planar", sc.privacy.planar},
                  {"quadrature", sc.privacy.quadrature}};
  j["limits"] = {{"v_min", n(sc.limits.v_min)},
                 {"v_max", n(sc.limits.v_max)},
                 {"u_max_deg", n(sc.limits.u_max * kDeg)},
                 {"cruise", n(sc.limits.cruise)},
                 {"vz_max", n(sc.limits.vz_max)}};
  j["avoidance"] = {{"alpha_safe_deg", n(sc.avoidance.alpha_safe * kDeg)},
                    {"theta_deg", n(sc.avoidance.theta * kDeg)},
                    {"sensor_range", n(sc.avoidance.sensor_range)},
                    {"trigger", n(sc.avoidance.trigger)},
                    {"align_tolerance_deg", n(sc.avoidance.align_tolerance * kDeg)}};
  j["lookahead"] = n(sc.lookahead);
  j["start"] = v(sc.start);
  j["goal"] = v(sc.goal);
  j["obstacles"] = json::array();
  for (const auto& o : sc.obstacles)
    j["obstacles"].push_back({{"center", v(o.center)}, {"radius", n(o.radius)}, {"velocity", v(o.velocity)}});
  j["dt"] = n(sc.dt);
  j["max_time"] = n(sc.max_time);
  j["planner"] = to_string(sc.planner);
  j["replan"] = sc.replan;
  return j;
}

int line_of(const std::string& text, std::size_t byte) {
  byte = std::min(byte, text.size());
  int line = 1;
  for (std::size_t i = 0; i < byte; ++i)
    if (text[i] == '\n') ++line;
  return line;
}

Prism building(double x, double y, double hx, double hy, double height) {
  Prism p;
  p.center = {x, y, height / 2};
  p.semi_axes = {hx, hy, height / 2};
  p.exponents = {8, 8, 8};
  return p;
}

// Sun angles as seen from the middle of the scene.
void aim_sun(Environment& env, const Vec3& from) {
  const Vec3 d = env.sun.position - from;
  env.sun.azimuth = std::atan2(d.y, d.x);
  env.sun.elevation = std::atan2(d.z, d.norm_xy());
}

Scenario section4() {
  Scenario sc;
  sc.name = "section4";
  sc.env.bounds = {{0, 0, 0}, {600, 300, 250}};
  sc.env.z_min = 30;
  sc.env.z_max = 60;
  sc.env.sun.position = {250, 800, 1800};
  sc.env.prisms = {building(200, 265, 45, 20, 200), building(420, 240, 40, 20, 240),
                   building(100, 80, 30, 30, 80), building(500, 70, 30, 30, 60)};
  aim_sun(sc.env, {300, 150, 45});
  sc.battery = {670, 670, 50};
  sc.grid.resolution = 10;
  sc.start = {10, 200, 40};
  sc.goal = {590, 200, 40};
  return sc;
}

Scenario section5() {
  Scenario sc;
  sc.name = "section5";
  sc.env.bounds = {{0, 0, 0}, {600, 400, 200}};
  sc.env.z_min = 0;
  sc.env.z_max = 200;
  sc.env.sun.position = {300, 900, 1800};
  sc.env.prisms = {building(150, 150, 35, 35, 160), building(300, 260, 40, 40, 180),
                   building(450, 150, 35, 35, 150), building(300, 60, 30, 30, 140)};
  aim_sun(sc.env, {300, 200, 100});
  sc.battery = {750, 750, 50};
  sc.grid = {10, 8, true, 100};
  sc.limits = {};
  sc.avoidance = {};
  sc.lookahead = 20;
  sc.start = {20, 200, 100};
  sc.goal = {580, 200, 100};
  sc.obstacles = {
      {{220, 200, 100}, 8, {0, 0, 0}, false},
      {{380, 120, 100}, 6, {0, 3, 0}, false},
      {{520, 290, 100}, 6, {-1, -3, 0}, false},
  };
  sc.max_time = 300;
  return sc;
}

}  // namespace

Scenario parse_scenario(const std::string& text) {
  json root;
  try {
    root = json::parse(text, nullptr, true, true);
  } catch (const json::parse_error& e) {
    std::string msg = e.what();
    if (const auto pos = msg.find("syntax error"); pos != std::string::npos) msg = msg.substr(pos);
    throw ParseError(line_of(text, e.byte == 0 ? 0 : e.byte - 1), msg);
  }
  return from_json(root);
}

Scenario load_scenario(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open scenario file " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_scenario(buf.str());
}

std::string dump_scenario(const Scenario& sc) { return to_json(sc, false).dump(2) + "\n"; }

void save_scenario(const Scenario& sc, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write scenario file " + path);
  out << dump_scenario(sc);
}

std::uint64_t scenario_digest(const Scenario& sc) {
  const std::string text = to_json(sc, true).dump();
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : text) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string digest_hex(std::uint64_t digest) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(digest));
  return buf;
}

Scenario preset(const std::string& name) {
  if (name == "section4") return section4();
  if (name == "section5") return section5();
  throw ValidationError("preset", "unknown preset '" + name + "'");
}

std::vector<std::string> preset_names() { return {"section4", "section5"}; }

}  // namespace suav
