#include "suav/cli.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <fstream>
#include <future>
#include <optional>

#include <CLI11.hpp>
#include <json.hpp>

#include "suav/errors.hpp"
#include "suav/scenario.hpp"

namespace suav {

namespace {

using json = nlohmann::ordered_json;

enum class Level { Error = 0, Warn = 1, Info = 2, Debug = 3 };

Level log_level() {
  const char* env = std::getenv("SUAV_LOG");
  if (!env) return Level::Warn;
  if (!std::strcmp(env, "error")) return Level::Error;
  if (!std::strcmp(env, "info")) return Level::Info;
  if (!std::strcmp(env, "debug")) return Level::Debug;
  return Level::Warn;
}

void log(std::ostream& err, Level level, const std::string& msg) {
  static const char* names[] = {"error", "warn", "info", "debug"};
  if (level <= log_level()) err << "suav: " << names[static_cast<int>(level)] << ": " << msg << "\n";
}

std::string fmt(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6f", x == 0.0 ? 0.0 : x);
  return buf;
}

void row(std::ostream& out, double t, const Vec3& p, double theta, double v, double u, double battery, bool shadow,
         const char* mode, double min_dist) {
  out << fmt(t) << ',' << fmt(p.x) << ',' << fmt(p.y) << ',' << fmt(p.z) << ',' << fmt(theta) << ',' << fmt(v) << ','
      << fmt(u) << ',' << fmt(battery) << ',' << (shadow ? 1 : 0) << ',' << mode << ',' << fmt(min_dist) << '\n';
}

std::optional<PlannerKind> parse_planner(const std::string& name) {
  for (PlannerKind k : {PlannerKind::Energy, PlannerKind::Time, PlannerKind::Shortest, PlannerKind::Privacy})
    if (name == to_string(k)) return k;
  return std::nullopt;
}

json path_summary(const Path& p) {
  double lowest = p.battery.empty() ? 0.0 : p.battery.front();
  for (double b : p.battery) lowest = std::min(lowest, b);
  json j;
  j["status"] = "ok";
  j["cost"] = p.net_cost();
  j["e_out"] = p.e_out;
  j["e_gain"] = p.e_gain;
  j["clamp_loss"] = p.clamp_loss;
  j["time"] = p.duration;
  j["length"] = p.length;
  j["shadow_time"] = p.shadow_time;
  j["min_battery"] = std::isfinite(lowest) ? lowest : 0.0;
  j["waypoints"] = p.waypoints.size();
  return j;
}

double trajectory_length(const Trajectory& traj) {
  double len = 0.0;
  for (std::size_t i = 1; i < traj.size(); ++i) len += distance(traj[i - 1].p, traj[i].p);
  return len;
}

json dp_summary(const DpPlan& plan, const PrivacyDp& dp) {
  json j;
  j["status"] = "ok";
  j["risk"] = plan.risk;
  j["time"] = plan.final_time;
  j["length"] = trajectory_length(plan.trajectory);
  j["start_layer"] = plan.start_layer;
  j["layers"] = dp.options().layers;
  return j;
}

json metrics_json(const Metrics& m) {
  json j;
  j["arrived"] = m.arrived;
  j["collision"] = m.collision;
  j["total_time"] = m.total_time;
  j["e_out"] = m.e_out;
  j["e_gain"] = m.e_gain;
  j["clamp_loss"] = m.clamp_loss;
  j["net_cost"] = m.net_cost;
  j["initial_battery"] = m.initial_battery;
  j["final_battery"] = m.final_battery;
  j["length"] = m.length;
  j["shadow_time"] = m.shadow_time;
  j["min_separation"] = m.min_separation;
  j["mode_switches"] = m.mode_switches;
  return j;
}

json report_header(const Scenario& sc, const char* command) {
  json j;
  j["command"] = command;
  j["scenario"] = sc.name;
  j["digest"] = digest_hex(scenario_digest(sc));
  return j;
}

// Writes to the named file, or to `out` when the name is "-" or empty.
bool emit(const std::string& path, std::ostream& out, std::ostream& err, const std::string& text) {
  if (path.empty() || path == "-") {
    out << text;
    return true;
  }
  std::ofstream f(path, std::ios::binary);
  if (!f) {
    err << "suav: cannot write " << path << "\n";
    return false;
  }
  f << text;
  return static_cast<bool>(f);
}

struct Source {
  std::string file;
  std::string preset;
};

void add_source(CLI::App* cmd, Source& src) {
  auto* s = cmd->add_option("-s,--scenario", src.file, "Scenario file (JSON)");
  auto* p = cmd->add_option("--preset", src.preset, "Built-in scenario")->check(CLI::IsMember(preset_names()));
  s->excludes(p);
  p->excludes(s);
}

Scenario resolve(const Source& src) {
  if (!src.preset.empty()) return preset(src.preset);
  if (src.file.empty()) throw CLI::ValidationError("scenario", "give --scenario or --preset");
  return load_scenario(src.file);
}

int cmd_plan(const Scenario& sc_in, const std::string& planner, const std::string& output, const std::string& edges,
             std::ostream& out, std::ostream& err) {
  Scenario sc = sc_in;
  const auto kind = parse_planner(planner);
  sc.planner = *kind;
  json report = report_header(sc, "plan");
  report["planner"] = planner;
  std::ostringstream csv;
  csv << kCsvHeader << "\n";
  try {
    if (*kind == PlannerKind::Privacy) {
      const PrivacyDp dp(sc.env, sc.goal, sc.privacy);
      const DpPlan plan = extract_plan(dp, sc.start);
      write_path_csv(csv, sc, plan);
      report["result"] = dp_summary(plan, dp);
    } else {
      const NavGrid grid = build_grid(sc.env, sc.grid, sc.energy);
      log(err, Level::Info, "grid " + std::to_string(grid.free_count()) + " free nodes, " +
                                std::to_string(grid.edge_count()) + " edges");
      const Path path = plan_route(sc, grid, sc.start, sc.battery);
      write_path_csv(csv, sc, grid, path);
      report["result"] = path_summary(path);
      if (!edges.empty()) {
        std::ostringstream e;
        write_edges_csv(e, path);
        if (!emit(edges, out, err, e.str())) return 1;
      }
    }
  } catch (const ValidationError&) {
    throw;
  } catch (const Error& e) {
    err << "suav: " << e.what() << "\n";
    return 1;
  }
  if (!emit(output, out, err, csv.str())) return 1;
  (output.empty() || output == "-" ? err : out) << report.dump(2) << "\n";
  return 0;
}

int cmd_simulate(const Scenario& sc, ControllerMode mode, const std::string& output, const std::string& report_path,
                 std::ostream& out, std::ostream& err) {
  SimResult r;
  try {
    r = run_scenario(sc, mode);
  } catch (const ValidationError&) {
    throw;
  } catch (const Error& e) {
    err << "suav: " << e.what() << "\n";
    return 1;
  }
  for (const auto& ev : r.log.events)
    if (ev.kind != EventKind::Clamp)
      log(err, Level::Info, "step " + std::to_string(ev.step) + " " + to_string(ev.kind) + " " + ev.detail);
  std::ostringstream csv;
  write_log_csv(csv, r.log);
  if (!emit(output, out, err, csv.str())) return 1;
  json report = report_header(sc, "simulate");
  report["mode"] = to_string(mode);
  report["planner"] = to_string(sc.planner);
  report["metrics"] = metrics_json(r.metrics);
  if (!emit(report_path, out, err, report.dump(2) + "\n")) return 1;
  return r.metrics.collision || !r.metrics.arrived ? 1 : 0;
}

int cmd_compare(const Scenario& sc, const std::vector<std::string>& planners, const std::string& report_path,
                std::ostream& out, std::ostream& err) {
  std::optional<NavGrid> grid;
  std::string grid_error;
  const bool needs_grid = std::any_of(planners.begin(), planners.end(),
                                      [](const std::string& p) { return p != "privacy"; });
  if (needs_grid) {
    try {
      grid = build_grid(sc.env, sc.grid, sc.energy);
    } catch (const Error& e) {
      grid_error = e.what();
    }
  }

  std::vector<std::future<json>> jobs;
  for (const auto& name : planners) {
    jobs.push_back(std::async(std::launch::async, [&, name]() {
      json row;
      row["planner"] = name;
      try {
        Scenario local = sc;
        local.planner = *parse_planner(name);
        json res;
        if (local.planner == PlannerKind::Privacy) {
          const PrivacyDp dp(local.env, local.goal, local.privacy);
          res = dp_summary(extract_plan(dp, local.start), dp);
        } else {
          if (!grid) throw PlanningFailed(grid_error);
          res = path_summary(plan_route(local, *grid, local.start, local.battery));
        }
        for (auto& [k, v] : res.items()) row[k] = v;
      } catch (const std::exception& e) {
        row["status"] = "failed";
        row["error"] = e.what();
      }
      return row;
    }));
  }

  json report = report_header(sc, "compare");
  report["runs"] = json::array();
  int ok = 0;
  for (auto& job : jobs) {
    json row = job.get();
    if (row["status"] == "ok") ++ok;
    else log(err, Level::Warn, row["planner"].get<std::string>() + ": " + row["error"].get<std::string>());
    report["runs"].push_back(std::move(row));
  }
  if (!emit(report_path, out, err, report.dump(2) + "\n")) return 1;
  return ok == 0 ? 1 : 0;
}

}  // namespace

void write_log_csv(std::ostream& out, const SimLog& log) {
  out << kCsvHeader << "\n";
  for (const auto& r : log.records)
    row(out, r.t, r.position, r.heading, r.v, r.u, r.battery, r.shadow, to_string(r.mode), r.min_dist);
}

void write_path_csv(std::ostream& out, const Scenario& sc, const NavGrid& grid, const Path& path) {
  double t = 0.0;
  for (std::size_t i = 0; i < path.waypoints.size(); ++i) {
    const Vec3& p = path.waypoints[i];
    double theta = 0.0, v = 0.0;
    if (!path.edges.empty()) {
      const std::size_t e = std::min(i, path.edges.size() - 1);
      const Vec3 d = path.waypoints[e + 1] - path.waypoints[e];
      theta = std::atan2(d.y, d.x);
      if (i < path.edges.size()) v = d.norm_xy() / path.edges[i].duration;
    }
    row(out, t, p, theta, v, 0.0, path.battery[i], !grid.is_lit(path.nodes[i]), "plan",
        obstacle_clearance(sc, p, 0.0));
    if (i < path.edges.size()) t += path.edges[i].duration;
  }
}

void write_path_csv(std::ostream& out, const Scenario& sc, const DpPlan& plan) {
  const auto& tr = plan.trajectory;
  for (std::size_t i = 0; i < tr.size(); ++i) {
    double theta = 0.0, v = 0.0;
    if (tr.size() > 1) {
      const std::size_t e = std::min(i, tr.size() - 2);
      const Vec3 d = tr[e + 1].p - tr[e].p;
      if (d.norm_xy() > 0.0) theta = std::atan2(d.y, d.x);
      if (i + 1 < tr.size()) v = d.norm() / (tr[i + 1].t - tr[i].t);
    }
    row(out, tr[i].t, tr[i].p, theta, v, 0.0, sc.battery.energy, in_shadow(sc.env, tr[i].p, 0.0), "plan",
        obstacle_clearance(sc, tr[i].p, 0.0));
  }
}

void write_edges_csv(std::ostream& out, const Path& path) {
  out << "from,to,length,duration,e_out,e_gain,lit_fraction\n";
  for (std::size_t i = 0; i < path.edges.size(); ++i) {
    const GridEdge& e = path.edges[i];
    out << path.nodes[i] << ',' << e.to << ',' << fmt(e.length) << ',' << fmt(e.duration) << ',' << fmt(e.e_out)
        << ',' << fmt(e.e_gain) << ',' << fmt(e.lit_fraction) << '\n';
  }
}

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Energy-aware navigation toolkit for solar-powered UAVs", "suav"};
  app.require_subcommand(1);

  Source plan_src, sim_src, cmp_src;
  std::string planner = "energy", plan_out = "-", edges_out;
  auto* plan = app.add_subcommand("plan", "Plan a route and write it as CSV");
  add_source(plan, plan_src);
  plan->add_option("-p,--planner", planner, "energy, time, shortest or privacy")
      ->check(CLI::IsMember({"energy", "time", "shortest", "privacy"}));
  plan->add_option("-o,--output", plan_out, "Trajectory CSV (default stdout)");
  plan->add_option("--edges", edges_out, "Per-edge CSV");

  std::string mode = "hybrid", sim_out = "-", sim_report;
  std::string sim_planner;
  bool replan = false;
  auto* sim = app.add_subcommand("simulate", "Run the closed-loop simulation");
  add_source(sim, sim_src);
  sim->add_option("-m,--mode", mode, "hybrid, reactive-only or track-only")
      ->check(CLI::IsMember({"hybrid", "reactive-only", "track-only"}));
  sim->add_option("-p,--planner", sim_planner, "Override the scenario planner")
      ->check(CLI::IsMember({"energy", "time", "shortest", "privacy"}));
  sim->add_flag("--replan", replan, "Replan when returning to path tracking");
  sim->add_option("-o,--output", sim_out, "Log CSV (default stdout)");
  sim->add_option("-r,--report", sim_report, "Metrics report (default stdout)");

  std::vector<std::string> planners;
  std::string cmp_report;
  auto* cmp = app.add_subcommand("compare", "Run several planners on one scenario");
  add_source(cmp, cmp_src);
  cmp->add_option("-p,--planners", planners, "Planners to compare")
      ->required()
      ->delimiter(',')
      ->check(CLI::IsMember({"energy", "time", "shortest", "privacy"}));
  cmp->add_option("-r,--report", cmp_report, "Report file (default stdout)");

  std::string preset_name, preset_out = "-";
  auto* pre = app.add_subcommand("preset", "Write a built-in scenario as JSON");
  pre->add_option("name", preset_name, "Preset name")->required()->check(CLI::IsMember(preset_names()));
  pre->add_option("-o,--output", preset_out, "Destination (default stdout)");

  try {
    app.parse(argc, argv);
    if (cmp->parsed() && planners.size() < 2) throw CLI::ValidationError("--planners", "need at least two planners");
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "suav: " << e.what() << "\n";
    return 2;
  }

  try {
    if (pre->parsed()) return emit(preset_out, out, err, dump_scenario(preset(preset_name))) ? 0 : 1;
    if (plan->parsed()) return cmd_plan(resolve(plan_src), planner, plan_out, edges_out, out, err);
    if (sim->parsed()) {
      Scenario sc = resolve(sim_src);
      if (!sim_planner.empty()) sc.planner = *parse_planner(sim_planner);
      if (replan) sc.replan = true;
      const ControllerMode m = mode == "reactive-only" ? ControllerMode::ReactiveOnly
                               : mode == "track-only"  ? ControllerMode::TrackOnly
                                                       : ControllerMode::Hybrid;
      return cmd_simulate(sc, m, sim_out, sim_report, out, err);
    }
    if (cmp->parsed()) return cmd_compare(resolve(cmp_src), planners, cmp_report, out, err);
  } catch (const CLI::ParseError& e) {
    err << "suav: " << e.what() << "\n";
    return 2;
  } catch (const ParseError& e) {
    err << "suav: " << e.what() << "\n";
    return 2;
  } catch (const ValidationError& e) {
    err << "suav: " << e.what() << "\n";
    return 2;
  } catch (const Error& e) {
    err << "suav: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    err << "suav: " << e.what() << "\n";
    return 2;
  }
  return 2;
}

}  // namespace suav
