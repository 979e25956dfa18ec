#pragma once

#include <ostream>
#include <string>
#include <vector>

#include "suav/planners.hpp"
#include "suav/privacy.hpp"
#include "suav/sim.hpp"

namespace suav {

inline constexpr const char* kCsvHeader = "t,x,y,z,theta,v,u,battery,shadow,mode,min_dist";

void write_log_csv(std::ostream& out, const SimLog& log);

/// Waypoints of a grid path as trajectory rows timed by the edge durations.
void write_path_csv(std::ostream& out, const Scenario& sc, const NavGrid& grid, const Path& path);
void write_path_csv(std::ostream& out, const Scenario& sc, const DpPlan& plan);

/// One row per edge: from and to indices, length, duration, e_out, e_gain, lit_fraction.
void write_edges_csv(std::ostream& out, const Path& path);

/// Entry point behind the `suav` executable. Returns the process exit status:
/// 0 success, 1 domain failure, 2 usage or parse error.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace suav
