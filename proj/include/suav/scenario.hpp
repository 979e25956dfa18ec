#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "suav/sim.hpp"

namespace suav {

/// Reads a JSON scenario (comments allowed). Missing keys keep their defaults; unknown keys are
/// rejected. Angles are given in degrees under keys ending in `_deg`.
/// Throws ParseError(line, message) or ValidationError(field, reason).
Scenario load_scenario(const std::string& path);
Scenario parse_scenario(const std::string& text);

std::string dump_scenario(const Scenario& sc);
void save_scenario(const Scenario& sc, const std::string& path);

/// FNV-1a 64 over the canonical dump, with numbers rounded to 12 significant digits so the
/// digest survives a save/load round trip through degrees.
std::uint64_t scenario_digest(const Scenario& sc);
std::string digest_hex(std::uint64_t digest);

/// Named parameter sets: "section4" (energy-aware planning in a 3D block of buildings) and
/// "section5" (hybrid navigation at fixed altitude with unknown obstacles).
Scenario preset(const std::string& name);
std::vector<std::string> preset_names();

}  // namespace suav
