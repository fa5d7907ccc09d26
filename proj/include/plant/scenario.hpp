#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "plant/model.hpp"
#include "plant/processes.hpp"

namespace plant {

// Everything needed to run the plant from the command line.
struct Scenario {
  Model model;
  StateProcessSpec process_x;
  StateProcessSpec process_y;

  double V = 10.0;
  bool placeholder = false;
  bool demand_blind = false;
  bool assembly_delay = false;
  std::optional<std::vector<double>> theta;
  bool unsafe_theta = false;

  Count horizon = 1000;
  std::uint64_t seed = 1;
  int replications = 1;
};

// Strict JSON scenario reader. Unknown keys and type errors raise ParseError
// naming the field (and line when it can be located); model errors raise
// ValidationError carrying the underlying model error. `base_dir` resolves
// relative trace file paths.
Scenario parse_scenario_text(const std::string& text, const std::string& base_dir = ".");
Scenario parse_scenario(const std::string& path);

// Canonical JSON form; traces are written inline.
std::string serialize_scenario(const Scenario& s);

}  // namespace plant
