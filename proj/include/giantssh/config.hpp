#pragma once

// Flat "key = value" scenario files. Energies are in units of q, times in 1/q,
// cell indices are 1-based. Unknown or repeated keys are errors.
//
//   version = 1
//   name = fig3
//   lattice.cells = 10            lattice.q, lattice.delta, lattice.theta_over_pi
//   atoms = 2
//   atom.1.n = 2                  atom.K.{n,m,g,omega}
//   detuning.atom = 2             swept atom (its omega is derived, not given)
//   detuning.reference = 1
//   detuning.sign = -1            omega[atom] = omega[reference] + sign * value
//   detuning.value = 0.6
//   sweep.from / sweep.to / sweep.spacing / sweep.gap_threshold
//   prepare.xi / prepare.target_atom / prepare.max_time / prepare.drop / prepare.min_peak
//   transfer.change / transfer.duration / transfer.target_atom
//   solver.dt / solver.stride / solver.oracle_dt / solver.margin
//   shape.prominence / shape.dip / shape.footprint / shape.pad

#include "giantssh/protocols.hpp"

#include <string>
#include <string_view>
#include <vector>

namespace giantssh {

inline constexpr int kConfigVersion = 1;

/// Collects every problem into one ConfigError.
Scenario parse_scenario(std::string_view text);

/// Canonical text; parse_scenario(render_scenario(s)) renders identically.
std::string render_scenario(const Scenario& s);

Scenario load_scenario(const std::string& path);

/// Built-in parameter sets: "fig2", "fig3", "fig4", "fig5".
Scenario preset(std::string_view name);
std::vector<std::string> preset_names();

}  // namespace giantssh
