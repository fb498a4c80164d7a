#pragma once

// Scenario runners: driven preparation of a gap state from |G,vac>, then a
// linear detuning ramp that carries it through in-gap crossings.

#include "giantssh/dynamics.hpp"
#include "giantssh/sweep.hpp"

#include <optional>
#include <string>
#include <vector>

namespace giantssh {

struct SweepSpec {
  double from = 0.0;
  double to = 0.0;
  double spacing = 0.0025;
  double gap_threshold = 1e-3;
};

struct PreparationSpec {
  double xi = 0.005;
  int target_atom = 0;             ///< prepare the gap state localized at this atom
  std::optional<double> max_time;  ///< default 2 pi / xi
  double drop = 0.02;              ///< stop once F falls this far below its running maximum
  double min_peak = 0.95;
};

/// detuning(t') = scenario.detuning + change * t' / duration
struct TransferSpec {
  double change = 0.0;
  double duration = 0.0;
  int target_atom = 0;    ///< the final gap state is the one localized here
};

struct SolverSpec {
  double dt = 0.005;
  int stride = 1000;
  double oracle_dt = 0.05;
  double margin = 1e-6;
};

struct Scenario {
  std::string name;
  SystemModel model;
  double detuning = 0.0;  ///< operating point: spectrum, preparation and ramp start
  std::optional<SweepSpec> sweep;
  std::optional<PreparationSpec> prepare;
  std::optional<TransferSpec> transfer;
  SolverSpec solver;
  ShapeThresholds shape;

  /// Throws ConfigError listing every problem, including ramps that push the
  /// swept atom out of the band gap.
  void validate() const;

  double ramp_end() const { return detuning + (transfer ? transfer->change : 0.0); }
};

/// Gap eigenstate of the instantaneous Hamiltonian whose photon cloud sits at
/// `atom`; ties go to the larger footprint share. Throws ConfigError if no gap
/// state is localized there.
struct GapStateChoice {
  int index = 0;  ///< in the eigensystem
  double energy = 0.0;
  StateVector state;  ///< no vacuum component
  ShapeReport shape;
};
GapStateChoice gap_state_at(const SystemModel& model, double detuning, int atom,
                            const ShapeThresholds& thresholds = {}, double margin = 1e-6);

struct PreparationResult {
  StateVector state;   ///< at the fidelity peak, vacuum layout
  StateVector target;  ///< the gap eigenstate, vacuum layout
  double target_energy = 0.0;
  double atom_amplitude = 0.0;  ///< |C^e| of the target on the driven atom
  double t_peak = 0.0;
  double peak_fidelity = 0.0;
  double rabi_estimate = 0.0;  ///< pi / (2 xi |C^e|)
  TrajectoryRecord trajectory;
};

/// Drives the atom named by prepare.target_atom at the target energy, starting
/// from |G,vac> with the frequencies frozen at the operating point. Throws
/// PreparationError if the peak stays below prepare.min_peak.
PreparationResult prepare_initial_state(const Scenario& scenario);

struct TransferResult {
  TrajectoryRecord trajectory;
  StateVector target;  ///< vacuum layout
  double target_energy = 0.0;
  double final_fidelity = 0.0;
  std::optional<double> jump_time;      ///< first F_t >= 0.5, interpolated
  std::optional<double> jump_detuning;  ///< ramp value at jump_time
  ShapeReport shape_before;
  ShapeReport shape_after;
  std::vector<CrossingReport> crossings;  ///< gap crossings inside the ramp range
  std::optional<CrossingReport> relevant_crossing;
  double max_band_leakage = 0.0;  ///< largest population on band or bound states
  std::optional<std::string> diagnostic;  ///< set when final_fidelity < 0.9
  std::optional<double> suggested_duration;
};

/// Linear ramp of the swept atom over [0, transfer.duration] from `prepared`.
TransferResult run_transfer(const Scenario& scenario, const StateVector& prepared);

/// run_transfer restricted to two and three atoms respectively.
TransferResult two_atom_transfer(const Scenario& scenario, const StateVector& prepared);
TransferResult three_atom_transfer(const Scenario& scenario, const StateVector& prepared);

/// Duration for which a Landau-Zener passage through a crossing with ramp rate
/// |change| / T leaves at most `miss` population behind. `slope` is the
/// diabatic slope difference d(E_a - E_b)/d(detuning).
double landau_zener_duration(double min_separation, double slope, double change, double miss = 0.01);

/// Population of `psi` outside the vacuum and the GAP states of the
/// Hamiltonian at `detuning`.
double band_leakage(const SystemModel& model, double detuning, const StateVector& psi, double margin = 1e-6);

}  // namespace giantssh
