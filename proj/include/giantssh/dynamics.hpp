#pragma once

// Time-dependent Schroedinger integration: frequency ramps, a windowed drive
// from |G,vac> to one atom, a fixed-step RK4 propagator and a piecewise-exact
// reference propagator.

#include "giantssh/spectral.hpp"

#include <functional>
#include <optional>
#include <vector>

namespace giantssh {

/// omega(t) = start + slope * t
struct LinearRamp {
  double start = 0.0;
  double slope = 0.0;

  double at(double t) const { return start + slope * t; }
  static LinearRamp constant(double value) { return {value, 0.0}; }
  static LinearRamp between(double from, double to, double duration) {
    return {from, (to - from) / duration};
  }
};

/// xi * exp(-i omega_d t) on <e_atom|H|G,vac> while t < window_end.
struct Drive {
  int atom = 0;
  double strength = 0.0;
  double frequency = 0.0;
  double window_end = 0.0;
};

struct Schedule {
  double total_time = 0.0;
  std::vector<LinearRamp> frequencies;  ///< one per atom
  std::optional<Drive> drive;

  /// Every atom held at its omega0.
  static Schedule constant(const SystemModel& model, double total_time);

  double frequency(int atom, double t) const { return frequencies.at(atom).at(t); }
  std::vector<double> frequencies_at(double t) const;
  bool drive_active(double t) const { return drive && t < drive->window_end; }

  /// Interior times where the generator changes discontinuously.
  std::vector<double> breakpoints() const;

  /// Throws ConfigError for a bad time span, a ramp count that does not match
  /// the atoms, a ramp leaving the band gap, or a drive window past total_time.
  void validate(const SystemModel& model) const;
};

/// Static Hamiltonian with atom frequencies at t, plus the drive entries when
/// active. Requires a layout with vacuum if the schedule has a drive.
HamiltonianMatrix generator_at(const SystemModel& model, const Schedule& schedule, double t,
                               const BasisLayout& layout);

struct TrajectoryRecord {
  BasisLayout layout{0, 1, false};
  std::vector<double> sample_times;
  std::vector<StateVector> states;
  std::vector<double> norms;
  std::vector<double> f_init;
  std::vector<double> f_target;  ///< empty without a target reference
  std::vector<double> p_atoms;
  std::vector<double> p_vacuum;
  std::vector<std::vector<double>> site_frames;
  std::vector<std::vector<double>> schedule_trace;  ///< atom frequencies per sample
  bool stopped_early = false;

  int samples() const { return static_cast<int>(sample_times.size()); }
  const StateVector& final_state() const { return states.back(); }
};

struct PropagateOptions {
  double dt = 0.005;
  int stride = 1000;           ///< steps between stored samples
  double drift_limit = 1e-6;   ///< abort threshold on | |psi| - 1 |
  std::optional<StateVector> initial_reference;  ///< defaults to psi0
  std::optional<StateVector> target_reference;
  /// Called after every step with the current time and state; returning true
  /// ends the run there (the state is recorded as the last sample).
  std::function<bool(double, const StateVector&)> stop_when;
};

/// Classical RK4 without renormalization. Steps never straddle a breakpoint
/// of the schedule. Throws NumericalError when the norm drifts past the limit.
TrajectoryRecord propagate(const StateVector& psi0, const SystemModel& model,
                           const Schedule& schedule, const PropagateOptions& options = {});

/// Product of exact exponentials of the generator frozen at each segment
/// midpoint. Segments are aligned to the schedule breakpoints.
StateVector oracle_propagate(const StateVector& psi0, const SystemModel& model,
                             const Schedule& schedule, double segment_dt);

}  // namespace giantssh
