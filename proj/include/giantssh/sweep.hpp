#pragma once

// Detuning sweeps: one diagonalization per grid point, branches continued by
// maximal overlap, and localization of in-gap level crossings.

#include "giantssh/spectral.hpp"

#include <array>
#include <span>
#include <string>
#include <vector>

namespace giantssh {

struct SweepResult {
  std::vector<double> grid;
  std::vector<EigenSystem> systems;                ///< classified, one per grid point
  std::vector<std::vector<int>> state_of_branch;   ///< [point][branch] -> eigenstate index
  std::vector<std::vector<std::string>> warnings;  ///< per grid point

  int points() const { return static_cast<int>(grid.size()); }
  int branch_count() const { return systems.empty() ? 0 : systems.front().size(); }

  double energy(int point, int branch) const;
  StateVector state(int point, int branch) const;
  StateLabel label(int point, int branch) const;

  /// Branches labeled GAP at every grid point, ordered by energy at the first point.
  std::vector<int> gap_branches() const;
};

/// from, from + spacing, ..., to (endpoint included; spacing adjusted to fit).
/// Throws ConfigError for fewer than two points.
std::vector<double> uniform_grid(double from, double to, double spacing);

/// perm[i] = index in `next` continuing state i of `prev`. Greedy assignment in
/// descending |overlap|^2; near-ties go to the smaller energy jump.
std::vector<int> track_branches(const EigenSystem& prev, const EigenSystem& next);

/// Requires an ascending grid with at least two distinct points.
SweepResult sweep_spectrum(const SystemModel& model, std::span<const double> grid,
                           double margin = 1e-6);

struct CrossingReport {
  int branch_a = 0;
  int branch_b = 0;
  double detuning_star = 0.0;
  double energy_star = 0.0;
  double min_separation = 0.0;
  bool is_true_crossing = false;
  bool ordering_swapped = false;  ///< E_a - E_b changes sign across the flanks
  int left_point = 0;
  int right_point = 0;
  /// F(a_L,a_R), F(a_L,b_R), F(b_L,a_R), F(b_L,b_R) between the flanking points.
  std::array<double, 4> flanking_fidelities{};
};

/// Minimal separation of two gap branches, refined by a parabola through the
/// squared separations at the three bracketing grid points.
CrossingReport detect_crossings(const SweepResult& sr, int branch_a, int branch_b,
                                double gap_threshold = 1e-3);

/// Every pair of gap branches whose separation has an interior local minimum
/// below max_separation, ordered by detuning.
std::vector<CrossingReport> find_gap_crossings(const SweepResult& sr, double gap_threshold = 1e-3,
                                               double max_separation = 0.02);

/// Grid index closest to `detuning`.
int nearest_point(const SweepResult& sr, double detuning);

/// Lower and upper of exactly two gap states on both sides of a crossing.
/// F(lower_right, lower_left) stays small and F(upper_right, lower_left) close
/// to one when the two levels really cross between `left` and `right`.
struct PairProbe {
  StateVector lower_left, upper_left, lower_right, upper_right;
  double lower_to_lower = 0.0;
  double upper_to_lower = 0.0;
};
/// Throws ConfigError unless both detunings have exactly two gap states.
PairProbe probe_pair(const SystemModel& model, double left, double right, double margin = 1e-6);

/// Follows the gap branch carrying the swept atom from `first` through
/// `second` to `third`. At the last two points the nearest-in-energy other gap
/// branch is the partner.
///   same_12  = F(swept@second, swept@first)
///   other_12 = F(partner@second, swept@first)
///   same_23  = F(swept@third, swept@second)
///   other_23 = F(partner@third, swept@second)
struct BranchProbe {
  int swept_branch = 0;
  double same_12 = 0.0, other_12 = 0.0, same_23 = 0.0, other_23 = 0.0;
};
BranchProbe probe_swept_branch(const SystemModel& model, double first, double second, double third,
                               double spacing = 0.0025, double margin = 1e-6);

/// True when exactly one of the two footprint separations is odd.
bool crossing_parity(int d1, int d2);

}  // namespace giantssh
