#pragma once

// Eigenstates of the single-excitation Hamiltonian: diagonalization,
// band/bound/gap classification, photon distributions, fidelities and the
// splitting/combining shape taxonomy of in-gap states.

#include "giantssh/lattice.hpp"

#include <optional>
#include <span>
#include <string_view>
#include <vector>

namespace giantssh {

/// Complex amplitudes over a BasisLayout.
class StateVector {
 public:
  /// Placeholder: the zero vector of a bare two-site ring.
  StateVector() : StateVector(BasisLayout{0, 1, false}, ComplexVector::Zero(2)) {}
  StateVector(BasisLayout layout, ComplexVector amplitudes);

  /// |G, vac> in a layout that includes the vacuum.
  static StateVector vacuum(const BasisLayout& layout);
  /// A single basis element.
  static StateVector basis(const BasisLayout& layout, int index);

  const BasisLayout& layout() const { return layout_; }
  const ComplexVector& amplitudes() const { return amplitudes_; }
  ComplexVector& amplitudes() { return amplitudes_; }

  double norm() const { return amplitudes_.norm(); }
  std::complex<double> inner(const StateVector& other) const;  // <this|other>

  /// Re-express in another layout of the same lattice and atoms. Moving to a
  /// layout without vacuum requires a zero vacuum amplitude.
  StateVector embedded(const BasisLayout& target) const;

 private:
  BasisLayout layout_;
  ComplexVector amplitudes_;
};

enum class StateClass { LowerBound, LowerBand, Gap, UpperBand, UpperBound };

std::string_view to_string(StateClass c);

struct StateLabel {
  StateClass kind = StateClass::LowerBand;
  bool ambiguous = false;  ///< within the margin of a band edge
};

struct EigenSystem {
  BasisLayout layout;
  RealVector energies;    ///< ascending
  ComplexMatrix vectors;  ///< orthonormal columns
  std::vector<StateLabel> labels;

  int size() const { return static_cast<int>(energies.size()); }
  StateVector state(int i) const;
  std::vector<int> indices_of(StateClass c) const;
};

/// Rejects matrices whose asymmetry exceeds relative_tolerance times the
/// largest entry, and layouts that contain the vacuum row (it would add a
/// spurious E = 0 state to the spectrum). Labels are left empty.
EigenSystem eigendecompose(const HamiltonianMatrix& h, double relative_tolerance = 1e-12);

std::vector<StateLabel> classify(std::span<const double> energies, const BandEdges& edges,
                                 double margin);
/// Classifies in place and returns the system for chaining.
EigenSystem& classify(EigenSystem& es, const BandEdges& edges, double margin);

struct PhotonDistribution {
  std::vector<double> sites;  ///< interleaved (A,0),(B,0),(A,1),...
  std::vector<double> atoms;
  double vacuum = 0.0;

  double photonic_total() const;
  double total() const;
  double cell_probability(int cell) const { return sites[2 * cell] + sites[2 * cell + 1]; }
};

PhotonDistribution photon_distribution(const StateVector& psi);

/// |<a|b>|^2. Throws ConfigError on layout mismatch.
double fidelity(const StateVector& a, const StateVector& b);

enum class Shape { Splitting, Combining, Delocalized };

std::string_view to_string(Shape s);

struct ShapeThresholds {
  double prominence = 0.05;     ///< local maxima below this fraction of the global max are ignored
  double dip = 0.5;             ///< lobes are distinct if the valley drops below dip * smaller peak
  double footprint_mass = 0.5;  ///< below this the state is DELOCALIZED
  int pad_cells = 1;            ///< footprint window padding on each side
};

struct ShapeReport {
  std::optional<int> dominant_atom;  ///< 0-based
  double footprint_probability = 0.0;  ///< share of the photonic probability inside the dominant window
  int peak_count = 0;
  Shape shape = Shape::Delocalized;
};

/// Cells [min(n,m) - pad, max(n,m) + pad], wrapped around the ring.
std::vector<int> footprint_window(const AtomSpec& atom, int cells, int pad_cells);

ShapeReport shape_classify(const PhotonDistribution& dist, std::span<const AtomSpec> atoms,
                           const ShapeThresholds& thresholds = {});

}  // namespace giantssh
