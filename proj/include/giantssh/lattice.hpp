#pragma once

// Geometry of the periodic SSH ring with giant atoms attached, and assembly of
// the single-excitation Hamiltonian.

#include <Eigen/Dense>

#include <numbers>
#include <span>
#include <string>
#include <vector>

namespace giantssh {

using ComplexMatrix = Eigen::MatrixXcd;
using ComplexVector = Eigen::VectorXcd;
using RealMatrix = Eigen::MatrixXd;
using RealVector = Eigen::VectorXd;

enum class Boundary { Periodic };

struct LatticeSpec {
  int cells = 2;
  double q = 1.0;      ///< energy unit
  double delta = 0.5;  ///< dimerization strength
  double theta = 0.2 * std::numbers::pi;
  Boundary boundary = Boundary::Periodic;

  /// Throws ConfigError when cells < 2 or q <= 0.
  void validate() const;
};

struct Hoppings {
  double intracell = 0.0;  // t1
  double intercell = 0.0;  // t2
};

Hoppings hopping_amplitudes(double theta, double delta, double q);
Hoppings hopping_amplitudes(const LatticeSpec& lattice);

struct DispersionPair {
  double lower = 0.0;
  double upper = 0.0;
};

/// Bulk dispersion of the two SSH bands at quasi-momentum k.
DispersionPair dispersion(double k, const Hoppings& hop);

struct Interval {
  double lo = 0.0;
  double hi = 0.0;

  bool empty() const { return !(lo < hi); }
  bool contains(double x) const { return lo < x && x < hi; }
};

struct BandEdges {
  Interval lower_band;
  Interval gap;  ///< open interval, empty at the metallic point t1 == t2
  Interval upper_band;
};

BandEdges band_edges(const Hoppings& hop);

/// One giant atom. Leg cells are 0-based here; the config layer converts from
/// the 1-based numbering used in input files.
struct AtomSpec {
  int n = 0;  ///< cell whose A site carries the left leg
  int m = 0;  ///< cell whose B site carries the right leg
  double g = 0.0;
  double omega0 = 0.0;

  int separation() const { return n > m ? n - m : m - n; }
};

enum class Sublattice { A, B };

struct BasisLabel {
  enum class Kind { Vacuum, Atom, Site };
  Kind kind = Kind::Site;
  int index = 0;  ///< atom index for Atom, cell for Site
  Sublattice sublattice = Sublattice::A;

  bool operator==(const BasisLabel&) const = default;
};

/// Index map of the single-excitation basis:
///   [vacuum], atom 0 .. atom N-1, (A,0), (B,0), (A,1), (B,1), ..., (A,L-1), (B,L-1)
class BasisLayout {
 public:
  BasisLayout(int atoms, int cells, bool include_vacuum);

  int dim() const { return offset_ + atoms_ + 2 * cells_; }
  int atoms() const { return atoms_; }
  int cells() const { return cells_; }
  bool has_vacuum() const { return offset_ == 1; }

  int vacuum_index() const;
  int atom_index(int atom) const;
  int site_index(int cell, Sublattice s) const;
  int first_site() const { return offset_ + atoms_; }
  int site_count() const { return 2 * cells_; }

  BasisLabel label(int index) const;
  int index_of(const BasisLabel& label) const;

  BasisLayout with_vacuum(bool include) const { return {atoms_, cells_, include}; }

  bool operator==(const BasisLayout&) const = default;

 private:
  int atoms_;
  int cells_;
  int offset_;
};

struct HamiltonianMatrix {
  BasisLayout layout;
  ComplexMatrix entries;

  int dim() const { return static_cast<int>(entries.rows()); }
  /// max |H[a][b] - conj(H[b][a])|
  double max_asymmetry() const;
  bool is_real() const;
};

/// Throws ConfigError listing every out-of-range leg.
void validate_atoms(const LatticeSpec& lattice, std::span<const AtomSpec> atoms);

/// Non-fatal geometry remarks (e.g. two legs sharing one lattice site).
std::vector<std::string> geometry_warnings(const LatticeSpec& lattice,
                                           std::span<const AtomSpec> atoms);

/// H_SSH + sum_i omega_i |e_i><e_i| + sum_i g_i (|e_i><A,n_i| + |e_i><B,m_i| + h.c.).
/// Resonator on-site energies are zero. The vacuum row and column, when the
/// layout has one, are left zero.
HamiltonianMatrix build_hamiltonian(const LatticeSpec& lattice, std::span<const AtomSpec> atoms,
                                    std::span<const double> frequencies,
                                    const BasisLayout& layout);

/// Convenience overload using each atom's omega0.
HamiltonianMatrix build_hamiltonian(const LatticeSpec& lattice, std::span<const AtomSpec> atoms,
                                    const BasisLayout& layout);

/// How a scalar detuning maps onto atom frequencies:
///   omega[swept] = omega0[reference] + sign * detuning,
/// every other atom stays at its omega0.
struct DetuningAxis {
  int swept_atom = 0;
  int reference_atom = 0;
  int sign = +1;
};

/// Lattice, atoms and detuning convention; everything a sweep or a
/// propagation needs to assemble Hamiltonians.
struct SystemModel {
  LatticeSpec lattice;
  std::vector<AtomSpec> atoms;
  DetuningAxis axis;

  /// Throws ConfigError on bad geometry or an axis naming a missing atom.
  void validate() const;

  Hoppings hoppings() const { return hopping_amplitudes(lattice); }
  BandEdges edges() const { return band_edges(hoppings()); }
  BasisLayout layout(bool include_vacuum) const {
    return {static_cast<int>(atoms.size()), lattice.cells, include_vacuum};
  }

  double swept_frequency(double detuning) const;
  std::vector<double> frequencies_at(double detuning) const;
  std::vector<double> base_frequencies() const;

  HamiltonianMatrix hamiltonian_at(double detuning, bool include_vacuum = false) const;
};

}  // namespace giantssh
