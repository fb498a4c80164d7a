#include "giantssh/lattice.hpp"

#include "giantssh/error.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <utility>

namespace giantssh {

ConfigError::ConfigError(std::vector<std::string> messages)
    : std::runtime_error([&] {
        std::string joined;
        for (const auto& m : messages) {
          if (!joined.empty()) joined += "; ";
          joined += m;
        }
        return joined;
      }()),
      messages_(std::move(messages)) {}

void LatticeSpec::validate() const {
  std::vector<std::string> errors;
  if (cells < 2) errors.push_back(fmt::format("lattice needs at least 2 cells, got {}", cells));
  if (!(q > 0.0)) errors.push_back(fmt::format("energy unit q must be positive, got {}", q));
  if (!errors.empty()) throw ConfigError(std::move(errors));
}

Hoppings hopping_amplitudes(double theta, double delta, double q) {
  const double c = std::cos(theta);
  return {q * (1.0 + delta * c), q * (1.0 - delta * c)};
}

Hoppings hopping_amplitudes(const LatticeSpec& lattice) {
  return hopping_amplitudes(lattice.theta, lattice.delta, lattice.q);
}

DispersionPair dispersion(double k, const Hoppings& hop) {
  const double t1 = hop.intracell, t2 = hop.intercell;
  // Clamp tiny negative round-off at the gap closing point.
  const double e = std::sqrt(std::max(0.0, t1 * t1 + t2 * t2 + 2.0 * t1 * t2 * std::cos(k)));
  return {-e, e};
}

BandEdges band_edges(const Hoppings& hop) {
  const double inner = std::abs(hop.intracell - hop.intercell);
  const double outer = std::abs(hop.intracell + hop.intercell);
  return {{-outer, -inner}, {-inner, inner}, {inner, outer}};
}

BasisLayout::BasisLayout(int atoms, int cells, bool include_vacuum)
    : atoms_(atoms), cells_(cells), offset_(include_vacuum ? 1 : 0) {
  if (atoms < 0 || cells < 1) {
    throw ConfigError(fmt::format("invalid basis layout: {} atoms, {} cells", atoms, cells));
  }
}

int BasisLayout::vacuum_index() const {
  if (!has_vacuum()) throw ConfigError("basis layout has no vacuum state");
  return 0;
}

int BasisLayout::atom_index(int atom) const {
  if (atom < 0 || atom >= atoms_) throw ConfigError(fmt::format("atom index {} out of range", atom));
  return offset_ + atom;
}

int BasisLayout::site_index(int cell, Sublattice s) const {
  if (cell < 0 || cell >= cells_) throw ConfigError(fmt::format("cell index {} out of range", cell));
  return first_site() + 2 * cell + (s == Sublattice::B ? 1 : 0);
}

BasisLabel BasisLayout::label(int index) const {
  if (index < 0 || index >= dim()) throw ConfigError(fmt::format("basis index {} out of range", index));
  if (has_vacuum() && index == 0) return {BasisLabel::Kind::Vacuum, 0, Sublattice::A};
  if (index < first_site()) return {BasisLabel::Kind::Atom, index - offset_, Sublattice::A};
  const int site = index - first_site();
  return {BasisLabel::Kind::Site, site / 2, site % 2 == 0 ? Sublattice::A : Sublattice::B};
}

int BasisLayout::index_of(const BasisLabel& label) const {
  switch (label.kind) {
    case BasisLabel::Kind::Vacuum:
      return vacuum_index();
    case BasisLabel::Kind::Atom:
      return atom_index(label.index);
    case BasisLabel::Kind::Site:
      return site_index(label.index, label.sublattice);
  }
  return -1;
}

double HamiltonianMatrix::max_asymmetry() const {
  return (entries - entries.adjoint()).cwiseAbs().maxCoeff();
}

bool HamiltonianMatrix::is_real() const { return entries.imag().cwiseAbs().maxCoeff() == 0.0; }

void validate_atoms(const LatticeSpec& lattice, std::span<const AtomSpec> atoms) {
  std::vector<std::string> errors;
  for (std::size_t i = 0; i < atoms.size(); ++i) {
    const auto& a = atoms[i];
    if (a.n < 0 || a.n >= lattice.cells) {
      errors.push_back(fmt::format("atom {}: leg cell n={} outside 1..{}", i + 1, a.n + 1, lattice.cells));
    }
    if (a.m < 0 || a.m >= lattice.cells) {
      errors.push_back(fmt::format("atom {}: leg cell m={} outside 1..{}", i + 1, a.m + 1, lattice.cells));
    }
  }
  if (!errors.empty()) throw ConfigError(std::move(errors));
}

std::vector<std::string> geometry_warnings(const LatticeSpec& lattice,
                                           std::span<const AtomSpec> atoms) {
  std::vector<std::string> warnings;
  // Each site may host several legs; couplings simply add, but it is rarely intended.
  std::map<std::pair<int, int>, std::vector<std::size_t>> owners;
  for (std::size_t i = 0; i < atoms.size(); ++i) {
    owners[{atoms[i].n, 0}].push_back(i);
    owners[{atoms[i].m, 1}].push_back(i);
  }
  for (const auto& [site, who] : owners) {
    if (who.size() < 2) continue;
    std::string list;
    for (auto i : who) list += fmt::format("{}{}", list.empty() ? "" : ",", i + 1);
    warnings.push_back(fmt::format("site ({},{}) is shared by atoms {}; couplings are summed",
                                   site.second == 0 ? 'A' : 'B', site.first + 1, list));
  }
  (void)lattice;
  return warnings;
}

HamiltonianMatrix build_hamiltonian(const LatticeSpec& lattice, std::span<const AtomSpec> atoms,
                                    std::span<const double> frequencies,
                                    const BasisLayout& layout) {
  lattice.validate();
  validate_atoms(lattice, atoms);
  if (frequencies.size() != atoms.size()) {
    throw ConfigError(fmt::format("{} frequencies given for {} atoms", frequencies.size(), atoms.size()));
  }
  if (layout.cells() != lattice.cells || layout.atoms() != static_cast<int>(atoms.size())) {
    throw ConfigError("basis layout does not match lattice and atoms");
  }

  const Hoppings hop = hopping_amplitudes(lattice);
  const int L = lattice.cells;
  ComplexMatrix h = ComplexMatrix::Zero(layout.dim(), layout.dim());
  auto bond = [&h](int a, int b, double value) {
    h(a, b) += value;
    h(b, a) += value;
  };

  for (int l = 0; l < L; ++l) {
    bond(layout.site_index(l, Sublattice::A), layout.site_index(l, Sublattice::B), hop.intracell);
    // (A, l+1) -- (B, l), closing the ring at l = L-1.
    bond(layout.site_index((l + 1) % L, Sublattice::A), layout.site_index(l, Sublattice::B),
         hop.intercell);
  }
  for (std::size_t i = 0; i < atoms.size(); ++i) {
    const int e = layout.atom_index(static_cast<int>(i));
    h(e, e) = frequencies[i];
    bond(e, layout.site_index(atoms[i].n, Sublattice::A), atoms[i].g);
    bond(e, layout.site_index(atoms[i].m, Sublattice::B), atoms[i].g);
  }
  return {layout, std::move(h)};
}

HamiltonianMatrix build_hamiltonian(const LatticeSpec& lattice, std::span<const AtomSpec> atoms,
                                    const BasisLayout& layout) {
  std::vector<double> freqs;
  freqs.reserve(atoms.size());
  for (const auto& a : atoms) freqs.push_back(a.omega0);
  return build_hamiltonian(lattice, atoms, freqs, layout);
}

void SystemModel::validate() const {
  lattice.validate();
  validate_atoms(lattice, atoms);
  const int n = static_cast<int>(atoms.size());
  std::vector<std::string> errors;
  if (n > 0) {
    if (axis.swept_atom < 0 || axis.swept_atom >= n)
      errors.push_back(fmt::format("swept atom {} does not exist", axis.swept_atom + 1));
    if (axis.reference_atom < 0 || axis.reference_atom >= n)
      errors.push_back(fmt::format("reference atom {} does not exist", axis.reference_atom + 1));
    if (axis.sign != 1 && axis.sign != -1) errors.push_back("detuning sign must be +1 or -1");
  }
  if (!errors.empty()) throw ConfigError(std::move(errors));
}

double SystemModel::swept_frequency(double detuning) const {
  return atoms.at(axis.reference_atom).omega0 + axis.sign * detuning;
}

std::vector<double> SystemModel::base_frequencies() const {
  std::vector<double> f;
  f.reserve(atoms.size());
  for (const auto& a : atoms) f.push_back(a.omega0);
  return f;
}

std::vector<double> SystemModel::frequencies_at(double detuning) const {
  auto f = base_frequencies();
  if (!f.empty()) f.at(axis.swept_atom) = swept_frequency(detuning);
  return f;
}

HamiltonianMatrix SystemModel::hamiltonian_at(double detuning, bool include_vacuum) const {
  const auto f = frequencies_at(detuning);
  return build_hamiltonian(lattice, atoms, f, layout(include_vacuum));
}

}  // namespace giantssh
