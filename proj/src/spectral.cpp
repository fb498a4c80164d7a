#include "giantssh/spectral.hpp"

#include "giantssh/eigensolver.hpp"
#include "giantssh/error.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>

namespace giantssh {

StateVector::StateVector(BasisLayout layout, ComplexVector amplitudes)
    : layout_(layout), amplitudes_(std::move(amplitudes)) {
  if (amplitudes_.size() != layout_.dim()) {
    throw ConfigError(fmt::format("state has {} amplitudes, layout needs {}", amplitudes_.size(),
                                  layout_.dim()));
  }
}

StateVector StateVector::vacuum(const BasisLayout& layout) {
  return basis(layout, layout.vacuum_index());
}

StateVector StateVector::basis(const BasisLayout& layout, int index) {
  ComplexVector v = ComplexVector::Zero(layout.dim());
  v[index] = 1.0;
  return {layout, std::move(v)};
}

std::complex<double> StateVector::inner(const StateVector& other) const {
  if (!(layout_ == other.layout_)) throw ConfigError("inner product between different basis layouts");
  return amplitudes_.dot(other.amplitudes_);  // conjugates the left operand
}

StateVector StateVector::embedded(const BasisLayout& target) const {
  if (target.atoms() != layout_.atoms() || target.cells() != layout_.cells()) {
    throw ConfigError("cannot embed a state into a layout of a different system");
  }
  if (target == layout_) return *this;
  ComplexVector out = ComplexVector::Zero(target.dim());
  if (layout_.has_vacuum()) {
    const auto vac = amplitudes_[layout_.vacuum_index()];
    if (!target.has_vacuum()) {
      if (std::abs(vac) > 1e-14) throw ConfigError("state has a vacuum component the target layout lacks");
    } else {
      out[target.vacuum_index()] = vac;
    }
  }
  const int n = layout_.atoms() + layout_.site_count();
  out.segment(target.has_vacuum() ? 1 : 0, n) = amplitudes_.segment(layout_.has_vacuum() ? 1 : 0, n);
  return {target, std::move(out)};
}

std::string_view to_string(StateClass c) {
  switch (c) {
    case StateClass::LowerBound: return "LOWER_BOUND";
    case StateClass::LowerBand: return "LOWER_BAND";
    case StateClass::Gap: return "GAP";
    case StateClass::UpperBand: return "UPPER_BAND";
    case StateClass::UpperBound: return "UPPER_BOUND";
  }
  return "?";
}

StateVector EigenSystem::state(int i) const { return {layout, vectors.col(i)}; }

std::vector<int> EigenSystem::indices_of(StateClass c) const {
  std::vector<int> out;
  for (int i = 0; i < static_cast<int>(labels.size()); ++i)
    if (labels[i].kind == c) out.push_back(i);
  return out;
}

EigenSystem eigendecompose(const HamiltonianMatrix& h, double relative_tolerance) {
  if (h.layout.has_vacuum()) {
    throw ConfigError("eigendecompose works on the one-excitation block; drop the vacuum from the layout");
  }
  const double scale = std::max(h.entries.cwiseAbs().maxCoeff(), 1e-300);
  const double asym = h.max_asymmetry();
  if (asym > relative_tolerance * scale) {
    throw NumericalError(fmt::format("matrix is not Hermitian (asymmetry {:.3e})", asym));
  }
  EigenSystem es{h.layout, {}, {}, {}};
  if (h.is_real()) {
    auto r = linalg::symmetric_eigen(h.entries.real());
    es.energies = std::move(r.values);
    es.vectors = r.vectors.cast<std::complex<double>>();
  } else {
    auto c = linalg::hermitian_eigen(h.entries);
    es.energies = std::move(c.values);
    es.vectors = std::move(c.vectors);
  }
  return es;
}

std::vector<StateLabel> classify(std::span<const double> energies, const BandEdges& edges,
                                 double margin) {
  if (margin < 0) throw ConfigError("classification margin must be non-negative");
  std::vector<StateLabel> out;
  out.reserve(energies.size());
  const double edge_points[] = {edges.lower_band.lo, edges.lower_band.hi, edges.upper_band.lo,
                                edges.upper_band.hi};
  for (double e : energies) {
    StateLabel lab;
    if (e > edges.upper_band.hi + margin) {
      lab.kind = StateClass::UpperBound;
    } else if (e < edges.lower_band.lo - margin) {
      lab.kind = StateClass::LowerBound;
    } else if (!edges.gap.empty() && e > edges.gap.lo + margin && e < edges.gap.hi - margin) {
      lab.kind = StateClass::Gap;
    } else {
      const double centre = 0.5 * (edges.gap.lo + edges.gap.hi);
      lab.kind = e < centre ? StateClass::LowerBand : StateClass::UpperBand;
      for (double x : edge_points) lab.ambiguous = lab.ambiguous || std::abs(e - x) <= margin;
    }
    out.push_back(lab);
  }
  return out;
}

EigenSystem& classify(EigenSystem& es, const BandEdges& edges, double margin) {
  es.labels = classify(std::span<const double>(es.energies.data(), es.energies.size()), edges, margin);
  return es;
}

double PhotonDistribution::photonic_total() const {
  double s = 0.0;
  for (double p : sites) s += p;
  return s;
}

double PhotonDistribution::total() const {
  double s = photonic_total() + vacuum;
  for (double p : atoms) s += p;
  return s;
}

PhotonDistribution photon_distribution(const StateVector& psi) {
  const auto& layout = psi.layout();
  const auto& a = psi.amplitudes();
  PhotonDistribution d;
  if (layout.has_vacuum()) d.vacuum = std::norm(a[layout.vacuum_index()]);
  d.atoms.reserve(layout.atoms());
  for (int i = 0; i < layout.atoms(); ++i) d.atoms.push_back(std::norm(a[layout.atom_index(i)]));
  d.sites.reserve(layout.site_count());
  for (int s = 0; s < layout.site_count(); ++s) d.sites.push_back(std::norm(a[layout.first_site() + s]));
  return d;
}

double fidelity(const StateVector& a, const StateVector& b) {
  if (!(a.layout() == b.layout())) throw ConfigError("fidelity between states of different basis layouts");
  return std::norm(a.inner(b));
}

std::string_view to_string(Shape s) {
  switch (s) {
    case Shape::Splitting: return "SPLITTING";
    case Shape::Combining: return "COMBINING";
    case Shape::Delocalized: return "DELOCALIZED";
  }
  return "?";
}

std::vector<int> footprint_window(const AtomSpec& atom, int cells, int pad_cells) {
  const int lo = std::min(atom.n, atom.m) - pad_cells;
  const int hi = std::max(atom.n, atom.m) + pad_cells;
  std::vector<int> window;
  for (int c = lo; c <= hi && static_cast<int>(window.size()) < cells; ++c) {
    window.push_back(((c % cells) + cells) % cells);
  }
  return window;
}

ShapeReport shape_classify(const PhotonDistribution& dist, std::span<const AtomSpec> atoms,
                           const ShapeThresholds& thresholds) {
  ShapeReport report;
  const int n_sites = static_cast<int>(dist.sites.size());
  const int cells = n_sites / 2;
  const double photonic = dist.photonic_total();
  if (atoms.empty() || cells == 0 || photonic <= 0.0) return report;

  std::vector<std::vector<int>> windows;
  double best_mass = -1.0;
  for (std::size_t i = 0; i < atoms.size(); ++i) {
    windows.push_back(footprint_window(atoms[i], cells, thresholds.pad_cells));
    double mass = 0.0;
    for (int c : windows.back()) mass += dist.cell_probability(c);
    if (mass > best_mass) {
      best_mass = mass;
      report.dominant_atom = static_cast<int>(i);
    }
  }
  report.footprint_probability = std::clamp(best_mass / photonic, 0.0, 1.0);

  // Site profile across the dominant window, in ring order.
  std::vector<int> sites;
  for (int c : windows[*report.dominant_atom]) {
    sites.push_back(2 * c);
    sites.push_back(2 * c + 1);
  }
  const double global_max = *std::max_element(dist.sites.begin(), dist.sites.end());
  const double floor = thresholds.prominence * global_max;
  auto p = [&](int s) { return dist.sites[((s % n_sites) + n_sites) % n_sites]; };

  std::vector<int> maxima;  // positions within `sites`
  for (int k = 0; k < static_cast<int>(sites.size()); ++k) {
    const int s = sites[k];
    if (p(s) > floor && p(s) > p(s - 1) && p(s) >= p(s + 1)) maxima.push_back(k);
  }

  // Merge neighbouring maxima that are not separated by a deep enough valley.
  std::vector<double> lobes;
  int last = -1;
  for (int k : maxima) {
    const double peak = p(sites[k]);
    if (last >= 0) {
      double valley = peak;
      for (int j = last; j <= k; ++j) valley = std::min(valley, p(sites[j]));
      if (valley >= thresholds.dip * std::min(lobes.back(), peak)) {
        lobes.back() = std::max(lobes.back(), peak);
        last = k;
        continue;
      }
    }
    lobes.push_back(peak);
    last = k;
  }
  report.peak_count = static_cast<int>(lobes.size());

  if (report.footprint_probability < thresholds.footprint_mass || lobes.empty()) {
    report.shape = Shape::Delocalized;
  } else {
    report.shape = lobes.size() >= 2 ? Shape::Splitting : Shape::Combining;
  }
  return report;
}

}  // namespace giantssh
