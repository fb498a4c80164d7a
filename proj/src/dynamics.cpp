#include "giantssh/dynamics.hpp"

#include "giantssh/eigensolver.hpp"
#include "giantssh/error.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <complex>

namespace giantssh {

using cd = std::complex<double>;

Schedule Schedule::constant(const SystemModel& model, double total_time) {
  Schedule s;
  s.total_time = total_time;
  for (const auto& a : model.atoms) s.frequencies.push_back(LinearRamp::constant(a.omega0));
  return s;
}

std::vector<double> Schedule::frequencies_at(double t) const {
  std::vector<double> f;
  f.reserve(frequencies.size());
  for (const auto& r : frequencies) f.push_back(r.at(t));
  return f;
}

std::vector<double> Schedule::breakpoints() const {
  std::vector<double> out;
  if (drive && drive->window_end > 0.0 && drive->window_end < total_time) out.push_back(drive->window_end);
  return out;
}

void Schedule::validate(const SystemModel& model) const {
  std::vector<std::string> errors;
  if (!(total_time > 0.0) || !std::isfinite(total_time)) {
    errors.push_back(fmt::format("total time must be positive and finite, got {}", total_time));
  }
  if (frequencies.size() != model.atoms.size()) {
    errors.push_back(fmt::format("schedule has {} frequency ramps for {} atoms", frequencies.size(),
                                 model.atoms.size()));
  } else {
    const Interval gap = model.edges().gap;
    for (std::size_t i = 0; i < frequencies.size(); ++i) {
      for (double t : {0.0, total_time}) {
        const double w = frequencies[i].at(t);
        if (!gap.contains(w)) {
          errors.push_back(fmt::format("atom {} frequency {:.6g} at t={:.6g} lies outside the band gap ({:.6g}, {:.6g})",
                                       i + 1, w, t, gap.lo, gap.hi));
        }
      }
    }
  }
  if (drive) {
    if (drive->atom < 0 || drive->atom >= static_cast<int>(model.atoms.size())) {
      errors.push_back(fmt::format("drive targets missing atom {}", drive->atom + 1));
    }
    if (drive->window_end < 0.0 || drive->window_end > total_time) {
      errors.push_back(fmt::format("drive window end {} outside [0, {}]", drive->window_end, total_time));
    }
  }
  if (!errors.empty()) throw ConfigError(std::move(errors));
}

namespace {

void require_drive_layout(const Schedule& schedule, const BasisLayout& layout) {
  if (schedule.drive && !layout.has_vacuum()) {
    throw ConfigError("a drive couples |G,vac> to an atom; the basis must include the vacuum");
  }
}

HamiltonianMatrix generator_with(const SystemModel& model, const Schedule& schedule, double t,
                                 bool drive_on, const BasisLayout& layout) {
  require_drive_layout(schedule, layout);
  const auto f = schedule.frequencies_at(t);
  HamiltonianMatrix h = build_hamiltonian(model.lattice, model.atoms, f, layout);
  if (schedule.drive && drive_on) {
    const auto& d = *schedule.drive;
    const cd v = d.strength * std::exp(cd(0.0, -d.frequency * t));
    const int e = layout.atom_index(d.atom);
    const int g = layout.vacuum_index();
    h.entries(e, g) = v;
    h.entries(g, e) = std::conj(v);
  }
  return h;
}

// Sparse action of -i H(t) used inside the RK4 loop.
class Generator {
 public:
  Generator(const SystemModel& model, const Schedule& schedule, const BasisLayout& layout)
      : schedule_(schedule), layout_(layout) {
    require_drive_layout(schedule, layout);
    const std::vector<double> zero(model.atoms.size(), 0.0);
    const auto h = build_hamiltonian(model.lattice, model.atoms, zero, layout);
    for (int r = 0; r < h.dim(); ++r) {
      for (int c = 0; c < h.dim(); ++c) {
        const double v = h.entries(r, c).real();
        if (v != 0.0) entries_.push_back({r, c, v});
      }
    }
    for (int i = 0; i < layout.atoms(); ++i) atom_rows_.push_back(layout.atom_index(i));
    if (schedule.drive) {
      drive_row_ = layout.atom_index(schedule.drive->atom);
      vacuum_row_ = layout.vacuum_index();
    }
  }

  void apply(double t, bool drive_on, const ComplexVector& x, ComplexVector& y) const {
    y.setZero();
    for (const auto& e : entries_) y[e.row] += e.value * x[e.col];
    for (std::size_t i = 0; i < atom_rows_.size(); ++i) {
      y[atom_rows_[i]] += schedule_.frequencies[i].at(t) * x[atom_rows_[i]];
    }
    if (drive_on) {
      const auto& d = *schedule_.drive;
      const cd v = d.strength * std::exp(cd(0.0, -d.frequency * t));
      y[drive_row_] += v * x[vacuum_row_];
      y[vacuum_row_] += std::conj(v) * x[drive_row_];
    }
    y *= cd(0.0, -1.0);
  }

 private:
  struct Entry {
    int row;
    int col;
    double value;
  };
  const Schedule& schedule_;
  BasisLayout layout_;
  std::vector<Entry> entries_;
  std::vector<int> atom_rows_;
  int drive_row_ = -1;
  int vacuum_row_ = -1;
};

// [0, total_time] cut at the breakpoints.
std::vector<std::pair<double, double>> intervals(const Schedule& schedule) {
  std::vector<double> cuts{0.0};
  for (double b : schedule.breakpoints()) cuts.push_back(b);
  cuts.push_back(schedule.total_time);
  std::vector<std::pair<double, double>> out;
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
    if (cuts[i + 1] > cuts[i]) out.emplace_back(cuts[i], cuts[i + 1]);
  }
  return out;
}

int steps_for(double length, double dt) {
  return std::max(1, static_cast<int>(std::ceil(length / dt - 1e-9)));
}

void check_normalized(const StateVector& psi) {
  if (std::abs(psi.norm() - 1.0) > 1e-6) {
    throw ConfigError(fmt::format("initial state is not normalized (norm {:.10g})", psi.norm()));
  }
}

}  // namespace

HamiltonianMatrix generator_at(const SystemModel& model, const Schedule& schedule, double t,
                               const BasisLayout& layout) {
  return generator_with(model, schedule, t, schedule.drive_active(t), layout);
}

TrajectoryRecord propagate(const StateVector& psi0, const SystemModel& model,
                           const Schedule& schedule, const PropagateOptions& options) {
  model.validate();
  schedule.validate(model);
  check_normalized(psi0);
  if (!(options.dt > 0.0)) throw ConfigError("time step must be positive");
  if (options.stride < 1) throw ConfigError("sampling stride must be at least 1");

  const BasisLayout& layout = psi0.layout();
  const Generator gen(model, schedule, layout);
  const StateVector init_ref = options.initial_reference ? options.initial_reference->embedded(layout) : psi0;
  std::optional<StateVector> target_ref;
  if (options.target_reference) target_ref = options.target_reference->embedded(layout);

  TrajectoryRecord rec;
  rec.layout = layout;
  auto record = [&](double t, const StateVector& psi) {
    const double n = psi.norm();
    if (std::abs(n - 1.0) > options.drift_limit) {
      throw NumericalError(fmt::format(
          "norm drifted to {:.12g} at t={:.6g}; reduce the time step (dt={})", n, t, options.dt));
    }
    const auto dist = photon_distribution(psi);
    double atoms = 0.0;
    for (double p : dist.atoms) atoms += p;
    rec.sample_times.push_back(t);
    rec.states.push_back(psi);
    rec.norms.push_back(n);
    rec.f_init.push_back(fidelity(init_ref, psi));
    if (target_ref) rec.f_target.push_back(fidelity(*target_ref, psi));
    rec.p_atoms.push_back(atoms);
    rec.p_vacuum.push_back(dist.vacuum);
    rec.site_frames.push_back(dist.sites);
    rec.schedule_trace.push_back(schedule.frequencies_at(t));
  };

  StateVector psi = psi0;
  ComplexVector& x = psi.amplitudes();
  const int n = layout.dim();
  ComplexVector k1(n), k2(n), k3(n), k4(n), tmp(n);
  record(0.0, psi);

  long long step = 0;
  for (const auto& [a, b] : intervals(schedule)) {
    const bool drive_on = schedule.drive_active(0.5 * (a + b));
    const int steps = steps_for(b - a, options.dt);
    const double h = (b - a) / steps;
    for (int s = 0; s < steps; ++s) {
      const double t = a + s * h;
      gen.apply(t, drive_on, x, k1);
      tmp = x + (0.5 * h) * k1;
      gen.apply(t + 0.5 * h, drive_on, tmp, k2);
      tmp = x + (0.5 * h) * k2;
      gen.apply(t + 0.5 * h, drive_on, tmp, k3);
      tmp = x + h * k3;
      gen.apply(t + h, drive_on, tmp, k4);
      x += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
      ++step;

      const double t_next = s + 1 == steps ? b : a + (s + 1) * h;
      const bool last = t_next >= schedule.total_time;
      if (options.stop_when && options.stop_when(t_next, psi)) {
        rec.stopped_early = !last;
        record(t_next, psi);
        return rec;
      }
      if (last || step % options.stride == 0) record(t_next, psi);
    }
  }
  return rec;
}

StateVector oracle_propagate(const StateVector& psi0, const SystemModel& model,
                             const Schedule& schedule, double segment_dt) {
  model.validate();
  schedule.validate(model);
  check_normalized(psi0);
  if (!(segment_dt > 0.0)) throw ConfigError("segment length must be positive");
  const BasisLayout& layout = psi0.layout();

  ComplexVector x = psi0.amplitudes();
  for (const auto& [a, b] : intervals(schedule)) {
    const bool drive_on = schedule.drive_active(0.5 * (a + b));
    const int segments = steps_for(b - a, segment_dt);
    const double h = (b - a) / segments;
    for (int s = 0; s < segments; ++s) {
      const double mid = a + (s + 0.5) * h;
      const auto gen = generator_with(model, schedule, mid, drive_on, layout);
      if (gen.is_real()) {
        const auto r = linalg::symmetric_eigen(gen.entries.real());
        const ComplexVector phases = (r.values.cast<cd>() * cd(0.0, -h)).array().exp();
        const ComplexVector c = r.vectors.transpose() * x;
        x = r.vectors * phases.cwiseProduct(c);
      } else {
        const auto r = linalg::hermitian_eigen(gen.entries);
        const ComplexVector phases = (r.values.cast<cd>() * cd(0.0, -h)).array().exp();
        x = r.vectors * phases.cwiseProduct(r.vectors.adjoint() * x);
      }
    }
  }
  return {layout, std::move(x)};
}

}  // namespace giantssh
