#include "giantssh/protocols.hpp"

#include "giantssh/error.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

namespace giantssh {

void Scenario::validate() const {
  std::vector<std::string> errors;
  auto collect = [&errors](auto&& check) {
    try {
      check();
    } catch (const ConfigError& e) {
      errors.insert(errors.end(), e.messages().begin(), e.messages().end());
    }
  };
  collect([&] { model.validate(); });

  const int atoms = static_cast<int>(model.atoms.size());
  const Interval gap = model.edges().gap;
  auto in_gap = [&](double w, const std::string& what) {
    if (!gap.contains(w)) {
      errors.push_back(fmt::format("{} frequency {:.6g} lies outside the band gap ({:.6g}, {:.6g})", what, w,
                                   gap.lo, gap.hi));
    }
  };
  auto atom_exists = [&](int a, const std::string& what) {
    if (a < 0 || a >= atoms) {
      errors.push_back(fmt::format("{} names atom {}, but there are {} atoms", what, a + 1, atoms));
      return false;
    }
    return true;
  };

  if (sweep) {
    if (!(sweep->to > sweep->from)) errors.push_back("sweep.to must exceed sweep.from");
    if (!(sweep->spacing > 0.0)) errors.push_back("sweep.spacing must be positive");
    if (!(sweep->gap_threshold > 0.0)) errors.push_back("sweep.gap_threshold must be positive");
  }
  if (prepare) {
    if (!(prepare->xi > 0.0)) errors.push_back("prepare.xi must be positive");
    if (prepare->max_time && !(*prepare->max_time > 0.0)) errors.push_back("prepare.max_time must be positive");
    atom_exists(prepare->target_atom, "prepare.target_atom");
  }
  if (transfer) {
    if (!(transfer->duration > 0.0)) errors.push_back("transfer.duration must be positive");
    atom_exists(transfer->target_atom, "transfer.target_atom");
  }
  if (!(solver.dt > 0.0)) errors.push_back("solver.dt must be positive");
  if (solver.stride < 1) errors.push_back("solver.stride must be at least 1");
  if (!(solver.oracle_dt > 0.0)) errors.push_back("solver.oracle_dt must be positive");
  if (solver.margin < 0.0) errors.push_back("solver.margin must be non-negative");

  if (errors.empty() && atoms > 0) {
    for (int i = 0; i < atoms; ++i) {
      if (i != model.axis.swept_atom) in_gap(model.atoms[i].omega0, fmt::format("atom {}", i + 1));
    }
    const std::string swept = fmt::format("swept atom {}", model.axis.swept_atom + 1);
    in_gap(model.swept_frequency(detuning), swept);
    if (transfer) in_gap(model.swept_frequency(ramp_end()), swept + " at the end of the ramp");
  }
  if (!errors.empty()) throw ConfigError(std::move(errors));
}

GapStateChoice gap_state_at(const SystemModel& model, double detuning, int atom,
                            const ShapeThresholds& thresholds, double margin) {
  EigenSystem es = eigendecompose(model.hamiltonian_at(detuning));
  classify(es, model.edges(), margin);
  std::optional<GapStateChoice> best;
  for (int i : es.indices_of(StateClass::Gap)) {
    auto psi = es.state(i);
    const auto shape = shape_classify(photon_distribution(psi), model.atoms, thresholds);
    if (shape.dominant_atom != atom) continue;
    if (!best || shape.footprint_probability > best->shape.footprint_probability) {
      best = GapStateChoice{i, es.energies[i], std::move(psi), shape};
    }
  }
  if (!best) {
    throw ConfigError(fmt::format("no gap state is localized at atom {} for detuning {:.6g}", atom + 1, detuning));
  }
  return *best;
}

namespace {

Schedule ramp_schedule(const SystemModel& model, double start, double change, double duration) {
  Schedule s;
  s.total_time = duration;
  const auto f = model.frequencies_at(start);
  for (double w : f) s.frequencies.push_back(LinearRamp::constant(w));
  if (!f.empty()) {
    s.frequencies[model.axis.swept_atom].slope = model.axis.sign * change / duration;
  }
  return s;
}

// Diabatic slope difference from the hyperbola sep^2 = gap^2 + (s (x - x*))^2,
// sampled a few grid points away from the minimum.
double diabatic_slope(const SweepResult& sr, const CrossingReport& c) {
  double sum = 0.0;
  int count = 0;
  for (int p : {c.left_point - 2, c.right_point + 2}) {
    p = std::clamp(p, 0, sr.points() - 1);
    const double dx = std::abs(sr.grid[p] - c.detuning_star);
    if (dx <= 0.0) continue;
    const double sep = std::abs(sr.energy(p, c.branch_a) - sr.energy(p, c.branch_b));
    sum += std::sqrt(std::max(0.0, sep * sep - c.min_separation * c.min_separation)) / dx;
    ++count;
  }
  return count ? sum / count : 0.0;
}

// The one-excitation block of psi, vacuum amplitude discarded.
StateVector excitation_part(const StateVector& psi) {
  if (!psi.layout().has_vacuum()) return psi;
  ComplexVector a = psi.amplitudes();
  a[psi.layout().vacuum_index()] = 0.0;
  return StateVector(psi.layout(), std::move(a)).embedded(psi.layout().with_vacuum(false));
}

int best_branch(const SweepResult& sr, int point, const StateVector& ref) {
  int best = 0;
  double f = -1.0;
  for (int b = 0; b < sr.branch_count(); ++b) {
    const double v = fidelity(sr.state(point, b), ref);
    if (v > f) {
      f = v;
      best = b;
    }
  }
  return best;
}

}  // namespace

double landau_zener_duration(double min_separation, double slope, double change, double miss) {
  if (!(min_separation > 0.0)) return std::numeric_limits<double>::infinity();
  return 2.0 * std::abs(slope) * std::abs(change) * std::log(1.0 / miss) /
         (std::numbers::pi * min_separation * min_separation);
}

double band_leakage(const SystemModel& model, double detuning, const StateVector& psi, double margin) {
  EigenSystem es = eigendecompose(model.hamiltonian_at(detuning));
  classify(es, model.edges(), margin);
  const StateVector bare = excitation_part(psi);
  double in_gap = 0.0;
  for (int i : es.indices_of(StateClass::Gap)) in_gap += std::norm(es.state(i).inner(bare));
  return std::max(0.0, bare.amplitudes().squaredNorm() - in_gap);
}

PreparationResult prepare_initial_state(const Scenario& scenario) {
  scenario.validate();
  if (!scenario.prepare) throw ConfigError("scenario has no preparation block");
  const auto& spec = *scenario.prepare;
  const auto& model = scenario.model;

  const auto choice = gap_state_at(model, scenario.detuning, spec.target_atom, scenario.shape,
                                   scenario.solver.margin);
  const BasisLayout layout = model.layout(true);
  PreparationResult out;
  out.target = choice.state.embedded(layout);
  out.target_energy = choice.energy;
  out.atom_amplitude = std::abs(out.target.amplitudes()[layout.atom_index(spec.target_atom)]);
  out.rabi_estimate = std::numbers::pi / (2.0 * spec.xi * out.atom_amplitude);

  const double window = spec.max_time.value_or(2.0 * std::numbers::pi / spec.xi);
  Schedule schedule = ramp_schedule(model, scenario.detuning, 0.0, window);
  schedule.drive = Drive{spec.target_atom, spec.xi, choice.energy, window};

  double peak = -1.0;
  double t_peak = 0.0;
  StateVector at_peak = StateVector::vacuum(layout);
  PropagateOptions opts;
  opts.dt = scenario.solver.dt;
  opts.stride = scenario.solver.stride;
  opts.target_reference = out.target;
  opts.stop_when = [&](double t, const StateVector& psi) {
    const double f = fidelity(out.target, psi);
    if (f > peak) {
      peak = f;
      t_peak = t;
      at_peak = psi;
    }
    return peak >= 0.5 && f < peak - spec.drop;
  };
  out.trajectory = propagate(StateVector::vacuum(layout), model, schedule, opts);
  out.state = std::move(at_peak);
  out.t_peak = t_peak;
  out.peak_fidelity = peak;
  if (peak < spec.min_peak) {
    throw PreparationError(
        fmt::format("driven preparation peaked at fidelity {:.4f} (t={:.4g}), below {:.2f}; check the drive "
                    "strength and resonance (estimated Rabi time {:.4g})",
                    peak, t_peak, spec.min_peak, out.rabi_estimate),
        peak, t_peak);
  }
  return out;
}

TransferResult run_transfer(const Scenario& scenario, const StateVector& prepared) {
  scenario.validate();
  if (!scenario.transfer) throw ConfigError("scenario has no transfer block");
  const auto& spec = *scenario.transfer;
  const auto& model = scenario.model;
  const double start = scenario.detuning;
  const double end = scenario.ramp_end();
  const BasisLayout layout = model.layout(true);
  const StateVector psi0 = prepared.embedded(layout);

  const auto choice = gap_state_at(model, end, spec.target_atom, scenario.shape, scenario.solver.margin);
  TransferResult out;
  out.target = choice.state.embedded(layout);
  out.target_energy = choice.energy;

  const Schedule schedule = ramp_schedule(model, start, spec.change, spec.duration);
  PropagateOptions opts;
  opts.dt = scenario.solver.dt;
  opts.stride = scenario.solver.stride;
  opts.initial_reference = psi0;
  opts.target_reference = out.target;
  out.trajectory = propagate(psi0, model, schedule, opts);

  const auto& tr = out.trajectory;
  out.final_fidelity = tr.f_target.back();
  for (int k = 0; k < tr.samples(); ++k) {
    if (tr.f_target[k] < 0.5) continue;
    double t = tr.sample_times[k];
    if (k > 0) {
      const double f0 = tr.f_target[k - 1], f1 = tr.f_target[k];
      const double t0 = tr.sample_times[k - 1];
      t = t0 + (0.5 - f0) / (f1 - f0) * (t - t0);
    }
    out.jump_time = t;
    out.jump_detuning = start + spec.change * t / spec.duration;
    break;
  }
  out.shape_before = shape_classify(photon_distribution(tr.states.front()), model.atoms, scenario.shape);
  out.shape_after = shape_classify(photon_distribution(tr.states.back()), model.atoms, scenario.shape);

  for (int k = 0; k < tr.samples(); ++k) {
    const double x = start + spec.change * tr.sample_times[k] / spec.duration;
    out.max_band_leakage =
        std::max(out.max_band_leakage, band_leakage(model, x, tr.states[k], scenario.solver.margin));
  }

  if (spec.change != 0.0) {
    const SweepSpec sw = scenario.sweep.value_or(SweepSpec{});
    const auto grid = uniform_grid(std::min(start, end), std::max(start, end), sw.spacing);
    const SweepResult sr = sweep_spectrum(model, grid, scenario.solver.margin);
    out.crossings = find_gap_crossings(sr, sw.gap_threshold);

    const int first = spec.change > 0 ? 0 : sr.points() - 1;
    const int last = sr.points() - 1 - first;
    const int from = best_branch(sr, first, excitation_part(psi0));
    const int to = best_branch(sr, last, choice.state);
    for (const auto& c : out.crossings) {
      const bool involves_from = c.branch_a == from || c.branch_b == from;
      const bool joins = (c.branch_a == from && c.branch_b == to) || (c.branch_a == to && c.branch_b == from);
      if (joins || (from == to && involves_from &&
                    (!out.relevant_crossing || c.min_separation < out.relevant_crossing->min_separation))) {
        out.relevant_crossing = c;
        if (joins) break;
      }
    }
    if (out.final_fidelity < 0.9 && out.relevant_crossing) {
      const double slope = diabatic_slope(sr, *out.relevant_crossing);
      out.suggested_duration = landau_zener_duration(out.relevant_crossing->min_separation, slope, spec.change);
    }
  }
  if (out.final_fidelity < 0.9) {
    std::string msg = fmt::format("final target fidelity {:.4f} is below 0.9; the ramp was not adiabatic",
                                  out.final_fidelity);
    if (out.relevant_crossing) {
      msg += fmt::format(" (crossing at detuning {:.5g}, minimum separation {:.3e})",
                         out.relevant_crossing->detuning_star, out.relevant_crossing->min_separation);
    }
    if (out.suggested_duration) msg += fmt::format("; try a duration of at least {:.4g}", *out.suggested_duration);
    out.diagnostic = std::move(msg);
  }
  return out;
}

TransferResult two_atom_transfer(const Scenario& scenario, const StateVector& prepared) {
  if (scenario.model.atoms.size() != 2) throw ConfigError("two-atom transfer needs exactly two atoms");
  return run_transfer(scenario, prepared);
}

TransferResult three_atom_transfer(const Scenario& scenario, const StateVector& prepared) {
  if (scenario.model.atoms.size() != 3) throw ConfigError("three-atom transfer needs exactly three atoms");
  return run_transfer(scenario, prepared);
}

}  // namespace giantssh
