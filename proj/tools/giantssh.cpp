// giantssh: spectra, sweeps and ramp protocols for giant atoms on an SSH ring.

#include "giantssh/config.hpp"
#include "giantssh/error.hpp"
#include "giantssh/export.hpp"

#include <CLI11.hpp>
#include <fmt/format.h>

#include <cmath>
#include <complex>
#include <filesystem>
#include <iostream>
#include <numbers>
#include <sstream>

using namespace giantssh;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

struct Options {
  std::string config;
  std::string figure;
  std::string out;
  std::optional<double> dt;
  std::optional<double> grid;
  bool plots = false;
  bool dump = false;
};

template <typename Writer, typename... Args>
void emit_csv(const fs::path& dir, const std::string& name, Writer writer, const Args&... args) {
  std::ostringstream os;
  writer(os, args...);
  write_file(dir, name, os.str());
}

void apply_overrides(Scenario& s, const Options& o) {
  if (o.dt) s.solver.dt = *o.dt;
  if (o.grid) {
    if (!s.sweep) throw ConfigError("--grid needs a sweep block in the scenario");
    s.sweep->spacing = *o.grid;
  }
  s.validate();
}

json gap_state_summary(const Scenario& s, double detuning) {
  EigenSystem es = eigendecompose(s.model.hamiltonian_at(detuning));
  classify(es, s.model.edges(), s.solver.margin);
  json states = json::array();
  for (int i : es.indices_of(StateClass::Gap)) {
    const auto dist = photon_distribution(es.state(i));
    json st = to_json(shape_classify(dist, s.model.atoms, s.shape));
    st["index"] = i;
    st["energy_q"] = es.energies[i] / s.model.lattice.q;
    double atoms = 0.0;
    for (double p : dist.atoms) atoms += p;
    st["atom_probability"] = atoms;
    states.push_back(st);
  }
  json counts = json::object();
  for (auto c : {StateClass::LowerBound, StateClass::LowerBand, StateClass::Gap, StateClass::UpperBand,
                 StateClass::UpperBound}) {
    counts[std::string(to_string(c))] = es.indices_of(c).size();
  }
  return {{"detuning_q", detuning / s.model.lattice.q}, {"counts", counts}, {"gap_states", states}};
}

json do_spectrum(const Scenario& s, const fs::path& out, bool plots) {
  const double q = s.model.lattice.q;
  EigenSystem es = eigendecompose(s.model.hamiltonian_at(s.detuning));
  classify(es, s.model.edges(), s.solver.margin);
  emit_csv(out, "spectrum.csv", write_spectrum_csv, es, q);
  if (plots) write_file(out, "plot_spectrum.py", plot_script(PlotKind::Spectrum));
  json j = gap_state_summary(s, s.detuning);
  json warnings = json::array();
  for (const auto& w : geometry_warnings(s.model.lattice, s.model.atoms)) warnings.push_back(w);
  j["warnings"] = warnings;
  return j;
}

json do_sweep(const Scenario& s, const fs::path& out, bool plots) {
  if (!s.sweep) throw ConfigError("scenario has no sweep block");
  const double q = s.model.lattice.q;
  const auto grid = uniform_grid(s.sweep->from, s.sweep->to, s.sweep->spacing);
  const auto sr = sweep_spectrum(s.model, grid, s.solver.margin);
  const auto crossings = find_gap_crossings(sr, s.sweep->gap_threshold);
  emit_csv(out, "sweep.csv", write_sweep_csv, sr, q);
  emit_csv(out, "crossings.csv", write_crossings_csv, std::span<const CrossingReport>(crossings), q);
  if (plots) write_file(out, "plot_sweep.py", plot_script(PlotKind::Sweep));
  json cj = json::array();
  for (const auto& c : crossings) cj.push_back(to_json(c, q));
  json warnings = json::array();
  for (int p = 0; p < sr.points(); ++p)
    for (const auto& w : sr.warnings[p]) warnings.push_back(fmt::format("detuning {:.6g}: {}", sr.grid[p], w));
  json gap = json::array();
  for (int b : sr.gap_branches()) gap.push_back(b);
  return {{"points", sr.points()}, {"gap_branches", gap}, {"crossings", cj}, {"warnings", warnings}};
}

void write_trajectory(const TrajectoryRecord& tr, const fs::path& out, const std::string& prefix, double q,
                      bool plots) {
  emit_csv(out, prefix + "fidelity.csv", write_fidelity_csv, tr, q);
  emit_csv(out, prefix + "frames.csv", write_frames_csv, tr, q);
  emit_csv(out, prefix + "schedule.csv", write_schedule_csv, tr, q);
  if (plots) write_file(out, "plot_" + prefix + "trajectory.py", plot_script(PlotKind::Trajectory, prefix));
}

PreparationResult do_prepare(const Scenario& s, const fs::path& out, const std::string& prefix, bool plots,
                             json& summary) {
  auto prep = prepare_initial_state(s);
  write_trajectory(prep.trajectory, out, prefix, s.model.lattice.q, plots);
  summary["preparation"] = to_json(prep, s.model.lattice.q);
  return prep;
}

void do_transfer(const Scenario& s, const fs::path& out, bool plots, json& summary) {
  const auto prep = do_prepare(s, out, "preparation_", plots, summary);
  const auto tr = run_transfer(s, prep.state);
  write_trajectory(tr.trajectory, out, "", s.model.lattice.q, plots);
  summary["transfer"] = to_json(tr, s.model.lattice.q);
}

void finish(const Scenario& s, const fs::path& out, json summary) {
  write_file(out, "config.txt", render_scenario(s));
  summary["scenario"] = s.name;
  write_file(out, "summary.json", summary.dump(2) + "\n");
  std::cout << summary.dump(2) << "\n";
}

void reproduce(const Options& o) {
  Scenario s = preset(o.figure);
  if (o.dump) {
    std::cout << render_scenario(s);
    return;
  }
  apply_overrides(s, o);
  const fs::path out = o.out.empty() ? fs::path("out") / s.name : fs::path(o.out);
  json summary;
  summary["spectrum"] = do_spectrum(s, out, o.plots);
  summary["sweep"] = do_sweep(s, out, o.plots);
  if (o.figure == "fig2") {
    const auto p = probe_pair(s.model, 0.65, 0.75, s.solver.margin);
    summary["crossing_fidelities"] = {{"F1_lower_right_vs_lower_left", p.lower_to_lower},
                                      {"F2_upper_right_vs_lower_left", p.upper_to_lower}};
    summary["shapes"] = {{"lower_left", to_json(shape_classify(photon_distribution(p.lower_left), s.model.atoms, s.shape))},
                         {"lower_right", to_json(shape_classify(photon_distribution(p.lower_right), s.model.atoms, s.shape))}};
  } else if (o.figure == "fig4") {
    const auto b = probe_swept_branch(s.model, -0.02, 0.05, 0.1, s.sweep->spacing, s.solver.margin);
    summary["crossing_fidelities"] = {{"swept_branch", b.swept_branch},
                                      {"F1", b.same_12},
                                      {"F2", b.other_12},
                                      {"F3", b.same_23},
                                      {"F4", b.other_23}};
  } else {
    do_transfer(s, out, o.plots, summary);
  }
  finish(s, out, summary);
}

int selftest() {
  int failures = 0;
  auto check = [&](const std::string& name, bool ok, const std::string& detail) {
    std::cout << (ok ? "PASS " : "FAIL ") << name << "  " << detail << "\n";
    if (!ok) ++failures;
  };

  const Scenario fig2 = preset("fig2");
  const auto h = fig2.model.hamiltonian_at(fig2.detuning);
  check("hermitian", h.max_asymmetry() <= 1e-12, fmt::format("asymmetry {:.2e}", h.max_asymmetry()));

  EigenSystem es = eigendecompose(h);
  double residual = 0.0;
  for (int i = 0; i < es.size(); ++i) {
    residual = std::max(residual, (h.entries * es.vectors.col(i) - es.energies[i] * es.vectors.col(i)).norm());
  }
  check("eigen residual", residual <= 1e-9, fmt::format("max residual {:.2e}", residual));

  const auto a = es.state(0), b = es.state(es.size() / 2);
  auto rotated = a;
  rotated.amplitudes() *= std::polar(1.0, 0.7);
  const ComplexVector mix = (a.amplitudes() + b.amplitudes()) / std::sqrt(2.0);
  const StateVector m(a.layout(), mix);
  check("phase invariance", std::abs(fidelity(m, rotated) - fidelity(m, a)) <= 1e-14,
        fmt::format("{:.3e}", std::abs(fidelity(m, rotated) - fidelity(m, a))));

  SystemModel shifted = fig2.model;
  for (auto& at : shifted.atoms) {
    at.n = (at.n + 17) % shifted.lattice.cells;
    at.m = (at.m + 17) % shifted.lattice.cells;
  }
  const auto es2 = eigendecompose(shifted.hamiltonian_at(fig2.detuning));
  check("translation iso-spectral", (es.energies - es2.energies).cwiseAbs().maxCoeff() <= 1e-10,
        fmt::format("max diff {:.2e}", (es.energies - es2.energies).cwiseAbs().maxCoeff()));

  Scenario fig3 = preset("fig3");
  Schedule ramp;
  ramp.total_time = 200.0;
  ramp.frequencies = {LinearRamp::constant(0.4), LinearRamp::between(-0.2, -0.3, 200.0)};
  const auto psi0 = StateVector::basis(fig3.model.layout(false), fig3.model.layout(false).site_index(1, Sublattice::A));
  PropagateOptions opts;
  opts.dt = 0.005;
  const auto tr = propagate(psi0, fig3.model, ramp, opts);
  const auto oracle = oracle_propagate(psi0, fig3.model, ramp, 0.005);
  const double f = fidelity(tr.final_state(), oracle);
  check("oracle equivalence", f >= 1.0 - 1e-6, fmt::format("1 - F = {:.2e}", 1.0 - f));
  double drift = 0.0;
  for (double n : tr.norms) drift = std::max(drift, std::abs(n - 1.0));
  check("norm conservation", drift <= 1e-8, fmt::format("max drift {:.2e}", drift));

  std::cout << (failures ? fmt::format("{} check(s) failed\n", failures) : "all checks passed\n");
  return failures ? 1 : 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Giant atoms on a periodic SSH lattice: spectra, crossings and adiabatic transfer"};
  app.require_subcommand(1);
  Options o;

  auto common = [&o](CLI::App* sub) {
    sub->add_option("--out", o.out, "Output directory");
    sub->add_option("--dt", o.dt, "RK4 step in units of 1/q")->check(CLI::PositiveNumber);
    sub->add_option("--grid", o.grid, "Sweep grid spacing in units of q")->check(CLI::PositiveNumber);
    sub->add_flag("--emit-plots", o.plots, "Write matplotlib scripts next to the CSVs");
  };
  auto* spectrum = app.add_subcommand("spectrum", "Diagonalize and classify at the operating point");
  auto* sweep = app.add_subcommand("sweep", "Sweep the detuning and locate gap crossings");
  auto* prepare = app.add_subcommand("prepare", "Driven preparation of the initial gap state");
  auto* transfer = app.add_subcommand("transfer", "Preparation followed by the detuning ramp");
  for (auto* sub : {spectrum, sweep, prepare, transfer}) {
    sub->add_option("config", o.config, "Scenario file")->required();
    common(sub);
  }
  auto* repro = app.add_subcommand("reproduce", "Run a built-in figure preset");
  repro->add_option("figure", o.figure, "fig2, fig3, fig4 or fig5")
      ->required()
      ->check(CLI::IsMember(preset_names()));
  repro->add_flag("--dump-config", o.dump, "Print the preset scenario and exit");
  common(repro);
  auto* self = app.add_subcommand("selftest", "Run the invariant checks");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }

  try {
    if (self->parsed()) return selftest();
    if (repro->parsed()) {
      reproduce(o);
      return 0;
    }
    Scenario s = load_scenario(o.config);
    apply_overrides(s, o);
    const fs::path out = o.out.empty() ? fs::path("out") : fs::path(o.out);
    json summary;
    if (spectrum->parsed()) {
      summary["spectrum"] = do_spectrum(s, out, o.plots);
    } else if (sweep->parsed()) {
      summary["sweep"] = do_sweep(s, out, o.plots);
    } else if (prepare->parsed()) {
      do_prepare(s, out, "", o.plots, summary);
    } else if (transfer->parsed()) {
      do_transfer(s, out, o.plots, summary);
    }
    finish(s, out, summary);
    return 0;
  } catch (const std::exception& e) {
    std::cerr << error_record(e).dump() << "\n";
    return 2;
  }
}
