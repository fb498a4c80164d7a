#include "giantssh/export.hpp"

#include "giantssh/error.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <fstream>
#include <numeric>
#include <ostream>

namespace giantssh {

using nlohmann::json;

namespace {

std::string num(double v) { return fmt::format("{:.12g}", v); }

}  // namespace

void write_spectrum_csv(std::ostream& os, const EigenSystem& es, double q) {
  os << "index,energy_q,label,ambiguous\n";
  for (int i = 0; i < es.size(); ++i) {
    const auto lab = i < static_cast<int>(es.labels.size()) ? es.labels[i] : StateLabel{};
    os << i << ',' << num(es.energies[i] / q) << ',' << to_string(lab.kind) << ',' << (lab.ambiguous ? 1 : 0)
       << '\n';
  }
}

void write_sweep_csv(std::ostream& os, const SweepResult& sr, double q) {
  os << "detuning_q,branch_id,energy_q,label\n";
  for (int p = 0; p < sr.points(); ++p) {
    for (int b = 0; b < sr.branch_count(); ++b) {
      os << num(sr.grid[p] / q) << ',' << b << ',' << num(sr.energy(p, b) / q) << ','
         << to_string(sr.label(p, b).kind) << '\n';
    }
  }
}

void write_crossings_csv(std::ostream& os, std::span<const CrossingReport> crossings, double q) {
  os << "branch_a,branch_b,detuning_q,energy_q,min_separation_q,is_true_crossing,ordering_swapped,"
        "f_aa,f_ab,f_ba,f_bb\n";
  for (const auto& c : crossings) {
    os << c.branch_a << ',' << c.branch_b << ',' << num(c.detuning_star / q) << ',' << num(c.energy_star / q)
       << ',' << num(c.min_separation / q) << ',' << (c.is_true_crossing ? 1 : 0) << ','
       << (c.ordering_swapped ? 1 : 0);
    for (double f : c.flanking_fidelities) os << ',' << num(f);
    os << '\n';
  }
}

void write_fidelity_csv(std::ostream& os, const TrajectoryRecord& tr, double q) {
  os << "t_q,norm,f_init,f_target,p_atoms,p_vac\n";
  for (int k = 0; k < tr.samples(); ++k) {
    os << num(tr.sample_times[k] * q) << ',' << num(tr.norms[k]) << ',' << num(tr.f_init[k]) << ','
       << (tr.f_target.empty() ? std::string() : num(tr.f_target[k])) << ',' << num(tr.p_atoms[k]) << ','
       << num(tr.p_vacuum[k]) << '\n';
  }
}

void write_frames_csv(std::ostream& os, const TrajectoryRecord& tr, double q) {
  os << "t_q,site_index,site_kind,cell,probability\n";
  for (int k = 0; k < tr.samples(); ++k) {
    const std::string t = num(tr.sample_times[k] * q);
    const auto& frame = tr.site_frames[k];
    for (std::size_t s = 0; s < frame.size(); ++s) {
      os << t << ',' << s + 1 << ',' << (s % 2 == 0 ? 'A' : 'B') << ',' << s / 2 + 1 << ',' << num(frame[s])
         << '\n';
    }
  }
}

void write_schedule_csv(std::ostream& os, const TrajectoryRecord& tr, double q) {
  os << "t_q,atom,omega_q\n";
  for (int k = 0; k < tr.samples(); ++k) {
    const std::string t = num(tr.sample_times[k] * q);
    const auto& w = tr.schedule_trace[k];
    for (std::size_t i = 0; i < w.size(); ++i) os << t << ',' << i + 1 << ',' << num(w[i] / q) << '\n';
  }
}

json to_json(const ShapeReport& r) {
  return {{"dominant_atom", r.dominant_atom ? json(*r.dominant_atom + 1) : json(nullptr)},
          {"footprint_probability", r.footprint_probability},
          {"peak_count", r.peak_count},
          {"shape", std::string(to_string(r.shape))}};
}

json to_json(const CrossingReport& c, double q) {
  return {{"branch_a", c.branch_a},
          {"branch_b", c.branch_b},
          {"detuning_q", c.detuning_star / q},
          {"energy_q", c.energy_star / q},
          {"min_separation_q", c.min_separation / q},
          {"is_true_crossing", c.is_true_crossing},
          {"ordering_swapped", c.ordering_swapped},
          {"flanking_fidelities", c.flanking_fidelities}};
}

json to_json(const PreparationResult& p, double q) {
  return {{"target_energy_q", p.target_energy / q},
          {"driven_atom_amplitude", p.atom_amplitude},
          {"t_peak_q", p.t_peak * q},
          {"peak_fidelity", p.peak_fidelity},
          {"rabi_estimate_q", p.rabi_estimate * q},
          {"final_norm", p.trajectory.norms.back()}};
}

json to_json(const TransferResult& t, double q) {
  json crossings = json::array();
  for (const auto& c : t.crossings) crossings.push_back(to_json(c, q));
  return {{"target_energy_q", t.target_energy / q},
          {"final_fidelity", t.final_fidelity},
          {"jump_time_q", t.jump_time ? json(*t.jump_time * q) : json(nullptr)},
          {"jump_detuning_q", t.jump_detuning ? json(*t.jump_detuning / q) : json(nullptr)},
          {"shape_before", to_json(t.shape_before)},
          {"shape_after", to_json(t.shape_after)},
          {"crossings", crossings},
          {"relevant_crossing", t.relevant_crossing ? to_json(*t.relevant_crossing, q) : json(nullptr)},
          {"max_band_leakage", t.max_band_leakage},
          {"final_norm", t.trajectory.norms.back()},
          {"diagnostic", t.diagnostic ? json(*t.diagnostic) : json(nullptr)},
          {"suggested_duration_q", t.suggested_duration ? json(*t.suggested_duration * q) : json(nullptr)}};
}

json error_record(const std::exception& e) {
  json messages = json::array();
  std::string type = "Error";
  if (const auto* c = dynamic_cast<const ConfigError*>(&e)) {
    type = "ConfigError";
    for (const auto& m : c->messages()) messages.push_back(m);
  } else {
    if (dynamic_cast<const NumericalError*>(&e)) type = "NumericalError";
    messages.push_back(e.what());
  }
  json rec = {{"type", type}, {"messages", messages}};
  if (const auto* p = dynamic_cast<const PreparationError*>(&e)) {
    rec["type"] = "PreparationError";
    rec["peak_fidelity"] = p->peak_fidelity();
    rec["peak_time_q"] = p->peak_time();
  }
  return {{"error", rec}};
}

std::string plot_script(PlotKind kind, const std::string& prefix) {
  const std::string head = R"(import os
import matplotlib
matplotlib.use("Agg")
import matplotlib.pyplot as plt
import pandas as pd

here = os.path.dirname(os.path.abspath(__file__))
)";
  switch (kind) {
    case PlotKind::Spectrum:
      return head + fmt::format(R"(s = pd.read_csv(os.path.join(here, "{0}spectrum.csv"))
fig, ax = plt.subplots(figsize=(5, 4))
for label, grp in s.groupby("label"):
    ax.plot(grp["index"], grp["energy_q"], ".", label=label)
ax.set_xlabel("state index")
ax.set_ylabel("E / q")
ax.legend()
fig.tight_layout()
fig.savefig(os.path.join(here, "{0}spectrum.png"), dpi=150)
)",
                                prefix);
    case PlotKind::Sweep:
      return head + fmt::format(R"(s = pd.read_csv(os.path.join(here, "{0}sweep.csv"))
gap = set(s[s["label"] == "GAP"]["branch_id"].unique()) - set(s[s["label"] != "GAP"]["branch_id"].unique())
fig, ax = plt.subplots(figsize=(5, 4))
for b, grp in s.groupby("branch_id"):
    inside = b in gap
    ax.plot(grp["detuning_q"], grp["energy_q"], color="r" if inside else "0.6", lw=1.5 if inside else 0.5)
ax.set_xlabel("detuning / q")
ax.set_ylabel("E / q")
fig.tight_layout()
fig.savefig(os.path.join(here, "{0}sweep.png"), dpi=150)
)",
                                prefix);
    case PlotKind::Trajectory:
      return head + fmt::format(R"(f = pd.read_csv(os.path.join(here, "{0}fidelity.csv"))
fr = pd.read_csv(os.path.join(here, "{0}frames.csv"))
fig, (a, b) = plt.subplots(2, 1, figsize=(6, 7))
a.plot(f["t_q"], f["f_init"], label="initial")
if f["f_target"].notna().any():
    a.plot(f["t_q"], f["f_target"], "--", label="target")
a.set_xlabel("q t")
a.set_ylabel("fidelity")
a.legend()
grid = fr.pivot(index="site_index", columns="t_q", values="probability")
b.imshow(grid.values, aspect="auto", origin="lower",
         extent=[grid.columns.min(), grid.columns.max(), 0.5, grid.index.max() + 0.5])
b.set_xlabel("q t")
b.set_ylabel("site")
fig.tight_layout()
fig.savefig(os.path.join(here, "{0}trajectory.png"), dpi=150)
)",
                                prefix);
  }
  return head;
}

void write_file(const std::filesystem::path& dir, const std::string& name, const std::string& content) {
  std::filesystem::create_directories(dir);
  const auto path = dir / name;
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error(fmt::format("cannot write '{}'", path.string()));
  out << content;
  if (!out) throw std::runtime_error(fmt::format("failed writing '{}'", path.string()));
}

}  // namespace giantssh
