#include "giantssh/config.hpp"

#include "giantssh/error.hpp"

#include <fmt/format.h>

#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <numbers>
#include <set>
#include <sstream>

namespace giantssh {

namespace {

std::string_view trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

class KeyValues {
 public:
  explicit KeyValues(std::string_view text) {
    int line_no = 0;
    while (!text.empty()) {
      const auto nl = text.find('\n');
      std::string_view line = text.substr(0, nl);
      text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
      ++line_no;
      if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
      line = trim(line);
      if (line.empty()) continue;
      const auto eq = line.find('=');
      if (eq == std::string_view::npos) {
        errors.push_back(fmt::format("line {}: expected 'key = value'", line_no));
        continue;
      }
      const std::string key(trim(line.substr(0, eq)));
      const std::string value(trim(line.substr(eq + 1)));
      if (key.empty() || value.empty()) {
        errors.push_back(fmt::format("line {}: empty key or value", line_no));
        continue;
      }
      if (!values_.emplace(key, value).second) {
        errors.push_back(fmt::format("line {}: key '{}' given twice", line_no, key));
      }
    }
  }

  bool has(const std::string& key) const { return values_.count(key) != 0; }

  bool has_prefix(const std::string& prefix) const {
    const auto it = values_.lower_bound(prefix);
    return it != values_.end() && it->first.compare(0, prefix.size(), prefix) == 0;
  }

  std::optional<std::string> text(const std::string& key) {
    const auto it = values_.find(key);
    if (it == values_.end()) return std::nullopt;
    used_.insert(key);
    return it->second;
  }

  std::optional<double> number(const std::string& key) {
    const auto raw = text(key);
    if (!raw) return std::nullopt;
    double v = 0.0;
    const auto* end = raw->data() + raw->size();
    const auto [p, ec] = std::from_chars(raw->data(), end, v);
    if (ec != std::errc() || p != end || !std::isfinite(v)) {
      errors.push_back(fmt::format("{}: '{}' is not a finite number", key, *raw));
      return std::nullopt;
    }
    return v;
  }

  std::optional<int> integer(const std::string& key) {
    const auto raw = text(key);
    if (!raw) return std::nullopt;
    int v = 0;
    const auto* end = raw->data() + raw->size();
    const auto [p, ec] = std::from_chars(raw->data(), end, v);
    if (ec != std::errc() || p != end) {
      errors.push_back(fmt::format("{}: '{}' is not an integer", key, *raw));
      return std::nullopt;
    }
    return v;
  }

  template <typename T>
  T required(std::optional<T> v, const std::string& key) {
    if (!v) {
      if (!has(key)) errors.push_back(fmt::format("missing required key '{}'", key));
      return T{};
    }
    return *v;
  }

  void reject_unused() {
    for (const auto& [k, v] : values_) {
      if (!used_.count(k)) errors.push_back(fmt::format("unknown key '{}'", k));
    }
  }

  std::vector<std::string> errors;

 private:
  std::map<std::string, std::string> values_;
  std::set<std::string> used_;
};

// theta / pi, nudged so that multiplying back by pi reproduces theta exactly.
double theta_over_pi(double theta) {
  double x = theta / std::numbers::pi;
  for (int i = 0; i < 8 && x * std::numbers::pi != theta; ++i) {
    x = std::nextafter(x, x * std::numbers::pi < theta ? HUGE_VAL : -HUGE_VAL);
  }
  return x;
}

constexpr std::string_view kFig2 = R"(version = 1
name = fig2
lattice.cells = 100
lattice.delta = 0.5
lattice.theta_over_pi = 0.2
atoms = 2
atom.1.n = 50
atom.1.m = 52
atom.1.g = 0.9
atom.1.omega = 0.4
atom.2.n = 54
atom.2.m = 55
atom.2.g = 0.9
detuning.atom = 2
detuning.reference = 1
detuning.sign = -1
detuning.value = 0.65
sweep.from = 0.6
sweep.to = 0.8
sweep.spacing = 0.0025
)";

constexpr std::string_view kFig3 = R"(version = 1
name = fig3
lattice.cells = 10
lattice.delta = 0.5
lattice.theta_over_pi = 0.2
atoms = 2
atom.1.n = 2
atom.1.m = 4
atom.1.g = 0.9
atom.1.omega = 0.4
atom.2.n = 7
atom.2.m = 8
atom.2.g = 0.9
detuning.atom = 2
detuning.reference = 1
detuning.sign = -1
detuning.value = 0.6
sweep.from = 0.6
sweep.to = 0.8
sweep.spacing = 0.0025
prepare.xi = 0.005
prepare.target_atom = 1
transfer.change = 0.2
transfer.duration = 53200
transfer.target_atom = 2
)";

constexpr std::string_view kFig4 = R"(version = 1
name = fig4
lattice.cells = 100
lattice.delta = 0.5
lattice.theta_over_pi = 0.2
atoms = 3
atom.1.n = 50
atom.1.m = 52
atom.1.g = 0.9
atom.1.omega = 0.4
atom.2.n = 54
atom.2.m = 55
atom.2.g = 0.9
atom.2.omega = -0.4
atom.3.n = 60
atom.3.m = 62
atom.3.g = 0.9
detuning.atom = 3
detuning.reference = 1
detuning.sign = 1
detuning.value = -0.02
sweep.from = -0.15
sweep.to = 0.12
sweep.spacing = 0.0025
)";

constexpr std::string_view kFig5 = R"(version = 1
name = fig5
lattice.cells = 20
lattice.delta = 0.5
lattice.theta_over_pi = 0.2
atoms = 3
atom.1.n = 2
atom.1.m = 4
atom.1.g = 0.9
atom.1.omega = 0.4
atom.2.n = 7
atom.2.m = 8
atom.2.g = 0.9
atom.2.omega = -0.4
atom.3.n = 16
atom.3.m = 18
atom.3.g = 0.9
detuning.atom = 3
detuning.reference = 1
detuning.sign = 1
detuning.value = -0.15
sweep.from = -0.15
sweep.to = 0.05
sweep.spacing = 0.0025
prepare.xi = 0.005
prepare.target_atom = 1
transfer.change = 0.2
transfer.duration = 300000
transfer.target_atom = 3
)";

}  // namespace

Scenario parse_scenario(std::string_view text) {
  KeyValues kv(text);
  Scenario s;

  const int version = kv.required(kv.integer("version"), "version");
  if (kv.has("version") && version != kConfigVersion) {
    kv.errors.push_back(fmt::format("unsupported config version {} (expected {})", version, kConfigVersion));
  }
  s.name = kv.text("name").value_or("");

  auto& lat = s.model.lattice;
  lat.cells = kv.required(kv.integer("lattice.cells"), "lattice.cells");
  lat.q = kv.number("lattice.q").value_or(1.0);
  lat.delta = kv.number("lattice.delta").value_or(0.5);
  lat.theta = kv.number("lattice.theta_over_pi").value_or(0.2) * std::numbers::pi;

  const int n_atoms = kv.required(kv.integer("atoms"), "atoms");
  if (n_atoms < 0) kv.errors.push_back("atoms must be non-negative");

  auto& axis = s.model.axis;
  if (n_atoms > 0) {
    axis.swept_atom = kv.integer("detuning.atom").value_or(n_atoms) - 1;
    axis.reference_atom = kv.integer("detuning.reference").value_or(1) - 1;
    axis.sign = kv.integer("detuning.sign").value_or(1);
    s.detuning = kv.number("detuning.value").value_or(0.0);
  }
  const bool derived_swept = n_atoms > 1 && axis.swept_atom != axis.reference_atom;

  for (int k = 1; k <= std::max(0, n_atoms); ++k) {
    const std::string p = fmt::format("atom.{}.", k);
    AtomSpec a;
    a.n = kv.required(kv.integer(p + "n"), p + "n") - 1;
    a.m = kv.required(kv.integer(p + "m"), p + "m") - 1;
    a.g = kv.required(kv.number(p + "g"), p + "g");
    if (derived_swept && k - 1 == axis.swept_atom) {
      if (kv.has(p + "omega")) {
        kv.text(p + "omega");
        kv.errors.push_back(fmt::format("{}omega: atom {} is swept; its frequency follows detuning.value", p, k));
      }
    } else {
      a.omega0 = kv.required(kv.number(p + "omega"), p + "omega");
    }
    s.model.atoms.push_back(a);
  }

  if (kv.has_prefix("sweep.")) {
    SweepSpec sw;
    sw.from = kv.required(kv.number("sweep.from"), "sweep.from");
    sw.to = kv.required(kv.number("sweep.to"), "sweep.to");
    sw.spacing = kv.number("sweep.spacing").value_or(sw.spacing);
    sw.gap_threshold = kv.number("sweep.gap_threshold").value_or(sw.gap_threshold);
    s.sweep = sw;
  }
  if (kv.has_prefix("prepare.")) {
    PreparationSpec pr;
    pr.xi = kv.number("prepare.xi").value_or(pr.xi);
    pr.target_atom = kv.integer("prepare.target_atom").value_or(1) - 1;
    pr.max_time = kv.number("prepare.max_time");
    pr.drop = kv.number("prepare.drop").value_or(pr.drop);
    pr.min_peak = kv.number("prepare.min_peak").value_or(pr.min_peak);
    s.prepare = pr;
  }
  if (kv.has_prefix("transfer.")) {
    TransferSpec tr;
    tr.change = kv.required(kv.number("transfer.change"), "transfer.change");
    tr.duration = kv.required(kv.number("transfer.duration"), "transfer.duration");
    tr.target_atom = kv.required(kv.integer("transfer.target_atom"), "transfer.target_atom") - 1;
    s.transfer = tr;
  }
  s.solver.dt = kv.number("solver.dt").value_or(s.solver.dt);
  s.solver.stride = kv.integer("solver.stride").value_or(s.solver.stride);
  s.solver.oracle_dt = kv.number("solver.oracle_dt").value_or(s.solver.oracle_dt);
  s.solver.margin = kv.number("solver.margin").value_or(s.solver.margin);
  s.shape.prominence = kv.number("shape.prominence").value_or(s.shape.prominence);
  s.shape.dip = kv.number("shape.dip").value_or(s.shape.dip);
  s.shape.footprint_mass = kv.number("shape.footprint").value_or(s.shape.footprint_mass);
  s.shape.pad_cells = kv.integer("shape.pad").value_or(s.shape.pad_cells);
  kv.reject_unused();

  if (!kv.errors.empty()) throw ConfigError(std::move(kv.errors));

  if (n_atoms > 0 && (axis.swept_atom < 0 || axis.swept_atom >= n_atoms || axis.reference_atom < 0 ||
                      axis.reference_atom >= n_atoms)) {
    s.validate();  // reports the bad axis
  }
  if (derived_swept) s.model.atoms[axis.swept_atom].omega0 = s.model.swept_frequency(s.detuning);
  s.validate();
  return s;
}

std::string render_scenario(const Scenario& s) {
  std::string out;
  auto put = [&out](std::string_view key, const auto& value) { out += fmt::format("{} = {}\n", key, value); };
  put("version", kConfigVersion);
  if (!s.name.empty()) put("name", s.name);
  const auto& lat = s.model.lattice;
  put("lattice.cells", lat.cells);
  put("lattice.q", lat.q);
  put("lattice.delta", lat.delta);
  put("lattice.theta_over_pi", theta_over_pi(lat.theta));
  const int n = static_cast<int>(s.model.atoms.size());
  put("atoms", n);
  const auto& axis = s.model.axis;
  const bool derived_swept = n > 1 && axis.swept_atom != axis.reference_atom;
  for (int k = 0; k < n; ++k) {
    const auto& a = s.model.atoms[k];
    put(fmt::format("atom.{}.n", k + 1), a.n + 1);
    put(fmt::format("atom.{}.m", k + 1), a.m + 1);
    put(fmt::format("atom.{}.g", k + 1), a.g);
    if (!(derived_swept && k == axis.swept_atom)) put(fmt::format("atom.{}.omega", k + 1), a.omega0);
  }
  if (n > 0) {
    put("detuning.atom", axis.swept_atom + 1);
    put("detuning.reference", axis.reference_atom + 1);
    put("detuning.sign", axis.sign);
    put("detuning.value", s.detuning);
  }
  if (s.sweep) {
    put("sweep.from", s.sweep->from);
    put("sweep.to", s.sweep->to);
    put("sweep.spacing", s.sweep->spacing);
    put("sweep.gap_threshold", s.sweep->gap_threshold);
  }
  if (s.prepare) {
    put("prepare.xi", s.prepare->xi);
    put("prepare.target_atom", s.prepare->target_atom + 1);
    if (s.prepare->max_time) put("prepare.max_time", *s.prepare->max_time);
    put("prepare.drop", s.prepare->drop);
    put("prepare.min_peak", s.prepare->min_peak);
  }
  if (s.transfer) {
    put("transfer.change", s.transfer->change);
    put("transfer.duration", s.transfer->duration);
    put("transfer.target_atom", s.transfer->target_atom + 1);
  }
  put("solver.dt", s.solver.dt);
  put("solver.stride", s.solver.stride);
  put("solver.oracle_dt", s.solver.oracle_dt);
  put("solver.margin", s.solver.margin);
  put("shape.prominence", s.shape.prominence);
  put("shape.dip", s.shape.dip);
  put("shape.footprint", s.shape.footprint_mass);
  put("shape.pad", s.shape.pad_cells);
  return out;
}

Scenario load_scenario(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError(fmt::format("cannot read config file '{}'", path));
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_scenario(buf.str());
}

Scenario preset(std::string_view name) {
  if (name == "fig2") return parse_scenario(kFig2);
  if (name == "fig3") return parse_scenario(kFig3);
  if (name == "fig4") return parse_scenario(kFig4);
  if (name == "fig5") return parse_scenario(kFig5);
  throw ConfigError(fmt::format("unknown preset '{}' (choose fig2, fig3, fig4 or fig5)", name));
}

std::vector<std::string> preset_names() { return {"fig2", "fig3", "fig4", "fig5"}; }

}  // namespace giantssh
