#include "giantssh/sweep.hpp"

#include "giantssh/error.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <optional>
#include <tuple>

namespace giantssh {

double SweepResult::energy(int point, int branch) const {
  return systems.at(point).energies[state_of_branch.at(point).at(branch)];
}

StateVector SweepResult::state(int point, int branch) const {
  return systems.at(point).state(state_of_branch.at(point).at(branch));
}

StateLabel SweepResult::label(int point, int branch) const {
  return systems.at(point).labels.at(state_of_branch.at(point).at(branch));
}

std::vector<int> SweepResult::gap_branches() const {
  std::vector<int> out;
  for (int b = 0; b < branch_count(); ++b) {
    bool all_gap = true;
    for (int p = 0; p < points() && all_gap; ++p) all_gap = label(p, b).kind == StateClass::Gap;
    if (all_gap) out.push_back(b);
  }
  return out;
}

std::vector<double> uniform_grid(double from, double to, double spacing) {
  if (!(spacing > 0.0)) throw ConfigError("grid spacing must be positive");
  if (!(to > from)) throw ConfigError("grid needs at least two distinct points (to > from)");
  const int intervals = std::max(1, static_cast<int>(std::lround((to - from) / spacing)));
  std::vector<double> grid(intervals + 1);
  for (int i = 0; i <= intervals; ++i) grid[i] = from + (to - from) * i / intervals;
  return grid;
}

std::vector<int> track_branches(const EigenSystem& prev, const EigenSystem& next) {
  const int n = prev.size();
  if (next.size() != n) throw ConfigError("cannot track branches between systems of different size");

  const RealMatrix overlap = (prev.vectors.adjoint() * next.vectors).cwiseAbs2();
  struct Candidate {
    double overlap;
    double jump;
    int i;
    int j;
  };
  std::vector<Candidate> candidates;
  candidates.reserve(static_cast<std::size_t>(n) * n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      const double ov = overlap(i, j);
      if (ov < 1e-14) continue;
      candidates.push_back({ov, std::abs(prev.energies[i] - next.energies[j]), i, j});
    }
  }
  constexpr double kTie = 1e-12;
  std::sort(candidates.begin(), candidates.end(), [](const Candidate& a, const Candidate& b) {
    if (std::abs(a.overlap - b.overlap) > kTie) return a.overlap > b.overlap;
    return std::tie(a.jump, a.i, a.j) < std::tie(b.jump, b.i, b.j);
  });

  std::vector<int> perm(n, -1);
  std::vector<bool> taken(n, false);
  int assigned = 0;
  for (const auto& c : candidates) {
    if (assigned == n) break;
    if (perm[c.i] >= 0 || taken[c.j]) continue;
    perm[c.i] = c.j;
    taken[c.j] = true;
    ++assigned;
  }
  // States with no overlap at all left over: pair them up by energy order.
  if (assigned < n) {
    std::vector<int> free_next;
    for (int j = 0; j < n; ++j)
      if (!taken[j]) free_next.push_back(j);
    std::size_t k = 0;
    for (int i = 0; i < n; ++i)
      if (perm[i] < 0) perm[i] = free_next[k++];
  }
  return perm;
}

SweepResult sweep_spectrum(const SystemModel& model, std::span<const double> grid, double margin) {
  model.validate();
  if (grid.size() < 2) throw ConfigError("sweep grid needs at least two points");
  for (std::size_t i = 1; i < grid.size(); ++i) {
    if (!(grid[i] > grid[i - 1])) throw ConfigError("sweep grid must be strictly ascending");
  }

  const BandEdges edges = model.edges();
  SweepResult sr;
  sr.grid.assign(grid.begin(), grid.end());
  sr.systems.reserve(grid.size());
  for (double x : grid) {
    EigenSystem es = eigendecompose(model.hamiltonian_at(x));
    classify(es, edges, margin);
    std::vector<std::string> notes;
    const double w = model.swept_frequency(x);
    if (!edges.gap.contains(w)) {
      notes.push_back(fmt::format("swept atom frequency {:.6g} lies outside the band gap", w));
    }
    sr.systems.push_back(std::move(es));
    sr.warnings.push_back(std::move(notes));
  }

  const int n = sr.systems.front().size();
  sr.state_of_branch.resize(grid.size());
  sr.state_of_branch[0].resize(n);
  std::iota(sr.state_of_branch[0].begin(), sr.state_of_branch[0].end(), 0);
  for (std::size_t p = 1; p < grid.size(); ++p) {
    const auto perm = track_branches(sr.systems[p - 1], sr.systems[p]);
    sr.state_of_branch[p].resize(n);
    for (int b = 0; b < n; ++b) sr.state_of_branch[p][b] = perm[sr.state_of_branch[p - 1][b]];
  }
  return sr;
}

namespace {

// Vertex of the parabola through (x0,y0), (x1,y1), (x2,y2); nullopt if flat.
std::optional<std::pair<double, double>> parabola_vertex(double x0, double y0, double x1, double y1,
                                                         double x2, double y2) {
  const double d01 = (y1 - y0) / (x1 - x0);
  const double d12 = (y2 - y1) / (x2 - x1);
  const double a = (d12 - d01) / (x2 - x0);
  if (!(a > 0.0)) return std::nullopt;
  const double b = d01 - a * (x0 + x1);
  const double x = -b / (2.0 * a);
  // Newton form anchored at x0, x1.
  const double y = y0 + (x - x0) * d01 + a * (x - x0) * (x - x1);
  return std::make_pair(x, y);
}

CrossingReport crossing_at(const SweepResult& sr, int a, int b, int k, double gap_threshold) {
  const int n = sr.points();
  auto sep2 = [&](int p) {
    const double d = sr.energy(p, a) - sr.energy(p, b);
    return d * d;
  };

  CrossingReport r;
  r.branch_a = a;
  r.branch_b = b;
  r.detuning_star = sr.grid[k];
  r.min_separation = std::sqrt(sep2(k));
  r.energy_star = 0.5 * (sr.energy(k, a) + sr.energy(k, b));

  if (k > 0 && k < n - 1) {
    if (auto v = parabola_vertex(sr.grid[k - 1], sep2(k - 1), sr.grid[k], sep2(k), sr.grid[k + 1],
                                 sep2(k + 1))) {
      const double x = std::clamp(v->first, sr.grid[k - 1], sr.grid[k + 1]);
      r.detuning_star = x;
      r.min_separation = std::sqrt(std::max(0.0, std::min(v->second, sep2(k))));
      // Mean energy interpolated linearly on the bracketing interval.
      const int lo = x < sr.grid[k] ? k - 1 : k;
      const double t = (x - sr.grid[lo]) / (sr.grid[lo + 1] - sr.grid[lo]);
      auto mean = [&](int p) { return 0.5 * (sr.energy(p, a) + sr.energy(p, b)); };
      r.energy_star = (1.0 - t) * mean(lo) + t * mean(lo + 1);
    }
  }
  r.is_true_crossing = r.min_separation < gap_threshold;

  r.left_point = std::max(0, k - 2);
  r.right_point = std::min(n - 1, k + 2);
  const auto aL = sr.state(r.left_point, a), bL = sr.state(r.left_point, b);
  const auto aR = sr.state(r.right_point, a), bR = sr.state(r.right_point, b);
  r.flanking_fidelities = {fidelity(aL, aR), fidelity(aL, bR), fidelity(bL, aR), fidelity(bL, bR)};
  const double dl = sr.energy(r.left_point, a) - sr.energy(r.left_point, b);
  const double dr = sr.energy(r.right_point, a) - sr.energy(r.right_point, b);
  r.ordering_swapped = (dl > 0) != (dr > 0);
  return r;
}

void require_gap_branch(const SweepResult& sr, int branch) {
  if (branch < 0 || branch >= sr.branch_count()) {
    throw ConfigError(fmt::format("branch {} does not exist", branch));
  }
  for (int p = 0; p < sr.points(); ++p) {
    if (sr.label(p, branch).kind != StateClass::Gap) {
      throw ConfigError(fmt::format("branch {} leaves the gap at detuning {:.6g}", branch, sr.grid[p]));
    }
  }
}

}  // namespace

CrossingReport detect_crossings(const SweepResult& sr, int branch_a, int branch_b,
                                double gap_threshold) {
  require_gap_branch(sr, branch_a);
  require_gap_branch(sr, branch_b);
  if (branch_a == branch_b) throw ConfigError("crossing detection needs two different branches");
  int best = 0;
  double best_sep = std::abs(sr.energy(0, branch_a) - sr.energy(0, branch_b));
  for (int p = 1; p < sr.points(); ++p) {
    const double s = std::abs(sr.energy(p, branch_a) - sr.energy(p, branch_b));
    if (s < best_sep) {
      best_sep = s;
      best = p;
    }
  }
  return crossing_at(sr, branch_a, branch_b, best, gap_threshold);
}

std::vector<CrossingReport> find_gap_crossings(const SweepResult& sr, double gap_threshold,
                                               double max_separation) {
  const auto gap = sr.gap_branches();
  std::vector<CrossingReport> out;
  for (std::size_t i = 0; i < gap.size(); ++i) {
    for (std::size_t j = i + 1; j < gap.size(); ++j) {
      const int a = gap[i], b = gap[j];
      auto sep = [&](int p) { return std::abs(sr.energy(p, a) - sr.energy(p, b)); };
      for (int p = 1; p + 1 < sr.points(); ++p) {
        if (sep(p) <= sep(p - 1) && sep(p) < sep(p + 1) && sep(p) < max_separation) {
          out.push_back(crossing_at(sr, a, b, p, gap_threshold));
        }
      }
    }
  }
  std::sort(out.begin(), out.end(), [](const CrossingReport& x, const CrossingReport& y) {
    return x.detuning_star < y.detuning_star;
  });
  return out;
}

int nearest_point(const SweepResult& sr, double detuning) {
  int best = 0;
  for (int p = 1; p < sr.points(); ++p) {
    if (std::abs(sr.grid[p] - detuning) < std::abs(sr.grid[best] - detuning)) best = p;
  }
  return best;
}

PairProbe probe_pair(const SystemModel& model, double left, double right, double margin) {
  auto gap_pair = [&](double x) {
    EigenSystem es = eigendecompose(model.hamiltonian_at(x));
    classify(es, model.edges(), margin);
    const auto gap = es.indices_of(StateClass::Gap);
    if (gap.size() != 2) {
      throw ConfigError(fmt::format("expected two gap states at detuning {:.6g}, found {}", x, gap.size()));
    }
    return std::make_pair(es.state(gap[0]), es.state(gap[1]));
  };
  auto [ll, ul] = gap_pair(left);
  auto [lr, ur] = gap_pair(right);
  PairProbe p{ll, ul, lr, ur, 0.0, 0.0};
  p.lower_to_lower = fidelity(lr, ll);
  p.upper_to_lower = fidelity(ur, ll);
  return p;
}

BranchProbe probe_swept_branch(const SystemModel& model, double first, double second, double third,
                               double spacing, double margin) {
  if (!(first < second && second < third)) throw ConfigError("probe detunings must be ascending");
  const auto grid = uniform_grid(first, third, spacing);
  const SweepResult sr = sweep_spectrum(model, grid, margin);
  const int p1 = nearest_point(sr, first), p2 = nearest_point(sr, second), p3 = nearest_point(sr, third);
  const auto gap = sr.gap_branches();
  if (gap.size() < 2) throw ConfigError("need at least two gap branches across the probe range");

  const int row = sr.systems[p1].layout.atom_index(model.axis.swept_atom);
  BranchProbe out;
  double weight = -1.0;
  for (int b : gap) {
    const double w = std::norm(sr.state(p1, b).amplitudes()[row]);
    if (w > weight) {
      weight = w;
      out.swept_branch = b;
    }
  }
  const int s = out.swept_branch;
  auto partner = [&](int p) {
    int best = -1;
    for (int b : gap) {
      if (b == s) continue;
      if (best < 0 || std::abs(sr.energy(p, b) - sr.energy(p, s)) < std::abs(sr.energy(p, best) - sr.energy(p, s)))
        best = b;
    }
    return best;
  };
  const auto a = sr.state(p1, s), b = sr.state(p2, s), d = sr.state(p3, s);
  out.same_12 = fidelity(b, a);
  out.other_12 = fidelity(sr.state(p2, partner(p2)), a);
  out.same_23 = fidelity(d, b);
  out.other_23 = fidelity(sr.state(p3, partner(p3)), b);
  return out;
}

bool crossing_parity(int d1, int d2) {
  if (d1 < 0 || d2 < 0) throw ConfigError("footprint separations must be non-negative");
  return (d1 % 2) != (d2 % 2);
}

}  // namespace giantssh
