#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "giantssh/config.hpp"
#include "giantssh/error.hpp"
#include "giantssh/sweep.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

using namespace giantssh;
using doctest::Approx;

namespace {

SystemModel small_pair(double g2) {
  SystemModel m;
  m.lattice.cells = 20;
  m.atoms = {{5, 7, 0.9, 0.4}, {9, 10, g2, 0.0}};
  m.axis = {1, 0, -1};
  return m;
}

}  // namespace

TEST_CASE("uniform grid") {
  const auto g = uniform_grid(0.6, 0.8, 0.0025);
  CHECK(g.size() == 81);
  CHECK(g.front() == 0.6);
  CHECK(g.back() == 0.8);
  CHECK(g[40] == Approx(0.7));
  CHECK_THROWS_AS(uniform_grid(0.1, 0.1, 0.01), ConfigError);
  CHECK_THROWS_AS(uniform_grid(0.0, 1.0, -0.1), ConfigError);
}

TEST_CASE("tracking identical systems is the identity") {
  const auto m = small_pair(0.9);
  EigenSystem es = eigendecompose(m.hamiltonian_at(0.7));
  const auto perm = track_branches(es, es);
  for (int i = 0; i < es.size(); ++i) CHECK(perm[i] == i);
}

TEST_CASE("tracking follows a column transposition") {
  const auto m = small_pair(0.9);
  EigenSystem a = eigendecompose(m.hamiltonian_at(0.7));
  EigenSystem b = a;
  b.vectors.col(3).swap(b.vectors.col(8));
  std::swap(b.energies[3], b.energies[8]);
  const auto perm = track_branches(a, b);
  CHECK(perm[3] == 8);
  CHECK(perm[8] == 3);
  CHECK(perm[0] == 0);
  auto sorted = perm;
  std::sort(sorted.begin(), sorted.end());
  for (int i = 0; i < a.size(); ++i) CHECK(sorted[i] == i);
}

TEST_CASE("sweep branches are a bijection with smooth overlaps") {
  const auto s = preset("fig2");
  const auto grid = uniform_grid(0.6, 0.8, 0.0025);
  const auto sr = sweep_spectrum(s.model, grid);
  CHECK(sr.points() == 81);
  CHECK(sr.branch_count() == 202);

  for (int p = 0; p < sr.points(); ++p) {
    std::vector<int> idx = sr.state_of_branch[p];
    std::sort(idx.begin(), idx.end());
    std::vector<int> want(idx.size());
    std::iota(want.begin(), want.end(), 0);
    CHECK(idx == want);
  }

  const auto gap = sr.gap_branches();
  REQUIRE(gap.size() == 2);
  double worst = 1.0;
  for (int b : gap)
    for (int p = 0; p + 1 < sr.points(); ++p) worst = std::min(worst, fidelity(sr.state(p, b), sr.state(p + 1, b)));
  CHECK(worst > 0.5);
}

TEST_CASE("two-atom gap states meet between 0.65 and 0.75") {
  const auto s = preset("fig2");
  const auto sr = sweep_spectrum(s.model, uniform_grid(0.6, 0.8, 0.0025));
  const auto gap = sr.gap_branches();
  REQUIRE(gap.size() == 2);
  const auto c = detect_crossings(sr, gap[0], gap[1]);
  CHECK(c.detuning_star > 0.65);
  CHECK(c.detuning_star < 0.75);
  CHECK(c.min_separation < 0.02);
  CHECK(std::abs(c.energy_star) < s.model.edges().gap.hi);
  for (int k : {0, 2}) CHECK(c.flanking_fidelities[k] + c.flanking_fidelities[k + 1] >= 0.99);

  const auto again = detect_crossings(sweep_spectrum(s.model, uniform_grid(0.6, 0.8, 0.0025)), gap[0], gap[1]);
  CHECK(again.detuning_star == c.detuning_star);
  CHECK(again.min_separation == c.min_separation);

  const auto all = find_gap_crossings(sr);
  REQUIRE(all.size() == 1);
  CHECK(all[0].detuning_star == c.detuning_star);
  CHECK_THROWS_AS(detect_crossings(sr, gap[0], gap[0]), ConfigError);
}

TEST_CASE("a decoupled atom crosses exactly") {
  const auto m = small_pair(0.0);
  const auto sr = sweep_spectrum(m, uniform_grid(0.2, 0.8, 0.01));
  // The uncoupled level is omega2 = 0.4 - detuning, the other gap level is fixed.
  const auto gap = sr.gap_branches();
  REQUIRE(gap.size() == 2);
  const auto c = detect_crossings(sr, gap[0], gap[1]);
  CHECK(c.is_true_crossing);
  CHECK(c.ordering_swapped);
  CHECK(c.min_separation < 1e-3);
  CHECK(c.energy_star == Approx(0.4 - c.detuning_star).epsilon(1e-3));
  CHECK(c.flanking_fidelities[1] == Approx(0.0).epsilon(1e-12));
  CHECK(c.flanking_fidelities[2] == Approx(0.0).epsilon(1e-12));
}

TEST_CASE("pair probe on the two-atom ring") {
  const auto s = preset("fig2");
  const auto p = probe_pair(s.model, 0.65, 0.75);
  CHECK(p.lower_to_lower + p.upper_to_lower <= 1.0 + 1e-12);
  CHECK(p.lower_to_lower >= 0.0);
  CHECK(p.upper_to_lower >= 0.0);
  CHECK_THROWS_AS(probe_pair(small_pair(0.0), 0.65, 2.0), ConfigError);
}

TEST_CASE("swept branch probe on the three-atom ring") {
  const auto s = preset("fig4");
  const auto b = probe_swept_branch(s.model, -0.02, 0.05, 0.1);
  CHECK(b.same_12 + b.other_12 <= 1.0 + 1e-12);
  CHECK(b.same_23 + b.other_23 <= 1.0 + 1e-12);
  CHECK(b.same_12 > 0.9);
}

TEST_CASE("crossing parity") {
  CHECK(crossing_parity(1, 2));
  CHECK(crossing_parity(2, 1));
  CHECK(crossing_parity(3, 4));
  CHECK_FALSE(crossing_parity(1, 3));
  CHECK_FALSE(crossing_parity(2, 2));
  CHECK_THROWS_AS(crossing_parity(-1, 2), ConfigError);
}

TEST_CASE("nearest grid point") {
  const auto sr = sweep_spectrum(small_pair(0.9), uniform_grid(0.6, 0.7, 0.01));
  CHECK(nearest_point(sr, 0.6) == 0);
  CHECK(nearest_point(sr, 0.6449) == 4);
  CHECK(nearest_point(sr, 5.0) == 10);
}
