#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "giantssh/config.hpp"
#include "giantssh/eigensolver.hpp"
#include "giantssh/error.hpp"
#include "giantssh/spectral.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>
#include <complex>
#include <random>

using namespace giantssh;
using doctest::Approx;
using cd = std::complex<double>;

namespace {

Eigen::MatrixXd random_symmetric(int n, unsigned seed) {
  std::mt19937 rng(seed);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  Eigen::MatrixXd a(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j <= i; ++j) a(i, j) = a(j, i) = u(rng);
  return a;
}

Eigen::MatrixXcd random_hermitian(int n, unsigned seed) {
  std::mt19937 rng(seed);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  Eigen::MatrixXcd a(n, n);
  for (int i = 0; i < n; ++i) {
    a(i, i) = u(rng);
    for (int j = 0; j < i; ++j) {
      a(i, j) = cd(u(rng), u(rng));
      a(j, i) = std::conj(a(i, j));
    }
  }
  return a;
}

template <typename M, typename V>
void check_decomposition(const M& a, const Eigen::VectorXd& values, const V& vectors) {
  const int n = static_cast<int>(a.rows());
  for (int i = 1; i < n; ++i) CHECK(values[i - 1] <= values[i]);
  const auto gram = (vectors.adjoint() * vectors).eval();
  CHECK((gram - decltype(gram)::Identity(n, n)).cwiseAbs().maxCoeff() <= 1e-10);
  const auto rebuilt = (vectors * values.asDiagonal() * vectors.adjoint()).eval();
  CHECK((rebuilt - a).cwiseAbs().maxCoeff() <= 1e-9);
}

}  // namespace

TEST_CASE("symmetric solver agrees with Eigen") {
  for (unsigned seed : {1u, 2u, 3u}) {
    for (int n : {1, 2, 7, 40}) {
      const auto a = random_symmetric(n, seed + n);
      const auto r = linalg::symmetric_eigen(a);
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> ref(a);
      CHECK((r.values - ref.eigenvalues()).cwiseAbs().maxCoeff() <= 1e-12);
      check_decomposition(a, r.values, r.vectors);
    }
  }
}

TEST_CASE("hermitian solver agrees with Eigen") {
  for (unsigned seed : {4u, 5u}) {
    for (int n : {1, 3, 12, 25}) {
      const auto a = random_hermitian(n, seed + n);
      const auto r = linalg::hermitian_eigen(a);
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> ref(a);
      CHECK((r.values - ref.eigenvalues()).cwiseAbs().maxCoeff() <= 1e-11);
      check_decomposition(a, r.values, r.vectors);
    }
  }
}

TEST_CASE("eigenvector phase convention is deterministic") {
  const auto a = random_hermitian(10, 9);
  const auto r1 = linalg::hermitian_eigen(a);
  const auto r2 = linalg::hermitian_eigen(a);
  CHECK((r1.vectors - r2.vectors).cwiseAbs().maxCoeff() == 0.0);
  for (int j = 0; j < 10; ++j) {
    Eigen::Index k;
    r1.vectors.col(j).cwiseAbs().maxCoeff(&k);
    CHECK(std::abs(r1.vectors(k, j).imag()) <= 1e-15);
    CHECK(r1.vectors(k, j).real() > 0.0);
  }
}

TEST_CASE("dimer and diagonal matrices") {
  const double t = 0.7;
  HamiltonianMatrix h{BasisLayout(0, 1, false), ComplexMatrix::Zero(2, 2)};
  h.entries(0, 1) = h.entries(1, 0) = t;
  const auto es = eigendecompose(h);
  CHECK(es.energies[0] == Approx(-t));
  CHECK(es.energies[1] == Approx(t));
  CHECK(std::abs(es.vectors(0, 0)) == Approx(1.0 / std::sqrt(2.0)));
  CHECK(std::abs(es.vectors(0, 0) + es.vectors(1, 0)) <= 1e-12);  // (1,-1)/sqrt2 up to phase

  HamiltonianMatrix d{BasisLayout(0, 1, false), ComplexMatrix::Zero(2, 2)};
  d.entries(0, 0) = 0.3;
  d.entries(1, 1) = -0.2;
  const auto ed = eigendecompose(d);
  CHECK(ed.energies[0] == -0.2);
  CHECK(ed.energies[1] == 0.3);
  CHECK(std::abs(ed.vectors(1, 0)) == 1.0);
  CHECK(std::abs(ed.vectors(0, 1)) == 1.0);
}

TEST_CASE("eigendecompose rejects bad input") {
  HamiltonianMatrix h{BasisLayout(0, 1, false), ComplexMatrix::Zero(2, 2)};
  h.entries(0, 1) = 1.0;
  CHECK_THROWS_AS(eigendecompose(h), NumericalError);
  HamiltonianMatrix v{BasisLayout(0, 1, true), ComplexMatrix::Zero(3, 3)};
  CHECK_THROWS_AS(eigendecompose(v), ConfigError);
}

TEST_CASE("two-atom ring: census, residuals, confinement") {
  const auto s = preset("fig2");
  const auto h = s.model.hamiltonian_at(0.65);
  EigenSystem es = eigendecompose(h);
  classify(es, s.model.edges(), 1e-6);
  CHECK(es.indices_of(StateClass::Gap).size() == 2);

  const double scale = h.entries.cwiseAbs().maxCoeff();
  for (int i = 0; i < es.size(); ++i) {
    const auto r = (h.entries * es.vectors.col(i) - es.energies[i] * es.vectors.col(i)).norm();
    CHECK(r <= 1e-9 * scale);
  }

  // Photonic weight far (> 20 cells) from every leg is exponentially small.
  for (int i : es.indices_of(StateClass::Gap)) {
    const auto dist = photon_distribution(es.state(i));
    double far = 0.0;
    for (int c = 0; c < s.model.lattice.cells; ++c) {
      int nearest = 1000;
      for (const auto& a : s.model.atoms) {
        for (int leg : {a.n, a.m}) {
          const int d = std::abs(c - leg);
          nearest = std::min({nearest, d, s.model.lattice.cells - d});
        }
      }
      if (nearest > 20) far += dist.cell_probability(c);
    }
    CHECK(far < 1e-6);
  }

  // Lower gap state: at least 90% of the photon inside cells 49..53 (1-based).
  const auto dist = photon_distribution(es.state(es.indices_of(StateClass::Gap)[0]));
  double inside = 0.0;
  for (int c = 48; c <= 52; ++c) inside += dist.cell_probability(c);
  CHECK(inside / dist.photonic_total() >= 0.9);
  CHECK(dist.total() == Approx(1.0).epsilon(1e-10));
}

TEST_CASE("bare ring has no gap or bound states") {
  SystemModel m;
  m.lattice.cells = 20;
  EigenSystem es = eigendecompose(m.hamiltonian_at(0.0));
  classify(es, m.edges(), 1e-6);
  CHECK(es.indices_of(StateClass::Gap).empty());
  CHECK(es.indices_of(StateClass::UpperBound).empty());
  CHECK(es.indices_of(StateClass::LowerBound).empty());
}

TEST_CASE("classification near edges and under rigid shifts") {
  const auto edges = band_edges({1.4, 0.6});
  const std::vector<double> e{-2.5, -2.0, -1.0, -0.8, -0.3, 0.0, 0.8 - 1e-7, 1.5, 2.0 + 1e-9, 2.4};
  const auto labels = classify(e, edges, 1e-6);
  CHECK(labels[0].kind == StateClass::LowerBound);
  CHECK(labels[1].kind == StateClass::LowerBand);
  CHECK(labels[1].ambiguous);
  CHECK(labels[2].kind == StateClass::LowerBand);
  CHECK(labels[3].kind == StateClass::LowerBand);
  CHECK(labels[4].kind == StateClass::Gap);
  CHECK(labels[6].kind == StateClass::UpperBand);
  CHECK(labels[6].ambiguous);
  CHECK(labels[8].kind == StateClass::UpperBand);
  CHECK(labels[8].ambiguous);
  CHECK(labels[9].kind == StateClass::UpperBound);

  const double c = 0.37;
  BandEdges moved = edges;
  for (Interval* iv : {&moved.lower_band, &moved.gap, &moved.upper_band}) {
    iv->lo += c;
    iv->hi += c;
  }
  std::vector<double> shifted = e;
  for (double& x : shifted) x += c;
  const auto again = classify(shifted, moved, 1e-6);
  for (std::size_t i = 0; i < e.size(); ++i) {
    CHECK(again[i].kind == labels[i].kind);
    CHECK(again[i].ambiguous == labels[i].ambiguous);
  }
  CHECK_THROWS_AS(classify(e, edges, -1.0), ConfigError);
}

TEST_CASE("photon distribution and fidelity") {
  const BasisLayout layout(1, 3, true);
  const auto atom = StateVector::basis(layout, layout.atom_index(0));
  const auto d = photon_distribution(atom);
  CHECK(d.photonic_total() == 0.0);
  CHECK(d.atoms[0] == 1.0);

  ComplexVector v = ComplexVector::Zero(layout.dim());
  v[layout.site_index(0, Sublattice::A)] = 1.0 / std::sqrt(2.0);
  v[layout.site_index(2, Sublattice::B)] = cd(0.0, 1.0 / std::sqrt(2.0));
  const StateVector two(layout, v);
  const auto d2 = photon_distribution(two);
  CHECK(d2.sites[0] == Approx(0.5));
  CHECK(d2.sites[5] == Approx(0.5));

  CHECK(fidelity(two, two) == Approx(1.0));
  CHECK(fidelity(atom, two) == 0.0);
  auto rotated = two;
  rotated.amplitudes() *= std::polar(1.0, 2.1);
  const auto basis = StateVector::basis(layout, layout.site_index(0, Sublattice::A));
  CHECK(fidelity(basis, rotated) == Approx(fidelity(basis, two)).epsilon(1e-15));
  CHECK(fidelity(rotated, basis) == Approx(fidelity(basis, rotated)).epsilon(1e-15));

  const auto other = StateVector::basis(BasisLayout(1, 3, false), 0);
  CHECK_THROWS_AS(fidelity(atom, other), ConfigError);
}

TEST_CASE("shape taxonomy") {
  const auto s = preset("fig2");
  auto lower_gap = [&](double x) {
    EigenSystem es = eigendecompose(s.model.hamiltonian_at(x));
    classify(es, s.model.edges(), 1e-6);
    return es.state(es.indices_of(StateClass::Gap)[0]);
  };
  const auto c = shape_classify(photon_distribution(lower_gap(0.65)), s.model.atoms);
  CHECK(c.dominant_atom == 0);
  CHECK(c.shape == Shape::Splitting);
  const auto d = shape_classify(photon_distribution(lower_gap(0.75)), s.model.atoms);
  CHECK(d.dominant_atom == 1);
  CHECK(d.shape == Shape::Combining);

  PhotonDistribution flat;
  flat.sites.assign(200, 1.0 / 200);
  const auto u = shape_classify(flat, s.model.atoms);
  CHECK(u.shape == Shape::Delocalized);
  CHECK(u.footprint_probability < 0.5);
}

TEST_CASE("footprint window wraps around the ring") {
  const auto w = footprint_window({0, 1, 0.9, 0.0}, 10, 1);
  CHECK(w == std::vector<int>{9, 0, 1, 2});
}

TEST_CASE("embedding between layouts") {
  const BasisLayout bare(1, 2, false), full(1, 2, true);
  const auto s = StateVector::basis(bare, bare.site_index(1, Sublattice::B));
  const auto e = s.embedded(full);
  CHECK(std::abs(e.amplitudes()[full.site_index(1, Sublattice::B)]) == 1.0);
  CHECK(e.embedded(bare).amplitudes() == s.amplitudes());
  CHECK_THROWS_AS(StateVector::vacuum(full).embedded(bare), ConfigError);
}
