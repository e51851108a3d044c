#include <algorithm>
#include <cmath>
#include <complex>
#include <numeric>
#include <random>

#include <Eigen/Eigenvalues>

#include "condensate/manybody.hpp"
#include "doctest.h"

using namespace condensate;

namespace {

std::shared_ptr<const OccupationBasis> make_basis(int n, int m) {
  return std::make_shared<const OccupationBasis>(n, m);
}

Eigen::VectorXcd dense_propagate(const Eigen::MatrixXd& h, double dt, const Eigen::VectorXcd& psi) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(h);
  const Eigen::MatrixXcd v = eig.eigenvectors().cast<cplx>();
  Eigen::VectorXcd phases(h.rows());
  for (Eigen::Index i = 0; i < h.rows(); ++i) phases(i) = std::exp(cplx(0.0, -eig.eigenvalues()(i) * dt));
  return v * phases.asDiagonal() * (v.adjoint() * psi);
}

LatticeOrbital random_orbital(int m, double spacing, unsigned seed) {
  std::mt19937 rng(seed);
  std::normal_distribution<double> normal;
  LatticeOrbital phi{Eigen::VectorXcd(m), spacing};
  for (int i = 0; i < m; ++i) phi.values(i) = cplx(normal(rng), normal(rng));
  phi.values /= phi.norm();
  return phi;
}

}  // namespace

TEST_SUITE("manybody") {
  TEST_CASE("occupation basis order and rank") {
    const OccupationBasis basis(3, 4);
    CHECK(basis.dimension() == 20);
    CHECK(OccupationBasis::count(4, 3) == 20);
    auto first = basis.occupation(0);
    CHECK(std::vector<int>(first.begin(), first.end()) == std::vector<int>{3, 0, 0, 0});
    auto last = basis.occupation(19);
    CHECK(std::vector<int>(last.begin(), last.end()) == std::vector<int>{0, 0, 0, 3});
    for (std::size_t i = 0; i < basis.dimension(); ++i) {
      auto occ = basis.occupation(i);
      CHECK(std::accumulate(occ.begin(), occ.end(), 0) == 3);
      CHECK(basis.rank(occ) == i);
      if (i > 0) {
        auto prev = basis.occupation(i - 1);
        CHECK(std::lexicographical_compare(occ.begin(), occ.end(), prev.begin(), prev.end()));
      }
    }
    CHECK_THROWS(OccupationBasis(10, 12, 1000));
  }

  TEST_CASE("single particle reduces to the lattice Schrodinger operator") {
    const LatticeConfig lattice{7, 0.3};
    const auto trap = ExternalPotential::static_harmonic(1.2, 1.0);
    const ManyBodyHamiltonian h = build_hamiltonian(lattice, PairInteraction::none(1), trap);
    Eigen::MatrixXd one = lattice.kinetic_matrix();
    one.diagonal() += trap.sample(lattice.positions(), 0.0);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> a(h.dense(0.0)), b(one);
    CHECK((a.eigenvalues() - b.eigenvalues()).cwiseAbs().maxCoeff() < 1e-10);
  }

  TEST_CASE("on-site interaction only charges doubly occupied sites") {
    const LatticeConfig lattice{2, 0.5};
    const double lambda = 0.8;
    const auto pair = PairInteraction::onsite_proxy(lambda, 1.0, 2);
    const double u = lambda / lattice.spacing;
    const Eigen::MatrixXd interaction = build_hamiltonian(lattice, pair, ExternalPotential::none()).dense(0.0) -
                                        build_hamiltonian(lattice, PairInteraction::none(2), ExternalPotential::none()).dense(0.0);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(interaction);
    CHECK(eig.eigenvalues()(0) == doctest::Approx(0.0));
    CHECK(eig.eigenvalues()(1) == doctest::Approx(2.0 * u));
    CHECK(eig.eigenvalues()(2) == doctest::Approx(2.0 * u));
    CHECK(interaction(1, 1) == doctest::Approx(0.0));

    const ManyBodyHamiltonian h = build_hamiltonian(lattice, pair, ExternalPotential::none());
    SymmetricState mixed{h.basis_ptr(), Eigen::VectorXcd::Unit(3, 1)};
    CHECK(energy_per_particle(mixed, h, 0.0) == doctest::Approx(2.0 / (lattice.spacing * lattice.spacing)));
  }

  TEST_CASE("matrix-free application matches the dense matrix") {
    const LatticeConfig lattice{6, 0.4};
    const auto pair = PairInteraction::hartree({1.0, 0.6, 0.2}, 3);
    const auto trap = ExternalPotential::ramped_harmonic(1.0, 1.2, 0.0, 1.0);
    const ManyBodyHamiltonian h = build_hamiltonian(lattice, pair, trap);
    const SymmetricState psi = random_symmetric_state(h.basis_ptr(), 5);
    for (double t : {0.0, 0.3, 2.0}) {
      const Eigen::MatrixXd dense = h.dense(t);
      CHECK((dense - dense.transpose()).cwiseAbs().maxCoeff() == 0.0);
      CHECK((dense.cast<cplx>() * psi.coeffs - h.apply(t, psi.coeffs)).norm() < 1e-12);
    }
  }

  TEST_CASE("translation invariance without a trap") {
    const LatticeConfig lattice{5, 0.5};
    const ManyBodyHamiltonian h =
        build_hamiltonian(lattice, PairInteraction::hartree({2.0, 1.0}, 3), ExternalPotential::none());
    const SymmetricState psi = random_symmetric_state(h.basis_ptr(), 9);
    const auto& b = h.basis();
    const Eigen::VectorXcd lhs = h.apply(0.0, translate_state(b, psi.coeffs));
    const Eigen::VectorXcd rhs = translate_state(b, h.apply(0.0, psi.coeffs));
    CHECK((lhs - rhs).norm() < 1e-10);
  }

  TEST_CASE("Krylov step against the dense exponential") {
    const LatticeConfig lattice{4, 0.5};
    const auto pair = PairInteraction::hartree({1.3, 0.4}, 3);
    const auto trap = ExternalPotential::static_harmonic(0.7, 1.0);
    const ManyBodyHamiltonian h = build_hamiltonian(lattice, pair, trap);
    REQUIRE(h.basis().dimension() == 20);
    const SymmetricState psi = random_symmetric_state(h.basis_ptr(), 11);
    for (double dt : {0.01, 0.2, 1.0}) {
      const Eigen::VectorXcd krylov = krylov_step(h, 0.0, dt, psi.coeffs);
      CHECK((krylov - dense_propagate(h.dense(0.0), dt, psi.coeffs)).norm() < 1e-9);
    }
  }

  TEST_CASE("zero Hamiltonian leaves the state unchanged") {
    const LatticeConfig lattice{3, 1e8};
    const ManyBodyHamiltonian h = build_hamiltonian(lattice, PairInteraction::none(2), ExternalPotential::none());
    const SymmetricState psi = random_symmetric_state(h.basis_ptr(), 2);
    CHECK((krylov_step(h, 0.0, 0.5, psi.coeffs) - psi.coeffs).norm() < 1e-12);
  }

  TEST_CASE("one particle tracks the free lattice mean-field flow") {
    const LatticeConfig lattice{12, 0.5};
    const ManyBodyHamiltonian h = build_hamiltonian(lattice, PairInteraction::none(1), ExternalPotential::none());
    const GridFunction phi0 = gaussian_orbital(lattice.grid(), 3.0, 0.8, 1.5);
    const SymmetricState psi0 = product_state(LatticeOrbital::from_grid(phi0), h.basis_ptr());
    const auto many = evolve_krylov(psi0, h, 1.0, 0.05, 20);
    const auto mean = evolve({phi0, 0.0}, 1.0, 0.05, FreeField{}, ExternalPotential::none(),
                             {Dispersion::lattice, 20});
    const Eigen::VectorXcd expected = LatticeOrbital::from_grid(mean.samples.back().psi).site_amplitudes();
    CHECK((many.back().state.coeffs - expected).norm() < 1e-8);
  }

  TEST_CASE("product states") {
    const LatticeConfig lattice{2, 1.0};
    auto basis = make_basis(2, 2);
    const cplx a(0.6, 0.1), b(0.2, -0.7);
    LatticeOrbital phi{Eigen::Vector2cd(a, b), 1.0};
    phi.values /= phi.norm();
    const cplx na = phi.values(0), nb = phi.values(1);
    const SymmetricState s = product_state(phi, basis);
    CHECK(std::abs(s.coeffs(0) - na * na) < 1e-14);
    CHECK(std::abs(s.coeffs(1) - std::sqrt(2.0) * na * nb) < 1e-14);
    CHECK(std::abs(s.coeffs(2) - nb * nb) < 1e-14);

    auto basis4 = make_basis(3, 4);
    LatticeOrbital site{Eigen::VectorXcd::Zero(4), 0.25};
    site.values(0) = 2.0;
    const SymmetricState concentrated = product_state(site, basis4);
    CHECK(std::abs(concentrated.coeffs(0) - 1.0) < 1e-14);
    CHECK(concentrated.coeffs.tail(19).norm() < 1e-14);
    CHECK(std::abs(product_state(random_orbital(4, 0.25, 3), basis4).norm() - 1.0) < 1e-14);
  }

  TEST_CASE("energy of a non-interacting product state is separable") {
    const LatticeConfig lattice{8, 0.4};
    const auto trap = ExternalPotential::static_harmonic(1.5, 1.6);
    const ManyBodyHamiltonian h = build_hamiltonian(lattice, PairInteraction::none(3), trap);
    const LatticeOrbital phi = random_orbital(8, 0.4, 21);
    const SymmetricState psi = product_state(phi, h.basis_ptr());
    const Eigen::VectorXcd c = phi.site_amplitudes();
    Eigen::MatrixXd one = lattice.kinetic_matrix();
    one.diagonal() += trap.sample(lattice.positions(), 0.0);
    const double expected = c.dot(one.cast<cplx>() * c).real();
    CHECK(energy_per_particle(psi, h, 0.0) == doctest::Approx(expected).epsilon(1e-12));
    const double mf = gp_energy({phi.to_grid(), 0.0}, trap, 0.0, FreeField{}, Dispersion::lattice).e_total;
    CHECK(std::abs(energy_per_particle(psi, h, 0.0) - mf) < 1e-10);

    const ManyBodyHamiltonian zero =
        build_hamiltonian(LatticeConfig{8, 1e9}, PairInteraction::none(3), ExternalPotential::none());
    CHECK(std::abs(energy_per_particle({zero.basis_ptr(), psi.coeffs}, zero, 0.0)) < 1e-15);
  }

  TEST_CASE("one-body operators") {
    auto basis = make_basis(3, 4);
    const SymmetricState psi = random_symmetric_state(basis, 4);
    const Eigen::MatrixXcd identity = Eigen::MatrixXcd::Identity(4, 4);
    CHECK((apply_one_body(*basis, identity, psi.coeffs) - 3.0 * psi.coeffs).norm() < 1e-12);
  }

  TEST_CASE("first-quantized bridge") {
    auto basis = make_basis(2, 2);
    const SymmetricState one_one{basis, Eigen::VectorXcd::Unit(3, 1)};
    const FirstQuantizedState fq = to_first_quantized(one_one);
    const double r = 1.0 / std::sqrt(2.0);
    CHECK((fq.tensor - Eigen::Vector4cd(0.0, r, r, 0.0)).norm() < 1e-15);

    auto basis3 = make_basis(3, 4);
    for (unsigned seed = 0; seed < 10; ++seed) {
      const SymmetricState a = random_symmetric_state(basis3, seed);
      const SymmetricState b = random_symmetric_state(basis3, seed + 100);
      const FirstQuantizedState fa = to_first_quantized(a), fb = to_first_quantized(b);
      CHECK(fa.symmetry_residual() < 1e-12);
      CHECK((from_first_quantized(fa, basis3).coeffs - a.coeffs).cwiseAbs().maxCoeff() < 1e-12);
      CHECK(std::abs(fa.tensor.dot(fb.tensor) - a.coeffs.dot(b.coeffs)) < 1e-12);
    }
    CHECK_THROWS(to_first_quantized(random_symmetric_state(make_basis(6, 3), 0)));
  }

  TEST_CASE("evolved states stay symmetric") {
    const LatticeConfig lattice{4, 0.5};
    const ManyBodyHamiltonian h = build_hamiltonian(lattice, PairInteraction::hartree({1.0, 0.5}, 3),
                                                    ExternalPotential::ramped_harmonic(1.0, 1.0, 0.0, 0.5));
    const auto samples = evolve_krylov(random_symmetric_state(h.basis_ptr(), 7), h, 0.5, 0.05, 5);
    for (const auto& s : samples) {
      CHECK(to_first_quantized(s.state).symmetry_residual() < 1e-10);
      CHECK(std::abs(s.state.norm() - 1.0) < 1e-10);
    }
  }

  TEST_CASE("interaction validation") {
    const LatticeConfig lattice{4, 1.0};
    CHECK_THROWS(PairInteraction::hartree({1.0, 1.0, 1.0}, 2).validate(lattice));
    CHECK(PairInteraction::hartree({1.0, 0.5}, 4).effective(-3, lattice) == doctest::Approx(0.5 / 4.0));
  }
}
