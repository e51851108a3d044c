#include <cmath>
#include <numbers>
#include <sstream>

#include "condensate/meanfield.hpp"
#include "doctest.h"

using namespace condensate;

namespace {

double max_energy_drift(const Orbital& phi0, double dt, const MeanFieldKind& kind, const ExternalPotential& trap) {
  const auto traj = evolve(phi0, 1.0, dt, kind, trap);
  const double e0 = gp_energy(phi0, trap, 0.0, kind).e_total;
  double drift = 0.0;
  for (const auto& s : traj.samples) drift = std::max(drift, std::abs(gp_energy(s, trap, s.time, kind).e_total - e0));
  return drift;
}

}  // namespace

TEST_SUITE("meanfield") {
  TEST_CASE("trap presets") {
    const auto ramp = ExternalPotential::ramped_harmonic(2.0, 1.0, 0.5, 1.5);
    CHECK(ramp.ramp(0.2) == 1.0);
    CHECK(ramp.ramp(1.0) == doctest::Approx(0.5));
    CHECK(ramp.ramp(2.0) == 0.0);
    CHECK(ramp.value(2.0, 0.0) == doctest::Approx(4.0));
    CHECK(ramp.time_derivative(2.0, 1.0) == doctest::Approx(-4.0));
    CHECK(ExternalPotential::none().value(3.0, 0.0) == 0.0);
    CHECK(ExternalPotential::static_harmonic(1.0, 0.0).is_static());
    CHECK_FALSE(ramp.is_static());
  }

  TEST_CASE("mean-field potentials") {
    const Grid grid(32, 4.0);
    GridFunction phi = gaussian_orbital(grid, 2.0, 0.5, 1.0);
    CHECK(mean_field_potential(FreeField{}, phi).cwiseAbs().maxCoeff() == 0.0);

    GridFunction flat(grid, Eigen::VectorXcd::Constant(32, 1.0 / std::sqrt(4.0)));
    const Eigen::VectorXd v = mean_field_potential(make_gross_pitaevskii(2.0 * 0.3), flat);
    CHECK((v.array() - 2.0 * 0.3 / 4.0).abs().maxCoeff() < 1e-14);

    GridFunction kernel(grid);
    kernel.values(0) = 1.7 / grid.spacing();
    const Eigen::VectorXd hv = mean_field_potential(make_hartree(kernel), phi);
    CHECK((hv - 1.7 * phi.values.cwiseAbs2()).cwiseAbs().maxCoeff() < 1e-10);
  }

  TEST_CASE("lattice dispersion is the symbol of the second difference") {
    const Grid grid(12, 3.0);
    const Eigen::VectorXd sym = kinetic_symbol(grid, Dispersion::lattice);
    const Eigen::VectorXd k = grid.wavenumbers();
    const double h = grid.spacing();
    for (int i = 0; i < 12; ++i) CHECK(sym(i) == doctest::Approx(2.0 * (1.0 - std::cos(k(i) * h)) / (h * h)));
    CHECK((kinetic_symbol(grid, Dispersion::spectral) - k.cwiseAbs2()).norm() < 1e-12);
  }

  TEST_CASE("plane wave picks up the free phase") {
    const Grid grid(32, 2.0 * std::numbers::pi);
    const int mode = 3;
    GridFunction f(grid);
    for (int i = 0; i < 32; ++i) f.values(i) = std::exp(cplx(0.0, mode * grid.x(i))) / std::sqrt(grid.length());
    const double dt = 0.05;
    const Orbital out = strang_step({f, 0.0}, dt, FreeField{}, ExternalPotential::none());
    CHECK((out.psi.values - std::exp(cplx(0.0, -mode * mode * dt)) * f.values).cwiseAbs().maxCoeff() < 1e-13);

    const EnergyBreakdown e = gp_energy({f, 0.0}, ExternalPotential::none(), 0.0, FreeField{});
    CHECK(e.e_kin == doctest::Approx(mode * mode).epsilon(1e-12));
    CHECK(std::abs(e.e_pot) < 1e-14);
  }

  TEST_CASE("free Gaussian follows the analytic spreading solution") {
    const Grid grid(512, 40.0);
    const double sigma = 1.0, x0 = 20.0, t = 0.1;
    const GridFunction phi0 = gaussian_orbital(grid, x0, sigma);
    const auto traj = evolve({phi0, 0.0}, t, 0.01, FreeField{}, ExternalPotential::none());
    const GridFunction& out = traj.samples.back().psi;
    const double amplitude = phi0.values(256).real();
    const cplx s(sigma * sigma, t);
    double err = 0.0;
    for (int i = 0; i < grid.points(); ++i) {
      const double d = grid.x(i) - x0;
      const cplx exact = amplitude * std::sqrt(sigma * sigma / s) * std::exp(-d * d / (4.0 * s));
      err = std::max(err, std::abs(exact - out.values(i)));
    }
    CHECK(err < 1e-6);
    CHECK(traj.samples.size() == 11);
  }

  TEST_CASE("constant density solves the GP flow as a pure phase") {
    const Grid grid(16, 5.0);
    const double g = 3.0, t = 0.7;
    GridFunction f(grid, Eigen::VectorXcd::Constant(16, 1.0 / std::sqrt(5.0)));
    const auto traj = evolve({f, 0.0}, t, 0.01, make_gross_pitaevskii(g), ExternalPotential::none());
    const auto& out = traj.samples.back().psi.values;
    CHECK((out - std::exp(cplx(0.0, -g * t / 5.0)) * f.values).cwiseAbs().maxCoeff() < 1e-12);

    const EnergyBreakdown e = gp_energy({f, 0.0}, ExternalPotential::none(), 0.0, make_gross_pitaevskii(g));
    CHECK(std::abs(e.e_kin) < 1e-14);
    CHECK(e.e_pot == doctest::Approx(0.5 * g / 5.0).epsilon(1e-13));
  }

  TEST_CASE("harmonic energy of a Gaussian matches the closed form") {
    const Grid grid(512, 40.0);
    const double sigma = 0.8, omega = 1.3;
    const GridFunction phi = gaussian_orbital(grid, 20.0, sigma);
    const EnergyBreakdown e =
        gp_energy({phi, 0.0}, ExternalPotential::static_harmonic(omega, 20.0), 0.0, FreeField{});
    CHECK(std::abs(e.e_kin - 1.0 / (4.0 * sigma * sigma)) < 1e-6);
    CHECK(std::abs(e.e_pot - omega * omega * sigma * sigma) < 1e-6);
  }

  TEST_CASE("zero total time returns the initial orbital") {
    const Grid grid(16, 4.0);
    const Orbital phi0{gaussian_orbital(grid, 2.0, 0.5), 0.0};
    const auto traj = evolve(phi0, 0.0, 0.1, FreeField{}, ExternalPotential::none());
    REQUIRE(traj.samples.size() == 1);
    CHECK(traj.samples[0].psi.values == phi0.psi.values);
  }

  TEST_CASE("norm conservation for every kind and trap") {
    const Grid grid(64, 8.0);
    const Orbital phi0{gaussian_orbital(grid, 3.0, 0.6, 2.0), 0.0};
    GridFunction kernel(grid);
    for (int i = 0; i < 64; ++i) kernel.values(i) = std::exp(-std::pow(std::min(i, 64 - i) * grid.spacing(), 2));
    const MeanFieldKind kinds[] = {FreeField{}, make_hartree(kernel), make_gross_pitaevskii(4.0)};
    const ExternalPotential traps[] = {ExternalPotential::none(), ExternalPotential::static_harmonic(1.0, 4.0),
                                       ExternalPotential::ramped_harmonic(1.0, 4.0, 0.2, 0.6)};
    for (const auto& kind : kinds)
      for (const auto& trap : traps) {
        const auto traj = evolve(phi0, 1.0, 1e-3, kind, trap, {Dispersion::spectral, 100});
        for (const auto& s : traj.samples) CHECK(std::abs(norms(s.psi).l2 - 1.0) < 1e-10);
      }
  }

  TEST_CASE("energy drift is second order in dt") {
    const Grid grid(128, 12.0);
    const Orbital phi0{gaussian_orbital(grid, 6.0, 0.7, 1.0), 0.0};
    const auto trap = ExternalPotential::static_harmonic(1.0, 6.0);
    const auto kind = make_gross_pitaevskii(5.0);
    const double coarse = max_energy_drift(phi0, 0.02, kind, trap);
    const double fine = max_energy_drift(phi0, 0.01, kind, trap);
    CHECK(coarse / fine == doctest::Approx(4.0).epsilon(0.125));
    CHECK(max_energy_drift(phi0, 1e-3, kind, trap) < 2e-6);
  }

  TEST_CASE("decay integral is the trapezoid rule over samples") {
    const Grid grid(64, 8.0);
    const Orbital phi0{gaussian_orbital(grid, 4.0, 0.6), 0.0};
    const auto trap = ExternalPotential::ramped_harmonic(1.5, 4.0, 0.1, 0.4);
    const auto traj = evolve(phi0, 0.5, 0.01, make_gross_pitaevskii(1.0), trap, {Dispersion::spectral, 5});
    double trapezoid = 0.0;
    for (std::size_t i = 1; i < traj.samples.size(); ++i) {
      const SupNorms a = sup_norms(traj.samples[i - 1].psi), b = sup_norms(traj.samples[i].psi);
      trapezoid += 0.5 * (traj.samples[i].time - traj.samples[i - 1].time) *
                   (a.linf + a.grad_linf + b.linf + b.grad_linf);
    }
    CHECK(std::isfinite(traj.report.decay_integral));
    CHECK(traj.report.decay_integral == doctest::Approx(trapezoid).epsilon(1e-14));
  }

  TEST_CASE("trajectory csv has one row per sample") {
    const Grid grid(16, 4.0);
    const auto traj = evolve({gaussian_orbital(grid, 2.0, 0.5), 0.0}, 0.1, 0.01, FreeField{},
                             ExternalPotential::none(), {Dispersion::spectral, 5});
    std::ostringstream out;
    write_trajectory_csv(out, traj.samples, FreeField{}, ExternalPotential::none());
    std::istringstream in(out.str());
    std::string line;
    std::getline(in, line);
    CHECK(line == "t,norm,e_kin,e_pot,e_total,linf,grad_linf");
    int rows = 0;
    while (std::getline(in, line)) ++rows;
    CHECK(rows == static_cast<int>(traj.samples.size()));
  }

  TEST_CASE("non-finite input is reported") {
    const Grid grid(16, 4.0);
    GridFunction f = gaussian_orbital(grid, 2.0, 0.5);
    f.values(3) = cplx(std::nan(""), 0.0);
    CHECK_THROWS_AS(strang_step({f, 0.0}, 0.01, FreeField{}, ExternalPotential::none()), std::runtime_error);
  }
}
