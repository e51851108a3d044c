#include "condensate/meanfield.hpp"

#include <cmath>
#include <iomanip>
#include <ostream>
#include <stdexcept>

namespace condensate {

ExternalPotential ExternalPotential::none() { return ExternalPotential{}; }

ExternalPotential ExternalPotential::static_harmonic(double omega, double center) {
  ExternalPotential p;
  p.preset_ = Preset::static_harmonic;
  p.omega_ = omega;
  p.center_ = center;
  return p;
}

ExternalPotential ExternalPotential::ramped_harmonic(double omega, double center, double t_on,
                                                     double t_off) {
  if (!(t_off > t_on)) throw std::invalid_argument("ramped_harmonic: need t_off > t_on");
  ExternalPotential p;
  p.preset_ = Preset::ramped_harmonic;
  p.omega_ = omega;
  p.center_ = center;
  p.t_on_ = t_on;
  p.t_off_ = t_off;
  return p;
}

double ExternalPotential::ramp(double t) const {
  switch (preset_) {
    case Preset::none:
      return 0.0;
    case Preset::static_harmonic:
      return 1.0;
    case Preset::ramped_harmonic:
      if (t <= t_on_) return 1.0;
      if (t >= t_off_) return 0.0;
      return (t_off_ - t) / (t_off_ - t_on_);
  }
  return 0.0;
}

double ExternalPotential::ramp_rate(double t) const {
  if (preset_ != Preset::ramped_harmonic) return 0.0;
  if (t <= t_on_ || t >= t_off_) return 0.0;
  return -1.0 / (t_off_ - t_on_);
}

double ExternalPotential::value(double x, double t) const {
  const double d = x - center_;
  return omega_ * omega_ * d * d * ramp(t);
}

double ExternalPotential::time_derivative(double x, double t) const {
  const double d = x - center_;
  return omega_ * omega_ * d * d * ramp_rate(t);
}

Eigen::VectorXd ExternalPotential::sample(const Eigen::VectorXd& xs, double t) const {
  Eigen::VectorXd out(xs.size());
  for (Eigen::Index i = 0; i < xs.size(); ++i) out(i) = value(xs(i), t);
  return out;
}

Eigen::VectorXd ExternalPotential::sample(const Grid& grid, double t) const {
  Eigen::VectorXd xs(grid.points());
  for (int i = 0; i < grid.points(); ++i) xs(i) = grid.x(i);
  return sample(xs, t);
}

MeanFieldKind make_hartree(GridFunction kernel) {
  if (kernel.values.imag().cwiseAbs().maxCoeff() > 0.0)
    throw std::invalid_argument("hartree kernel must be real");
  if (kernel.values.real().minCoeff() < 0.0)
    throw std::invalid_argument("hartree kernel must be nonnegative");
  return HartreeField{std::move(kernel)};
}

MeanFieldKind make_gross_pitaevskii(double coupling) {
  if (!std::isfinite(coupling) || coupling < 0.0)
    throw std::invalid_argument("gp coupling must be finite and nonnegative");
  return GrossPitaevskiiField{coupling};
}

Eigen::VectorXd kinetic_symbol(const Grid& grid, Dispersion dispersion) {
  Eigen::VectorXd k = grid.wavenumbers();
  if (dispersion == Dispersion::spectral) return k.array().square();
  const double h = grid.spacing();
  return (4.0 / (h * h)) * (k.array() * (h / 2.0)).sin().square();
}

Eigen::VectorXd mean_field_potential(const MeanFieldKind& kind, const GridFunction& phi) {
  const Eigen::VectorXd density = phi.values.cwiseAbs2();
  return std::visit(
      [&](const auto& k) -> Eigen::VectorXd {
        using T = std::decay_t<decltype(k)>;
        if constexpr (std::is_same_v<T, FreeField>) {
          return Eigen::VectorXd::Zero(phi.size());
        } else if constexpr (std::is_same_v<T, HartreeField>) {
          GridFunction rho(phi.grid, density.cast<cplx>());
          return periodic_convolution(k.kernel, rho).values.real();
        } else {
          return k.coupling * density;
        }
      },
      kind);
}

namespace {

void kick(GridFunction& phi, const Eigen::VectorXd& potential, double tau) {
  for (int i = 0; i < phi.size(); ++i) phi.values(i) *= std::polar(1.0, -tau * potential(i));
}

}  // namespace

Orbital strang_step(const Orbital& phi, double dt, const MeanFieldKind& kind,
                    const ExternalPotential& trap, const StepOptions& options) {
  if (!(dt != 0.0) || !std::isfinite(dt)) throw std::invalid_argument("strang_step: bad dt");
  Orbital next = phi;
  const Eigen::VectorXd trap_mid = trap.sample(phi.psi.grid, phi.time + dt / 2.0);

  // |phi| is invariant under the kicks, so V_phi is the same on both sides of each kick.
  kick(next.psi, trap_mid + mean_field_potential(kind, next.psi), dt / 2.0);

  const Eigen::VectorXd symbol = kinetic_symbol(phi.psi.grid, options.dispersion);
  Eigen::VectorXcd flow(symbol.size());
  for (Eigen::Index i = 0; i < symbol.size(); ++i) flow(i) = std::polar(1.0, -dt * symbol(i));
  next.psi = fourier_multiply(next.psi, flow);

  kick(next.psi, trap_mid + mean_field_potential(kind, next.psi), dt / 2.0);
  next.time = phi.time + dt;

  if (!next.psi.values.allFinite())
    throw std::runtime_error("strang_step: non-finite values (blow-up) at t=" +
                             std::to_string(next.time));
  return next;
}

SupNorms sup_norms(const GridFunction& phi) {
  return {phi.values.cwiseAbs().maxCoeff(), spectral_gradient(phi).values.cwiseAbs().maxCoeff(),
          spectral_laplacian(phi).values.cwiseAbs().maxCoeff()};
}

MeanFieldTrajectory evolve(const Orbital& phi0, double total_time, double dt,
                           const MeanFieldKind& kind, const ExternalPotential& trap,
                           const EvolveOptions& options) {
  if (total_time < 0.0) throw std::invalid_argument("evolve: negative total time");
  if (options.sample_stride < 1) throw std::invalid_argument("evolve: stride must be >= 1");
  MeanFieldTrajectory out;
  out.samples.push_back(phi0);
  if (total_time > 0.0) {
    if (!(dt > 0.0) || dt > total_time) throw std::invalid_argument("evolve: need 0 < dt <= T");
    const long steps = std::lround(total_time / dt);
    const double step = total_time / static_cast<double>(steps);
    Orbital phi = phi0;
    StepOptions step_options{options.dispersion};
    for (long n = 1; n <= steps; ++n) {
      phi = strang_step(phi, step, kind, trap, step_options);
      phi.time = phi0.time + n * step;
      if (n % options.sample_stride == 0 || n == steps) out.samples.push_back(phi);
    }
  }

  double previous_rate = 0.0;
  for (std::size_t i = 0; i < out.samples.size(); ++i) {
    const SupNorms s = sup_norms(out.samples[i].psi);
    out.report.sup_linf = std::max(out.report.sup_linf, s.linf);
    out.report.sup_grad_linf = std::max(out.report.sup_grad_linf, s.grad_linf);
    out.report.sup_lap_linf = std::max(out.report.sup_lap_linf, s.lap_linf);
    const double rate = s.linf + s.grad_linf;
    if (i > 0) {
      const double span = out.samples[i].time - out.samples[i - 1].time;
      out.report.decay_integral += 0.5 * span * (rate + previous_rate);
    }
    previous_rate = rate;
  }
  return out;
}

EnergyBreakdown gp_energy(const Orbital& phi, const ExternalPotential& trap, double t,
                          const MeanFieldKind& kind, Dispersion dispersion) {
  const GridFunction& f = phi.psi;
  const double h = f.grid.spacing();
  const Eigen::VectorXd density = f.values.cwiseAbs2();

  EnergyBreakdown e;
  const Eigen::VectorXcd spectrum = fourier_transform(f.values);
  e.e_kin = h * spectrum.cwiseAbs2().dot(kinetic_symbol(f.grid, dispersion));

  e.e_pot = h * density.dot(trap.sample(f.grid, t));
  if (std::holds_alternative<HartreeField>(kind) ||
      std::holds_alternative<GrossPitaevskiiField>(kind)) {
    // Interaction energy carries 1/2 of the mean-field potential in both variants.
    e.e_pot += 0.5 * h * density.dot(mean_field_potential(kind, f));
  }
  e.e_total = e.e_kin + e.e_pot;
  return e;
}

void write_trajectory_csv(std::ostream& out, const std::vector<Orbital>& samples,
                          const MeanFieldKind& kind, const ExternalPotential& trap,
                          Dispersion dispersion) {
  out << "t,norm,e_kin,e_pot,e_total,linf,grad_linf\n";
  out << std::setprecision(17);
  for (const Orbital& s : samples) {
    const EnergyBreakdown e = gp_energy(s, trap, s.time, kind, dispersion);
    const Norms n = norms(s.psi);
    const SupNorms sup = sup_norms(s.psi);
    out << s.time << ',' << n.l2 << ',' << e.e_kin << ',' << e.e_pot << ',' << e.e_total << ','
        << sup.linf << ',' << sup.grad_linf << '\n';
  }
}

GridFunction gaussian_orbital(const Grid& grid, double center, double sigma, double momentum) {
  GridFunction f(grid);
  for (int i = 0; i < grid.points(); ++i) {
    const double d = grid.x(i) - center;
    f.values(i) = std::polar(std::exp(-d * d / (4.0 * sigma * sigma)), momentum * grid.x(i));
  }
  normalize(f);
  return f;
}

void normalize(GridFunction& f) {
  const double n = norms(f).l2;
  if (!(n > 0.0)) throw std::invalid_argument("normalize: zero function");
  f.values /= n;
}

}  // namespace condensate
