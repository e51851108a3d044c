// Acceptance run: one PASS/FAIL line per criterion; exit status 1 if any fails.
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <numbers>
#include <random>
#include <sstream>
#include <string>

#include "condensate/experiments.hpp"

using namespace condensate;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* format, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, format, args...);
  return buf;
}

LatticeOrbital random_orbital(int m, double spacing, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal;
  LatticeOrbital phi{Eigen::VectorXcd(m), spacing};
  for (int i = 0; i < m; ++i) phi.values(i) = cplx(normal(rng), normal(rng));
  phi.values /= phi.norm();
  return phi;
}

std::shared_ptr<const OccupationBasis> make_basis(int n, int m) {
  return std::make_shared<const OccupationBasis>(n, m);
}

Outcome identity_criterion() {
  double worst = 0.0;
  for (int n : {2, 3, 4})
    for (int m : {3, 4, 5}) worst = std::max(worst, identity_suite(2024, n, m, 20).max_residual());
  return {worst <= 1e-10, fmt("max residual %.2e over 9 sizes x 20 states", worst)};
}

Outcome inequality_criterion() {
  int trials = 0, violations = 0;
  double margin = -INFINITY;
  for (int n : {2, 3, 4})
    for (int m : {3, 4, 5}) {
      const IdentityReport r = identity_suite(4048, n, m, 56, 1e-12);
      trials += r.trials;
      violations += r.total_violations();
      for (const auto& [name, value] : r.margins) margin = std::max(margin, value);
    }
  return {violations == 0 && trials >= 500,
          fmt("%d violations in %d trials (largest lhs - rhs %.2e)", violations, trials, margin)};
}

Outcome density_criterion() {
  double identity = 0.0, product = 0.0;
  for (auto [n, m] : {std::pair{2, 4}, std::pair{3, 5}, std::pair{4, 6}, std::pair{5, 4}}) {
    auto basis = make_basis(n, m);
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
      const LatticeOrbital phi = random_orbital(m, 1.0 / m, seed);
      const SymmetricState psi = random_symmetric_state(basis, seed + 100);
      const OneParticleDensity d = reduced_density(psi, phi);
      identity = std::max(identity, std::abs(1.0 - d.condensate_overlap - alpha_moment(psi, phi, 2.0)));
      const Eigen::VectorXcd c = phi.site_amplitudes();
      const OneParticleDensity pd = reduced_density(product_state(phi, basis), phi);
      product = std::max(product, (pd.mu - c * c.adjoint()).cwiseAbs().maxCoeff());
    }
  }
  return {identity <= 1e-12 && product <= 1e-12,
          fmt("overlap identity %.2e, product density %.2e", identity, product)};
}

Outcome backend_criterion() {
  double worst = 0.0;
  for (int n = 1; n <= 4; ++n)
    for (int m : {3, 4, 5}) {
      auto basis = make_basis(n, m);
      for (std::uint64_t seed = 0; seed < 5; ++seed) {
        const LatticeOrbital phi = random_orbital(m, 0.5, seed * 7 + n);
        const SymmetricState psi = random_symmetric_state(basis, seed + 31);
        const auto a = pk_weights(psi, phi).w;
        const auto b = pk_weights_first_quantized(to_first_quantized(psi), phi).w;
        for (std::size_t k = 0; k < a.size(); ++k) worst = std::max(worst, std::abs(a[k] - b[k]));
      }
    }
  return {worst <= 1e-10, fmt("max weight gap %.2e for N <= 4", worst)};
}

// i <Psi, [D, n^] Psi> with D = sum_{j != k} v_eff(x_j - x_k) - sum_j V(x_j), N = 2, built densely.
double commutator_oracle(const SymmetricState& state, const LatticeOrbital& phi, const LatticeConfig& lattice,
                         const PairInteraction& pair) {
  const int m = lattice.sites;
  const Eigen::VectorXcd c = phi.site_amplitudes();
  const Eigen::VectorXd v = mean_field_potential(pair.mean_field_kind(lattice), phi.to_grid());
  const Eigen::MatrixXcd p = c * c.adjoint();
  const Eigen::MatrixXcd q = Eigen::MatrixXcd::Identity(m, m) - p;
  auto kron = [m](const Eigen::MatrixXcd& a, const Eigen::MatrixXcd& b) {
    Eigen::MatrixXcd out(m * m, m * m);
    for (int i = 0; i < m; ++i)
      for (int j = 0; j < m; ++j) out.block(i * m, j * m, m, m) = a(i, j) * b;
    return out;
  };
  const Eigen::MatrixXcd count = std::sqrt(0.5) * (kron(p, q) + kron(q, p)) + kron(q, q);
  Eigen::VectorXcd d(m * m);
  for (int x1 = 0; x1 < m; ++x1)
    for (int x2 = 0; x2 < m; ++x2)
      d(x1 * m + x2) = 2.0 * pair.effective(x1 - x2, lattice) - v(x1) - v(x2);
  const Eigen::VectorXcd t = to_first_quantized(state).tensor;
  const Eigen::MatrixXcd comm = d.asDiagonal() * count - count * d.asDiagonal();
  return (cplx(0.0, 1.0) * t.dot(comm * t)).real();
}

Outcome derivative_criterion() {
  SweepConfig cfg = parse_sweep_config(R"(
regime = "hartree"
particles = [3]
[lattice]
sites = 6
spacing = 0.5
[interaction]
kind = "gaussian"
strength = 3.0
width = 1.0
radius = 2
[trap]
kind = "ramped_harmonic"
omega = 1.5
center = 1.5
t_on = 0.0
t_off = 0.2
[initial]
center = 1.5
sigma = 0.5
noise = 0.05
[time]
T = 0.2
dt = 0.01
)");
  const DerivativeTable table = derivative_identity_report(cfg, 3, {0.02, 0.01, 0.005});
  bool orders_ok = !table.orders.empty();
  std::string orders;
  for (double o : table.orders) {
    orders_ok = orders_ok && std::abs(o - 2.0) <= 0.3;
    orders += fmt(" %.3f", o);
  }

  const LatticeConfig lattice{4, 0.5};
  const PairInteraction pair = PairInteraction::hartree({1.5, 0.7}, 2);
  auto basis = make_basis(2, 4);
  double oracle_gap = 0.0;
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const LatticeOrbital phi = random_orbital(4, 0.5, seed + 40);
    const SymmetricState psi = random_symmetric_state(basis, seed + 80);
    const double rate = alpha_derivative_terms(psi, phi, lattice, pair, pair.mean_field_kind(lattice)).rate();
    oracle_gap = std::max(oracle_gap, std::abs(rate - commutator_oracle(psi, phi, lattice, pair)));
  }
  return {orders_ok && oracle_gap <= 1e-10,
          fmt("orders%s; N=2 commutator gap %.2e", orders.c_str(), oracle_gap)};
}

Outcome hartree_criterion(const std::filesystem::path& config) {
  SweepConfig cfg = load_sweep_config(config);
  const auto records = run_convergence(cfg, false);
  bool ok = records.size() == 4;
  std::string alphas;
  std::vector<double> alpha_t;
  for (const auto& r : records) {
    if (!r.ok) return {false, "N=" + std::to_string(r.particles) + " failed: " + r.error};
    alpha_t.push_back(r.tracked(r.samples.back(), cfg.regime));
    alphas += fmt(" %.4g", alpha_t.back());
    for (const auto& s : r.samples) ok = ok && r.tracked(s, cfg.regime) <= s.envelope;
    ok = ok && r.fitted_c <= 50.0;
  }
  for (std::size_t i = 1; i < alpha_t.size(); ++i) ok = ok && alpha_t[i] < alpha_t[i - 1];
  ok = ok && alpha_t.back() < 0.5 * alpha_t.front();
  return {ok, "alpha_T for N = 2,4,6,8:" + alphas};
}

Outcome meanfield_criterion() {
  const Grid grid(128, 12.0);
  const Orbital phi0{gaussian_orbital(grid, 6.0, 0.7, 1.0), 0.0};
  GridFunction kernel(grid);
  for (int i = 0; i < grid.points(); ++i) kernel.values(i) = std::exp(-std::pow(std::min(i, 128 - i) * grid.spacing(), 2));
  const MeanFieldKind kinds[] = {FreeField{}, make_hartree(kernel), make_gross_pitaevskii(5.0)};
  const ExternalPotential traps[] = {ExternalPotential::none(), ExternalPotential::static_harmonic(1.0, 6.0),
                                     ExternalPotential::ramped_harmonic(1.0, 6.0, 0.2, 0.7)};
  double norm_drift = 0.0;
  for (const auto& kind : kinds)
    for (const auto& trap : traps)
      for (const auto& s : evolve(phi0, 1.0, 1e-3, kind, trap, {Dispersion::spectral, 50}).samples)
        norm_drift = std::max(norm_drift, std::abs(norms(s.psi).l2 - 1.0));

  const auto trap = ExternalPotential::static_harmonic(1.0, 6.0);
  const auto gp = make_gross_pitaevskii(5.0);
  auto drift = [&](double dt) {
    const double e0 = gp_energy(phi0, trap, 0.0, gp).e_total;
    double worst = 0.0;
    for (const auto& s : evolve(phi0, 1.0, dt, gp, trap).samples)
      worst = std::max(worst, std::abs(gp_energy(s, trap, s.time, gp).e_total - e0));
    return worst;
  };
  const double ratio = drift(0.02) / drift(0.01);

  const Grid wide(512, 40.0);
  const GridFunction g0 = gaussian_orbital(wide, 20.0, 1.0);
  const GridFunction& g1 = evolve({g0, 0.0}, 0.1, 0.01, FreeField{}, ExternalPotential::none()).samples.back().psi;
  double gauss = 0.0;
  const cplx s(1.0, 0.1);
  for (int i = 0; i < wide.points(); ++i) {
    const double d = wide.x(i) - 20.0;
    gauss = std::max(gauss, std::abs(g0.values(256).real() * std::sqrt(1.0 / s) * std::exp(-d * d / (4.0 * s)) - g1.values(i)));
  }
  return {norm_drift <= 1e-10 && std::abs(ratio - 4.0) <= 0.5 && gauss <= 1e-6,
          fmt("norm drift %.2e, energy drift ratio %.3f, free Gaussian error %.2e", norm_drift, ratio, gauss)};
}

Outcome scattering_criterion() {
  const double kappa = 2.0;
  const double barrier = scattering_length_value(RadialPotential::square(kappa * kappa, 1.0));
  const double exact_barrier = 1.0 - std::tanh(kappa) / kappa;
  const double k = 1.2;
  const double well = scattering_length_value(RadialPotential::square(-k * k, 1.0, false));
  const double exact_well = 1.0 - std::tan(k) / k;
  const RadialPotential weak = RadialPotential::square(1e-3, 1.0);
  const double born_gap = std::abs(scattering_length_value(weak) - born_approximation(weak)) / born_approximation(weak);
  const double e1 = std::abs(barrier - exact_barrier) / exact_barrier;
  const double e2 = std::abs(well - exact_well) / std::abs(exact_well);
  return {e1 <= 1e-6 && e2 <= 1e-6 && born_gap < 0.01,
          fmt("barrier rel. error %.2e, well rel. error %.2e, Born gap %.2e", e1, e2, born_gap)};
}

Outcome micro_criterion() {
  const RadialPotential v = RadialPotential::square(1.0, 1.0);
  int points = 0, failures = 0;
  double worst_residual = 0.0, lowest = INFINITY;
  for (double b1 : {0.25, 2.0 / 7.0})
    for (double b2 : {0.5, 1.0})
      for (double n : {1e2, 1e3, 1e4}) {
        const ScatterRow row = scatter_point(v, 1.0, b1, b2, n);
        ++points;
        const double residual = std::abs(row.micro.residual_scattering_length) / (row.micro.a / n);
        worst_residual = std::max(worst_residual, residual);
        lowest = std::min(lowest, row.positivity.lowest_eigenvalue);
        const bool ok = residual <= 1e-8 && row.bounds.all_ok() && row.positivity.lowest_eigenvalue >= -1e-8 &&
                        row.monotone && row.f_in_unit && row.f_above_j && row.micro.K_spread <= 1e-8;
        if (!ok) ++failures;
      }
  return {failures == 0, fmt("%d/%d parameter points pass; max |scat(v-W)| N/a %.2e, lowest eigenvalue %.3e",
                             points - failures, points, worst_residual, lowest)};
}

Outcome class_criterion() {
  const ClassReport report = class_check(RadialPotential::square(1e6, 1.0), 1.0, {1e3}, 0.1);
  const double gap = std::abs(report.rows.front().relative_gap);
  return {gap < 0.01, fmt("relative gap %.2e at N = 1e3", gap)};
}

Outcome envelope_criterion() {
  bool decreasing = true;
  double previous = INFINITY;
  std::string values;
  for (double n : {1e3, 1e4, 1e5, 1e6}) {
    const double e = gronwall_envelope(0.0, 1.0, n, 1.0, EnvelopeMode::gp, 1.0, 0.1);
    decreasing = decreasing && e < previous;
    previous = e;
    values += fmt(" %.4f", e);
  }
  return {decreasing, "gp envelope at N = 1e3..1e6:" + values};
}

std::vector<std::string> data_rows(const std::filesystem::path& path) {
  std::ifstream in(path);
  std::vector<std::string> rows;
  for (std::string line; std::getline(in, line);)
    if (line.empty() || line[0] != '#') rows.push_back(line);
  return rows;
}

std::string contents(const std::filesystem::path& path) {
  std::ifstream in(path);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

Outcome determinism_criterion(const std::filesystem::path& config) {
  std::vector<IdentityReport> a, b;
  for (int n : {2, 3}) {
    a.push_back(identity_suite(7, n, 4, 5));
    b.push_back(identity_suite(7, n, 4, 5));
  }
  const bool checks_same = identity_report_json(a, 7) == identity_report_json(b, 7);

  const auto root = std::filesystem::temp_directory_path() / "condensate_acceptance";
  std::filesystem::remove_all(root);
  SweepConfig cfg = load_sweep_config(config);
  cfg.output_dir = root / "first";
  run_convergence(cfg);
  cfg.output_dir = root / "second";
  run_convergence(cfg);
  bool runs_same = contents(root / "first" / "run_meta.json") == contents(root / "second" / "run_meta.json");
  int files = 0;
  for (const auto& entry : std::filesystem::directory_iterator(root / "first")) {
    if (entry.path().extension() != ".csv") continue;
    ++files;
    runs_same = runs_same && data_rows(entry.path()) == data_rows(root / "second" / entry.path().filename());
  }
  std::filesystem::remove_all(root);
  return {checks_same && runs_same && files > 1,
          fmt("checks JSON %s, converge outputs %s (%d CSV files)", checks_same ? "identical" : "DIFFER",
              runs_same ? "identical" : "DIFFER", files)};
}

}  // namespace

int main() {
  const std::filesystem::path configs = CONDENSATE_CONFIG_DIR;
  struct Criterion {
    const char* name;
    double budget_seconds;
    std::function<Outcome()> run;
  };
  const std::vector<Criterion> criteria{
      {"projector identity suite", 30.0, identity_criterion},
      {"inequalities (e) and komb2", 0.0, inequality_criterion},
      {"density-matrix identity", 0.0, density_criterion},
      {"backend equivalence", 0.0, backend_criterion},
      {"derivative identity", 120.0, derivative_criterion},
      {"Hartree convergence trend", 600.0, [&] { return hartree_criterion(configs / "hartree.toml"); }},
      {"mean-field solver", 0.0, meanfield_criterion},
      {"scattering oracle", 0.0, scattering_criterion},
      {"microstructure", 60.0, micro_criterion},
      {"beta = 1 class check", 0.0, class_criterion},
      {"envelope asymptotics", 0.0, envelope_criterion},
      {"determinism", 0.0, [&] { return determinism_criterion(configs / "quick.toml"); }},
  };

  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const auto& c = criteria[i];
    const auto start = std::chrono::steady_clock::now();
    Outcome outcome;
    try {
      outcome = c.run();
    } catch (const std::exception& e) {
      outcome = {false, std::string("exception: ") + e.what()};
    }
    const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (c.budget_seconds > 0.0 && seconds > c.budget_seconds) {
      outcome.pass = false;
      outcome.detail += fmt(" [over the %.0f s budget]", c.budget_seconds);
    }
    if (!outcome.pass) ++failed;
    std::printf("%s %2zu %-28s %s (%.1f s)\n", outcome.pass ? "PASS" : "FAIL", i + 1, c.name,
                outcome.detail.c_str(), seconds);
    std::fflush(stdout);
  }
  std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
  return failed == 0 ? 0 : 1;
}
