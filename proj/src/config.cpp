#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "json.hpp"
#include "toml.hpp"

#include "condensate/experiments.hpp"

namespace condensate {

namespace {

using Keys = std::set<std::string>;

void reject_unknown(const toml::table& table, const Keys& allowed, const std::string& where) {
  for (const auto& [key, node] : table) {
    const std::string name(key.str());
    if (!allowed.count(name)) throw ConfigError("unknown key '" + name + "' in " + where);
  }
}

const toml::table* section(const toml::table& root, const std::string& name) {
  const toml::node* node = root.get(name);
  if (!node) return nullptr;
  const toml::table* t = node->as_table();
  if (!t) throw ConfigError("'" + name + "' must be a table");
  return t;
}

double get_double(const toml::table& t, const std::string& key, double fallback, const std::string& where) {
  const toml::node* node = t.get(key);
  if (!node) return fallback;
  if (auto v = node->value<double>()) return *v;
  throw ConfigError(where + "." + key + " must be a number");
}

std::int64_t get_int(const toml::table& t, const std::string& key, std::int64_t fallback,
                     const std::string& where) {
  const toml::node* node = t.get(key);
  if (!node) return fallback;
  if (node->is_integer()) return *node->value<std::int64_t>();
  throw ConfigError(where + "." + key + " must be an integer");
}

std::string get_string(const toml::table& t, const std::string& key, const std::string& fallback,
                       const std::string& where) {
  const toml::node* node = t.get(key);
  if (!node) return fallback;
  if (auto v = node->value<std::string>()) return *v;
  throw ConfigError(where + "." + key + " must be a string");
}

std::vector<double> get_doubles(const toml::table& t, const std::string& key, std::vector<double> fallback,
                                const std::string& where) {
  const toml::node* node = t.get(key);
  if (!node) return fallback;
  const toml::array* arr = node->as_array();
  if (!arr) throw ConfigError(where + "." + key + " must be an array");
  std::vector<double> out;
  for (const auto& item : *arr) {
    auto v = item.value<double>();
    if (!v) throw ConfigError(where + "." + key + " must contain numbers");
    out.push_back(*v);
  }
  return out;
}

toml::table parse_toml(const std::string& text) {
  try {
    return toml::parse(text);
  } catch (const toml::parse_error& e) {
    std::ostringstream msg;
    msg << "TOML parse error: " << e.description() << " (line " << e.source().begin.line << ")";
    throw ConfigError(msg.str());
  }
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file: " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

}  // namespace

std::string regime_name(Regime regime) { return regime == Regime::hartree ? "hartree" : "gp_proxy"; }

void SweepConfig::validate() const {
  if (n_list.empty()) throw ConfigError("particles: need at least one N");
  for (std::size_t i = 0; i < n_list.size(); ++i) {
    if (n_list[i] < 2) throw ConfigError("particles: every N must be >= 2");
    if (i > 0 && n_list[i] <= n_list[i - 1]) throw ConfigError("particles: N list must be ascending");
    if (OccupationBasis::count(lattice.sites, n_list[i]) > max_dimension)
      throw ConfigError("particles: N=" + std::to_string(n_list[i]) + " exceeds the basis dimension guard");
  }
  if (lattice.sites < 4) throw ConfigError("lattice.sites must be >= 4");
  if (!(lattice.spacing > 0.0)) throw ConfigError("lattice.spacing must be positive");
  if (!(total_time > 0.0) || !(dt > 0.0) || dt > total_time)
    throw ConfigError("time: need T > 0 and 0 < dt <= T");
  if (sample_stride < 1) throw ConfigError("time.stride must be >= 1");
  if (krylov.dimension < 2 || !(krylov.tolerance > 0.0) || krylov.max_substeps < 1)
    throw ConfigError("krylov: bad options");
  if (!(initial.sigma > 0.0)) throw ConfigError("initial.sigma must be positive");
  if (!(initial.noise >= 0.0)) throw ConfigError("initial.noise must be >= 0");
  const auto& k = interaction.kind;
  if (k != "none" && k != "gaussian" && k != "profile" && k != "onsite")
    throw ConfigError("interaction.kind must be none, gaussian, profile or onsite");
  if (regime == Regime::gp_proxy && k != "onsite" && k != "none")
    throw ConfigError("regime gp_proxy needs interaction.kind = onsite");
  if (regime == Regime::hartree && k == "onsite")
    throw ConfigError("regime hartree cannot use the onsite proxy");
  if (trap.kind != "none" && trap.kind != "static_harmonic" && trap.kind != "ramped_harmonic")
    throw ConfigError("trap.kind must be none, static_harmonic or ramped_harmonic");
  if (trap.kind == "ramped_harmonic" && !(trap.t_off > trap.t_on))
    throw ConfigError("trap: ramped_harmonic needs t_off > t_on");
  if (initial.kind != "gaussian" && initial.kind != "uniform")
    throw ConfigError("initial.kind must be gaussian or uniform");
  try {
    pair(n_list.back()).validate(lattice);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
}

PairInteraction SweepConfig::pair(int particles) const {
  const auto& p = interaction;
  if (p.kind == "none") return PairInteraction::none(particles);
  if (p.kind == "onsite") return PairInteraction::onsite_proxy(p.lambda, p.beta, particles);
  if (p.kind == "profile") return PairInteraction::hartree(p.profile, particles);
  std::vector<double> profile(p.radius + 1);
  for (int d = 0; d <= p.radius; ++d)
    profile[d] = p.strength * std::exp(-0.5 * d * d / (p.width * p.width));
  return PairInteraction::hartree(std::move(profile), particles);
}

ExternalPotential SweepConfig::potential() const {
  if (trap.kind == "static_harmonic") return ExternalPotential::static_harmonic(trap.omega, trap.center);
  if (trap.kind == "ramped_harmonic")
    return ExternalPotential::ramped_harmonic(trap.omega, trap.center, trap.t_on, trap.t_off);
  return ExternalPotential::none();
}

LatticeOrbital SweepConfig::initial_orbital() const {
  const Grid grid = lattice.grid();
  if (initial.kind == "uniform") {
    GridFunction f(grid, Eigen::VectorXcd::Constant(grid.points(), 1.0));
    normalize(f);
    return LatticeOrbital::from_grid(f);
  }
  return LatticeOrbital::from_grid(gaussian_orbital(grid, initial.center, initial.sigma, initial.momentum));
}

MeanFieldKind SweepConfig::kind(int particles) const {
  const PairInteraction p = pair(particles);
  if (p.vanishes()) return FreeField{};
  return p.mean_field_kind(lattice);
}

SymmetricState SweepConfig::initial_state(int particles) const {
  auto basis = std::make_shared<const OccupationBasis>(particles, lattice.sites, max_dimension);
  SymmetricState state = product_state(initial_orbital(), basis);
  if (initial.noise > 0.0) {
    const SymmetricState noise = random_symmetric_state(basis, seed + static_cast<std::uint64_t>(particles));
    state.coeffs += initial.noise * noise.coeffs;
    state.coeffs.normalize();
  }
  return state;
}

SweepConfig parse_sweep_config(const std::string& text) {
  const toml::table root = parse_toml(text);
  reject_unknown(root,
                 {"regime", "seed", "particles", "lattice", "interaction", "trap", "time", "initial",
                  "krylov", "envelope", "output", "basis", "meanfield", "scatter"},
                 "config");
  SweepConfig cfg;
  const std::string regime = get_string(root, "regime", "hartree", "config");
  if (regime == "hartree")
    cfg.regime = Regime::hartree;
  else if (regime == "gp_proxy")
    cfg.regime = Regime::gp_proxy;
  else
    throw ConfigError("regime must be hartree or gp_proxy");
  const std::int64_t seed = get_int(root, "seed", 0, "config");
  if (seed < 0) throw ConfigError("seed must be nonnegative");
  cfg.seed = static_cast<std::uint64_t>(seed);

  if (root.get("particles")) {
    cfg.n_list.clear();
    for (double n : get_doubles(root, "particles", {}, "config")) {
      if (n != std::floor(n)) throw ConfigError("particles must be integers");
      cfg.n_list.push_back(static_cast<int>(n));
    }
  }
  if (const auto* t = section(root, "lattice")) {
    reject_unknown(*t, {"sites", "spacing"}, "lattice");
    cfg.lattice.sites = static_cast<int>(get_int(*t, "sites", cfg.lattice.sites, "lattice"));
    cfg.lattice.spacing = get_double(*t, "spacing", cfg.lattice.spacing, "lattice");
  }
  if (const auto* t = section(root, "interaction")) {
    reject_unknown(*t, {"kind", "strength", "width", "radius", "profile", "lambda", "beta"}, "interaction");
    auto& p = cfg.interaction;
    p.kind = get_string(*t, "kind", p.kind, "interaction");
    p.strength = get_double(*t, "strength", p.strength, "interaction");
    p.width = get_double(*t, "width", p.width, "interaction");
    p.radius = static_cast<int>(get_int(*t, "radius", p.radius, "interaction"));
    p.profile = get_doubles(*t, "profile", p.profile, "interaction");
    p.lambda = get_double(*t, "lambda", p.lambda, "interaction");
    p.beta = get_double(*t, "beta", p.beta, "interaction");
    if (p.kind == "gaussian" && (!(p.width > 0.0) || p.radius < 0 || !(p.strength >= 0.0)))
      throw ConfigError("interaction: gaussian needs width > 0, radius >= 0, strength >= 0");
    if (p.kind == "profile" && p.profile.empty()) throw ConfigError("interaction.profile is empty");
  }
  if (const auto* t = section(root, "trap")) {
    reject_unknown(*t, {"kind", "omega", "center", "t_on", "t_off"}, "trap");
    auto& p = cfg.trap;
    p.kind = get_string(*t, "kind", p.kind, "trap");
    p.omega = get_double(*t, "omega", p.omega, "trap");
    p.center = get_double(*t, "center", p.center, "trap");
    p.t_on = get_double(*t, "t_on", p.t_on, "trap");
    p.t_off = get_double(*t, "t_off", p.t_off, "trap");
  }
  if (const auto* t = section(root, "time")) {
    reject_unknown(*t, {"T", "dt", "stride"}, "time");
    cfg.total_time = get_double(*t, "T", cfg.total_time, "time");
    cfg.dt = get_double(*t, "dt", cfg.dt, "time");
    cfg.sample_stride = static_cast<int>(get_int(*t, "stride", cfg.sample_stride, "time"));
  }
  if (const auto* t = section(root, "initial")) {
    reject_unknown(*t, {"kind", "center", "sigma", "momentum", "noise"}, "initial");
    auto& p = cfg.initial;
    p.kind = get_string(*t, "kind", p.kind, "initial");
    p.center = get_double(*t, "center", p.center, "initial");
    p.sigma = get_double(*t, "sigma", p.sigma, "initial");
    p.momentum = get_double(*t, "momentum", p.momentum, "initial");
    p.noise = get_double(*t, "noise", p.noise, "initial");
  } else {
    cfg.initial.center = 0.5 * cfg.lattice.length();
    cfg.initial.sigma = 0.15 * cfg.lattice.length();
  }
  if (const auto* t = section(root, "krylov")) {
    reject_unknown(*t, {"dimension", "tolerance", "max_substeps"}, "krylov");
    cfg.krylov.dimension = static_cast<int>(get_int(*t, "dimension", cfg.krylov.dimension, "krylov"));
    cfg.krylov.tolerance = get_double(*t, "tolerance", cfg.krylov.tolerance, "krylov");
    cfg.krylov.max_substeps = static_cast<int>(get_int(*t, "max_substeps", cfg.krylov.max_substeps, "krylov"));
  }
  if (const auto* t = section(root, "envelope")) {
    reject_unknown(*t, {"gamma", "delta"}, "envelope");
    cfg.envelope_gamma = get_double(*t, "gamma", cfg.envelope_gamma, "envelope");
    cfg.condition_delta = get_double(*t, "delta", cfg.condition_delta, "envelope");
  }
  if (const auto* t = section(root, "output")) {
    reject_unknown(*t, {"dir"}, "output");
    cfg.output_dir = get_string(*t, "dir", cfg.output_dir.string(), "output");
  }
  if (const auto* t = section(root, "basis")) {
    reject_unknown(*t, {"max_dimension"}, "basis");
    const std::int64_t d = get_int(*t, "max_dimension", static_cast<std::int64_t>(cfg.max_dimension), "basis");
    if (d < 1) throw ConfigError("basis.max_dimension must be positive");
    cfg.max_dimension = static_cast<std::size_t>(d);
  }
  if (const auto* t = section(root, "meanfield")) {
    reject_unknown(*t, {"dispersion"}, "meanfield");
    const std::string d = get_string(*t, "dispersion", "lattice", "meanfield");
    if (d == "lattice")
      cfg.dispersion = Dispersion::lattice;
    else if (d == "spectral")
      cfg.dispersion = Dispersion::spectral;
    else
      throw ConfigError("meanfield.dispersion must be lattice or spectral");
  }
  cfg.validate();
  return cfg;
}

SweepConfig load_sweep_config(const std::filesystem::path& path) { return parse_sweep_config(read_file(path)); }

void ScatterConfig::validate() const {
  if (!(barrier_height > 0.0) || !(barrier_radius > 0.0))
    throw ConfigError("scatter: barrier height and radius must be positive");
  if (beta1.empty() || beta2.empty() || n_list.empty()) throw ConfigError("scatter: empty parameter list");
  for (double b1 : beta1)
    for (double b2 : beta2)
      if (!(0.0 < b1 && b1 < b2 && b2 <= 1.0)) throw ConfigError("scatter: need 0 < beta1 < beta2 <= 1");
  for (std::size_t i = 0; i < n_list.size(); ++i)
    if (!(n_list[i] > 1.0) || (i > 0 && n_list[i] <= n_list[i - 1]))
      throw ConfigError("scatter: N list must be ascending and > 1");
  if (grid_points < 8 || positivity_cells < 16) throw ConfigError("scatter: resolution too small");
}

ScatterConfig parse_scatter_config(const std::string& text) {
  const toml::table root = parse_toml(text);
  ScatterConfig cfg;
  if (const auto* t = section(root, "output")) cfg.output_dir = get_string(*t, "dir", cfg.output_dir.string(), "output");
  if (const auto* t = section(root, "scatter")) {
    reject_unknown(*t,
                   {"barrier_height", "barrier_radius", "beta1", "beta2", "particles", "grid_points",
                    "positivity_cells", "class_beta", "class_delta", "class_barrier_height"},
                   "scatter");
    cfg.barrier_height = get_double(*t, "barrier_height", cfg.barrier_height, "scatter");
    cfg.barrier_radius = get_double(*t, "barrier_radius", cfg.barrier_radius, "scatter");
    cfg.beta1 = get_doubles(*t, "beta1", cfg.beta1, "scatter");
    cfg.beta2 = get_doubles(*t, "beta2", cfg.beta2, "scatter");
    cfg.n_list = get_doubles(*t, "particles", cfg.n_list, "scatter");
    cfg.grid_points = static_cast<int>(get_int(*t, "grid_points", cfg.grid_points, "scatter"));
    cfg.positivity_cells = static_cast<int>(get_int(*t, "positivity_cells", cfg.positivity_cells, "scatter"));
    cfg.class_beta = get_double(*t, "class_beta", cfg.class_beta, "scatter");
    cfg.class_delta = get_double(*t, "class_delta", cfg.class_delta, "scatter");
    cfg.class_barrier_height = get_double(*t, "class_barrier_height", cfg.class_barrier_height, "scatter");
  }
  cfg.validate();
  return cfg;
}

ScatterConfig load_scatter_config(const std::filesystem::path& path) {
  return parse_scatter_config(read_file(path));
}

std::string config_json(const SweepConfig& cfg) {
  nlohmann::ordered_json j;
  j["regime"] = regime_name(cfg.regime);
  j["qualitative"] = cfg.regime == Regime::gp_proxy;
  j["seed"] = cfg.seed;
  j["particles"] = cfg.n_list;
  j["lattice"] = {{"sites", cfg.lattice.sites}, {"spacing", cfg.lattice.spacing}};
  const auto& p = cfg.interaction;
  j["interaction"] = {{"kind", p.kind},     {"strength", p.strength}, {"width", p.width},
                      {"radius", p.radius}, {"profile", p.profile},   {"lambda", p.lambda},
                      {"beta", p.beta}};
  j["trap"] = {{"kind", cfg.trap.kind},
               {"omega", cfg.trap.omega},
               {"center", cfg.trap.center},
               {"t_on", cfg.trap.t_on},
               {"t_off", cfg.trap.t_off}};
  j["time"] = {{"T", cfg.total_time}, {"dt", cfg.dt}, {"stride", cfg.sample_stride}};
  j["initial"] = {{"kind", cfg.initial.kind},
                  {"center", cfg.initial.center},
                  {"sigma", cfg.initial.sigma},
                  {"momentum", cfg.initial.momentum},
                  {"noise", cfg.initial.noise}};
  j["krylov"] = {{"dimension", cfg.krylov.dimension},
                 {"tolerance", cfg.krylov.tolerance},
                 {"max_substeps", cfg.krylov.max_substeps}};
  j["envelope"] = {{"gamma", cfg.envelope_gamma}, {"delta", cfg.condition_delta}};
  j["basis"] = {{"max_dimension", cfg.max_dimension}};
  j["meanfield"] = {{"dispersion", cfg.dispersion == Dispersion::lattice ? "lattice" : "spectral"}};
  return j.dump(2);
}

}  // namespace condensate
