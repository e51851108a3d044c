#include "condensate/scattering.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <string>

namespace condensate {

namespace {

constexpr double four_pi = 4.0 * std::numbers::pi;

// Composite Simpson on a uniform grid with an even number of intervals (falls back to the
// trapezoid rule for an odd count).
double simpson(const std::vector<double>& y, double step) {
  const std::size_t n = y.size() - 1;
  if (n == 0) return 0.0;
  if (n % 2 == 1) {
    double s = 0.5 * (y.front() + y.back());
    for (std::size_t i = 1; i < n; ++i) s += y[i];
    return s * step;
  }
  double s = y.front() + y.back();
  for (std::size_t i = 1; i < n; ++i) s += (i % 2 == 1 ? 4.0 : 2.0) * y[i];
  return s * step / 3.0;
}

template <class F>
double integrate(F&& fn, double a, double b, int intervals) {
  if (b <= a) return 0.0;
  intervals += intervals % 2;
  const double step = (b - a) / intervals;
  std::vector<double> y(intervals + 1);
  for (int i = 0; i <= intervals; ++i) y[i] = fn(a + i * step);
  return simpson(y, step);
}

// (u, u') carried as a mantissa pair with a separate natural-log scale.
struct RadialState {
  double u = 0.0;
  double du = 1.0;
  double log_scale = 0.0;

  void renormalize() {
    const double s = std::max(std::abs(u), std::abs(du));
    if (s > 0.0 && (s > 1e100 || s < 1e-100)) {
      u /= s;
      du /= s;
      log_scale += std::log(s);
    }
  }
};

void propagate_constant(RadialState& s, double value, double length) {
  if (length <= 0.0) return;
  if (value > 0.0) {
    const double kappa = std::sqrt(value);
    const double x = kappa * length;
    // cosh and sinh scaled by exp(-x).
    const double ch = 0.5 * (1.0 + std::exp(-2.0 * x));
    const double sh = -0.5 * std::expm1(-2.0 * x);
    const double u = s.u * ch + s.du * sh / kappa;
    const double du = s.u * kappa * sh + s.du * ch;
    s.u = u;
    s.du = du;
    s.log_scale += x;
  } else if (value < 0.0) {
    const double k = std::sqrt(-value);
    const double c = std::cos(k * length);
    const double sn = std::sin(k * length);
    const double u = s.u * c + s.du * sn / k;
    const double du = -s.u * k * sn + s.du * c;
    s.u = u;
    s.du = du;
  } else {
    s.u += s.du * length;
  }
  s.renormalize();
}

void propagate_profile(RadialState& s, const std::function<double(double)>& v, double r0, double r1,
                       double max_step) {
  const int steps = std::max(1, static_cast<int>(std::ceil((r1 - r0) / max_step - 1e-9)));
  const double h = (r1 - r0) / steps;
  for (int i = 0; i < steps; ++i) {
    const double r = r0 + i * h;
    const double vm = v(r + 0.5 * h);
    const double k1u = s.du, k1d = v(r) * s.u;
    const double k2u = s.du + 0.5 * h * k1d, k2d = vm * (s.u + 0.5 * h * k1u);
    const double k3u = s.du + 0.5 * h * k2d, k3d = vm * (s.u + 0.5 * h * k2u);
    const double k4u = s.du + h * k3d, k4d = v(r + h) * (s.u + h * k3u);
    s.u += h / 6.0 * (k1u + 2.0 * k2u + 2.0 * k3u + k4u);
    s.du += h / 6.0 * (k1d + 2.0 * k2d + 2.0 * k3d + k4d);
    s.renormalize();
  }
}

// Marches the zero-energy equation outward from u(0) = 0, u'(0) = 1.
class Marcher {
 public:
  explicit Marcher(const RadialPotential& v) : v_(v) {}

  void advance_to(double target) {
    const auto& pieces = v_.pieces();
    while (r_ < target) {
      while (cursor_ < pieces.size() && pieces[cursor_].end <= r_) ++cursor_;
      double stop;
      if (cursor_ < pieces.size() && pieces[cursor_].begin <= r_) {
        const auto& piece = pieces[cursor_];
        stop = std::min(target, piece.end);
        if (piece.is_constant()) {
          propagate_constant(state_, piece.value, stop - r_);
        } else {
          const double step = (piece.end - piece.begin) / v_.steps();
          propagate_profile(state_, piece.profile, r_, stop, step);
        }
      } else {
        stop = cursor_ < pieces.size() ? std::min(target, pieces[cursor_].begin) : target;
        propagate_constant(state_, 0.0, stop - r_);
      }
      r_ = stop;
    }
  }

  const RadialState& state() const { return state_; }
  double radius() const { return r_; }

 private:
  const RadialPotential& v_;
  RadialState state_;
  double r_ = 0.0;
  std::size_t cursor_ = 0;
};

double match_point(const RadialPotential& v) {
  const double support = v.support_radius();
  return support > 0.0 ? 1.25 * support : 1.0;
}

struct Asymptote {
  double a;
  double log_c;  // log |c| relative to the marcher's scale
  double c_mantissa;
};

Asymptote fit_asymptote(const RadialState& s, double radius) {
  if (!std::isfinite(s.u) || !std::isfinite(s.du))
    throw std::runtime_error("scattering_length: non-finite radial solution");
  if (std::abs(s.du) * radius <= 1e-12 * std::abs(s.u))
    throw std::runtime_error("scattering_length: zero-energy resonance (asymptotic slope vanishes)");
  return {radius - s.u / s.du, s.log_scale, s.du};
}

}  // namespace

// ---------------------------------------------------------------------------
// RadialPotential

RadialPotential RadialPotential::zero() { return {}; }

RadialPotential RadialPotential::square(double height, double radius, bool nonnegative) {
  if (!(radius > 0.0) || !std::isfinite(height))
    throw std::invalid_argument("square potential: need radius > 0 and finite height");
  RadialPotential v;
  v.nonnegative_ = nonnegative;
  if (height != 0.0) v.pieces_.push_back({0.0, radius, height, {}});
  v.check_sign();
  return v;
}

RadialPotential RadialPotential::from_function(std::function<double(double)> fn, double support,
                                               bool nonnegative, int steps) {
  if (!(support > 0.0)) throw std::invalid_argument("radial potential: support must be positive");
  if (steps < 4) throw std::invalid_argument("radial potential: need at least 4 steps");
  RadialPotential v;
  v.nonnegative_ = nonnegative;
  v.steps_ = steps;
  v.pieces_.push_back({0.0, support, 0.0, std::move(fn)});
  v.check_sign();
  return v;
}

RadialPotential RadialPotential::from_samples(double dr, std::vector<double> samples, bool nonnegative,
                                              int steps) {
  if (!(dr > 0.0) || samples.empty())
    throw std::invalid_argument("radial potential: need dr > 0 and at least one sample");
  for (double s : samples)
    if (!std::isfinite(s)) throw std::invalid_argument("radial potential: non-finite sample");
  const double support = dr * static_cast<double>(samples.size());
  auto table = std::make_shared<const std::vector<double>>(std::move(samples));
  auto fn = [table, dr](double r) {
    const auto& s = *table;
    const double x = r / dr;  // sample i sits at x = i + 1
    if (x <= 1.0) return s.front();
    const std::size_t i = static_cast<std::size_t>(x) - 1;
    if (i + 1 >= s.size()) return s.back();
    const double t = x - 1.0 - static_cast<double>(i);
    return (1.0 - t) * s[i] + t * s[i + 1];
  };
  return from_function(fn, support, nonnegative, steps);
}

RadialPotential RadialPotential::scaled(double amplitude, double length) const {
  if (!(length > 0.0) || !std::isfinite(amplitude))
    throw std::invalid_argument("radial potential: bad scaling");
  RadialPotential out;
  out.nonnegative_ = nonnegative_ && amplitude >= 0.0;
  out.steps_ = steps_;
  for (const auto& p : pieces_) {
    Piece q{p.begin * length, p.end * length, p.value * amplitude, {}};
    if (!p.is_constant()) {
      auto fn = p.profile;
      q.profile = [fn, amplitude, length](double r) { return amplitude * fn(r / length); };
    }
    out.pieces_.push_back(std::move(q));
  }
  return out;
}

RadialPotential RadialPotential::with_shelf(double begin, double end, double value, bool nonnegative) const {
  if (!(end > begin) || begin < 0.0) throw std::invalid_argument("with_shelf: bad interval");
  RadialPotential out = *this;
  out.nonnegative_ = nonnegative;
  for (const auto& p : pieces_)
    if (begin < p.end && end > p.begin) throw std::invalid_argument("with_shelf: overlaps existing piece");
  out.pieces_.push_back({begin, end, value, {}});
  std::sort(out.pieces_.begin(), out.pieces_.end(),
            [](const Piece& x, const Piece& y) { return x.begin < y.begin; });
  out.check_sign();
  return out;
}

RadialPotential RadialPotential::with_steps(int steps) const {
  if (steps < 4) throw std::invalid_argument("radial potential: need at least 4 steps");
  RadialPotential out = *this;
  out.steps_ = steps;
  return out;
}

double RadialPotential::operator()(double r) const {
  for (const auto& p : pieces_)
    if (r >= p.begin && r < p.end) return p.at(r);
  return 0.0;
}

double RadialPotential::support_radius() const {
  double s = 0.0;
  for (const auto& p : pieces_) s = std::max(s, p.end);
  return s;
}

bool RadialPotential::vanishes() const {
  for (const auto& p : pieces_) {
    if (p.is_constant() && p.value != 0.0) return false;
    if (!p.is_constant()) {
      for (int i = 0; i <= steps_; ++i)
        if (p.at(p.begin + (p.end - p.begin) * i / steps_) != 0.0) return false;
    }
  }
  return true;
}

double RadialPotential::sup_norm() const {
  double s = 0.0;
  for (const auto& p : pieces_) {
    if (p.is_constant()) {
      s = std::max(s, std::abs(p.value));
    } else {
      for (int i = 0; i <= steps_; ++i)
        s = std::max(s, std::abs(p.at(std::min(p.begin + (p.end - p.begin) * i / steps_,
                                               std::nextafter(p.end, p.begin)))));
    }
  }
  return s;
}

double RadialPotential::l1_norm() const {
  double s = 0.0;
  for (const auto& p : pieces_) {
    if (p.is_constant())
      s += std::abs(p.value) * (std::pow(p.end, 3) - std::pow(p.begin, 3)) / 3.0;
    else
      s += integrate([&](double r) { return std::abs(p.at(r)) * r * r; }, p.begin, p.end, 2 * steps_);
  }
  return four_pi * s;
}

double RadialPotential::radial_moment() const {
  double s = 0.0;
  for (const auto& p : pieces_) {
    if (p.is_constant())
      s += p.value * (std::pow(p.end, 3) - std::pow(p.begin, 3)) / 3.0;
    else
      s += integrate([&](double r) { return p.at(r) * r * r; }, p.begin, p.end, 2 * steps_);
  }
  return s;
}

std::vector<double> RadialPotential::samples(double dr) const {
  if (!(dr > 0.0)) throw std::invalid_argument("samples: dr must be positive");
  const auto count = static_cast<std::size_t>(std::ceil(support_radius() / dr - 1e-12));
  std::vector<double> out(count);
  for (std::size_t i = 0; i < count; ++i) out[i] = (*this)((i + 1) * dr);
  return out;
}

void RadialPotential::check_sign() const {
  if (!nonnegative_) return;
  for (const auto& p : pieces_) {
    if (p.is_constant()) {
      if (p.value < 0.0) throw std::invalid_argument("radial potential flagged nonnegative has negative part");
    } else {
      for (int i = 0; i < steps_; ++i)
        if (p.at(p.begin + (p.end - p.begin) * i / steps_) < 0.0)
          throw std::invalid_argument("radial potential flagged nonnegative has negative part");
    }
  }
}

// ---------------------------------------------------------------------------
// Zero-energy problem

double scattering_length_value(const RadialPotential& v) {
  if (v.pieces().empty()) return 0.0;
  Marcher marcher(v);
  const double radius = match_point(v);
  marcher.advance_to(radius);
  return fit_asymptote(marcher.state(), radius).a;
}

ScatteringSolution scattering_length(const RadialPotential& v, int points,
                                     std::optional<double> match_radius) {
  if (points < 2) throw std::invalid_argument("scattering_length: need at least 2 sample points");
  const double radius = match_radius.value_or(match_point(v));
  if (radius < v.support_radius())
    throw std::invalid_argument("scattering_length: match radius inside the support");

  ScatteringSolution out;
  out.match_radius = radius;
  Marcher marcher(v);
  std::vector<RadialState> states;
  for (int i = 0; i < points; ++i) {
    const double r = radius * i / (points - 1);
    marcher.advance_to(r);
    out.r.push_back(r);
    states.push_back(marcher.state());
  }
  const Asymptote fit = fit_asymptote(marcher.state(), radius);
  out.a = fit.a;
  for (std::size_t i = 0; i < states.size(); ++i) {
    const double u = states[i].u * std::exp(states[i].log_scale - fit.log_c) / fit.c_mantissa;
    out.u.push_back(u);
    const double du = states[i].du * std::exp(states[i].log_scale - fit.log_c) / fit.c_mantissa;
    out.f.push_back(out.r[i] > 0.0 ? u / out.r[i] : du);
  }
  return out;
}

std::vector<double> zero_energy_state(const RadialPotential& v, const std::vector<double>& radii) {
  if (!std::is_sorted(radii.begin(), radii.end()))
    throw std::invalid_argument("zero_energy_state: radii must be ascending");
  Marcher marcher(v);
  std::vector<RadialState> states;
  states.reserve(radii.size());
  for (double r : radii) {
    marcher.advance_to(r);
    states.push_back(marcher.state());
  }
  const double end = std::max(match_point(v), radii.empty() ? 0.0 : radii.back());
  marcher.advance_to(end);
  const Asymptote fit = fit_asymptote(marcher.state(), end);
  std::vector<double> f(radii.size());
  for (std::size_t i = 0; i < radii.size(); ++i) {
    const double scale = std::exp(states[i].log_scale - fit.log_c) / fit.c_mantissa;
    f[i] = radii[i] > 0.0 ? states[i].u * scale / radii[i] : states[i].du * scale;
  }
  return f;
}

double born_approximation(const RadialPotential& v) { return v.radial_moment(); }

// ---------------------------------------------------------------------------
// Microstructure

MicroStructure build_micro(const RadialPotential& v_base, double beta1, double beta2, double particles,
                           double radius, const MicroOptions& options) {
  if (!(0.0 < beta1 && beta1 < beta2 && beta2 <= 1.0))
    throw std::invalid_argument("build_micro: need 0 < beta1 < beta2 <= 1");
  if (!(particles > 1.0)) throw std::invalid_argument("build_micro: need N > 1");
  if (radius < v_base.support_radius())
    throw std::invalid_argument("build_micro: R must bound the support of v");
  if (options.scan_samples < 2 || options.grid_points < 2)
    throw std::invalid_argument("build_micro: bad options");

  MicroStructure ms;
  ms.beta1 = beta1;
  ms.beta2 = beta2;
  ms.particles = particles;
  ms.interaction = v_base.scaled(std::pow(particles, -1.0 + 3.0 * beta2), std::pow(particles, -beta2));
  ms.inner_radius = radius * std::pow(particles, -beta2);

  const int seg = options.grid_points + options.grid_points % 2;
  ms.segment_points = seg;
  auto segment = [&](double a, double b, bool include_start) {
    for (int i = include_start ? 0 : 1; i <= seg; ++i) ms.r.push_back(a + (b - a) * i / seg);
  };

  if (ms.interaction.vanishes()) {
    ms.outer_radius = ms.inner_radius;
    ms.effective = ms.interaction;
    segment(0.0, ms.inner_radius, true);
    segment(ms.inner_radius, 2.0 * ms.inner_radius, false);
    ms.f.assign(ms.r.size(), 1.0);
    ms.g.assign(ms.r.size(), 0.0);
    ms.j.assign(ms.r.size(), 1.0);
    return ms;
  }

  const double scat_v = scattering_length_value(ms.interaction);
  ms.a = particles * scat_v;
  ms.amplitude = ms.a * std::pow(particles, -1.0 + 3.0 * beta1);

  auto residual = [&](double outer) {
    if (outer <= ms.inner_radius) return scat_v;
    return scattering_length_value(ms.interaction.with_shelf(ms.inner_radius, outer, -ms.amplitude, false));
  };

  // Scan for the first sign change, growing the cap if needed.
  double lo = ms.inner_radius;
  double hi = std::max(options.cap_factor * std::pow(particles, -beta1), 2.0 * ms.inner_radius);
  double start = lo;
  bool bracketed = false;
  for (int growth = 0; growth <= options.cap_growths && !bracketed; ++growth) {
    double prev = start;
    for (int i = 1; i <= options.scan_samples; ++i) {
      const double r = start + (hi - start) * i / options.scan_samples;
      if (residual(r) <= 0.0) {
        lo = prev;
        hi = r;
        bracketed = true;
        break;
      }
      prev = r;
    }
    if (!bracketed) {
      start = hi;
      hi *= 2.0;
    }
  }
  if (!bracketed)
    throw std::runtime_error("build_micro: no sign change of scat(v - W) up to radius " + std::to_string(hi));

  for (int it = 0; it < 200 && hi - lo > 4.0 * std::numeric_limits<double>::epsilon() * hi; ++it) {
    const double mid = 0.5 * (lo + hi);
    (residual(mid) > 0.0 ? lo : hi) = mid;
  }
  const double r_lo = residual(lo);
  const double r_hi = residual(hi);
  ms.outer_radius = std::abs(r_lo) < std::abs(r_hi) ? lo : hi;
  ms.residual_scattering_length = std::min(std::abs(r_lo), std::abs(r_hi));
  ms.effective = ms.interaction.with_shelf(ms.inner_radius, ms.outer_radius, -ms.amplitude, false);

  segment(0.0, ms.inner_radius, true);
  segment(ms.inner_radius, ms.outer_radius, false);
  segment(ms.outer_radius, 2.0 * ms.outer_radius, false);
  ms.f = zero_energy_state(ms.effective, ms.r);
  ms.j = zero_energy_state(ms.interaction, ms.r);
  ms.g.resize(ms.f.size());
  for (std::size_t i = 0; i < ms.f.size(); ++i) ms.g[i] = 1.0 - ms.f[i];

  // K f = j where W vanishes near the origin.
  const std::size_t inner_end = static_cast<std::size_t>(seg);
  ms.K = ms.j[inner_end] / ms.f[inner_end];
  for (std::size_t i = 0; i <= inner_end; ++i)
    if (ms.f[i] > 0.0) ms.K_spread = std::max(ms.K_spread, std::abs(ms.j[i] / ms.f[i] - ms.K) / ms.K);
  return ms;
}

MicroBounds micro_norms(const MicroStructure& ms) {
  MicroBounds b;
  const double n = ms.particles;
  b.bound_l2 = std::sqrt(8.0 * std::numbers::pi) * ms.a * std::pow(n, -1.0 - ms.beta1 / 2.0);
  b.bound_l1 = 16.0 * std::numbers::pi * ms.a * std::pow(n, -1.0 - 2.0 * ms.beta1);

  const std::size_t total = ms.r.size();
  const std::size_t seg = static_cast<std::size_t>(ms.segment_points);
  double l2 = 0.0, l1 = 0.0, wf = 0.0;
  for (std::size_t start = 0; start + seg < total; start += seg) {
    const double step = ms.r[start + 1] - ms.r[start];
    std::vector<double> y2(seg + 1), y1(seg + 1), yw(seg + 1);
    const double mid = 0.5 * (ms.r[start] + ms.r[start + seg]);
    const bool shelf = mid > ms.inner_radius && mid < ms.outer_radius;
    for (std::size_t i = 0; i <= seg; ++i) {
      const double r = ms.r[start + i];
      const double g = ms.g[start + i];
      y2[i] = g * g * r * r;
      y1[i] = std::abs(g) * r * r;
      yw[i] = shelf ? ms.amplitude * ms.f[start + i] * r * r : 0.0;
    }
    l2 += simpson(y2, step);
    l1 += simpson(y1, step);
    wf += simpson(yw, step);
  }
  b.l2_g = std::sqrt(four_pi * l2);
  b.l1_g = four_pi * l1;
  b.wf_l1 = four_pi * wf;
  b.wf_deviation = std::pow(n, 1.0 - ms.beta1) * (wf - ms.a / n);
  b.l2_ok = b.l2_g <= b.bound_l2;
  b.l1_ok = b.l1_g <= b.bound_l1;
  b.pointwise_ok = true;
  for (std::size_t i = 0; i < total; ++i) {
    if (ms.r[i] <= 0.0) continue;
    const double bound = ms.a / (n * ms.r[i]);
    if (ms.a > 0.0) b.max_pointwise_ratio = std::max(b.max_pointwise_ratio, std::abs(ms.g[i]) / bound);
    if (std::abs(ms.g[i]) > bound + 1e-12) b.pointwise_ok = false;
  }
  return b;
}

// ---------------------------------------------------------------------------
// Positivity

PositivityResult positivity_check(const RadialPotential& v, double box_radius, int cells, double tolerance) {
  if (!(box_radius > 0.0) || cells < 4) throw std::invalid_argument("positivity_check: bad box");
  const double h = box_radius / cells;
  const int n = cells - 1;  // interior nodes r_i = i h
  std::vector<double> diag(n);
  for (int i = 0; i < n; ++i) {
    const double lo = (i + 0.5) * h;
    const double hi = (i + 1.5) * h;
    double avg = 0.0;
    for (const auto& p : v.pieces()) {
      const double a = std::max(lo, p.begin);
      const double b = std::min(hi, p.end);
      if (b <= a) continue;
      avg += p.is_constant() ? p.value * (b - a) : integrate([&](double r) { return p.at(r); }, a, b, 8);
    }
    diag[i] = 2.0 / (h * h) + avg / h;
  }
  const double off = -1.0 / (h * h);

  // Number of eigenvalues below x (Sturm sequence of the LDL^T pivots).
  auto count_below = [&](double x) {
    int count = 0;
    double d = 1.0;
    for (int i = 0; i < n; ++i) {
      d = diag[i] - x - (i > 0 ? off * off / d : 0.0);
      if (d == 0.0) d = -std::numeric_limits<double>::min();
      if (d < 0.0) ++count;
    }
    return count;
  };

  double lo = std::numeric_limits<double>::infinity();
  double hi = -std::numeric_limits<double>::infinity();
  for (int i = 0; i < n; ++i) {
    lo = std::min(lo, diag[i] - 2.0 * std::abs(off));
    hi = std::max(hi, diag[i] + 2.0 * std::abs(off));
  }
  if (!std::isfinite(lo) || !std::isfinite(hi) || count_below(lo) != 0 || count_below(hi) < 1)
    throw std::runtime_error("positivity_check: eigenvalue bracket failed");
  for (int it = 0; it < 300 && hi - lo > 1e-15 * std::max(1.0, std::abs(hi)); ++it) {
    const double mid = 0.5 * (lo + hi);
    (count_below(mid) >= 1 ? hi : lo) = mid;
  }

  PositivityResult out;
  out.lowest_eigenvalue = 0.5 * (lo + hi);
  out.box_radius = box_radius;
  double negative_part = 0.0;
  for (const auto& p : v.pieces())
    if (p.is_constant()) negative_part = std::max(negative_part, -p.value);
  out.scale = std::max(1.0, negative_part);
  out.positive = out.lowest_eigenvalue >= -tolerance * out.scale;
  return out;
}

// ---------------------------------------------------------------------------
// Potential classes

namespace {

double log_log_slope(const std::vector<double>& x, const std::vector<double>& y) {
  std::vector<double> lx, ly;
  for (std::size_t i = 0; i < x.size(); ++i)
    if (x[i] > 0.0 && std::abs(y[i]) > 0.0) {
      lx.push_back(std::log(x[i]));
      ly.push_back(std::log(std::abs(y[i])));
    }
  if (lx.size() < 2) return 0.0;
  const double n = static_cast<double>(lx.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < lx.size(); ++i) {
    sx += lx[i];
    sy += ly[i];
    sxx += lx[i] * lx[i];
    sxy += lx[i] * ly[i];
  }
  const double denom = n * sxx - sx * sx;
  return denom == 0.0 ? 0.0 : (n * sxy - sx * sy) / denom;
}

}  // namespace

ClassReport class_check(const RadialPotential& v_base, double beta, const std::vector<double>& n_list,
                        double delta, std::optional<double> reference_a) {
  if (!std::is_sorted(n_list.begin(), n_list.end()))
    throw std::invalid_argument("class_check: N list must be ascending");
  ClassReport report;
  report.beta = beta;
  report.delta = delta;
  const bool scattering_class = beta >= 1.0;
  report.a = reference_a.value_or(scattering_class ? scattering_length_value(v_base) : v_base.l1_norm());

  std::vector<double> ns, linf, dev;
  for (double n : n_list) {
    const RadialPotential vn = v_base.scaled(std::pow(n, -1.0 + 3.0 * beta), std::pow(n, -beta));
    ClassRow row;
    row.particles = n;
    row.l1 = vn.l1_norm();
    row.linf = vn.sup_norm();
    row.support = vn.support_radius();
    row.scat = scattering_length_value(vn);
    row.scaled_linf = std::pow(n, 1.0 - 3.0 * beta) * row.linf;
    const double value = scattering_class ? row.scat : row.l1;
    row.deviation = std::pow(n, 1.0 + delta) * (value - report.a / n);
    row.relative_gap = report.a != 0.0 ? (value - report.a / n) / (report.a / n) : 0.0;
    report.rows.push_back(row);
    ns.push_back(n);
    linf.push_back(row.scaled_linf);
    dev.push_back(row.deviation);
  }
  report.linf_slope = log_log_slope(ns, linf);
  report.deviation_slope = log_log_slope(ns, dev);
  return report;
}

}  // namespace condensate
