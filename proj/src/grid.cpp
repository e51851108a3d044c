#include "condensate/grid.hpp"

#include <fftw3.h>

#include <cmath>
#include <map>
#include <mutex>
#include <numbers>
#include <stdexcept>
#include <utility>

namespace condensate {

namespace {

// FFTW planning is not thread-safe; execution with the new-array interface is.
class PlanCache {
 public:
  ~PlanCache() {
    for (auto& [key, plan] : plans_) fftw_destroy_plan(plan);
  }

  fftw_plan get(int n, int sign) {
    std::lock_guard<std::mutex> lock(mutex_);
    auto key = std::make_pair(n, sign);
    auto it = plans_.find(key);
    if (it != plans_.end()) return it->second;
    Eigen::VectorXcd in(n), out(n);
    fftw_plan plan = fftw_plan_dft_1d(n, reinterpret_cast<fftw_complex*>(in.data()),
                                      reinterpret_cast<fftw_complex*>(out.data()), sign,
                                      FFTW_ESTIMATE | FFTW_UNALIGNED);
    plans_.emplace(key, plan);
    return plan;
  }

 private:
  std::mutex mutex_;
  std::map<std::pair<int, int>, fftw_plan> plans_;
};

PlanCache& plan_cache() {
  static PlanCache cache;
  return cache;
}

Eigen::VectorXcd transform(const Eigen::VectorXcd& values, int sign) {
  const int n = static_cast<int>(values.size());
  Eigen::VectorXcd in = values;
  Eigen::VectorXcd out(n);
  fftw_execute_dft(plan_cache().get(n, sign), reinterpret_cast<fftw_complex*>(in.data()),
                   reinterpret_cast<fftw_complex*>(out.data()));
  out /= std::sqrt(static_cast<double>(n));
  return out;
}

}  // namespace

Grid::Grid(int points, double length) : points_(points), length_(length) {
  if (points < 4) throw std::invalid_argument("Grid: need at least 4 points");
  if (!(length > 0.0) || !std::isfinite(length))
    throw std::invalid_argument("Grid: length must be positive and finite");
}

Eigen::VectorXd Grid::wavenumbers() const {
  Eigen::VectorXd k(points_);
  const double base = 2.0 * std::numbers::pi / length_;
  for (int i = 0; i < points_; ++i) {
    int m = (i <= points_ / 2) ? i : i - points_;
    k(i) = base * m;
  }
  return k;
}

GridFunction::GridFunction(const Grid& g) : grid(g), values(Eigen::VectorXcd::Zero(g.points())) {}

GridFunction::GridFunction(const Grid& g, Eigen::VectorXcd v) : grid(g), values(std::move(v)) {
  if (values.size() != g.points())
    throw std::invalid_argument("GridFunction: value count does not match grid");
}

Eigen::VectorXcd fourier_transform(const Eigen::VectorXcd& values) {
  return transform(values, FFTW_FORWARD);
}

Eigen::VectorXcd inverse_fourier_transform(const Eigen::VectorXcd& values) {
  return transform(values, FFTW_BACKWARD);
}

GridFunction fourier_multiply(const GridFunction& f, const Eigen::VectorXcd& multiplier) {
  Eigen::VectorXcd spectrum = fourier_transform(f.values);
  spectrum.array() *= multiplier.array();
  return GridFunction(f.grid, inverse_fourier_transform(spectrum));
}

GridFunction spectral_laplacian(const GridFunction& f) {
  Eigen::VectorXd k = f.grid.wavenumbers();
  return fourier_multiply(f, (-k.array().square()).matrix().cast<cplx>());
}

GridFunction spectral_gradient(const GridFunction& f) {
  Eigen::VectorXd k = f.grid.wavenumbers();
  Eigen::VectorXcd m = k.cast<cplx>() * cplx(0.0, 1.0);
  // The Nyquist mode has no odd-symmetric partner; drop it from derivatives.
  if (f.grid.points() % 2 == 0) m(f.grid.points() / 2) = 0.0;
  return fourier_multiply(f, m);
}

void require_same_grid(const GridFunction& f, const GridFunction& g) {
  if (!(f.grid == g.grid)) throw std::invalid_argument("grid mismatch");
}

GridFunction periodic_convolution(const GridFunction& f, const GridFunction& g) {
  require_same_grid(f, g);
  const double scale = f.grid.spacing() * std::sqrt(static_cast<double>(f.grid.points()));
  Eigen::VectorXcd spectrum = fourier_transform(f.values).cwiseProduct(fourier_transform(g.values));
  return GridFunction(f.grid, inverse_fourier_transform(spectrum) * scale);
}

Norms norms(const GridFunction& f) {
  const double h = f.grid.spacing();
  Norms out{};
  out.l1 = h * f.values.cwiseAbs().sum();
  out.l2 = std::sqrt(h * f.values.squaredNorm());
  out.linf = f.values.size() ? f.values.cwiseAbs().maxCoeff() : 0.0;
  out.h1_seminorm = std::sqrt(h * spectral_gradient(f).values.squaredNorm());
  return out;
}

cplx inner_product(const GridFunction& f, const GridFunction& g) {
  require_same_grid(f, g);
  return f.grid.spacing() * f.values.dot(g.values);
}

}  // namespace condensate
