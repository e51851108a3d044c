#pragma once

#include <complex>
#include <Eigen/Dense>

namespace condensate {

using cplx = std::complex<double>;

// Uniform periodic grid on [0, L) with points x_i = i*h.
class Grid {
 public:
  Grid(int points, double length);

  int points() const { return points_; }
  double length() const { return length_; }
  double spacing() const { return length_ / points_; }
  double x(int i) const { return i * spacing(); }

  // Angular wavenumbers in FFT order: 0, 1, ..., M/2, -(M/2-1), ..., -1 (times 2*pi/L).
  Eigen::VectorXd wavenumbers() const;

  bool operator==(const Grid& other) const = default;

 private:
  int points_;
  double length_;
};

struct GridFunction {
  Grid grid;
  Eigen::VectorXcd values;

  GridFunction(const Grid& g);
  GridFunction(const Grid& g, Eigen::VectorXcd v);

  int size() const { return static_cast<int>(values.size()); }
};

struct Norms {
  double l1;
  double l2;
  double linf;
  double h1_seminorm;
};

// Unitary discrete Fourier transform (1/sqrt(M) in both directions).
Eigen::VectorXcd fourier_transform(const Eigen::VectorXcd& values);
Eigen::VectorXcd inverse_fourier_transform(const Eigen::VectorXcd& values);

// Applies the Fourier multiplier m(k) to f.
GridFunction fourier_multiply(const GridFunction& f, const Eigen::VectorXcd& multiplier);

GridFunction spectral_laplacian(const GridFunction& f);
GridFunction spectral_gradient(const GridFunction& f);

// (f * g)(x_i) = h * sum_j f(x_j) g(x_i - x_j), periodic wrap.
GridFunction periodic_convolution(const GridFunction& f, const GridFunction& g);

Norms norms(const GridFunction& f);

// <f, g> = h * sum conj(f) g.
cplx inner_product(const GridFunction& f, const GridFunction& g);

void require_same_grid(const GridFunction& f, const GridFunction& g);

}  // namespace condensate
