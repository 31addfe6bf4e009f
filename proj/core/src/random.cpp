#include "lel/random.hpp"

#include <cmath>
#include <numbers>

namespace lel {

double Rng::uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

double Rng::uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

double Rng::normal() {
  double u1 = uniform();
  while (u1 <= 0.0) u1 = uniform();
  const double u2 = uniform();
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

Complex Rng::complex_normal() {
  const double r = 1.0 / std::sqrt(2.0);
  return {r * normal(), r * normal()};
}

Rng Rng::fork(std::uint64_t stream) {
  const std::uint64_t base = engine_();
  return Rng(base ^ (0x9E3779B97F4A7C15ULL * (stream + 1)));
}

Matrix random_ginibre(int n, Rng& rng) {
  Matrix g(n, n);
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < n; ++i) g(i, j) = rng.complex_normal();
  return g;
}

Matrix random_hermitian(int n, Rng& rng) { return hermitian_part(random_ginibre(n, rng)); }

Matrix random_traceless_hermitian(int n, Rng& rng) {
  Matrix h = random_hermitian(n, rng);
  h -= (h.trace() / static_cast<double>(n)) * Matrix::Identity(n, n);
  return h;
}

Matrix random_unitary(int n, Rng& rng) {
  Eigen::HouseholderQR<Matrix> qr(random_ginibre(n, rng));
  Matrix q = qr.householderQ();
  Matrix r = qr.matrixQR();
  for (int k = 0; k < n; ++k) {
    const Complex d = r(k, k);
    if (std::abs(d) > 0) q.col(k) *= d / std::abs(d);
  }
  return q;
}

DensityMatrix random_density(int n, Rng& rng, double mix) {
  const Matrix g = random_ginibre(n, rng);
  Matrix rho = g * g.adjoint();
  rho /= rho.trace().real();
  rho = (1.0 - mix) * rho + (mix / n) * Matrix::Identity(n, n);
  rho = hermitian_part(rho);
  rho /= rho.trace().real();
  return DensityMatrix::from(rho);
}

}  // namespace lel
