#include "lel/divergence.hpp"

#include <cmath>

#include "lel/noncomm_ops.hpp"

namespace lel {

namespace {

void check_alpha(double alpha) {
  if (!(alpha > 0.0) || !std::isfinite(alpha)) throw DomainError("divergence: alpha must be a positive finite number");
}

void check_pair(const DensityMatrix& rho, const DensityMatrix& sigma, const char* who) {
  if (rho.dim() != sigma.dim()) throw StructuralError(std::string(who) + ": dimension mismatch");
  sigma.require_strictly_positive(who);
}

bool near_one(double alpha) { return std::abs(alpha - 1.0) <= kAlphaOneWindow; }

}  // namespace

Matrix sandwiched_state(const DensityMatrix& rho, const DensityMatrix& sigma, double alpha) {
  check_alpha(alpha);
  check_pair(rho, sigma, "sandwiched_state");
  const Matrix h = sigma.power((1.0 - alpha) / (2.0 * alpha));
  return hermitian_part(h * rho.matrix() * h);
}

double relative_entropy(const DensityMatrix& rho, const DensityMatrix& sigma) {
  check_pair(rho, sigma, "relative_entropy");
  // Eigenvalues of rho clamped at 1e-14 inside the log: 0 log 0 = 0.
  const auto& sp = rho.spectrum();
  double ent = 0.0;
  for (Eigen::Index i = 0; i < sp.values.size(); ++i) {
    const double p = std::max(sp.values(i), 0.0);
    ent += p * std::log(std::max(p, 1e-14));
  }
  const double cross = (rho.matrix() * sigma.log()).trace().real();
  return ent - cross;
}

DivergenceValue sandwiched_renyi(const DensityMatrix& rho, const DensityMatrix& sigma, double alpha) {
  check_alpha(alpha);
  check_pair(rho, sigma, "sandwiched_renyi");
  if (near_one(alpha)) return {alpha, relative_entropy(rho, sigma), 1.0};
  const SpectralDecomposition s = eig_hermitian(sandwiched_state(rho, sigma, alpha));
  double z = 0.0;
  for (Eigen::Index i = 0; i < s.values.size(); ++i) z += std::pow(std::max(s.values(i), 0.0), alpha);
  return {alpha, std::log(z) / (alpha - 1.0), z};
}

double petz_renyi(const DensityMatrix& rho, const DensityMatrix& sigma, double alpha) {
  check_alpha(alpha);
  check_pair(rho, sigma, "petz_renyi");
  if (alpha == 1.0) throw DomainError("petz_renyi: alpha = 1 is excluded");
  if (alpha > 1.0) rho.require_strictly_positive("petz_renyi");
  const double q = (rho.power(alpha) * sigma.power(1.0 - alpha)).trace().real();
  return std::log(q) / (alpha - 1.0);
}

double chi2_divergence(const DensityMatrix& rho, const DensityMatrix& sigma) {
  check_pair(rho, sigma, "chi2_divergence");
  const Matrix d = gamma_pow(sigma, -1.0, rho.matrix() - sigma.matrix());
  return inner_s(d, d, sigma, 0.5).real();
}

Matrix functional_derivative(const DensityMatrix& rho, const DensityMatrix& sigma, double alpha) {
  check_alpha(alpha);
  check_pair(rho, sigma, "functional_derivative");
  rho.require_strictly_positive("functional_derivative");
  if (near_one(alpha)) return hermitian_part(rho.log() - sigma.log());
  const SpectralDecomposition s = eig_hermitian(sandwiched_state(rho, sigma, alpha));
  double z = 0.0;
  for (Eigen::Index i = 0; i < s.values.size(); ++i) z += std::pow(s.values(i), alpha);
  const Matrix inner = mat_pow(s, alpha - 1.0);
  const Matrix fd = gamma_pow(sigma, (1.0 - alpha) / alpha, inner) * (alpha / ((alpha - 1.0) * z));
  return hermitian_part(fd);
}

double fisher_information(const DensityMatrix& rho, const DensityMatrix& sigma, double alpha, const GnsGenerator& g) {
  if (g.dim() != sigma.dim() || (g.sigma().matrix() - sigma.matrix()).norm() > 1e-10) {
    throw ValidationError({{"sigma_mismatch", -1, "generator stationary state differs from sigma"}});
  }
  const Matrix fd = functional_derivative(rho, sigma, alpha);
  return -hs_inner(fd, g.apply_schrodinger(rho.matrix())).real();
}

}  // namespace lel
