#pragma once

#include <limits>
#include <vector>

#include "lel/generator.hpp"
#include "lel/matcore.hpp"

namespace lel {

// A -> U (m o (U* A U)) U*, m an entrywise kernel in the eigenbasis U.
class KernelOperator {
 public:
  KernelOperator(Matrix basis, Matrix kernel);

  const Matrix& basis() const { return u_; }
  const Matrix& kernel() const { return m_; }
  int dim() const { return static_cast<int>(m_.rows()); }

  Matrix apply(const Matrix& a) const;
  KernelOperator inverse() const;
  // this after other; both must share the eigenbasis.
  KernelOperator compose(const KernelOperator& other) const;
  bool positive() const;        // all kernel entries real and > 0
  bool hs_self_adjoint() const; // kernel Hermitian
  Superoperator to_superop() const;

 private:
  Matrix u_;
  Matrix m_;
};

inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

// Gamma_sigma^gamma(A) = sigma^{gamma/2} A sigma^{gamma/2}
Matrix gamma_pow(const DensityMatrix& sigma, double gamma, const Matrix& a);
KernelOperator gamma_op(const DensityMatrix& sigma, double gamma);
// Delta_sigma(A) = sigma A sigma^{-1}
Matrix modular(const DensityMatrix& sigma, const Matrix& a);
KernelOperator modular_op(const DensityMatrix& sigma);

// Closed form of int_0^1 e^{omega(s-1/2)} X^s A X^{1-s} ds, kernel entry for eigenvalues (a, b).
double mop_kernel_value(double a, double b, double omega);
KernelOperator mop(const SpectralDecomposition& x, double omega);
KernelOperator mop(const Matrix& x, double omega);
KernelOperator mop_inv(const SpectralDecomposition& x, double omega);
KernelOperator mop_inv(const Matrix& x, double omega);

// ||[X]_w(V log(e^{-w/2}X) - log(e^{w/2}X)V) - (e^{-w/2}VX - e^{w/2}XV)||_F
double chain_rule_residual(const Matrix& v, const Matrix& x, double omega);

std::vector<Matrix> nc_gradient(const GnsGenerator& g, const Matrix& a);
Matrix nc_divergence(const GnsGenerator& g, const std::vector<Matrix>& field);

// M^alpha_{rho,omega} = (Z/alpha) Gamma^{(a-1)/a} o [rho_s]_{w/a} o [rho_s^{a-1}]^{-1}_{(a-1)w/a} o Gamma^{(a-1)/a}
class MopRenyi {
 public:
  MopRenyi(const DensityMatrix& rho, const DensityMatrix& sigma, double omega, double alpha);

  Matrix apply(const Matrix& a) const;
  Matrix apply_inverse(const Matrix& a) const;
  Superoperator to_superop() const;
  double z() const { return z_; }

 private:
  Matrix outer_;        // sigma^{(a-1)/(2a)}
  Matrix outer_inv_;
  KernelOperator core_; // [rho_s]_{w/a} o [rho_s^{a-1}]^{-1}_{(a-1)w/a} in the rho_s eigenbasis
  double z_ = 1.0;
  double alpha_ = 1.0;
};

// G_{X,omega}(s): kernel b^s + b^{1-s}, b = e^omega lambda_k / lambda_l, s in [0, 1/2].
KernelOperator g_op(const Matrix& x, double omega, double s);

// f^alpha_{kj}; alpha = kInfinity selects the alpha -> infinity kernel.
double weight_kernel_value(double lk, double lj, double alpha);
KernelOperator weight_operator(const DensityMatrix& sigma, double alpha);

// Gamma^{-1/beta}(|Gamma^{1/alpha}(A)|^{alpha/beta})
Matrix power_op(const DensityMatrix& sigma, double beta, double alpha, const Matrix& a);
// (tr |Gamma^{1/alpha}(A)|^alpha)^{1/alpha}
double weighted_lp_norm(const DensityMatrix& sigma, double alpha, const Matrix& a);
double ent_fun(const DensityMatrix& sigma, double alpha, const Matrix& x);
double dirichlet_form(const GnsGenerator& g, double alpha, const Matrix& x);

}  // namespace lel
