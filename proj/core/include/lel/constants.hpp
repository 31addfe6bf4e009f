#pragma once

#include <cstdint>
#include <vector>

#include "lel/flow.hpp"
#include "lel/generator.hpp"
#include "lel/random.hpp"

namespace lel {

struct LsiOptions {
  int starts = 8;
  int iterations = 200;
  std::uint64_t seed = 1;
};

// A ratio objective N(rho)/D(rho) minimized over the interior of the state space.
struct RatioEstimate {
  double value = 0.0;       // min(sampled, local)
  double sampled = 0.0;     // best multi-start simplex result
  double local = 0.0;       // limit rho -> sigma (generalized eigenvalue of the Hessian pair)
};

struct ConstantsReport {
  double lambda_L = 0.0;
  double lambda_min = 0.0;
  double K_lower = 0.0;
  double K_upper = 0.0;
  double K2_lower = 0.0;
  RatioEstimate K;       // inf I_1 / (2 D_1)
  RatioEstimate K2;      // inf I_2 / (2 D_2)
  RatioEstimate kappa1;  // inf E_1(X) / Ent_1(X)
  RatioEstimate kappa2;  // inf E_2(X) / Ent_2(X)

  double t2_bound(double eps) const;
};

ConstantsReport lsi_constants(const GnsGenerator& g, const LsiOptions& opts = {});

// max(0, log(1 / (lambda_min eps^2)) / (2 gap))
double t2_bound(double gap, double lambda_min, double eps);

struct ComparisonConstants {
  double Lambda = 0.0;
  double eta = 0.0;
  double T = 0.0;
};

ComparisonConstants comparison_constants(double alpha0, double alpha1, double eps, const DensityMatrix& sigma,
                                         const std::vector<double>& omegas, double K);

struct TheoremConstants {
  double C = 0.0;
  double tau = 0.0;
  double T = 0.0;  // log(alpha - 1) / (2 K eta) for alpha > 2, else 0
  double Lambda = 0.0;
  double eta = 0.0;
};

TheoremConstants theorem_constants(double alpha, double eps, const DensityMatrix& rho0, const DensityMatrix& sigma,
                                   double K, double gap, const std::vector<double>& omegas);

std::vector<double> bohr_frequencies(const GnsGenerator& g);

double weight_function(double s, double beta);

struct Knots {
  double s1 = 0.0;
  double s2 = 0.0;
  double f_max = 0.0;
};
Knots f_knots(double beta);

struct HypercontractivityTrace {
  std::vector<double> t;
  std::vector<double> beta;
  std::vector<double> F;
  double max_increase = 0.0;  // max forward difference of F
  double T = 0.0;
};

// beta_t = 1 + (alpha0 - 1) e^{2 K eta t}; F_t = (1/beta_t) log tr[(Gamma^{(1-beta_t)/beta_t}(rho_t))^{beta_t}]
HypercontractivityTrace hypercontractivity_monitor(const GnsGenerator& g, const DensityMatrix& rho0, double alpha0,
                                                   double alpha1, double eta, double K, double dt);

struct ComparisonCheck {
  ComparisonConstants constants;
  HypercontractivityTrace monitor;
  double d_alpha0_initial = 0.0;
  double d_alpha1_final = 0.0;
  bool pass = false;
};

// sigma + t H for a random traceless Hermitian H, t shrunk until D(rho || sigma) <= eps.
DensityMatrix state_within_entropy(const DensityMatrix& sigma, double eps, Rng& rng);

// Requires D(rho0 || sigma) <= eps < lambda_min^2 / 2.
ComparisonCheck comparison_check(const GnsGenerator& g, const DensityMatrix& rho0, double alpha0, double alpha1,
                                 double eps, double K, double dt);

}  // namespace lel
