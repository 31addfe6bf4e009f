#pragma once

#include "lel/generator.hpp"
#include "lel/matcore.hpp"

namespace lel {

// |alpha - 1| within this window evaluates the relative-entropy branch.
inline constexpr double kAlphaOneWindow = 1e-6;

struct DivergenceValue {
  double alpha = 1.0;
  double value = 0.0;  // nats
  double z = 1.0;      // tr rho_sigma^alpha
};

// rho_sigma = sigma^{(1-a)/2a} rho sigma^{(1-a)/2a}
Matrix sandwiched_state(const DensityMatrix& rho, const DensityMatrix& sigma, double alpha);

DivergenceValue sandwiched_renyi(const DensityMatrix& rho, const DensityMatrix& sigma, double alpha);
double relative_entropy(const DensityMatrix& rho, const DensityMatrix& sigma);
double petz_renyi(const DensityMatrix& rho, const DensityMatrix& sigma, double alpha);
double chi2_divergence(const DensityMatrix& rho, const DensityMatrix& sigma);

Matrix functional_derivative(const DensityMatrix& rho, const DensityMatrix& sigma, double alpha);
double fisher_information(const DensityMatrix& rho, const DensityMatrix& sigma, double alpha, const GnsGenerator& g);

}  // namespace lel
