#pragma once

#include <string>
#include <vector>

#include "lel/generator.hpp"
#include "lel/matcore.hpp"
#include "lel/noncomm_ops.hpp"

namespace lel {

struct IntegrateOptions {
  int record_every = 1;       // keep every k-th grid state (the final state is always kept)
  int richardson_every = 16;  // steps between Richardson error probes
  int max_halvings = 10;      // dt_min = dt / 2^max_halvings
};

struct Trajectory {
  std::vector<double> times;
  std::vector<DensityMatrix> states;
  double dt = 0.0;
  double error_rate = 0.0;    // max Richardson local-error estimate per unit time
  double min_eigenvalue = 1.0;
  int halved_steps = 0;
  std::string label;
};

Trajectory integrate(const RawGenerator& g, const DensityMatrix& rho0, double t_end, double dt,
                     const IntegrateOptions& opts = {});
Trajectory integrate(const GnsGenerator& g, const DensityMatrix& rho0, double t_end, double dt,
                     const IntegrateOptions& opts = {});

struct TraceRow {
  double t = 0.0;
  double alpha = 0.0;
  double d = 0.0;
  double fisher = 0.0;
};

struct DivergenceTrace {
  std::vector<TraceRow> rows;  // ordered by time, then by alpha as given
  int pruned = 0;              // leading states dropped for not being strictly positive
  std::vector<std::string> warnings;

  std::vector<TraceRow> for_alpha(double alpha) const;
};

DivergenceTrace divergence_trace(const Trajectory& traj, const GnsGenerator& g, const std::vector<double>& alphas);

struct TraceDiagnostics {
  double max_increase = 0.0;        // max_k D(t_{k+1}) - D(t_k)
  double max_rate_mismatch = 0.0;   // max relative |(-dD/dt) - I_mid| / I_mid
  int compared = 0;
};

// Rows of a single alpha. Rate comparisons skip intervals where D is below floor.
TraceDiagnostics analyze_trace(const std::vector<TraceRow>& rows, double floor = 1e-10);

enum class FitVerdict { ok, truncated, stationary };

struct DecayFit {
  double rate = 0.0;  // -slope of log D
  FitVerdict verdict = FitVerdict::stationary;
  int points = 0;
};

inline constexpr double kDivergenceFloor = 1e-14;

DecayFit fit_decay_rate(const std::vector<double>& t, const std::vector<double>& d, double tail_fraction = 0.3);
DecayFit fit_decay_rate(const std::vector<TraceRow>& rows, double tail_fraction = 0.3);

double gradient_flow_residual(const GnsGenerator& g, const DensityMatrix& rho, double alpha);

// g(nu1, nu2) on traceless Hermitian tangent vectors at rho.
class MetricTensor {
 public:
  MetricTensor(const GnsGenerator& g, const DensityMatrix& rho, double alpha);

  // Traceless Hermitian U with -div(M grad U) = nu.
  Matrix potential(const Matrix& nu) const;
  double operator()(const Matrix& nu1, const Matrix& nu2) const;
  // -div(M grad U)
  Matrix apply(const Matrix& u) const;

 private:
  std::vector<Matrix> jumps_;
  std::vector<MopRenyi> weights_;
  std::vector<Matrix> basis_;
  RealMatrix pinv_;
};

double metric_eval(const GnsGenerator& g, const DensityMatrix& rho, double alpha, const Matrix& nu1, const Matrix& nu2);

struct InequalityCheck {
  double lhs = 0.0;
  double rhs = 0.0;
  bool pass = false;
  bool projected = false;  // input was moved onto the constraint set
};

// <A, -L A>_{1/2} >= gap <A, A>_{1/2} for tr(sigma A) = 0.
InequalityCheck poincare_check(const GnsGenerator& g, const Matrix& a, double gap);
InequalityCheck poincare_check(const GnsGenerator& g, const Matrix& a);
// I_2 >= 2 gap (1 - e^{-D_2})
InequalityCheck fisher2_bound_check(const GnsGenerator& g, const DensityMatrix& rho, double gap);
InequalityCheck fisher2_bound_check(const GnsGenerator& g, const DensityMatrix& rho);

// log(1 + (e^{D_2(rho_0)} - 1) e^{-2 gap t})
double d2_envelope(double d2_initial, double gap, double t);

}  // namespace lel
