#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "lel/generator.hpp"

namespace lel {

inline constexpr double kBalanceThreshold = 1e-8;

struct SrdEntry {
  double alpha = 0.0;
  std::optional<double> residual;  // empty when alpha was skipped
  std::string warning;
};

struct BalanceReport {
  double gns_residual = 0.0;
  double kms_residual = 0.0;
  double bkm_residual = 0.0;
  std::vector<SrdEntry> srd;  // ordered by alpha as given
  bool gns = false;
  bool kms = false;
  bool bkm = false;
  bool srd_all = false;
};

// ||Gamma^{-1} o L-dagger o Gamma - L||_F / ||L||_F
double check_kms(const RawGenerator& g);
// max basis-pair asymmetry in <.,.>_1, divided by ||L||_F
double check_gns(const RawGenerator& g);
// ||W L W^{-1} - L-dagger||_Tr, raw (unnormalized) as plotted against alpha
double srd_residual_raw(const RawGenerator& g, double alpha);
// srd_residual_raw / ||L||_Tr
double srd_residual(const RawGenerator& g, double alpha);
double check_bkm(const RawGenerator& g);
std::vector<SrdEntry> check_srd(const RawGenerator& g, const std::vector<double>& alphas);

BalanceReport balance_report(const RawGenerator& g, const std::vector<double>& alphas);

RawGenerator carlen_maas_counterexample();
// The channel K of the construction, Heisenberg picture, and its ingredients.
struct CarlenMaasParts {
  DensityMatrix sigma;
  Superoperator channel;        // K(A) = sum K_j* A K_j
  Superoperator channel_tilde;  // K~(A) = sum K~_j* A K~_j
};
CarlenMaasParts carlen_maas_parts();

struct Fig1Row {
  double alpha = 0.0;
  double residual = 0.0;
};
std::vector<Fig1Row> fig1_sweep(const RawGenerator& g, const std::vector<double>& alphas);

}  // namespace lel
