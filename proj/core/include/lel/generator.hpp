#pragma once

#include <optional>
#include <string>
#include <vector>

#include "lel/matcore.hpp"
#include "lel/random.hpp"

namespace lel {

struct JumpTerm {
  Matrix V;
  double omega = 0.0;   // Bohr frequency: sigma V sigma^{-1} = e^{-omega} V
  double weight = 1.0;  // c_j = <V_j, V_j>
};

// Any Lindbladian given directly by its Schrodinger-picture superoperator.
class RawGenerator {
 public:
  RawGenerator(std::optional<DensityMatrix> sigma, Superoperator schrodinger, std::string label = {});

  const std::optional<DensityMatrix>& sigma() const { return sigma_; }
  const Superoperator& schrodinger() const { return ldag_; }
  const Superoperator& heisenberg() const { return l_; }
  int dim() const { return ldag_.dim(); }
  const std::string& label() const { return label_; }

  Matrix apply_schrodinger(const Matrix& a) const { return ldag_.apply(a); }
  Matrix apply_heisenberg(const Matrix& a) const { return l_.apply(a); }

 private:
  std::optional<DensityMatrix> sigma_;
  Superoperator ldag_;
  Superoperator l_;
  std::string label_;
};

class GnsGenerator {
 public:
  const DensityMatrix& sigma() const { return *raw_.sigma(); }
  // Jump operators with the weight absorbed: <V_j, V_j> = c_j.
  const std::vector<JumpTerm>& terms() const { return terms_; }
  const Superoperator& heisenberg() const { return raw_.heisenberg(); }
  const Superoperator& schrodinger() const { return raw_.schrodinger(); }
  const RawGenerator& raw() const { return raw_; }
  int dim() const { return raw_.dim(); }
  const std::string& label() const { return raw_.label(); }

  Matrix apply_heisenberg(const Matrix& a) const { return raw_.apply_heisenberg(a); }
  Matrix apply_schrodinger(const Matrix& a) const { return raw_.apply_schrodinger(a); }

 private:
  friend GnsGenerator build_gns(const DensityMatrix&, const std::vector<JumpTerm>&, std::string);
  GnsGenerator(RawGenerator raw, std::vector<JumpTerm> terms)
      : raw_(std::move(raw)), terms_(std::move(terms)) {}
  RawGenerator raw_;
  std::vector<JumpTerm> terms_;
};

// Validates the canonical GNS conditions and assembles L and L-dagger.
// Throws ValidationError listing every violated condition with its term index.
GnsGenerator build_gns(const DensityMatrix& sigma, const std::vector<JumpTerm>& terms,
                       std::string label = {});

std::vector<JumpTerm> eigen_jump_terms(const DensityMatrix& sigma);

// L(A) = gamma (tr(sigma A) I - A) realized by jump terms.
GnsGenerator depolarizing_generator(const DensityMatrix& sigma, double gamma);
// sigma = I/2 with jumps sigma_X, sigma_Z (unit weights).
GnsGenerator qubit_xz_generator();
// Random sigma (mixed with I/n) and eigen-jump terms with random pair-symmetric weights.
GnsGenerator random_gns_generator(int n, Rng& rng);

Superoperator modular_superop(const DensityMatrix& sigma);

// max_ab |<L E_a, E_b>_1 - <E_a, L E_b>_1| / ||L||_F
double gns_asymmetry(const Superoperator& heisenberg, const DensityMatrix& sigma);

struct PrimitivityReport {
  bool primitive = false;
  int kernel_dim = 0;
  std::vector<Matrix> kernel_basis;
};

PrimitivityReport check_primitive(const RawGenerator& g);
PrimitivityReport check_primitive(const GnsGenerator& g);

struct SpectralGap {
  double gap = 0.0;
  std::vector<double> spectrum;  // eigenvalues of -L, ascending
  Matrix gap_eigenvector;        // Hermitian, <I, A>_{1/2} = 0, <A, A>_{1/2} = 1
};

SpectralGap spectral_gap(const GnsGenerator& g);
// Same computation for any generator with a stationary state whose -L is
// self-adjoint in <.,.>_{1/2} (KMS).
SpectralGap spectral_gap(const RawGenerator& g);

}  // namespace lel
