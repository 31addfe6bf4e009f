#pragma once

#include <cstdint>
#include <random>

#include "lel/matcore.hpp"

namespace lel {

// Deterministic across platforms: only the raw 64-bit engine output is used.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next() { return engine_(); }
  double uniform();                        // [0, 1)
  double uniform(double lo, double hi);
  double normal();
  Complex complex_normal();                // E|z|^2 = 1
  Rng fork(std::uint64_t stream);          // independent child stream

 private:
  std::mt19937_64 engine_;
};

Matrix random_ginibre(int n, Rng& rng);
Matrix random_hermitian(int n, Rng& rng);
Matrix random_traceless_hermitian(int n, Rng& rng);
Matrix random_unitary(int n, Rng& rng);

// Ginibre state mixed with I/n: rho = (1 - mix) G G*/tr + mix I/n.
DensityMatrix random_density(int n, Rng& rng, double mix = 0.0);

}  // namespace lel
