#pragma once

#include <cstdint>
#include <optional>
#include <random>
#include <string_view>

#include "nsaflow/matrix.hpp"

namespace nsaflow {

/// mt19937_64 with fixed conversions to uniform and normal variates, so a
/// seed produces the same numbers with every standard library.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}
  double uniform();  ///< [0, 1)
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  double normal();
  DenseMatrix uniform_matrix(Index rows, Index cols, double lo = 0.0, double hi = 1.0);
  DenseMatrix normal_matrix(Index rows, Index cols);

 private:
  std::mt19937_64 engine_;
  std::optional<double> spare_;
};

enum class SyntheticKind { block_nonneg, correlated_noise, toy43, two_factor, nonneg_lowrank };

std::optional<SyntheticKind> parse_synthetic_kind(std::string_view text);

/// p x k with k contiguous, disjoint row blocks of uniform(0.5, 1.5)
/// entries, plus noise * N(0, 1), clamped at zero.
DenseMatrix block_nonneg(Index p, Index k, double noise, std::uint64_t seed);

/// |sqrt(rho) shared + sqrt(1 - rho) own + noise * N(0, 1)|: k columns that
/// share one Gaussian factor.
DenseMatrix correlated_noise(Index p, Index k, double noise, std::uint64_t seed, double rho = 0.5);

/// Noise-free 4 x 3 pattern: disjoint non-negative unit columns scaled by
/// 1.0, 0.8 and 1.2.
DenseMatrix toy43_truth();
/// toy43_truth() + noise * N(0, 1), clamped at zero.
DenseMatrix toy43(double noise, std::uint64_t seed);

struct TwoFactorData {
  DenseMatrix x;        ///< n x p
  DenseMatrix factors;  ///< p x 2, disjoint unit-norm supports
};

/// n x p data from two latent factors with disjoint supports of `support`
/// variables each, plus noise * N(0, 1). The scores are centered and
/// uncorrelated in-sample with standard deviations 3 and 2.
TwoFactorData two_factor(Index n, Index p, Index support, double noise, std::uint64_t seed);

/// n x p data with k non-negative unit-norm loadings (|N(0,1)|) and score
/// standard deviations spaced from 3 down to 1.5, plus noise * N(0, 1).
DenseMatrix nonneg_lowrank(Index n, Index p, Index k, double noise, std::uint64_t seed);

}  // namespace nsaflow
