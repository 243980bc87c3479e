#include "nsaflow/synthetic.hpp"

#include <cmath>
#include <numbers>

#include "nsaflow/errors.hpp"

namespace nsaflow {

double Rng::uniform() {
  // Top 53 bits -> [0, 1).
  return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
}

double Rng::normal() {
  if (spare_) {
    const double v = *spare_;
    spare_.reset();
    return v;
  }
  double u1 = uniform();
  while (u1 <= 0.0) u1 = uniform();
  const double u2 = uniform();
  const double r = std::sqrt(-2.0 * std::log(u1));
  const double a = 2.0 * std::numbers::pi * u2;
  spare_ = r * std::sin(a);
  return r * std::cos(a);
}

DenseMatrix Rng::uniform_matrix(Index rows, Index cols, double lo, double hi) {
  DenseMatrix m(rows, cols);
  for (Index i = 0; i < rows; ++i) {
    for (Index j = 0; j < cols; ++j) m(i, j) = uniform(lo, hi);
  }
  return m;
}

DenseMatrix Rng::normal_matrix(Index rows, Index cols) {
  DenseMatrix m(rows, cols);
  for (Index i = 0; i < rows; ++i) {
    for (Index j = 0; j < cols; ++j) m(i, j) = normal();
  }
  return m;
}

std::optional<SyntheticKind> parse_synthetic_kind(std::string_view text) {
  if (text == "block_nonneg") return SyntheticKind::block_nonneg;
  if (text == "correlated_noise") return SyntheticKind::correlated_noise;
  if (text == "toy43") return SyntheticKind::toy43;
  if (text == "two_factor") return SyntheticKind::two_factor;
  if (text == "nonneg_lowrank") return SyntheticKind::nonneg_lowrank;
  return std::nullopt;
}

namespace {

void check_noise(double noise) {
  if (!(noise >= 0.0) || !std::isfinite(noise)) throw ConfigError("noise must be >= 0");
}

DenseMatrix unit_columns(DenseMatrix m) {
  for (Index j = 0; j < m.cols(); ++j) {
    const double n = m.col(j).norm();
    if (n > 0.0) m.col(j) /= n;
  }
  return m;
}

}  // namespace

DenseMatrix block_nonneg(Index p, Index k, double noise, std::uint64_t seed) {
  if (k < 1 || p < k) throw DimensionError("block_nonneg: need 1 <= k <= p");
  check_noise(noise);
  Rng rng(seed);
  DenseMatrix x = DenseMatrix::Zero(p, k);
  // Blocks as even as possible, the first p % k one row longer.
  const Index base = p / k;
  const Index extra = p % k;
  Index row = 0;
  for (Index j = 0; j < k; ++j) {
    const Index len = base + (j < extra ? 1 : 0);
    for (Index i = 0; i < len; ++i) x(row + i, j) = rng.uniform(0.5, 1.5);
    row += len;
  }
  if (noise > 0.0) x += noise * rng.normal_matrix(p, k);
  return x.cwiseMax(0.0);
}

DenseMatrix correlated_noise(Index p, Index k, double noise, std::uint64_t seed, double rho) {
  if (p < 1 || k < 1) throw DimensionError("correlated_noise: empty shape");
  if (!(rho >= 0.0 && rho <= 1.0)) throw ConfigError("correlated_noise: rho must lie in [0, 1]");
  check_noise(noise);
  Rng rng(seed);
  Vector shared(p);
  for (Index i = 0; i < p; ++i) shared(i) = rng.normal();
  DenseMatrix x = std::sqrt(1.0 - rho) * rng.normal_matrix(p, k);
  x.colwise() += std::sqrt(rho) * shared;
  if (noise > 0.0) x += noise * rng.normal_matrix(p, k);
  return x.cwiseAbs();
}

DenseMatrix toy43_truth() {
  DenseMatrix t = DenseMatrix::Zero(4, 3);
  t(0, 0) = 1.0;
  t(1, 1) = 0.8;
  t(2, 2) = 1.2 / std::sqrt(2.0);
  t(3, 2) = 1.2 / std::sqrt(2.0);
  return t;
}

DenseMatrix toy43(double noise, std::uint64_t seed) {
  check_noise(noise);
  Rng rng(seed);
  DenseMatrix x = toy43_truth();
  if (noise > 0.0) x += noise * rng.normal_matrix(4, 3);
  return x.cwiseMax(0.0);
}

TwoFactorData two_factor(Index n, Index p, Index support, double noise, std::uint64_t seed) {
  if (n < 2 || support < 1 || 2 * support > p) throw DimensionError("two_factor: need n >= 2 and 2 * support <= p");
  check_noise(noise);
  Rng rng(seed);
  DenseMatrix v = DenseMatrix::Zero(p, 2);
  for (Index i = 0; i < support; ++i) v(i, 0) = rng.uniform(0.5, 1.5);
  for (Index i = 0; i < support; ++i) v(support + i, 1) = rng.uniform(0.5, 1.5);
  v = unit_columns(std::move(v));
  // Scores are centered and decorrelated in-sample, so the factors are
  // exactly the principal axes of the noise-free data.
  DenseMatrix u = rng.normal_matrix(n, 2);
  u = u.rowwise() - u.colwise().mean();
  Eigen::HouseholderQR<DenseMatrix> qr(u);
  u = qr.householderQ() * DenseMatrix::Identity(n, 2) * std::sqrt(static_cast<double>(n - 1));
  u.col(0) *= 3.0;
  u.col(1) *= 2.0;
  DenseMatrix x = u * v.transpose();
  if (noise > 0.0) x += noise * rng.normal_matrix(n, p);
  return {std::move(x), std::move(v)};
}

DenseMatrix nonneg_lowrank(Index n, Index p, Index k, double noise, std::uint64_t seed) {
  if (n < 2 || k < 1 || k > p) throw DimensionError("nonneg_lowrank: need n >= 2 and 1 <= k <= p");
  check_noise(noise);
  Rng rng(seed);
  const DenseMatrix v = unit_columns(rng.normal_matrix(p, k).cwiseAbs());
  DenseMatrix u = rng.normal_matrix(n, k);
  for (Index j = 0; j < k; ++j) {
    const double sd = k == 1 ? 3.0 : 3.0 - 1.5 * static_cast<double>(j) / static_cast<double>(k - 1);
    u.col(j) *= sd;
  }
  DenseMatrix x = u * v.transpose();
  if (noise > 0.0) x += noise * rng.normal_matrix(n, p);
  return x;
}

}  // namespace nsaflow
