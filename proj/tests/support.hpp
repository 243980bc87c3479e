#pragma once

#include <algorithm>
#include <atomic>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <numeric>
#include <sstream>
#include <string>
#include <vector>

#include <unistd.h>

#include "nsaflow/matrix.hpp"
#include "nsaflow/synthetic.hpp"

namespace testsupport {

using nsaflow::DenseMatrix;
using nsaflow::Index;

inline DenseMatrix randn(Index r, Index c, std::uint64_t seed) { return nsaflow::Rng(seed).normal_matrix(r, c); }

inline DenseMatrix randu(Index r, Index c, std::uint64_t seed) { return nsaflow::Rng(seed).uniform_matrix(r, c); }

inline double rel_err(const DenseMatrix& a, const DenseMatrix& b) {
  const double scale = std::max({a.norm(), b.norm(), 1e-12});
  return (a - b).norm() / scale;
}

// Polar factor from Eigen's Jacobi SVD, independent of the library route.
inline DenseMatrix svd_polar(const DenseMatrix& y) {
  Eigen::JacobiSVD<DenseMatrix> svd(y, Eigen::ComputeThinU | Eigen::ComputeThinV);
  return svd.matrixU() * svd.matrixV().transpose();
}

// Sine of the largest principal angle between the column spans of a and b.
inline double subspace_distance(const DenseMatrix& a, const DenseMatrix& b) {
  Eigen::HouseholderQR<DenseMatrix> qa(a), qb(b);
  const DenseMatrix ua = qa.householderQ() * DenseMatrix::Identity(a.rows(), a.cols());
  const DenseMatrix ub = qb.householderQ() * DenseMatrix::Identity(b.rows(), b.cols());
  const DenseMatrix resid = ub - ua * (ua.transpose() * ub);
  Eigen::JacobiSVD<DenseMatrix> svd(resid);
  return svd.singularValues().size() ? svd.singularValues()(0) : 0.0;
}

inline std::vector<double> ranks(const std::vector<double>& v) {
  std::vector<std::size_t> idx(v.size());
  std::iota(idx.begin(), idx.end(), 0);
  std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return v[a] < v[b]; });
  std::vector<double> r(v.size());
  for (std::size_t i = 0; i < idx.size();) {
    std::size_t j = i;
    while (j + 1 < idx.size() && v[idx[j + 1]] == v[idx[i]]) ++j;
    for (std::size_t t = i; t <= j; ++t) r[idx[t]] = 0.5 * static_cast<double>(i + j) + 1.0;
    i = j + 1;
  }
  return r;
}

inline double spearman(const std::vector<double>& x, const std::vector<double>& y) {
  const auto rx = ranks(x);
  const auto ry = ranks(y);
  const double n = static_cast<double>(x.size());
  const double mx = std::accumulate(rx.begin(), rx.end(), 0.0) / n;
  const double my = std::accumulate(ry.begin(), ry.end(), 0.0) / n;
  double sxy = 0, sxx = 0, syy = 0;
  for (std::size_t i = 0; i < rx.size(); ++i) {
    sxy += (rx[i] - mx) * (ry[i] - my);
    sxx += (rx[i] - mx) * (rx[i] - mx);
    syy += (ry[i] - my) * (ry[i] - my);
  }
  return (sxx > 0 && syy > 0) ? sxy / std::sqrt(sxx * syy) : 0.0;
}

inline double sparsity(const DenseMatrix& y, double thr = 1e-8) {
  return static_cast<double>((y.array().abs() < thr).count()) / static_cast<double>(y.size());
}

class TempDir {
 public:
  TempDir() {
    static std::atomic<int> counter{0};
    path_ = std::filesystem::temp_directory_path() /
            ("nsaflow_test_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  std::string file(const std::string& name) const { return (path_ / name).string(); }

 private:
  std::filesystem::path path_;
};

inline std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace testsupport
