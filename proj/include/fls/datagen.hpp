#pragma once

#include <cstdint>
#include <random>

#include "fls/types.hpp"

namespace fls {

enum class CovModel { identity, ar1 };

namespace detail {

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ull;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
  return x ^ (x >> 31);
}

// One deterministic substream per row, so rows can be generated in any order.
inline std::mt19937_64 row_rng(std::uint64_t seed, std::uint64_t row) {
  return std::mt19937_64(splitmix64(splitmix64(seed) ^ row));
}

}  // namespace detail

// The structured true coefficient vector: six spikes plus one long run.
inline Vec true_beta(Index p) {
  if (p < 50) throw std::invalid_argument("true_beta: requires p >= 50");
  Vec b = Vec::Zero(p);
  b[0] = 2.0;
  b[2] = 1.5;
  b[4] = 0.8;
  b[7] = 1.0;
  b[9] = 1.75;
  b[12] = 0.75;
  for (Index j = 15; j < 50; ++j) b[j] = 0.3;  // entries 16..50, 1-based
  return b;
}

// Feature mean pattern; segments beyond p are clipped. 1-based inclusive
// ranges 3:7 -> 10, 70:90 -> 5, floor(p/2):floor(2p/3) -> -2, later
// assignments win on overlap.
inline Vec mean_pattern(Index p) {
  Vec mu = Vec::Zero(p);
  auto set = [&](Index lo, Index hi, double v) {
    for (Index j = std::max<Index>(lo, 1); j <= std::min(hi, p); ++j) mu[j - 1] = v;
  };
  set(3, 7, 10.0);
  set(70, 90, 5.0);
  set(p / 2, (2 * p) / 3, -2.0);
  return mu;
}

// Gaussian rows with the stated mean pattern. AR(1) rows are generated by the
// stationary recursion x_j = mu_j + rho (x_{j-1} - mu_{j-1}) + sqrt(1-rho^2) z_j,
// giving covariance rho^|i-j| without a matrix factorization.
inline Mat gen_design(Index n, Index p, CovModel cov, std::uint64_t seed, double rho = 0.5) {
  if (n < 1 || p < 1) throw std::invalid_argument("gen_design: dimensions must be positive");
  const Vec mu = mean_pattern(p);
  Mat X(n, p);
  const double scale = std::sqrt(1.0 - rho * rho);
  for (Index i = 0; i < n; ++i) {
    auto rng = detail::row_rng(seed, static_cast<std::uint64_t>(i));
    std::normal_distribution<double> nd;
    if (cov == CovModel::identity) {
      for (Index j = 0; j < p; ++j) X(i, j) = mu[j] + nd(rng);
    } else {
      X(i, 0) = mu[0] + nd(rng);
      for (Index j = 1; j < p; ++j)
        X(i, j) = mu[j] + rho * (X(i, j - 1) - mu[j - 1]) + scale * nd(rng);
    }
  }
  return X;
}

inline Vec gen_response(const Mat& X, const Vec& beta_star, double noise_sd, std::uint64_t seed) {
  if (beta_star.size() != X.cols()) throw std::invalid_argument("gen_response: beta length mismatch");
  if (noise_sd < 0.0) throw std::invalid_argument("gen_response: negative noise sd");
  Vec y = X * beta_star;
  for (Index i = 0; i < y.size(); ++i) {
    auto rng = detail::row_rng(seed ^ 0xfeedbeefull, static_cast<std::uint64_t>(i));
    std::normal_distribution<double> nd(0.0, 1.0);
    if (noise_sd > 0.0) y[i] += noise_sd * nd(rng);
  }
  return y;
}

}  // namespace fls
