#pragma once

#include "fls/types.hpp"

namespace fls {

inline Vec soft_threshold(const Vec& x, double t) {
  if (t < 0.0 || !std::isfinite(t)) throw std::invalid_argument("soft_threshold: t must be >= 0");
  Vec out(x.size());
  for (Index j = 0; j < x.size(); ++j) {
    const double a = std::abs(x[j]) - t;
    out[j] = a > 0.0 ? (x[j] > 0.0 ? a : -a) : 0.0;
  }
  return out;
}

// Exact 1-D total-variation prox: argmin_z 1/2 ||z - x||^2 + t ||diff(z)||_1.
// Direct single-pass method (Condat-style running bounds on the taut string).
inline Vec prox_tv1d(const Vec& x, double t) {
  if (t < 0.0 || !std::isfinite(t)) throw std::invalid_argument("prox_tv1d: t must be >= 0");
  const Index n = x.size();
  Vec out(n);
  if (n == 0) return out;
  if (n == 1 || t == 0.0) {
    out = x;
    return out;
  }

  Index k = 0, k0 = 0, kminus = 0, kplus = 0;
  double umin = t, umax = -t;
  double vmin = x[0] - t, vmax = x[0] + t;
  const double twot = 2.0 * t;

  for (;;) {
    while (k == n - 1) {
      if (umin < 0.0) {
        do out[k0++] = vmin;
        while (k0 <= kminus);
        kminus = k = k0;
        vmin = x[k];
        umin = t;
        umax = vmin + umin - vmax;
      } else if (umax > 0.0) {
        do out[k0++] = vmax;
        while (k0 <= kplus);
        kplus = k = k0;
        vmax = x[k];
        umax = -t;
        umin = vmax + umax - vmin;
      } else {
        vmin += umin / static_cast<double>(k - k0 + 1);
        do out[k0++] = vmin;
        while (k0 <= k);
        return out;
      }
    }
    if ((umin += x[k + 1] - vmin) < -t) {          // negative jump ends the segment
      do out[k0++] = vmin;
      while (k0 <= kminus);
      kplus = kminus = k = k0;
      vmin = x[k];
      vmax = x[k] + twot;
      umin = t;
      umax = -t;
    } else if ((umax += x[k + 1] - vmax) > t) {    // positive jump ends the segment
      do out[k0++] = vmax;
      while (k0 <= kplus);
      kplus = kminus = k = k0;
      vmax = x[k];
      vmin = x[k] - twot;
      umin = t;
      umax = -t;
    } else {
      ++k;
      if (umin >= t) {
        kminus = k;
        vmin += (umin - t) / static_cast<double>(k - k0 + 1);
        umin = t;
      }
      if (umax <= -t) {
        kplus = k;
        vmax += (umax + t) / static_cast<double>(k - k0 + 1);
        umax = -t;
      }
    }
  }
}

// Prox of lambda1 ||z||_1 + lambda2 ||diff(z)||_1. The TV prox composed with
// soft thresholding is exact for a uniform l1 weight; the reverse order is not.
inline Vec prox_fused(const Vec& x, const LambdaPair& lam) {
  check_lambda(lam);
  return soft_threshold(prox_tv1d(x, lam.lambda2), lam.lambda1);
}

}  // namespace fls
