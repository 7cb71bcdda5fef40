#pragma once

#include <Eigen/Dense>
#include <limits>
#include <vector>

#include "fls/problem.hpp"
#include "fls/prox.hpp"

namespace fls {

// Brute-force oracles. Every candidate sign pattern of (beta, diff(beta)) is
// enumerated, the implied stationarity system is solved, and the KKT system is
// verified by interval propagation on the fused dual variable. Ground truth
// for small p only; no code is shared with the iterative solvers or proxes.

namespace oracle_detail {

struct Interval {
  double lo, hi;
};

// Chain-propagated feasibility check of the full KKT system at candidate beta.
// v_j - v_{j-1} = X_j^T u - mu_j with mu_j in lambda1*sign(beta_j),
// v_j fixed to lambda2*s_j on active edges, |v_j| <= lambda2 otherwise.
inline bool kkt_chain_feasible(const Vec& xtu, const Vec& beta, const std::vector<int>& edge_sign,
                               const LambdaPair& lam, double eps) {
  const Index p = beta.size();
  Interval v{0.0, 0.0};
  for (Index j = 0; j < p; ++j) {
    Interval raw;
    if (beta[j] > 0.0) {
      raw = {v.lo + xtu[j] - lam.lambda1, v.hi + xtu[j] - lam.lambda1};
    } else if (beta[j] < 0.0) {
      raw = {v.lo + xtu[j] + lam.lambda1, v.hi + xtu[j] + lam.lambda1};
    } else {
      raw = {v.lo + xtu[j] - lam.lambda1, v.hi + xtu[j] + lam.lambda1};
    }
    if (j == p - 1) return raw.lo <= eps && raw.hi >= -eps;  // v_p = 0
    if (edge_sign[j] != 0) {
      const double target = lam.lambda2 * edge_sign[j];
      if (target < raw.lo - eps || target > raw.hi + eps) return false;
      v = {target, target};
    } else {
      v = {std::max(raw.lo, -lam.lambda2 - eps), std::min(raw.hi, lam.lambda2 + eps)};
      if (v.lo > v.hi) return false;
    }
  }
  return false;  // unreachable
}

}  // namespace oracle_detail

// Exact minimizer of the fused-Lasso objective by joint sign-pattern enumeration.
// Throws if p exceeds the oracle gate. Patterns whose stationarity system is
// singular are skipped.
inline SolveResult solve_exact_small(const Problem& pb, const LambdaPair& lam,
                                     int oracle_gate = 10) {
  check_lambda(lam);
  const Index p = pb.p();
  if (p > oracle_gate) throw std::invalid_argument("solve_exact_small: p exceeds oracle gate");
  const Index ne = p - 1;  // edges

  const Mat gram_full = pb.X.transpose() * pb.X;
  const double scale = std::max({1.0, lam.lambda1, lam.lambda2,
                                 pb.xty.size() ? pb.xty.lpNorm<Eigen::Infinity>() : 0.0});
  const double eps = 1e-9 * scale;

  std::vector<int> edge_sign(ne, 0);
  for (unsigned long bmask = 0; bmask < (1ul << ne); ++bmask) {
    // Groups: maximal runs not separated by an active edge.
    std::vector<Index> gstart, gend;  // inclusive original ranges
    Index start = 0;
    for (Index k = 0; k < ne; ++k) {
      if (bmask & (1ul << k)) {
        gstart.push_back(start);
        gend.push_back(k);
        start = k + 1;
      }
    }
    gstart.push_back(start);
    gend.push_back(p - 1);
    const int G = static_cast<int>(gstart.size());

    Mat xg(pb.n(), G);
    Vec w(G);
    for (int g = 0; g < G; ++g) {
      xg.col(g) = pb.X.middleCols(gstart[g], gend[g] - gstart[g] + 1).rowwise().sum();
      w[g] = static_cast<double>(gend[g] - gstart[g] + 1);
    }
    const Mat gram_g = xg.transpose() * xg;
    const Vec bty_g = xg.transpose() * pb.y;

    std::vector<Index> active_edges;
    for (Index k = 0; k < ne; ++k)
      if (bmask & (1ul << k)) active_edges.push_back(k);
    const int nact_edges = static_cast<int>(active_edges.size());

    for (unsigned long amask = 0; amask < (1ul << G); ++amask) {
      std::vector<int> act;
      for (int g = 0; g < G; ++g)
        if (amask & (1ul << g)) act.push_back(g);
      const int m = static_cast<int>(act.size());

      Eigen::FullPivLU<Mat> lu;
      if (m > 0) {
        Mat sub(m, m);
        for (int a = 0; a < m; ++a)
          for (int b = 0; b < m; ++b) sub(a, b) = gram_g(act[a], act[b]);
        lu.compute(sub);
        lu.setThreshold(1e-10);
        if (!lu.isInvertible()) continue;
      }

      for (unsigned long smask = 0; smask < (1ul << nact_edges); ++smask) {
        std::fill(edge_sign.begin(), edge_sign.end(), 0);
        bool prune = false;
        for (int e = 0; e < nact_edges; ++e) {
          const Index k = active_edges[e];
          edge_sign[k] = (smask & (1ul << e)) ? 1 : -1;
          // edge k separates groups e and e+1; both inactive => gamma_k = 0
          if (!(amask & (1ul << e)) && !(amask & (1ul << (e + 1)))) prune = true;
        }
        if (prune) continue;

        for (unsigned long sgnmask = 0; sgnmask < (1ul << m); ++sgnmask) {
          Vec zeta = Vec::Zero(G);
          if (m > 0) {
            Vec rhs(m);
            for (int a = 0; a < m; ++a) {
              const int g = act[a];
              const int ag = (sgnmask & (1ul << a)) ? 1 : -1;
              const int sl = gstart[g] > 0 ? edge_sign[gstart[g] - 1] : 0;
              const int sr = gend[g] < p - 1 ? edge_sign[gend[g]] : 0;
              rhs[a] = bty_g[g] - lam.lambda1 * w[g] * ag - lam.lambda2 * (sr - sl);
            }
            const Vec sol = lu.solve(rhs);
            bool sign_ok = true;
            for (int a = 0; a < m; ++a) {
              const int ag = (sgnmask & (1ul << a)) ? 1 : -1;
              if (sol[a] * ag <= 0.0) {
                sign_ok = false;
                break;
              }
              zeta[act[a]] = sol[a];
            }
            if (!sign_ok) continue;
          }

          // gamma sign consistency across active edges
          bool gamma_ok = true;
          for (int e = 0; e < nact_edges && gamma_ok; ++e) {
            const double d = zeta[e] - zeta[e + 1];
            gamma_ok = d * edge_sign[active_edges[e]] > 0.0;
          }
          if (!gamma_ok) continue;

          Vec beta(p);
          for (int g = 0; g < G; ++g)
            for (Index j = gstart[g]; j <= gend[g]; ++j) beta[j] = zeta[g];

          const Vec u = pb.y - pb.X * beta;
          const Vec xtu = pb.xty - gram_full * beta;
          if (!oracle_detail::kkt_chain_feasible(xtu, beta, edge_sign, lam, eps)) continue;

          SolveResult res;
          res.beta = beta;
          res.dual_u = u;
          res.gamma = diff(beta);
          res.objective = objective_value(pb, beta, lam);
          res.converged = true;
          return res;
        }
      }
    }
  }
  throw std::runtime_error("solve_exact_small: no KKT-consistent pattern found");
}

// Exact TV prox by sign-pattern enumeration over diff(z). Independent of the
// direct-pass implementation; selects the sign-consistent candidate with the
// lowest objective.
inline Vec prox_tv1d_oracle(const Vec& x, double t) {
  if (t < 0.0) throw std::invalid_argument("prox_tv1d_oracle: t must be >= 0");
  const Index p = x.size();
  if (p <= 1 || t == 0.0) return x;
  const Index ne = p - 1;

  std::vector<int> s(ne, 0);
  Vec best;
  double best_obj = std::numeric_limits<double>::infinity();
  const unsigned long total = [&] {
    unsigned long tt = 1;
    for (Index k = 0; k < ne; ++k) tt *= 3;
    return tt;
  }();
  for (unsigned long code = 0; code < total; ++code) {
    unsigned long c = code;
    for (Index k = 0; k < ne; ++k) {
      s[k] = static_cast<int>(c % 3) - 1;
      c /= 3;
    }
    Vec z(p);
    Index start = 0;
    for (Index k = 0; k <= ne; ++k) {
      if (k < ne && s[k] == 0) continue;
      const Index end = k;  // group [start, end]
      double mean = 0.0;
      for (Index j = start; j <= end; ++j) mean += x[j];
      const int sl = start > 0 ? s[start - 1] : 0;
      const int sr = end < p - 1 ? s[end] : 0;
      const double val = (mean - t * (sr - sl)) / static_cast<double>(end - start + 1);
      for (Index j = start; j <= end; ++j) z[j] = val;
      start = end + 1;
    }
    bool ok = true;
    for (Index k = 0; k < ne && ok; ++k)
      if (s[k] != 0) ok = (z[k] - z[k + 1]) * s[k] > 0.0;
    if (!ok) continue;
    const double obj = 0.5 * (z - x).squaredNorm() + t * diff(z).lpNorm<1>();
    if (obj < best_obj) {
      best_obj = obj;
      best = z;
    }
  }
  return best;
}

// Exact fused prox via the joint enumeration oracle on an identity design.
inline Vec prox_fused_oracle(const Vec& x, const LambdaPair& lam, int oracle_gate = 10) {
  if (x.size() == 1) return soft_threshold(x, lam.lambda1);
  const Index p = x.size();
  Problem pb = make_problem(Mat::Identity(p, p), x);
  return solve_exact_small(pb, lam, oracle_gate).beta;
}

}  // namespace fls
