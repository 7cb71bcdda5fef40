#pragma once

#include <Eigen/Dense>
#include <random>
#include <vector>

#include "fls/problem.hpp"
#include "fls/prox.hpp"

namespace fls {

// Exact refit on the sign/fusion pattern of an approximate solution: maximal
// fused runs become groups, near-zero groups are pinned to zero, and the
// stationarity system of the remaining group variables is solved directly.
// Returns the input unchanged when the system is singular or the refit breaks
// a sign. The caller keeps whichever point has the lower objective.
inline Vec polish_pattern(const Problem& pb, const Vec& beta, const LambdaPair& lam) {
  const Index p = pb.p();
  if (beta.size() != p) throw std::invalid_argument("polish_pattern: beta length mismatch");
  const double tol = zero_tolerance(beta);

  std::vector<Index> gs, ge;
  Index start = 0;
  for (Index j = 0; j < p; ++j) {
    if (j == p - 1 || std::abs(beta[j] - beta[j + 1]) > tol) {
      gs.push_back(start);
      ge.push_back(j);
      start = j + 1;
    }
  }
  const int G = static_cast<int>(gs.size());
  std::vector<double> z(G);
  std::vector<int> sgn(G), edge(G > 1 ? G - 1 : 0);
  for (int g = 0; g < G; ++g) {
    z[g] = beta.segment(gs[g], ge[g] - gs[g] + 1).mean();
    sgn[g] = std::abs(z[g]) <= tol ? 0 : (z[g] > 0.0 ? 1 : -1);
  }
  for (int g = 0; g + 1 < G; ++g) edge[g] = z[g] > z[g + 1] ? 1 : -1;

  std::vector<int> act;
  for (int g = 0; g < G; ++g)
    if (sgn[g] != 0) act.push_back(g);
  const int m = static_cast<int>(act.size());
  Vec out = Vec::Zero(p);
  if (m == 0) return out;

  Mat xg(pb.n(), m);
  Vec rhs(m);
  for (int a = 0; a < m; ++a) {
    const int g = act[a];
    xg.col(a) = pb.X.middleCols(gs[g], ge[g] - gs[g] + 1).rowwise().sum();
    const int sl = g > 0 ? edge[g - 1] : 0;
    const int sr = g < G - 1 ? edge[g] : 0;
    rhs[a] = xg.col(a).dot(pb.y) -
             lam.lambda1 * static_cast<double>(ge[g] - gs[g] + 1) * sgn[g] -
             lam.lambda2 * (sr - sl);
  }
  Eigen::FullPivLU<Mat> lu(xg.transpose() * xg);
  lu.setThreshold(1e-10);
  if (!lu.isInvertible()) return beta;
  const Vec sol = lu.solve(rhs);

  std::vector<double> zc(G, 0.0);
  for (int a = 0; a < m; ++a) {
    if (sol[a] * sgn[act[a]] <= 0.0) return beta;
    zc[act[a]] = sol[a];
  }
  for (int g = 0; g + 1 < G; ++g)
    if ((zc[g] - zc[g + 1]) * edge[g] <= 0.0) return beta;
  for (int g = 0; g < G; ++g)
    for (Index j = gs[g]; j <= ge[g]; ++j) out[j] = zc[g];
  return out;
}

// Largest eigenvalue of X^T X by power iteration (50 rounds, deterministic
// start). Slightly inflated so 1/L is a valid fixed step.
inline double lipschitz_estimate(const Mat& X) {
  const Index p = X.cols();
  std::mt19937_64 rng(0x5eedu);
  std::normal_distribution<double> nd;
  Vec w(p);
  for (Index j = 0; j < p; ++j) w[j] = nd(rng);
  double nrm = w.norm();
  if (nrm == 0.0) w.setOnes(), nrm = w.norm();
  w /= nrm;
  double lam = 0.0;
  for (int it = 0; it < 50; ++it) {
    Vec z = X.transpose() * (X * w);
    lam = z.norm();
    if (lam <= 1e-300) return 0.0;
    w = z / lam;
  }
  return lam * 1.01;
}

// Accelerated proximal gradient on the uniform-weight fused Lasso, with
// function-value restarts so the objective stream is monotone.
inline SolveResult solve(const Problem& pb, const LambdaPair& lam, const SolverConfig& cfg = {},
                         const Vec* warm = nullptr) {
  check_lambda(lam);
  if (cfg.max_iters < 1 || cfg.rel_tol <= 0.0) throw std::invalid_argument("solve: bad config");
  const Index p = pb.p();
  if (warm && warm->size() != p) throw std::invalid_argument("solve: warm start length mismatch");

  double L = lipschitz_estimate(pb.X);
  if (L <= 0.0) L = 1.0;  // zero design: one prox step lands at the optimum

  Vec beta = warm ? *warm : Vec::Zero(p);
  Vec z = beta;
  double t = 1.0;
  double f = objective_value(pb, beta, lam);
  double delta = 0.0;
  long it = 0;
  bool converged = false;

  for (; it < cfg.max_iters; ++it) {
    const Vec grad = pb.X.transpose() * (pb.X * z - pb.y);
    Vec beta_new = prox_fused(z - grad / L, {lam.lambda1 / L, lam.lambda2 / L});
    double f_new = objective_value(pb, beta_new, lam);
    if (!std::isfinite(f_new)) {
      if (!cfg.backtracking) throw std::runtime_error("solve: non-finite objective (step-size failure)");
      L *= 2.0;
      t = 1.0;
      z = beta;
      continue;
    }
    if (f_new > f) {
      // restart momentum at the current iterate; retry as plain gradient step
      const Vec g2 = pb.X.transpose() * (pb.X * beta - pb.y);
      beta_new = prox_fused(beta - g2 / L, {lam.lambda1 / L, lam.lambda2 / L});
      f_new = objective_value(pb, beta_new, lam);
      t = 1.0;
      if (f_new > f) {  // step too long for the local curvature
        L *= 2.0;
        z = beta;
        continue;
      }
    }
    const double t_new = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * t * t));
    z = beta_new + ((t - 1.0) / t_new) * (beta_new - beta);
    delta = std::abs(f - f_new) / std::max(1.0, std::abs(f_new));
    beta = std::move(beta_new);
    f = f_new;
    t = t_new;
    if (delta <= cfg.rel_tol) {
      converged = true;
      ++it;
      break;
    }
  }

  if (cfg.polish) {
    const Vec cand = polish_pattern(pb, beta, lam);
    const double fc = objective_value(pb, cand, lam);
    if (fc <= f) {
      beta = cand;
      f = fc;
    }
  }

  SolveResult res;
  res.beta = std::move(beta);
  res.dual_u = pb.y - pb.X * res.beta;
  res.gamma = diff(res.beta);
  res.objective = f;
  res.iterations = it;
  res.converged = converged;
  res.termination_delta = delta;
  return res;
}

}  // namespace fls
