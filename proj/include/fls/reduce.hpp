#pragma once

#include <Eigen/Cholesky>
#include <utility>
#include <vector>

#include "fls/prox.hpp"
#include "fls/screening.hpp"

namespace fls {

enum class FuseMode { off, endpoint, all };

// Problem after eliminating certified zeros and merging certified fused runs.
// The reduced objective is the exact restriction of the full objective:
//   1/2||y - Xr z||^2 + sum_g (l1*weights_g + l2*l2_weights_g)|z_g|
//     + l2 * sum_{tv_edge} |z_g - z_{g+1}|
// where l2_weights counts group boundaries facing an eliminated feature and
// tv edges survive only between groups with no eliminated feature in between.
struct ReducedProblem {
  Mat design;                                 // columns are group sums
  Vec weights;                                // l1 weight = group size
  Vec l2_weights;                             // boundaries to eliminated neighbors (0, 1, or 2)
  std::vector<int> group_of;                  // length p; -1 for eliminated
  std::vector<std::pair<Index, Index>> groups;  // inclusive original ranges
  std::vector<char> tv_edge;                  // length max(m-1, 0)
  Vec y;

  Index size() const { return design.cols(); }
};

inline ReducedProblem build_reduction(const Problem& pb, const ScreenReport& report,
                                      FuseMode mode) {
  const Index p = pb.p();
  std::vector<char> fused(p > 1 ? p - 1 : 0, 0);
  for (Index j : report.fuse_set) {
    if (j < 0 || j >= p - 1) throw std::invalid_argument("build_reduction: fuse index out of range");
    if (mode == FuseMode::all || (mode == FuseMode::endpoint && (j == 0 || j == p - 2)))
      fused[j] = 1;
  }
  std::vector<char> zero(p, 0);
  for (Index j : report.zero_set) {
    if (j < 0 || j >= p) throw std::invalid_argument("build_reduction: zero index out of range");
    zero[j] = 1;
  }

  // Units are maximal fused runs (singletons when unfused). A unit survives
  // unless every member is certified zero.
  std::vector<std::pair<Index, Index>> units;
  Index start = 0;
  for (Index j = 0; j < p; ++j) {
    if (j == p - 1 || !fused[j]) {
      units.emplace_back(start, j);
      start = j + 1;
    }
  }
  std::vector<char> eliminated(units.size(), 0);
  for (size_t u = 0; u < units.size(); ++u) {
    bool all_zero = true;
    for (Index j = units[u].first; j <= units[u].second && all_zero; ++j) all_zero = zero[j];
    eliminated[u] = all_zero;
  }

  ReducedProblem rp;
  rp.group_of.assign(p, -1);
  rp.y = pb.y;
  std::vector<Index> surviving;
  for (size_t u = 0; u < units.size(); ++u)
    if (!eliminated[u]) surviving.push_back(static_cast<Index>(u));
  const Index m = static_cast<Index>(surviving.size());
  rp.design.resize(pb.n(), m);
  rp.weights.resize(m);
  rp.l2_weights.resize(m);
  for (Index g = 0; g < m; ++g) {
    const auto [a, b] = units[surviving[g]];
    rp.groups.emplace_back(a, b);
    rp.design.col(g) = pb.X.middleCols(a, b - a + 1).rowwise().sum();
    rp.weights[g] = static_cast<double>(b - a + 1);
    for (Index j = a; j <= b; ++j) rp.group_of[j] = static_cast<int>(g);
  }
  // l2 weights and tv edges need the full elimination map, so a second pass.
  for (Index g = 0; g < m; ++g) {
    const auto [a, b] = rp.groups[g];
    double d = 0.0;
    if (a > 0 && rp.group_of[a - 1] == -1) d += 1.0;
    if (b + 1 < p && rp.group_of[b + 1] == -1) d += 1.0;
    rp.l2_weights[g] = d;
  }
  rp.tv_edge.assign(m > 1 ? m - 1 : 0, 0);
  for (Index g = 0; g + 1 < m; ++g)
    rp.tv_edge[g] = (rp.groups[g].second + 1 == rp.groups[g + 1].first);
  return rp;
}

inline Vec expand_solution(const ReducedProblem& rp, const Vec& gamma) {
  if (gamma.size() != rp.size()) throw std::invalid_argument("expand_solution: length mismatch");
  Vec beta = Vec::Zero(static_cast<Index>(rp.group_of.size()));
  for (size_t j = 0; j < rp.group_of.size(); ++j)
    if (rp.group_of[j] >= 0) beta[static_cast<Index>(j)] = gamma[rp.group_of[j]];
  return beta;
}

// Restriction of the full objective to the reduced coordinates.
inline double reduced_objective(const ReducedProblem& rp, const Vec& z, const LambdaPair& lam) {
  double f = 0.5 * (rp.y - rp.design * z).squaredNorm();
  for (Index g = 0; g < rp.size(); ++g)
    f += (lam.lambda1 * rp.weights[g] + lam.lambda2 * rp.l2_weights[g]) * std::abs(z[g]);
  for (Index g = 0; g + 1 < rp.size(); ++g)
    if (rp.tv_edge[g]) f += lam.lambda2 * std::abs(z[g] - z[g + 1]);
  return f;
}

namespace detail {

// TV prox applied independently on each chain of tv-connected groups.
inline Vec chain_tv_prox(const ReducedProblem& rp, const Vec& x, double t) {
  const Index m = x.size();
  Vec out(m);
  Index start = 0;
  for (Index g = 0; g < m; ++g) {
    if (g == m - 1 || !rp.tv_edge[g]) {
      out.segment(start, g - start + 1) = prox_tv1d(x.segment(start, g - start + 1), t);
      start = g + 1;
    }
  }
  return out;
}

}  // namespace detail

// Operator splitting (two auxiliary blocks: weighted l1 and chain TV) on the
// reduced problem. The prox decomposition is not valid for non-uniform l1
// weights, so the splitting handles both penalty blocks separately.
inline SolveResult solve_reduced(const ReducedProblem& rp, const LambdaPair& lam,
                                 const SolverConfig& cfg = {}, const Vec* warm = nullptr) {
  check_lambda(lam);
  const Index m = rp.size();
  const Index n = rp.y.size();
  SolveResult res;
  if (m == 0) {
    res.beta = Vec(0);
    res.dual_u = rp.y;
    res.gamma = Vec(0);
    res.objective = 0.5 * rp.y.squaredNorm();
    res.converged = true;
    return res;
  }
  if (warm && warm->size() != m) throw std::invalid_argument("solve_reduced: warm length mismatch");

  Vec c(m);
  for (Index g = 0; g < m; ++g)
    c[g] = lam.lambda1 * rp.weights[g] + lam.lambda2 * rp.l2_weights[g];

  if (m == 1) {  // scalar Lasso closed form
    const double nrm2 = rp.design.col(0).squaredNorm();
    const double s = rp.design.col(0).dot(rp.y);
    double z = 0.0;
    if (nrm2 > 0.0) z = (s >= 0.0 ? 1.0 : -1.0) * std::max(std::abs(s) - c[0], 0.0) / nrm2;
    res.beta = Vec::Constant(1, z);
    res.dual_u = rp.y - rp.design * res.beta;
    res.gamma = Vec(0);
    res.objective = reduced_objective(rp, res.beta, lam);
    res.converged = true;
    res.iterations = 1;
    return res;
  }

  const Vec xty = rp.design.transpose() * rp.y;
  double rho = std::max(1e-8, 0.1 * (lam.lambda1 + lam.lambda2 + 1.0));

  const bool woodbury = m > n;
  Mat gram;
  Mat xxt;
  Eigen::LLT<Mat> chol;
  auto refactor = [&] {
    if (woodbury) {
      if (xxt.size() == 0) xxt = rp.design * rp.design.transpose();
      chol.compute(Mat(2.0 * rho * Mat::Identity(n, n) + xxt));
    } else {
      if (gram.size() == 0) gram = rp.design.transpose() * rp.design;
      chol.compute(Mat(gram + 2.0 * rho * Mat::Identity(m, m)));
    }
  };
  auto solve_sys = [&](const Vec& b) -> Vec {
    if (!woodbury) return chol.solve(b);
    return (b - rp.design.transpose() * chol.solve(rp.design * b)) / (2.0 * rho);
  };
  refactor();

  Vec zeta = warm ? *warm : Vec::Zero(m);
  Vec z1 = zeta, z2 = zeta;
  Vec u1 = Vec::Zero(m), u2 = Vec::Zero(m);
  double f = reduced_objective(rp, zeta, lam);
  double delta = 0.0;
  long it = 0;
  bool converged = false;

  for (; it < cfg.max_iters; ++it) {
    zeta = solve_sys(xty + rho * (z1 - u1 + z2 - u2));
    Vec z1_old = std::move(z1), z2_old = std::move(z2);
    z1 = Vec(m);
    {
      const Vec a = zeta + u1;
      for (Index g = 0; g < m; ++g) {
        const double th = c[g] / rho;
        const double mag = std::abs(a[g]) - th;
        z1[g] = mag > 0.0 ? (a[g] > 0.0 ? mag : -mag) : 0.0;
      }
    }
    z2 = detail::chain_tv_prox(rp, zeta + u2, lam.lambda2 / rho);
    u1 += zeta - z1;
    u2 += zeta - z2;

    const double r_pri = std::max((zeta - z1).lpNorm<Eigen::Infinity>(),
                                  (zeta - z2).lpNorm<Eigen::Infinity>());
    const double s_dual = rho * std::max((z1 - z1_old).lpNorm<Eigen::Infinity>(),
                                         (z2 - z2_old).lpNorm<Eigen::Infinity>());
    const double f_new = reduced_objective(rp, zeta, lam);
    if (!std::isfinite(f_new)) throw std::runtime_error("solve_reduced: non-finite objective");
    delta = std::abs(f - f_new) / std::max(1.0, std::abs(f_new));
    f = f_new;

    const double eps_r = std::max(cfg.rel_tol, 1e-13) * 10.0 *
                         std::max(1.0, zeta.lpNorm<Eigen::Infinity>());
    if (r_pri <= eps_r && s_dual <= eps_r && delta <= cfg.rel_tol) {
      converged = true;
      ++it;
      break;
    }
    if ((it + 1) % 25 == 0) {
      if (r_pri > 10.0 * s_dual) {
        rho *= 2.0;
        u1 /= 2.0;
        u2 /= 2.0;
        refactor();
      } else if (s_dual > 10.0 * r_pri) {
        rho /= 2.0;
        u1 *= 2.0;
        u2 *= 2.0;
        refactor();
      }
    }
  }

  res.beta = zeta;
  res.dual_u = rp.y - rp.design * zeta;
  res.gamma = diff(zeta);
  res.objective = f;
  res.iterations = it;
  res.converged = converged;
  res.termination_delta = delta;
  return res;
}

}  // namespace fls
