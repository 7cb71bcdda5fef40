#pragma once

#include <Eigen/Core>
#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace fls {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;
using Index = Eigen::Index;

// Regularization pair (lambda1 on |beta|_1, lambda2 on |D beta|_1).
struct LambdaPair {
  double lambda1 = 0.0;
  double lambda2 = 0.0;
};

inline void check_lambda(const LambdaPair& lam) {
  if (!std::isfinite(lam.lambda1) || !std::isfinite(lam.lambda2) ||
      lam.lambda1 < 0.0 || lam.lambda2 < 0.0)
    throw std::invalid_argument("lambda pair must be finite and nonnegative");
}

struct SolveResult {
  Vec beta;                       // coefficients
  Vec dual_u;                     // y - X beta
  Vec gamma;                      // D beta (first differences)
  double objective = 0.0;
  long iterations = 0;
  bool converged = false;
  double termination_delta = 0.0; // last relative objective change
};

struct SolverConfig {
  long max_iters = 20000;
  double rel_tol = 1e-8;
  bool backtracking = false;      // fixed 1/L step by default
  bool polish = true;             // exact refit on the identified pattern
  int oracle_gate = 10;           // max p for the enumeration oracle
};

// Relative threshold under which a coefficient counts as zero downstream.
inline constexpr double kZeroRelTol = 1e-6;

inline double zero_tolerance(const Vec& beta) {
  double m = beta.size() ? beta.lpNorm<Eigen::Infinity>() : 0.0;
  return kZeroRelTol * std::max(1.0, m);
}

// First-difference operator along the chain: (diff(x))_k = x_k - x_{k+1}.
template <class Derived>
Vec diff(const Eigen::MatrixBase<Derived>& x) {
  const Index p = x.size();
  Vec out(std::max<Index>(p - 1, 0));
  for (Index k = 0; k + 1 < p; ++k) out[k] = x[k] - x[k + 1];
  return out;
}

// Adjoint of diff: (diff_adjoint(v))_j = v_j - v_{j-1} with v_0 = v_p = 0.
template <class Derived>
Vec diff_adjoint(const Eigen::MatrixBase<Derived>& v, Index p) {
  if (v.size() != p - 1) throw std::invalid_argument("diff_adjoint: bad length");
  Vec out = Vec::Zero(p);
  for (Index k = 0; k < v.size(); ++k) {
    out[k] += v[k];
    out[k + 1] -= v[k];
  }
  return out;
}

}  // namespace fls
