#pragma once

#include <vector>

#include "fls/problem.hpp"

namespace fls {

// Thrown by lambda2_max when the constant direction X*1 vanishes.
struct ConstantDirectionError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
// Thrown by lambda2_max when the fitted constant level is zero; callers fall
// back to the all-zero regime.
struct XiZeroError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Smallest lambda1 (as bounded by the dual-feasibility maximization) at which
// beta = 0 solves the problem for the given lambda2.
inline double lambda1_max(const Problem& pb, double lambda2) {
  if (lambda2 < 0.0 || !std::isfinite(lambda2)) throw std::invalid_argument("lambda1_max: bad lambda2");
  const Index p = pb.p();
  double k1 = -std::numeric_limits<double>::infinity();  // interior, empty for p = 2
  for (Index j = 1; j + 1 < p; ++j) k1 = std::max(k1, std::abs(pb.xty[j]));
  const double k2 = std::max(std::abs(pb.xty[0]), std::abs(pb.xty[p - 1]));
  return std::max(2.0 * lambda2 + k1, lambda2 + k2);
}

// Lambda2 level above which a constant solution xi*1 exists, for fixed
// lambda1. xi comes from the scalar problem min 1/2||y - xi*X1||^2 + lambda1*p*|xi|.
// `printed_variant` drops the xi factor from the cumulative terms (the form
// as typeset rather than as derived); kept only for the audit harness.
inline double lambda2_max(const Problem& pb, double lambda1, bool printed_variant = false) {
  if (lambda1 < 0.0 || !std::isfinite(lambda1)) throw std::invalid_argument("lambda2_max: bad lambda1");
  const Index p = pb.p();
  const Vec xone = pb.X.rowwise().sum();  // X * 1
  const double nrm2 = xone.squaredNorm();
  if (nrm2 == 0.0) throw ConstantDirectionError("lambda2_max: X*1 is zero, constant direction not identifiable");
  const double s = xone.dot(pb.y);
  const double mag = std::max(std::abs(s) - lambda1 * static_cast<double>(p), 0.0);
  const double xi = (s >= 0.0 ? 1.0 : -1.0) * mag / nrm2;
  if (xi == 0.0) throw XiZeroError("lambda2_max: fitted constant level is zero");
  const double sgn = xi > 0.0 ? 1.0 : -1.0;

  const Vec gram_row_sums = pb.X.transpose() * xone;  // (X^T X) 1
  const double xi_in_sum = printed_variant ? 1.0 : xi;
  double cum = 0.0, best = 0.0;
  for (Index j = 0; j + 1 < p; ++j) {
    cum += pb.xty[j] - xi_in_sum * gram_row_sums[j];
    best = std::max(best, std::abs(cum - static_cast<double>(j + 1) * lambda1 * sgn));
  }
  best = std::max(best, std::abs(pb.xty[p - 1] - xi * gram_row_sums[p - 1] - lambda1 * sgn));
  return best;
}

// Ball guaranteed to contain the dual solution u*(lambda1, lambda2), built
// from a reference dual u_ref = u*(lam1_ref, lambda2) with lam1_ref > lambda1.
struct DualBall {
  Vec center;
  double radius = 0.0;
};

inline DualBall dual_ball(const Problem& pb, const LambdaPair& lam, double lam1_ref,
                          const Vec& u_ref) {
  if (u_ref.size() != pb.n()) throw std::invalid_argument("dual_ball: u_ref length mismatch");
  if (lam.lambda1 > lam1_ref || lam1_ref <= 0.0)
    throw std::invalid_argument("dual_ball: requires 0 < lambda1 <= lam1_ref");
  if (lam.lambda1 == lam1_ref) return {u_ref, 0.0};  // dual known exactly
  const double rho = lam.lambda1 / lam1_ref;
  DualBall ball;
  ball.center = 0.5 * ((1.0 + rho) * pb.y - rho * u_ref);
  ball.radius = ball.center.norm();
  return ball;
}

struct ScreenReport {
  std::vector<Index> zero_set;  // certified beta_j = 0 (0-based)
  std::vector<Index> fuse_set;  // certified beta_j = beta_{j+1} (0-based edge index)
  Vec scores;                   // |X.j^T c| + r ||X.j||
  LambdaPair lambdas;
};

namespace detail {

inline void certify(const Vec& scores, const LambdaPair& lam, ScreenReport& rep) {
  const Index p = scores.size();
  const double l1 = lam.lambda1, l2 = lam.lambda2;
  for (Index j = 0; j < p; ++j) {
    const bool end = (j == 0 || j == p - 1);
    if (scores[j] < (end ? l1 - l2 : l1 - 2.0 * l2)) rep.zero_set.push_back(j);
  }
  for (Index j = 0; j + 1 < p; ++j) {
    const bool end = (j == 0 || j == p - 2);
    if (scores[j] < (end ? l2 - l1 : 2.0 * l2 + l1)) rep.fuse_set.push_back(j);
  }
}

}  // namespace detail

// One O(np) pass over the columns; strict rule inequalities, no slack.
inline ScreenReport screen(const Problem& pb, const LambdaPair& lam, const DualBall& ball) {
  if (ball.center.size() != pb.n()) throw std::invalid_argument("screen: ball dimension mismatch");
  if (lam.lambda1 <= 0.0 || lam.lambda2 <= 0.0)
    throw std::invalid_argument("screen: requires lambda1 > 0 and lambda2 > 0");
  ScreenReport rep;
  rep.lambdas = lam;
  rep.scores = (pb.X.transpose() * ball.center).cwiseAbs() + ball.radius * pb.col_norms;
  detail::certify(rep.scores, lam, rep);
  return rep;
}

// Several valid balls give several valid score bounds per column; the smallest
// one wins. The certified sets are the union of what each ball certifies alone.
inline ScreenReport screen(const Problem& pb, const LambdaPair& lam,
                           const std::vector<DualBall>& balls) {
  if (balls.empty()) throw std::invalid_argument("screen: need at least one ball");
  if (lam.lambda1 <= 0.0 || lam.lambda2 <= 0.0)
    throw std::invalid_argument("screen: requires lambda1 > 0 and lambda2 > 0");
  ScreenReport rep;
  rep.lambdas = lam;
  for (const DualBall& ball : balls) {
    if (ball.center.size() != pb.n()) throw std::invalid_argument("screen: ball dimension mismatch");
    const Vec s = (pb.X.transpose() * ball.center).cwiseAbs() + ball.radius * pb.col_norms;
    rep.scores = rep.scores.size() ? rep.scores.cwiseMin(s).eval() : s;
  }
  detail::certify(rep.scores, lam, rep);
  return rep;
}

}  // namespace fls
