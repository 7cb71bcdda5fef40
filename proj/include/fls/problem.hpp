#pragma once

#include <utility>

#include "fls/types.hpp"

namespace fls {

// A fused-Lasso problem instance. Immutable after construction; the cached
// column norms and X^T y are the inputs of the lambda bounds and scores.
struct Problem {
  Mat X;
  Vec y;
  Vec col_norms;  // ||X.j||_2
  Vec xty;        // X^T y

  Index n() const { return X.rows(); }
  Index p() const { return X.cols(); }
};

inline Problem make_problem(Mat X, Vec y) {
  if (X.rows() < 1) throw std::invalid_argument("make_problem: X needs at least one row");
  if (X.cols() < 2) throw std::invalid_argument("make_problem: X needs at least two columns");
  if (y.size() != X.rows()) throw std::invalid_argument("make_problem: y length must match rows of X");
  if (!X.allFinite() || !y.allFinite())
    throw std::invalid_argument("make_problem: non-finite entry");
  Problem pb;
  pb.col_norms = X.colwise().norm();
  pb.xty = X.transpose() * y;
  pb.X = std::move(X);
  pb.y = std::move(y);
  return pb;
}

inline double objective_value(const Problem& pb, const Vec& beta, const LambdaPair& lam) {
  if (beta.size() != pb.p()) throw std::invalid_argument("objective_value: beta length mismatch");
  const Vec r = pb.y - pb.X * beta;
  return 0.5 * r.squaredNorm() + lam.lambda1 * beta.lpNorm<1>() +
         lam.lambda2 * diff(beta).lpNorm<1>();
}

// Positive parts of the two dual-feasibility gaps of the pair (u, v):
// (||X^T u - D^T v||_inf - lambda1)_+ and (||v||_inf - lambda2)_+.
inline std::pair<double, double> dual_feasibility_violation(const Problem& pb, const Vec& u,
                                                            const Vec& v, const LambdaPair& lam) {
  if (u.size() != pb.n()) throw std::invalid_argument("dual_feasibility_violation: u length mismatch");
  if (v.size() != pb.p() - 1) throw std::invalid_argument("dual_feasibility_violation: v length mismatch");
  const Vec g = pb.X.transpose() * u - diff_adjoint(v, pb.p());
  const double a = g.size() ? g.lpNorm<Eigen::Infinity>() : 0.0;
  const double b = v.size() ? v.lpNorm<Eigen::Infinity>() : 0.0;
  return {std::max(0.0, a - lam.lambda1), std::max(0.0, b - lam.lambda2)};
}

namespace detail {

struct Interval {
  double lo, hi;
  Interval operator+(const Interval& o) const { return {lo + o.lo, hi + o.hi}; }
  Interval operator-(const Interval& o) const { return {lo - o.hi, hi - o.lo}; }
};

inline Interval scaled_sign_interval(double x, double scale, double tol) {
  if (x > tol) return {scale, scale};
  if (x < -tol) return {-scale, -scale};
  return {-scale, scale};
}

inline double interval_distance(double x, const Interval& iv) {
  if (x < iv.lo) return iv.lo - x;
  if (x > iv.hi) return x - iv.hi;
  return 0.0;
}

}  // namespace detail

// Worst coordinatewise distance of the negative smooth gradient from the
// subdifferential set lambda1*d|beta|_1 + lambda2*D^T d|D beta|_1, with the
// sign sets widened to intervals at (near-)zero coordinates. Zero at an exact
// KKT point.
inline double kkt_violation(const Problem& pb, const SolveResult& res, const LambdaPair& lam) {
  const Index p = pb.p();
  if (res.beta.size() != p) throw std::invalid_argument("kkt_violation: beta length mismatch");
  const Vec grad = pb.X.transpose() * (pb.X * res.beta - pb.y);
  const Vec gamma = diff(res.beta);
  const double tol = zero_tolerance(res.beta);

  double worst = 0.0;
  for (Index j = 0; j < p; ++j) {
    detail::Interval iv = detail::scaled_sign_interval(res.beta[j], lam.lambda1, tol);
    // (D^T v)_j = v_j - v_{j-1}; each v_k ranges over lambda2 * sign(gamma_k).
    if (j < p - 1) iv = iv + detail::scaled_sign_interval(gamma[j], lam.lambda2, tol);
    if (j > 0) iv = iv - detail::scaled_sign_interval(gamma[j - 1], lam.lambda2, tol);
    worst = std::max(worst, detail::interval_distance(-grad[j], iv));
  }
  return worst;
}

}  // namespace fls
