#include <doctest.h>

#include <random>

#include <fls/exact.hpp>
#include <fls/problem.hpp>

namespace {

fls::Problem random_problem(std::mt19937_64& rng, fls::Index n, fls::Index p) {
  std::normal_distribution<double> nd;
  fls::Mat X(n, p);
  fls::Vec y(n);
  for (fls::Index i = 0; i < n; ++i) {
    for (fls::Index j = 0; j < p; ++j) X(i, j) = nd(rng);
    y[i] = nd(rng);
  }
  return fls::make_problem(std::move(X), std::move(y));
}

}  // namespace

TEST_CASE("make_problem validation") {
  CHECK_THROWS_AS(fls::make_problem(fls::Mat::Zero(0, 3), fls::Vec::Zero(0)),
                  std::invalid_argument);
  CHECK_THROWS_AS(fls::make_problem(fls::Mat::Zero(4, 1), fls::Vec::Zero(4)),
                  std::invalid_argument);
  CHECK_THROWS_AS(fls::make_problem(fls::Mat::Zero(4, 3), fls::Vec::Zero(5)),
                  std::invalid_argument);
  fls::Mat bad = fls::Mat::Zero(2, 2);
  bad(0, 0) = std::numeric_limits<double>::quiet_NaN();
  CHECK_THROWS_AS(fls::make_problem(bad, fls::Vec::Zero(2)), std::invalid_argument);
}

TEST_CASE("cached quantities") {
  fls::Mat X(2, 3);
  X << 3, 0, 1, 4, 0, -1;
  fls::Vec y(2);
  y << 1, 2;
  const auto pb = fls::make_problem(X, y);
  CHECK(pb.col_norms[0] == doctest::Approx(5.0));
  CHECK(pb.col_norms[1] == doctest::Approx(0.0));
  CHECK(pb.xty[0] == doctest::Approx(11.0));
  CHECK(pb.xty[2] == doctest::Approx(-1.0));
}

TEST_CASE("objective value by hand") {
  const auto pb = fls::make_problem(fls::Mat::Identity(3, 3), fls::Vec::Ones(3) * 2.0);
  fls::Vec b(3);
  b << 1, 0, -1;
  // residual (1,2,3), l1 norm 2, tv norm |1-0|+|0-(-1)| = 2
  CHECK(fls::objective_value(pb, b, {0.5, 0.25}) == doctest::Approx(7.0 + 1.0 + 0.5));
}

TEST_CASE("diff and diff_adjoint are adjoint") {
  std::mt19937_64 rng(1);
  std::normal_distribution<double> nd;
  for (int rep = 0; rep < 20; ++rep) {
    const fls::Index p = 2 + static_cast<fls::Index>(rng() % 9);
    fls::Vec x(p), v(p - 1);
    for (auto& e : x) e = nd(rng);
    for (auto& e : v) e = nd(rng);
    CHECK(fls::diff(x).dot(v) == doctest::Approx(x.dot(fls::diff_adjoint(v, p))));
  }
}

TEST_CASE("dual feasibility violation positive parts") {
  std::mt19937_64 rng(2);
  const auto pb = random_problem(rng, 4, 5);
  const fls::Vec u = fls::Vec::Zero(4);
  const fls::Vec v = fls::Vec::Zero(4);
  auto [a, b] = fls::dual_feasibility_violation(pb, u, v, {1.0, 1.0});
  CHECK(a == 0.0);
  CHECK(b == 0.0);
  fls::Vec v2 = fls::Vec::Constant(4, 3.0);
  auto [a2, b2] = fls::dual_feasibility_violation(pb, u, v2, {1.0, 1.0});
  CHECK(b2 == doctest::Approx(2.0));
  CHECK(a2 >= 0.0);
}

TEST_CASE("kkt_violation vanishes at the oracle optimum") {
  std::mt19937_64 rng(3);
  for (int rep = 0; rep < 25; ++rep) {
    const fls::Index p = 2 + static_cast<fls::Index>(rng() % 5);
    const auto pb = random_problem(rng, 3 + static_cast<fls::Index>(rng() % 4), p);
    const double s = pb.xty.lpNorm<Eigen::Infinity>();
    const fls::LambdaPair lam{0.3 * s + 1e-3, 0.1 * s + 1e-3};
    const auto res = fls::solve_exact_small(pb, lam);
    CHECK(fls::kkt_violation(pb, res, lam) <= 1e-7 * std::max(1.0, s));

    fls::SolveResult off = res;
    off.beta[0] += 0.5 * std::max(1.0, s);
    CHECK(fls::kkt_violation(pb, off, lam) > 1e-4);
  }
}
