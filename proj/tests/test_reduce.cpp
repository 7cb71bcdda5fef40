#include <doctest.h>

#include <random>

#include <fls/exact.hpp>
#include <fls/reduce.hpp>
#include <fls/solver.hpp>

namespace {

fls::Problem random_problem(std::mt19937_64& rng, fls::Index n, fls::Index p) {
  std::normal_distribution<double> nd;
  fls::Mat X(n, p);
  fls::Vec y(n);
  for (fls::Index i = 0; i < n; ++i) {
    for (fls::Index j = 0; j < p; ++j) X(i, j) = nd(rng);
    y[i] = 2.0 * nd(rng);
  }
  return fls::make_problem(std::move(X), std::move(y));
}

fls::ScreenReport report_with(std::vector<fls::Index> zero, std::vector<fls::Index> fuse,
                              const fls::LambdaPair& lam) {
  fls::ScreenReport rep;
  rep.zero_set = std::move(zero);
  rep.fuse_set = std::move(fuse);
  rep.lambdas = lam;
  return rep;
}

}  // namespace

TEST_CASE("empty report is the identity reduction") {
  std::mt19937_64 rng(51);
  const auto pb = random_problem(rng, 4, 5);
  const auto rp = fls::build_reduction(pb, report_with({}, {}, {1.0, 1.0}), fls::FuseMode::all);
  CHECK(rp.size() == 5);
  CHECK(rp.weights.minCoeff() == 1.0);
  CHECK(rp.weights.maxCoeff() == 1.0);
  CHECK(rp.l2_weights.maxCoeff() == 0.0);
  CHECK((rp.design - pb.X).lpNorm<Eigen::Infinity>() == 0.0);
  fls::Vec gamma(5);
  gamma << 1, 2, 3, 4, 5;
  CHECK((fls::expand_solution(rp, gamma) - gamma).lpNorm<Eigen::Infinity>() == 0.0);
}

TEST_CASE("zero elimination bookkeeping") {
  std::mt19937_64 rng(52);
  const auto pb = random_problem(rng, 4, 3);
  const auto rp = fls::build_reduction(pb, report_with({1}, {}, {1.0, 1.0}), fls::FuseMode::off);
  CHECK(rp.size() == 2);
  CHECK(rp.group_of == std::vector<int>{0, -1, 1});
  CHECK(rp.l2_weights[0] == 1.0);  // each survivor faces the eliminated middle
  CHECK(rp.l2_weights[1] == 1.0);
  CHECK(rp.tv_edge[0] == 0);  // the chain is broken by the elimination
  fls::Vec gamma(2);
  gamma << 7.0, -2.0;
  const fls::Vec beta = fls::expand_solution(rp, gamma);
  CHECK(beta[0] == 7.0);
  CHECK(beta[1] == 0.0);
  CHECK(beta[2] == -2.0);
}

TEST_CASE("fusion bookkeeping") {
  std::mt19937_64 rng(53);
  const auto pb = random_problem(rng, 4, 3);
  const auto rp = fls::build_reduction(pb, report_with({}, {0}, {1.0, 1.0}), fls::FuseMode::all);
  CHECK(rp.size() == 2);
  CHECK((rp.design.col(0) - (pb.X.col(0) + pb.X.col(1))).lpNorm<Eigen::Infinity>() == 0.0);
  CHECK(rp.weights[0] == 2.0);
  CHECK(rp.weights[1] == 1.0);
  CHECK(rp.tv_edge[0] == 1);
  fls::Vec gamma(2);
  gamma << 3.0, 4.0;
  const fls::Vec beta = fls::expand_solution(rp, gamma);
  CHECK(beta[0] == 3.0);
  CHECK(beta[1] == 3.0);
  CHECK(beta[2] == 4.0);
}

TEST_CASE("endpoint mode ignores interior fuse certificates") {
  std::mt19937_64 rng(54);
  const auto pb = random_problem(rng, 4, 6);
  const auto rp =
      fls::build_reduction(pb, report_with({}, {2}, {1.0, 1.0}), fls::FuseMode::endpoint);
  CHECK(rp.size() == 6);
  const auto rp2 =
      fls::build_reduction(pb, report_with({}, {0, 2, 4}, {1.0, 1.0}), fls::FuseMode::endpoint);
  CHECK(rp2.size() == 4);  // only edges 0 and 4 applied
}

TEST_CASE("conservative conflict: partially zero run survives") {
  std::mt19937_64 rng(55);
  const auto pb = random_problem(rng, 4, 3);
  // run {0,1} fused, only feature 0 certified zero: elimination dropped
  const auto rp = fls::build_reduction(pb, report_with({0}, {0}, {1.0, 1.0}), fls::FuseMode::all);
  CHECK(rp.size() == 2);
  CHECK(rp.group_of == std::vector<int>{0, 0, 1});
  // fully zero run is eliminated
  const auto rp2 =
      fls::build_reduction(pb, report_with({0, 1}, {0}, {1.0, 1.0}), fls::FuseMode::all);
  CHECK(rp2.size() == 1);
  CHECK(rp2.group_of == std::vector<int>{-1, -1, 0});
}

TEST_CASE("reduced objective restricts the full objective") {
  std::mt19937_64 rng(56);
  for (int rep = 0; rep < 20; ++rep) {
    const fls::Index p = 4 + static_cast<fls::Index>(rng() % 4);
    const auto pb = random_problem(rng, 5, p);
    const fls::LambdaPair lam{0.7, 0.4};
    std::vector<fls::Index> zero, fuse;
    for (fls::Index j = 0; j < p; ++j)
      if (rng() % 3 == 0) zero.push_back(j);
    for (fls::Index j = 0; j + 1 < p; ++j)
      if (rng() % 3 == 0) fuse.push_back(j);
    const auto rp = fls::build_reduction(pb, report_with(zero, fuse, lam), fls::FuseMode::all);
    if (rp.size() == 0) continue;
    std::normal_distribution<double> nd;
    fls::Vec z(rp.size());
    for (fls::Index g = 0; g < rp.size(); ++g) z[g] = nd(rng);
    CHECK(fls::reduced_objective(rp, z, lam) ==
          doctest::Approx(fls::objective_value(pb, fls::expand_solution(rp, z), lam)));
  }
}

TEST_CASE("solve_reduced on identity reduction matches the full solver") {
  std::mt19937_64 rng(57);
  fls::SolverConfig cfg;
  cfg.rel_tol = 1e-12;
  cfg.max_iters = 100000;
  for (int rep = 0; rep < 15; ++rep) {
    const fls::Index p = 3 + static_cast<fls::Index>(rng() % 5);
    const auto pb = random_problem(rng, 3 + static_cast<fls::Index>(rng() % 6), p);
    const double s = pb.xty.lpNorm<Eigen::Infinity>();
    const fls::LambdaPair lam{0.2 * s, 0.1 * s};
    const auto rp = fls::build_reduction(pb, report_with({}, {}, lam), fls::FuseMode::all);
    const auto red = fls::solve_reduced(rp, lam, cfg);
    const auto exact = fls::solve_exact_small(pb, lam);
    CHECK(std::abs(red.objective - exact.objective) <=
          1e-6 * std::max(1.0, std::abs(exact.objective)));
  }
}

TEST_CASE("solve_reduced respects certificates from the exact solution") {
  std::mt19937_64 rng(58);
  fls::SolverConfig cfg;
  cfg.rel_tol = 1e-12;
  cfg.max_iters = 100000;
  int checked = 0;
  for (int rep = 0; rep < 25; ++rep) {
    const fls::Index p = 4 + static_cast<fls::Index>(rng() % 5);
    const auto pb = random_problem(rng, 4 + static_cast<fls::Index>(rng() % 4), p);
    const double s = pb.xty.lpNorm<Eigen::Infinity>();
    const fls::LambdaPair lam{0.35 * s, 0.2 * s};
    const auto exact = fls::solve_exact_small(pb, lam);
    const double tol = fls::zero_tolerance(exact.beta);
    std::vector<fls::Index> zero, fuse;
    for (fls::Index j = 0; j < p; ++j)
      if (std::abs(exact.beta[j]) <= tol && rng() % 2 == 0) zero.push_back(j);
    for (fls::Index j = 0; j + 1 < p; ++j)
      if (std::abs(exact.beta[j] - exact.beta[j + 1]) <= tol && rng() % 2 == 0) fuse.push_back(j);
    if (zero.empty() && fuse.empty()) continue;
    ++checked;
    const auto rp = fls::build_reduction(pb, report_with(zero, fuse, lam), fls::FuseMode::all);
    const auto red = fls::solve_reduced(rp, lam, cfg);
    const fls::Vec beta = fls::expand_solution(rp, red.beta);
    CHECK(std::abs(fls::objective_value(pb, beta, lam) - exact.objective) <=
          1e-6 * std::max(1.0, std::abs(exact.objective)));
  }
  CHECK(checked >= 10);
}

TEST_CASE("solve_reduced trivial sizes") {
  std::mt19937_64 rng(59);
  const auto pb = random_problem(rng, 4, 3);
  const fls::LambdaPair lam{100.0, 0.5};
  // everything screened out
  fls::ScreenReport rep = report_with({0, 1, 2}, {}, lam);
  const auto rp0 = fls::build_reduction(pb, rep, fls::FuseMode::off);
  const auto res0 = fls::solve_reduced(rp0, lam);
  CHECK(res0.beta.size() == 0);
  CHECK(res0.converged);
  // one survivor: scalar closed form
  const auto rp1 = fls::build_reduction(pb, report_with({0, 1}, {}, lam), fls::FuseMode::off);
  const auto res1 = fls::solve_reduced(rp1, {0.1, 0.05});
  CHECK(res1.beta.size() == 1);
  CHECK(res1.converged);
}
