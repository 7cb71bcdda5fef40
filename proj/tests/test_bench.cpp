#include <doctest.h>

#include <fls/bench.hpp>
#include <fls/datagen.hpp>

namespace {

fls::Problem sim_problem(fls::Index n, fls::Index p, fls::CovModel cov, std::uint64_t seed) {
  const fls::Mat X = fls::gen_design(n, p, cov, seed);
  const fls::Vec y = fls::gen_response(X, fls::true_beta(p), 0.1, seed);
  return fls::make_problem(X, y);
}

fls::PathGrid small_grid() {
  fls::PathGrid g;
  g.lambda2_values = {1e-3, 0.1};
  for (int i = 10; i >= 1; --i) g.ratios.push_back(i / 10.0);
  return g;
}

}  // namespace

TEST_CASE("rejection ratio conventions") {
  fls::ScreenReport rep;
  fls::SolveResult dense;
  dense.beta = fls::Vec::Ones(6);  // no zeros, nothing fused? all fused actually
  dense.beta << 1, 2, 3, 4, 5, 6;
  // empty report, no true zeros: 0/0 convention
  const auto r = fls::rejection_ratio(rep, dense);
  CHECK(r.zero_only == 1.0);
  CHECK(r.combined == 1.0);

  fls::SolveResult sparse;
  sparse.beta = fls::Vec::Zero(6);
  sparse.beta[0] = 1.0;
  rep.zero_set = {1, 2, 3};
  const auto r2 = fls::rejection_ratio(rep, sparse);
  CHECK(r2.zero_only == doctest::Approx(3.0 / 5.0));
  CHECK(r2.zero_only >= 0.0);
  CHECK(r2.zero_only <= 1.0);
  CHECK(r2.combined <= 1.0);
}

TEST_CASE("rejection ratio surfaces safety violations") {
  fls::ScreenReport rep;
  rep.zero_set = {0, 1};
  fls::SolveResult dense;
  dense.beta = fls::Vec::Ones(4);
  dense.beta << 1, 2, 3, 4;
  CHECK_THROWS_AS(fls::rejection_ratio(rep, dense), fls::SafetyViolationError);
}

TEST_CASE("audit reports zero certified violations on simulated data") {
  const auto pb = sim_problem(30, 80, fls::CovModel::ar1, 17);
  fls::SolverConfig cfg;
  cfg.rel_tol = 1e-10;
  cfg.max_iters = 100000;
  const auto rep = fls::audit_safety(pb, small_grid(), cfg, 2);
  CHECK(rep.points == 20);
  CHECK(rep.zero_endpoint_violations == 0);
  CHECK(rep.zero_interior_violations == 0);
  CHECK(rep.fuse_endpoint_violations == 0);
}

TEST_CASE("speedup report is well formed") {
  const auto pb = sim_problem(30, 120, fls::CovModel::identity, 19);
  fls::SolverConfig cfg;
  cfg.rel_tol = 1e-8;
  const auto sp = fls::speedup(pb, small_grid(), cfg);
  CHECK(sp.t_full_ms > 0.0);
  CHECK(sp.t_screen_ms > 0.0);
  CHECK(sp.speedup == doctest::Approx(sp.t_full_ms / sp.t_screen_ms));
}
