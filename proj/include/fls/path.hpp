#pragma once

#include <atomic>
#include <chrono>
#include <thread>
#include <vector>

#include "fls/reduce.hpp"
#include "fls/solver.hpp"

namespace fls {

// Grid for the sequential path: per lambda2 track, lambda1 = ratio * lambda1_max(lambda2)
// along strictly decreasing ratios.
struct PathGrid {
  std::vector<double> lambda2_values;
  std::vector<double> ratios;
};

inline void check_grid(const PathGrid& grid) {
  if (grid.lambda2_values.empty() || grid.ratios.empty())
    throw std::invalid_argument("path grid must be nonempty");
  for (double l2 : grid.lambda2_values)
    if (!(l2 > 0.0) || !std::isfinite(l2)) throw std::invalid_argument("lambda2 values must be positive");
  if (grid.ratios.front() > 1.0) throw std::invalid_argument("first ratio must be <= 1");
  for (size_t i = 0; i < grid.ratios.size(); ++i) {
    if (!(grid.ratios[i] > 0.0)) throw std::invalid_argument("ratios must be positive");
    if (i > 0 && grid.ratios[i] >= grid.ratios[i - 1])
      throw std::invalid_argument("ratios must be strictly decreasing");
  }
}

inline PathGrid default_grid() {
  PathGrid g;
  g.lambda2_values = {1e-4, 1e-3, 1e-2, 1e-1, 1.0, 10.0};
  for (int i = 100; i >= 1; --i) g.ratios.push_back(i / 100.0);
  return g;
}

struct PathPoint {
  double lambda1 = 0.0, lambda2 = 0.0, ratio = 0.0;
  Index n_zero_screened = 0;   // |zero_set| (p at the ratio-1 point: all known zero)
  Index n_fused = 0;           // fuse edges applied in the reduction
  Index n_actual_inactive = 0; // |{j : |beta_j| <= tol}| in the computed solution
  double solve_ms = 0.0, screen_ms = 0.0;
  long iterations = 0;
  Vec beta;
};

struct PathResult {
  std::vector<PathPoint> points;  // track-major: all ratios of lambda2[0], then lambda2[1], ...
};

namespace detail {

inline double ms_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
}

inline Vec group_average(const ReducedProblem& rp, const Vec& beta_full) {
  Vec out(rp.size());
  for (Index g = 0; g < rp.size(); ++g) {
    const auto [a, b] = rp.groups[g];
    out[g] = beta_full.segment(a, b - a + 1).mean();
  }
  return out;
}

inline void run_track(const Problem& pb, const PathGrid& grid, const SolverConfig& cfg,
                      bool use_screening, FuseMode fuse, size_t track, PathPoint* out) {
  const double lambda2 = grid.lambda2_values[track];
  const double l1max = lambda1_max(pb, lambda2);
  Vec u_ref = pb.y;
  double lam1_ref = l1max;
  Vec prev_beta = Vec::Zero(pb.p());

  for (size_t i = 0; i < grid.ratios.size(); ++i) {
    PathPoint& pt = out[i];
    pt.ratio = grid.ratios[i];
    pt.lambda2 = lambda2;
    pt.lambda1 = grid.ratios[i] * l1max;
    const LambdaPair lam{pt.lambda1, lambda2};

    if (pt.lambda1 >= l1max) {  // known solution, no solver call
      pt.beta = Vec::Zero(pb.p());
      pt.n_zero_screened = pb.p();
      pt.n_actual_inactive = pb.p();
      prev_beta = pt.beta;
      u_ref = pb.y;
      lam1_ref = l1max;
      continue;
    }

    if (use_screening) {
      auto t0 = std::chrono::steady_clock::now();
      const std::vector<DualBall> balls = {dual_ball(pb, lam, lam1_ref, u_ref),
                                           dual_ball(pb, lam, l1max, pb.y)};
      const ScreenReport rep = screen(pb, lam, balls);
      const ReducedProblem rp = build_reduction(pb, rep, fuse);
      pt.screen_ms = ms_since(t0);
      pt.n_zero_screened = static_cast<Index>(rep.zero_set.size());
      Index kept = 0;
      for (int g : rp.group_of) kept += (g >= 0);
      pt.n_fused = kept - static_cast<Index>(rp.groups.size());
      auto t1 = std::chrono::steady_clock::now();
      const Index admm_cap = std::min<Index>(pb.p() / 2, std::max<Index>(4 * pb.n(), pb.p() / 8));
      if (rp.size() > admm_cap) {
        // weak reduction: the splitting crawls when the kept block is much
        // wider than the sample count, and a near-full problem gains nothing;
        // the warm-started full solve wins in both regimes
        const SolveResult sr = solve(pb, lam, cfg, &prev_beta);
        pt.iterations = sr.iterations;
        pt.beta = sr.beta;
      } else {
        const Vec warm = group_average(rp, prev_beta);
        const SolveResult sr = solve_reduced(rp, lam, cfg, &warm);
        pt.iterations = sr.iterations;
        pt.beta = expand_solution(rp, sr.beta);
      }
      if (cfg.polish) {
        const Vec cand = polish_pattern(pb, pt.beta, lam);
        if (objective_value(pb, cand, lam) <= objective_value(pb, pt.beta, lam)) pt.beta = cand;
      }
      pt.solve_ms = ms_since(t1);
    } else {
      auto t1 = std::chrono::steady_clock::now();
      const SolveResult sr = solve(pb, lam, cfg, &prev_beta);
      pt.solve_ms = ms_since(t1);
      pt.iterations = sr.iterations;
      pt.beta = sr.beta;
    }

    const double tol = zero_tolerance(pt.beta);
    pt.n_actual_inactive = (pt.beta.cwiseAbs().array() <= tol).count();
    u_ref = pb.y - pb.X * pt.beta;
    lam1_ref = pt.lambda1;
    prev_beta = pt.beta;
  }
}

}  // namespace detail

// Sequential solution path: per lambda2 track, each point screens with two
// reference balls -- one from the immediately previous point's dual solution
// and one from the all-zero point at the top of the track -- then solves the
// reduced problem warm-started from the previous expanded solution and hands
// its own dual to the next point. Tracks are independent; `jobs` caps the
// worker count.
inline PathResult solve_path(const Problem& pb, const PathGrid& grid, const SolverConfig& cfg,
                             bool use_screening, FuseMode fuse = FuseMode::endpoint,
                             int jobs = 1) {
  check_grid(grid);
  const size_t nt = grid.lambda2_values.size();
  const size_t nr = grid.ratios.size();
  PathResult out;
  out.points.resize(nt * nr);
  if (jobs <= 1 || nt == 1) {
    for (size_t t = 0; t < nt; ++t)
      detail::run_track(pb, grid, cfg, use_screening, fuse, t, &out.points[t * nr]);
  } else {
    std::vector<std::thread> pool;
    std::atomic<size_t> next{0};
    const int workers = std::min<int>(jobs, static_cast<int>(nt));
    for (int w = 0; w < workers; ++w)
      pool.emplace_back([&] {
        for (size_t t = next.fetch_add(1); t < nt; t = next.fetch_add(1))
          detail::run_track(pb, grid, cfg, use_screening, fuse, t, &out.points[t * nr]);
      });
    for (auto& th : pool) th.join();
  }
  return out;
}

}  // namespace fls
