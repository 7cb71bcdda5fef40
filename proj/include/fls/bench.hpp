#pragma once

#include <algorithm>
#include <atomic>
#include <thread>

#include "fls/path.hpp"

namespace fls {

// A certified index turned out nonzero (or an edge unfused) in the reference
// solution. Surfaced, never clamped; the CLI maps this to exit code 3.
struct SafetyViolationError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct RejectionRatio {
  double zero_only = 1.0;  // |zero_set| / #{j : beta_j ~ 0}
  double combined = 1.0;   // adds fuse_set over fused-pair count
};

inline RejectionRatio rejection_ratio(const ScreenReport& rep, const SolveResult& exact) {
  const Vec& b = exact.beta;
  const double tol = zero_tolerance(b);
  const Index p = b.size();
  Index nf_zero = 0, nf_fuse = 0;
  for (Index j = 0; j < p; ++j) nf_zero += (std::abs(b[j]) <= tol);
  for (Index j = 0; j + 1 < p; ++j) nf_fuse += (std::abs(b[j] - b[j + 1]) <= tol);
  const Index ns_zero = static_cast<Index>(rep.zero_set.size());
  const Index ns_fuse = static_cast<Index>(rep.fuse_set.size());
  if (ns_zero > nf_zero)
    throw SafetyViolationError("rejection_ratio: screened zeros exceed true zeros");
  if (ns_zero + ns_fuse > nf_zero + nf_fuse)
    throw SafetyViolationError("rejection_ratio: screened count exceeds true count");
  RejectionRatio r;
  r.zero_only = nf_zero == 0 ? 1.0 : static_cast<double>(ns_zero) / static_cast<double>(nf_zero);
  r.combined = nf_zero + nf_fuse == 0
                   ? 1.0
                   : static_cast<double>(ns_zero + ns_fuse) / static_cast<double>(nf_zero + nf_fuse);
  return r;
}

struct SpeedupReport {
  double t_full_ms = 0.0;    // path without screening
  double t_screen_ms = 0.0;  // path with screening, screen time included
  double speedup = 0.0;      // t_full / t_screen
};

namespace detail {

inline double median3(double a, double b, double c) {
  return std::max(std::min(a, b), std::min(std::max(a, b), c));
}

}  // namespace detail

// Wall-clock path time without screening over with screening. One untimed
// warm-up pass, then the median of 3 repetitions per configuration; the
// screened and unscreened solutions must agree point by point first.
inline SpeedupReport speedup(const Problem& pb, const PathGrid& grid, const SolverConfig& cfg,
                             FuseMode fuse = FuseMode::endpoint) {
  check_grid(grid);
  {
    PathGrid small = grid;
    small.lambda2_values = {grid.lambda2_values.front()};
    if (small.ratios.size() > 3) small.ratios.resize(3);
    (void)solve_path(pb, small, cfg, true, fuse);  // warm caches
  }
  const PathResult with = solve_path(pb, grid, cfg, true, fuse);
  const PathResult without = solve_path(pb, grid, cfg, false, fuse);
  // Validity gate on objectives: an objective-terminated solve can carry beta
  // slack far above rel_tol, but both runs must still be minimizing the same
  // problem to comparable accuracy for the timing ratio to mean anything.
  const double gate = std::sqrt(std::max(cfg.rel_tol, 1e-14));
  for (size_t i = 0; i < with.points.size(); ++i) {
    const LambdaPair lam{with.points[i].lambda1, with.points[i].lambda2};
    const double fs = objective_value(pb, with.points[i].beta, lam);
    const double ff = objective_value(pb, without.points[i].beta, lam);
    if (std::abs(fs - ff) > gate * std::max(1.0, std::abs(ff)))
      throw std::runtime_error("speedup: screened and unscreened paths disagree, timing invalid");
  }

  auto total_ms = [&](bool use_screening) {
    const PathResult r = solve_path(pb, grid, cfg, use_screening, fuse);
    double t = 0.0;
    for (const auto& pt : r.points) t += pt.solve_ms + pt.screen_ms;
    return t;
  };
  double ts[3], tf[3];
  for (int rep = 0; rep < 3; ++rep) {
    ts[rep] = total_ms(true);
    tf[rep] = total_ms(false);
  }
  SpeedupReport out;
  out.t_screen_ms = detail::median3(ts[0], ts[1], ts[2]);
  out.t_full_ms = detail::median3(tf[0], tf[1], tf[2]);
  out.speedup = out.t_full_ms / out.t_screen_ms;
  return out;
}

struct AuditReport {
  long points = 0;
  long zero_endpoint_violations = 0;
  long zero_interior_violations = 0;
  long fuse_endpoint_violations = 0;
  long fuse_interior_violations = 0;

  long total() const {
    return zero_endpoint_violations + zero_interior_violations + fuse_endpoint_violations +
           fuse_interior_violations;
  }
};

namespace detail {

inline void audit_track(const Problem& pb, const PathGrid& grid, const SolverConfig& cfg,
                        size_t track, AuditReport* out) {
  const Index p = pb.p();
  const double lambda2 = grid.lambda2_values[track];
  const double l1max = lambda1_max(pb, lambda2);
  Vec u_ref = pb.y;
  double lam1_ref = l1max;
  Vec prev_beta = Vec::Zero(p);
  for (double ratio : grid.ratios) {
    const LambdaPair lam{std::min(ratio, 1.0) * l1max, lambda2};
    const std::vector<DualBall> balls = {dual_ball(pb, lam, lam1_ref, u_ref),
                                         dual_ball(pb, lam, l1max, pb.y)};
    const ScreenReport rep = screen(pb, lam, balls);
    const SolveResult truth =
        lam.lambda1 >= l1max
            ? [&] {
                SolveResult r;
                r.beta = Vec::Zero(p);
                r.dual_u = pb.y;
                r.converged = true;
                return r;
              }()
            : solve(pb, lam, cfg, &prev_beta);
    const double tol = zero_tolerance(truth.beta);
    for (Index j : rep.zero_set)
      if (std::abs(truth.beta[j]) > tol)
        ++(j == 0 || j == p - 1 ? out->zero_endpoint_violations : out->zero_interior_violations);
    for (Index j : rep.fuse_set)
      if (std::abs(truth.beta[j] - truth.beta[j + 1]) > tol)
        ++(j == 0 || j == p - 2 ? out->fuse_endpoint_violations : out->fuse_interior_violations);
    ++out->points;
    u_ref = truth.dual_u;
    lam1_ref = lam.lambda1;
    prev_beta = truth.beta;
  }
}

}  // namespace detail

// Compares every grid point's certified sets against a tight reference solve
// (warm-started along the track). Findings are data: counts come back split
// by rule branch, nothing throws.
inline AuditReport audit_safety(const Problem& pb, const PathGrid& grid, const SolverConfig& cfg,
                                int jobs = 1) {
  check_grid(grid);
  const size_t nt = grid.lambda2_values.size();
  std::vector<AuditReport> per_track(nt);
  if (jobs <= 1 || nt == 1) {
    for (size_t t = 0; t < nt; ++t) detail::audit_track(pb, grid, cfg, t, &per_track[t]);
  } else {
    std::vector<std::thread> pool;
    std::atomic<size_t> next{0};
    const int workers = std::min<int>(jobs, static_cast<int>(nt));
    for (int w = 0; w < workers; ++w)
      pool.emplace_back([&] {
        for (size_t t = next.fetch_add(1); t < nt; t = next.fetch_add(1))
          detail::audit_track(pb, grid, cfg, t, &per_track[t]);
      });
    for (auto& th : pool) th.join();
  }
  AuditReport out;
  for (const auto& r : per_track) {
    out.points += r.points;
    out.zero_endpoint_violations += r.zero_endpoint_violations;
    out.zero_interior_violations += r.zero_interior_violations;
    out.fuse_endpoint_violations += r.fuse_endpoint_violations;
    out.fuse_interior_violations += r.fuse_interior_violations;
  }
  return out;
}

}  // namespace fls
