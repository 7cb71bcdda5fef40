#include <CLI11.hpp>
#include <iostream>

#include <fls/fls.hpp>

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitData = 2;
constexpr int kExitSafety = 3;

struct Options {
  std::string input, out;
  std::string format = "csv";
  std::string cov = "id";
  std::string fuse = "endpoint";
  std::string ratio_grid;
  std::string lambda2_set;
  double lambda1 = -1.0, lambda2 = -1.0;
  double tol = 1e-8;
  double noise_sd = 0.1;
  long n = 50, p = 100;
  long dims = 0;
  long max_iters = 20000;
  std::uint64_t seed = 0;
  int jobs = 1;
};

void add_io_flags(CLI::App* cmd, Options& o) {
  cmd->add_option("--input", o.input, "input data file (dense .csv or sparse labeled)");
  cmd->add_option("--dims", o.dims, "feature count override for sparse input");
  cmd->add_option("--out", o.out, "output file stem");
  cmd->add_option("--format", o.format, "output format")->check(CLI::IsMember({"csv", "json"}));
}

void add_sim_flags(CLI::App* cmd, Options& o) {
  cmd->add_option("--n", o.n, "number of samples");
  cmd->add_option("--p", o.p, "number of features");
  cmd->add_option("--cov", o.cov, "covariance model")->check(CLI::IsMember({"id", "ar1"}));
  cmd->add_option("--seed", o.seed, "RNG seed");
  cmd->add_option("--noise-sd", o.noise_sd, "response noise standard deviation");
}

void add_solver_flags(CLI::App* cmd, Options& o) {
  cmd->add_option("--tol", o.tol, "relative objective tolerance");
  cmd->add_option("--max-iters", o.max_iters, "iteration cap");
}

void add_grid_flags(CLI::App* cmd, Options& o) {
  cmd->add_option("--ratio-grid", o.ratio_grid, "lambda1 ratios as lo:step:hi");
  cmd->add_option("--lambda2-set", o.lambda2_set, "comma-separated lambda2 values");
  cmd->add_option("--fuse", o.fuse, "fusion reduction mode")
      ->check(CLI::IsMember({"off", "endpoint", "all"}));
  cmd->add_option("--jobs", o.jobs, "worker count for independent tracks");
}

fls::FuseMode fuse_mode(const std::string& s) {
  if (s == "off") return fls::FuseMode::off;
  if (s == "all") return fls::FuseMode::all;
  return fls::FuseMode::endpoint;
}

fls::SolverConfig solver_config(const Options& o) {
  fls::SolverConfig cfg;
  cfg.max_iters = o.max_iters;
  cfg.rel_tol = o.tol;
  return cfg;
}

std::vector<double> parse_csv_doubles(const std::string& s) {
  std::vector<double> out;
  std::stringstream ss(s);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    if (tok.empty()) continue;
    out.push_back(std::stod(tok));
  }
  if (out.empty()) throw std::invalid_argument("empty value list: " + s);
  return out;
}

fls::PathGrid make_grid(const Options& o) {
  fls::PathGrid g = fls::default_grid();
  if (!o.lambda2_set.empty()) g.lambda2_values = parse_csv_doubles(o.lambda2_set);
  if (!o.ratio_grid.empty()) {
    const auto c1 = o.ratio_grid.find(':');
    const auto c2 = o.ratio_grid.find(':', c1 == std::string::npos ? c1 : c1 + 1);
    if (c1 == std::string::npos || c2 == std::string::npos)
      throw std::invalid_argument("--ratio-grid expects lo:step:hi");
    const double lo = std::stod(o.ratio_grid.substr(0, c1));
    const double step = std::stod(o.ratio_grid.substr(c1 + 1, c2 - c1 - 1));
    const double hi = std::stod(o.ratio_grid.substr(c2 + 1));
    if (step <= 0.0 || lo <= 0.0 || hi < lo) throw std::invalid_argument("bad --ratio-grid range");
    g.ratios.clear();
    for (double r = lo; r <= hi + 1e-12; r += step) g.ratios.push_back(std::min(r, 1.0));
    std::sort(g.ratios.begin(), g.ratios.end(), std::greater<double>());
    g.ratios.erase(std::unique(g.ratios.begin(), g.ratios.end()), g.ratios.end());
  }
  fls::check_grid(g);
  return g;
}

fls::Problem load_problem(const Options& o) {
  if (o.input.empty()) throw std::invalid_argument("--input is required");
  const bool dense = o.input.size() >= 4 && o.input.substr(o.input.size() - 4) == ".csv";
  auto [X, y] = dense ? fls::read_dense_csv(o.input)
                      : fls::read_sparse_labeled(o.input, static_cast<fls::Index>(o.dims));
  return fls::make_problem(std::move(X), std::move(y));
}

void emit(const Options& o, const std::vector<fls::PathPoint>& pts, const fls::RunMeta& meta) {
  if (o.out.empty()) return;
  if (o.format == "json")
    fls::write_results_json(o.out, pts, meta);
  else
    fls::write_results_csv(o.out, pts);
}

int run_simulate(const Options& o) {
  if (o.out.empty()) throw std::invalid_argument("simulate needs --out");
  const auto cov = o.cov == "ar1" ? fls::CovModel::ar1 : fls::CovModel::identity;
  const fls::Mat X = fls::gen_design(o.n, o.p, cov, o.seed);
  const fls::Vec y = fls::gen_response(X, fls::true_beta(o.p), o.noise_sd, o.seed);
  fls::write_dense_csv(o.out, X, y);
  std::cout << "wrote " << o.n << " x " << o.p << " (+response) to " << o.out << "\n";
  return kExitOk;
}

int run_solve(const Options& o) {
  if (o.lambda1 < 0.0 || o.lambda2 < 0.0)
    throw std::invalid_argument("solve needs --lambda1 and --lambda2");
  const fls::Problem pb = load_problem(o);
  const fls::LambdaPair lam{o.lambda1, o.lambda2};
  const auto t0 = std::chrono::steady_clock::now();
  const fls::SolveResult res = fls::solve(pb, lam, solver_config(o));
  fls::PathPoint pt;
  pt.lambda1 = lam.lambda1;
  pt.lambda2 = lam.lambda2;
  pt.solve_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0)
                    .count();
  pt.iterations = res.iterations;
  pt.beta = res.beta;
  const double tol = fls::zero_tolerance(res.beta);
  pt.n_actual_inactive = (res.beta.cwiseAbs().array() <= tol).count();
  std::cout << "objective " << res.objective << ", iterations " << res.iterations
            << ", inactive " << pt.n_actual_inactive << "/" << pb.p()
            << (res.converged ? "" : " (not converged)") << "\n";
  emit(o, {pt}, {"solve", o.seed, pb.n(), pb.p()});
  return kExitOk;
}

int run_screen(const Options& o) {
  if (o.lambda1 < 0.0 || o.lambda2 < 0.0)
    throw std::invalid_argument("screen needs --lambda1 and --lambda2");
  const fls::Problem pb = load_problem(o);
  const fls::LambdaPair lam{o.lambda1, o.lambda2};
  const double l1max = fls::lambda1_max(pb, lam.lambda2);
  const fls::DualBall ball = lam.lambda1 >= l1max
                                 ? fls::DualBall{pb.y, 0.0}
                                 : fls::dual_ball(pb, lam, l1max, pb.y);
  const fls::ScreenReport rep = fls::screen(pb, lam, ball);
  std::cout << "zero_set " << rep.zero_set.size() << ", fuse_set " << rep.fuse_set.size()
            << " of p = " << pb.p() << "\n";
  if (!o.out.empty()) {
    nlohmann::ordered_json doc;
    doc["lambda1"] = lam.lambda1;
    doc["lambda2"] = lam.lambda2;
    doc["zero_set"] = rep.zero_set;
    doc["fuse_set"] = rep.fuse_set;
    std::ofstream out(o.out);
    if (!out) throw fls::DataError("cannot write file: " + o.out);
    out << doc.dump(2) << '\n';
  }
  return kExitOk;
}

int run_path(const Options& o) {
  const fls::Problem pb = load_problem(o);
  const fls::PathGrid grid = make_grid(o);
  const fls::PathResult res =
      fls::solve_path(pb, grid, solver_config(o), true, fuse_mode(o.fuse), o.jobs);
  std::cout << res.points.size() << " grid points solved\n";
  emit(o, res.points, {"path", o.seed, pb.n(), pb.p()});
  return kExitOk;
}

int run_bench(const Options& o) {
  const fls::Problem pb = load_problem(o);
  const fls::PathGrid grid = make_grid(o);
  const fls::SpeedupReport sp = fls::speedup(pb, grid, solver_config(o), fuse_mode(o.fuse));
  const fls::PathResult res =
      fls::solve_path(pb, grid, solver_config(o), true, fuse_mode(o.fuse), o.jobs);
  double worst = 1.0;
  for (const auto& pt : res.points) {
    if (pt.n_actual_inactive > 0 && pt.ratio < 1.0)
      worst = std::min(worst, static_cast<double>(pt.n_zero_screened) /
                                  static_cast<double>(pt.n_actual_inactive));
    if (pt.n_zero_screened > pt.n_actual_inactive)
      throw fls::SafetyViolationError("bench: screened zeros exceed true zeros");
  }
  std::cout << "speedup " << sp.speedup << " (full " << sp.t_full_ms << " ms, screened "
            << sp.t_screen_ms << " ms), worst rejection ratio " << worst << "\n";
  emit(o, res.points, {"bench", o.seed, pb.n(), pb.p()});
  return kExitOk;
}

int run_audit(const Options& o) {
  const fls::Problem pb = load_problem(o);
  const fls::PathGrid grid = make_grid(o);
  const fls::AuditReport rep = fls::audit_safety(pb, grid, solver_config(o), o.jobs);
  std::cout << "audited " << rep.points << " grid points\n"
            << "zero endpoint violations: " << rep.zero_endpoint_violations << "\n"
            << "zero interior violations: " << rep.zero_interior_violations << "\n"
            << "fuse endpoint violations: " << rep.fuse_endpoint_violations << "\n"
            << "fuse interior violations: " << rep.fuse_interior_violations
            << " (reported, not certified)\n";
  const long certified = rep.zero_endpoint_violations + rep.zero_interior_violations +
                         rep.fuse_endpoint_violations;
  return certified > 0 ? kExitSafety : kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"fused-Lasso toolkit: safe feature identification, paths, benchmarks"};
  app.require_subcommand(1);
  Options o;

  auto* sim = app.add_subcommand("simulate", "generate a synthetic dataset");
  add_sim_flags(sim, o);
  sim->add_option("--out", o.out, "output CSV path")->required();

  auto* solve_cmd = app.add_subcommand("solve", "solve one (lambda1, lambda2) point");
  add_io_flags(solve_cmd, o);
  add_solver_flags(solve_cmd, o);
  solve_cmd->add_option("--lambda1", o.lambda1)->required();
  solve_cmd->add_option("--lambda2", o.lambda2)->required();

  auto* screen_cmd = app.add_subcommand("screen", "emit the screening report only");
  add_io_flags(screen_cmd, o);
  screen_cmd->add_option("--lambda1", o.lambda1)->required();
  screen_cmd->add_option("--lambda2", o.lambda2)->required();

  auto* path_cmd = app.add_subcommand("path", "solve the full sequential grid");
  add_io_flags(path_cmd, o);
  add_solver_flags(path_cmd, o);
  add_grid_flags(path_cmd, o);

  auto* bench_cmd = app.add_subcommand("bench", "speedup and rejection ratios over the grid");
  add_io_flags(bench_cmd, o);
  add_solver_flags(bench_cmd, o);
  add_grid_flags(bench_cmd, o);

  auto* audit_cmd = app.add_subcommand("audit", "compare certified sets against tight solves");
  add_io_flags(audit_cmd, o);
  add_solver_flags(audit_cmd, o);
  add_grid_flags(audit_cmd, o);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e, std::cerr, std::cerr);
    return kExitUsage;
  }

  try {
    if (sim->parsed()) return run_simulate(o);
    if (solve_cmd->parsed()) return run_solve(o);
    if (screen_cmd->parsed()) return run_screen(o);
    if (path_cmd->parsed()) return run_path(o);
    if (bench_cmd->parsed()) return run_bench(o);
    if (audit_cmd->parsed()) return run_audit(o);
  } catch (const fls::SafetyViolationError& e) {
    std::cerr << "safety violation: " << e.what() << "\n";
    return kExitSafety;
  } catch (const fls::DataError& e) {
    std::cerr << "data error: " << e.what() << "\n";
    return kExitData;
  } catch (const std::invalid_argument& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitData;
  }
  return kExitUsage;
}
