#include "quatpinv/cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "quatpinv/apps/completion.hpp"
#include "quatpinv/apps/deblur.hpp"
#include "quatpinv/apps/image.hpp"
#include "quatpinv/apps/lorenz.hpp"
#include "quatpinv/factor.hpp"
#include "quatpinv/pinv_iter.hpp"

namespace quatpinv {

namespace {

constexpr double kNan = std::numeric_limits<double>::quiet_NaN();

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct RunSpec {
  std::vector<int> sizes;
  std::vector<std::uint64_t> seeds{0};
  std::vector<std::string> methods;
  double gamma = 1.0;
  int order = 4;
  std::string schedule = "naive";
  std::optional<double> tol;
  std::optional<int> maxit;
  int block_r = 8;
  int test_s = 8;
  int cycle_T = 5;
  std::vector<double> lambdas{0.02, 0.05};
  int psf_radius = 4;
  double psf_sigma = 1.0;
  double snr_db = 40.0;
  std::string out = "-";
  std::string shape = "tall";
  std::string ppm_dir;
  std::string image;
  int rank = 5;
  double missing = 0.7;
  int iters = 25;
  std::optional<double> smoothing;
};

std::string fmt(const char* f, double v) {
  if (std::isnan(v)) return "nan";
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

std::string app_row(const std::string& app, const std::string& params, int iters, double wall,
                    double psnr_db, double residual) {
  return app + "," + params + "," + std::to_string(iters) + "," + fmt("%.6f", wall) + "," +
         fmt("%.6f", psnr_db) + "," + fmt("%.10e", residual);
}

Schedule parse_schedule(const std::string& s) {
  if (s == "naive") return Schedule::Naive;
  if (s == "binary") return Schedule::BinaryPow2;
  if (s == "ps") return Schedule::PatersonStockmeyer;
  throw UsageError("unknown schedule '" + s + "' (naive|binary|ps)");
}

void require_sizes(const RunSpec& spec) {
  if (spec.sizes.empty()) throw UsageError("--sizes needs at least one value");
  for (int n : spec.sizes)
    if (n <= 0) throw UsageError("--sizes must be positive");
  if (spec.seeds.empty()) throw UsageError("--seeds needs at least one value");
}

SolverConfig solver_config(const RunSpec& spec, double default_tol, int default_maxit) {
  SolverConfig cfg;
  cfg.gamma = spec.gamma;
  cfg.order = spec.order;
  cfg.schedule = parse_schedule(spec.schedule);
  cfg.tol = spec.tol.value_or(default_tol);
  cfg.maxit = spec.maxit.value_or(default_maxit);
  return cfg;
}

SketchConfig sketch_config(const RunSpec& spec, std::uint64_t seed, Index m, Index n) {
  SketchConfig sk;
  sk.block_r = std::min<Index>(spec.block_r, std::min(m, n));
  sk.test_s = spec.test_s;
  sk.cycle_T = spec.cycle_T;
  sk.seed = seed;
  return sk;
}

// Direct baselines reported in the solver schema with a single residual sample.
SolverReport direct_report(const QMatrix& A, const QMatrix& X, double wall) {
  SolverReport rep;
  rep.wall_time = wall;
  rep.converged = true;
  const QMatrix R = A.rows() >= A.cols() ? identity_minus(X * A) : identity_minus(A * X);
  rep.residual_history.push_back({0, fro_norm(R)});
  rep.penrose = penrose_residuals(A, X);
  return rep;
}

SolverResult run_method(const std::string& method, const QMatrix& A, const RunSpec& spec,
                        std::uint64_t seed) {
  const bool tall = A.rows() >= A.cols();
  if (method == "ns") return ns_damped(A, solver_config(spec, 1e-8, 100));
  if (method == "hyperpower") return ns_hyperpower(A, solver_config(spec, 1e-8, 100));
  if (method == "cgne") return cgne_q(A, solver_config(spec, 1e-8, 500));
  if (method == "cgne-precond")
    return cgne_q(A, solver_config(spec, 1e-8, 500), sketch_config(spec, seed, A.rows(), A.cols()));
  if (method == "rsp") {
    const SolverConfig cfg = solver_config(spec, 1e-3, 2000);
    const SketchConfig sk = sketch_config(spec, seed, A.rows(), A.cols());
    return tall ? rsp_column(A, cfg, sk) : rsp_row(A, cfg, sk);
  }
  if (method == "hybrid") {
    const SolverConfig cfg = solver_config(spec, 1e-3, 200);
    const SketchConfig sk = sketch_config(spec, seed, A.rows(), A.cols());
    if (tall) return hybrid_rsp_ns(A, cfg, sk);
    // The hybrid is a column-case method; A^+ = ((A^H)^+)^H.
    const QMatrix AH = adjoint(A);
    SolverResult r = hybrid_rsp_ns(AH, cfg, sk);
    r.X = adjoint(r.X);
    r.report.penrose = penrose_residuals(A, r.X);
    return r;
  }
  if (method == "qsvd-baseline" || method == "normal-eq") {
    const auto t0 = std::chrono::steady_clock::now();
    QMatrix X = method == "qsvd-baseline" ? pinv_qsvd(A) : pinv_normal_eq(A);
    const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return {X, direct_report(A, X, wall)};
  }
  throw UsageError("unknown method '" + method + "'");
}

std::string method_label(const std::string& method, const RunSpec& spec) {
  if (method == "hyperpower") return "hyperpower-p" + std::to_string(spec.order);
  return method;
}

void validate_methods(const std::vector<std::string>& methods) {
  static const std::vector<std::string> known{"ns",     "hyperpower", "cgne",          "cgne-precond",
                                              "rsp",    "hybrid",     "qsvd-baseline", "normal-eq"};
  for (const auto& m : methods)
    if (std::find(known.begin(), known.end(), m) == known.end())
      throw UsageError("unknown method '" + m + "'");
}

void solver_grid(const RunSpec& spec, const std::vector<std::string>& methods, int wide_extra,
                 int tall_extra, std::ostream& out, std::ostream& err) {
  require_sizes(spec);
  validate_methods(methods);
  parse_schedule(spec.schedule);
  if (spec.shape != "tall" && spec.shape != "wide") throw UsageError("--shape must be tall or wide");
  out << solver_csv_header() << '\n';
  for (int n : spec.sizes) {
    const Index m = spec.shape == "tall" ? n + tall_extra : n;
    const Index cols = spec.shape == "tall" ? n : n + wide_extra;
    for (std::uint64_t seed : spec.seeds) {
      const QMatrix A = randn_qmat(m, cols, seed);
      for (const auto& method : methods) {
        const std::string label = method_label(method, spec);
        try {
          const SolverResult r = run_method(method, A, spec, seed);
          out << solver_csv_row(label, m, cols, seed, r.report) << '\n';
        } catch (const UsageError&) {
          throw;
        } catch (const std::exception& e) {
          err << label << " m=" << m << " n=" << cols << " seed=" << seed << ": " << e.what() << '\n';
          out << label << ',' << m << ',' << cols << ',' << seed << ",nan,nan,nan,nan,nan,nan,nan\n";
        }
      }
    }
  }
}

void cmd_pinv_bench(RunSpec spec, std::ostream& out, std::ostream& err) {
  if (spec.sizes.empty()) spec.sizes = {20, 50, 100, 150, 200};
  if (spec.methods.empty())
    spec.methods = {"ns", "hyperpower", "cgne", "rsp", "hybrid", "qsvd-baseline", "normal-eq"};
  solver_grid(spec, spec.methods, 50, 20, out, err);
}

void cmd_rsp_bench(RunSpec spec, std::ostream& out, std::ostream& err) {
  if (spec.sizes.empty()) spec.sizes = {20, 50, 100};
  if (spec.methods.empty()) spec.methods = {"rsp", "hybrid"};
  solver_grid(spec, spec.methods, 20, 20, out, err);
}

void cmd_recurrence_check(const RunSpec& spec, std::ostream& out) {
  if (spec.seeds.empty()) throw UsageError("--seeds needs at least one value");
  const Schedule schedule = parse_schedule(spec.schedule);
  out << "kind,param,seed,iter,residual,deviation\n";
  for (std::uint64_t seed : spec.seeds) {
    const QMatrix A = randn_qmat(10, 6, seed);
    auto trace = [&](const std::string& kind, double param, auto&& solve, auto&& predict) {
      std::vector<QMatrix> iterates;
      solve([&](int, const QMatrix& X) { iterates.push_back(X); });
      for (std::size_t k = 0; k + 1 < iterates.size(); ++k) {
        const QMatrix F = identity_minus(iterates[k] * A);
        const QMatrix Fn = identity_minus(iterates[k + 1] * A);
        out << kind << ',' << fmt("%g", param) << ',' << seed << ',' << k + 1 << ','
            << fmt("%.10e", fro_norm(Fn)) << ',' << fmt("%.10e", fro_norm(Fn - predict(F))) << '\n';
      }
    };
    for (double gamma : {0.5, 1.0}) {
      SolverConfig cfg;
      cfg.gamma = gamma;
      cfg.tol = 0;
      cfg.maxit = spec.maxit.value_or(20);
      trace("ns", gamma, [&](const IterationObserver& obs) { ns_damped(A, cfg, obs); },
            [&](const QMatrix& F) {
              QMatrix G = (1.0 - gamma) * F;
              G.add_scaled(gamma, F * F);
              return G;
            });
    }
    for (int p : {2, 3, 4, 8}) {
      SolverConfig cfg;
      cfg.order = p;
      cfg.schedule = schedule == Schedule::BinaryPow2 && (p & (p - 1)) ? Schedule::Naive : schedule;
      cfg.tol = 0;
      cfg.maxit = spec.maxit.value_or(p == 2 ? 12 : 6);
      trace("hyperpower", p, [&](const IterationObserver& obs) { ns_hyperpower(A, cfg, obs); },
            [&](const QMatrix& F) {
              QMatrix P = F;
              for (int i = 1; i < p; ++i) P = P * F;
              return P;
            });
    }
  }
}

void cmd_lorenz(RunSpec spec, std::ostream& out) {
  if (spec.sizes.empty()) spec.sizes = {50, 75, 100, 150, 200};
  require_sizes(spec);
  out << app_csv_header() << '\n';
  for (int N : spec.sizes) {
    for (std::uint64_t seed : spec.seeds) {
      LorenzProblem p;
      p.N = N;
      p.seed = seed;
      const LorenzSystem sys = lorenz_build(p);
      const LorenzSolution s = lorenz_solve_ns(sys.X, sys.Y, spec.tol.value_or(1e-6), spec.maxit.value_or(N));
      out << app_row("lorenz-ns", "N=" + std::to_string(N) + ";seed=" + std::to_string(seed),
                     s.report.iterations, s.report.wall_time, kNan, s.report.final_residual())
          << '\n';
    }
  }
}

void cmd_deblur(RunSpec spec, std::ostream& out) {
  if (spec.sizes.empty()) spec.sizes = {32, 64, 128};
  require_sizes(spec);
  if (spec.lambdas.empty()) throw UsageError("--lambda needs at least one value");
  if (!spec.ppm_dir.empty()) std::filesystem::create_directories(spec.ppm_dir);
  std::vector<std::pair<std::string, QMatrix>> images;
  if (!spec.image.empty()) {
    images.emplace_back(std::filesystem::path(spec.image).stem().string(), read_ppm(spec.image));
  } else {
    for (int n : spec.sizes) {
      if (!is_power_of_two(n)) throw UsageError("deblur sizes must be powers of two");
      images.emplace_back("synthetic" + std::to_string(n), synthetic_image(n, n));
    }
  }
  out << app_csv_header() << '\n';
  for (const auto& [name, img] : images) {
    for (double lambda : spec.lambdas) {
      for (std::uint64_t seed : spec.seeds) {
        DeblurProblem p;
        p.image = img;
        p.psf_radius = spec.psf_radius;
        p.psf_sigma = spec.psf_sigma;
        p.snr_db = spec.snr_db;
        p.lambda = lambda;
        p.tol = spec.tol.value_or(p.tol);
        p.maxit = spec.maxit.value_or(p.maxit);
        p.seed = seed;
        const DeblurResult r = deblur_fft_ns(p);
        const std::string params = name + ";lambda=" + fmt("%g", lambda) + ";seed=" + std::to_string(seed);
        out << app_row("deblur-fft-ns", params, r.iterations, r.wall_time, r.psnr_restored, r.residual) << '\n';
        out << app_row("deblur-closed-form", params, 0, kNan, r.psnr_closed_form, 0.0) << '\n';
        if (!spec.ppm_dir.empty()) {
          const std::string stem = spec.ppm_dir + "/" + name + "_lambda" + fmt("%g", lambda) + "_seed" +
                                   std::to_string(seed);
          write_ppm(stem + "_original.ppm", img);
          write_ppm(stem + "_blurred.ppm", r.blurred);
          write_ppm(stem + "_restored.ppm", r.restored);
        }
      }
    }
  }
}

PinvFn completion_pinv(const std::string& method, const RunSpec& spec) {
  if (method == "qsvd-baseline") return [](const QMatrix& A) { return pinv_qsvd(A); };
  if (method == "normal-eq") return [](const QMatrix& A) { return pinv_normal_eq(A, 1e-10); };
  if (method == "ns") {
    const SolverConfig cfg = solver_config(spec, 1e-10, 100);
    return [cfg](const QMatrix& A) { return ns_damped(A, cfg).X; };
  }
  throw UsageError("cur-complete method must be ns, qsvd-baseline or normal-eq");
}

void cmd_cur_complete(RunSpec spec, std::ostream& out) {
  if (spec.sizes.empty()) spec.sizes = {60};
  require_sizes(spec);
  if (spec.rank < 1) throw UsageError("--rank must be >= 1");
  if (!(spec.missing >= 0.0 && spec.missing < 1.0)) throw UsageError("--missing must lie in [0, 1)");
  if (spec.iters < 1) throw UsageError("--iters must be >= 1");
  if (spec.smoothing && !(*spec.smoothing > 0.0)) throw UsageError("--smoothing must be > 0");
  const std::string method = spec.methods.empty() ? "ns" : spec.methods.front();
  const PinvFn pinv = completion_pinv(method, spec);
  if (!spec.ppm_dir.empty()) std::filesystem::create_directories(spec.ppm_dir);

  const bool is_image = !spec.image.empty();
  out << app_csv_header() << '\n';
  for (int n : spec.sizes) {
    for (std::uint64_t seed : spec.seeds) {
      const QMatrix truth = is_image ? read_ppm(spec.image) : low_rank_qmat(n, n, spec.rank, seed);
      const std::string name = is_image ? std::filesystem::path(spec.image).stem().string()
                                        : "rank" + std::to_string(spec.rank) + "_n" + std::to_string(n);
      CompletionProblem prob = make_completion_problem(truth, spec.missing, spec.rank, spec.iters, seed);
      prob.smoothing_sigma = spec.smoothing;
      const auto t0 = std::chrono::steady_clock::now();
      const CompletionResult res = complete(prob, pinv);
      const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
      const std::string params = name + ";missing=" + fmt("%g", spec.missing) + ";seed=" + std::to_string(seed);
      for (std::size_t k = 0; k < res.history.size(); ++k) {
        const bool last = k + 1 == res.history.size();
        const double p = last && is_image ? psnr(truth, res.filled) : kNan;
        out << app_row("cur-complete-" + method, params, static_cast<int>(k + 1), last ? wall : kNan, p,
                       res.history[k])
            << '\n';
      }
      if (!spec.ppm_dir.empty() && is_image) {
        const std::string stem = spec.ppm_dir + "/" + name + "_seed" + std::to_string(seed);
        write_ppm(stem + "_original.ppm", truth);
        write_ppm(stem + "_observed.ppm", prob.M);
        write_ppm(stem + "_completed.ppm", res.filled);
      }
      if (is_image) break;
    }
    if (is_image) break;
  }
}

void add_common(CLI::App* cmd, RunSpec& s) {
  cmd->add_option("--sizes", s.sizes, "Problem sizes")->delimiter(',');
  cmd->add_option("--seeds", s.seeds, "RNG seeds")->delimiter(',');
  cmd->add_option("--tol", s.tol, "Stopping tolerance");
  cmd->add_option("--maxit", s.maxit, "Iteration cap");
  cmd->add_option("--out", s.out, "CSV output path, - for stdout");
}

void add_solver(CLI::App* cmd, RunSpec& s) {
  cmd->add_option("--method", s.methods, "Methods")->delimiter(',');
  cmd->add_option("--gamma", s.gamma, "Damping in (0, 1]");
  cmd->add_option("--order", s.order, "Hyperpower order p >= 2");
  cmd->add_option("--schedule", s.schedule, "naive|binary|ps");
  cmd->add_option("--block-r", s.block_r, "Sketch width r");
  cmd->add_option("--test-s", s.test_s, "Test sketch width s");
  cmd->add_option("--cycle-T", s.cycle_T, "Randomized steps per hybrid cycle");
  cmd->add_option("--shape", s.shape, "tall ((n+20) x n) or wide (n x (n+50))");
}

}  // namespace

const char* app_csv_header() { return "app,param-set,iters,wall_s,psnr_db,residual"; }

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Quaternion pseudoinverse benchmarks"};
  app.require_subcommand(1);
  RunSpec spec;

  auto* pinv = app.add_subcommand("pinv-bench", "Random-matrix pseudoinverse benchmark");
  add_common(pinv, spec);
  add_solver(pinv, spec);
  auto* rsp = app.add_subcommand("rsp-bench", "Randomized solvers on (n+20) x n matrices");
  add_common(rsp, spec);
  add_solver(rsp, spec);
  auto* rec = app.add_subcommand("recurrence-check", "Residual recurrence deviations on 10 x 6");
  add_common(rec, spec);
  rec->add_option("--schedule", spec.schedule, "naive|binary|ps");
  auto* lor = app.add_subcommand("lorenz", "Lorenz filter identification");
  add_common(lor, spec);
  auto* deb = app.add_subcommand("deblur", "FFT Newton-Schulz deblurring");
  add_common(deb, spec);
  deb->add_option("--lambda", spec.lambdas, "Tikhonov weights")->delimiter(',');
  deb->add_option("--psf-radius", spec.psf_radius, "Gaussian PSF radius");
  deb->add_option("--psf-sigma", spec.psf_sigma, "Gaussian PSF sigma");
  deb->add_option("--snr-db", spec.snr_db, "Noise level in dB");
  deb->add_option("--image", spec.image, "P6 PPM input (powers of two)");
  deb->add_option("--ppm-dir", spec.ppm_dir, "Directory for original/blurred/restored PPMs");
  auto* cur = app.add_subcommand("cur-complete", "CUR impute-reconstruct completion");
  add_common(cur, spec);
  cur->add_option("--method", spec.methods, "Pseudoinverse: ns|qsvd-baseline|normal-eq")->delimiter(',');
  cur->add_option("--gamma", spec.gamma, "Damping in (0, 1]");
  cur->add_option("--rank", spec.rank, "Target rank r");
  cur->add_option("--missing", spec.missing, "Fraction of unobserved entries");
  cur->add_option("--iters", spec.iters, "Impute-reconstruct rounds");
  cur->add_option("--smoothing", spec.smoothing, "Gaussian smoothing sigma per round");
  cur->add_option("--image", spec.image, "P6 PPM input instead of synthetic data");
  cur->add_option("--ppm-dir", spec.ppm_dir, "Directory for original/observed/completed PPMs");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << e.what() << '\n';
    return kExitUsage;
  }

  try {
    std::ofstream file;
    std::ostringstream buffer;
    auto run = [&](std::ostream& sink) {
      if (pinv->parsed()) cmd_pinv_bench(spec, sink, err);
      else if (rsp->parsed()) cmd_rsp_bench(spec, sink, err);
      else if (rec->parsed()) cmd_recurrence_check(spec, sink);
      else if (lor->parsed()) cmd_lorenz(spec, sink);
      else if (deb->parsed()) cmd_deblur(spec, sink);
      else if (cur->parsed()) cmd_cur_complete(spec, sink);
    };
    run(buffer);
    if (spec.out == "-") {
      out << buffer.str();
    } else {
      file.open(spec.out);
      if (!file) throw IoError("cannot write " + spec.out);
      file << buffer.str();
      if (!file) throw IoError("failed writing " + spec.out);
    }
  } catch (const UsageError& e) {
    err << "usage error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitRuntime;
  }
  return kExitOk;
}

}  // namespace quatpinv
