// Runs the ten acceptance criteria and prints one PASS/FAIL line per criterion.
//
// Usage: quatpinv_acceptance [--known-red N[,N...]]
// Criteria listed in --known-red are still run and reported, but a failure
// there does not change the exit status.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "quatpinv/apps/completion.hpp"
#include "quatpinv/apps/deblur.hpp"
#include "quatpinv/apps/image.hpp"
#include "quatpinv/apps/lorenz.hpp"
#include "quatpinv/cli.hpp"
#include "quatpinv/factor.hpp"
#include "quatpinv/pinv_iter.hpp"

using namespace quatpinv;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;
};

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

double rel(const QMatrix& X, const QMatrix& ref) { return fro_norm(X - ref) / fro_norm(ref); }

std::string sci(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2e", v);
  return buf;
}

QMatrix right_residual(const QMatrix& A, const QMatrix& X) {
  return A.rows() >= A.cols() ? identity_minus(X * A) : identity_minus(A * X);
}

Outcome penrose_residuals_ns() {
  const int previous_threads = max_threads();
  set_max_threads(1);
  const auto t0 = std::chrono::steady_clock::now();
  double worst = 0;
  int runs = 0;
  for (Index n : {20, 50, 100}) {
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
      const QMatrix A = randn_qmat(n, n + 50, seed);
      SolverConfig cfg;
      cfg.gamma = 1.0;
      cfg.maxit = 35;
      cfg.tol = 0.0;
      cfg.seed = seed;
      worst = std::max(worst, ns_damped(A, cfg).report.penrose.max());
      ++runs;
    }
  }
  const double wall = seconds_since(t0);
  set_max_threads(previous_threads);
  return {worst <= 1e-8 && wall < 60.0,
          std::to_string(runs) + " runs, max e = " + sci(worst) + ", " + std::to_string(wall).substr(0, 5) + " s"};
}

Outcome residual_recurrences() {
  double worst = 0;
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const QMatrix A = randn_qmat(10, 6, seed);
    auto check = [&](auto&& solve, auto&& predict) {
      std::vector<QMatrix> it;
      solve([&](int, const QMatrix& X) { it.push_back(X); });
      for (std::size_t k = 0; k + 1 < it.size(); ++k) {
        const QMatrix F = identity_minus(it[k] * A);
        worst = std::max(worst, fro_norm(identity_minus(it[k + 1] * A) - predict(F)));
      }
    };
    for (double gamma : {0.5, 1.0}) {
      SolverConfig cfg;
      cfg.gamma = gamma;
      cfg.tol = 0;
      cfg.maxit = 20;
      check([&](const IterationObserver& o) { ns_damped(A, cfg, o); },
            [&](const QMatrix& F) {
              QMatrix G = (1.0 - gamma) * F;
              return G.add_scaled(gamma, F * F);
            });
    }
    for (int p : {2, 3, 4, 8}) {
      SolverConfig cfg;
      cfg.order = p;
      cfg.tol = 0;
      cfg.maxit = p == 2 ? 12 : 6;
      check([&](const IterationObserver& o) { ns_hyperpower(A, cfg, o); },
            [&](const QMatrix& F) {
              QMatrix P = F;
              for (int i = 1; i < p; ++i) P = P * F;
              return P;
            });
    }
  }
  return {worst <= 1e-11, "max deviation " + sci(worst)};
}

Outcome schedule_equivalence() {
  double worst = 0;
  bool counts = true;
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const QMatrix A = randn_qmat(14, 8, seed);
    const QMatrix X = auto_alpha(A) * adjoint(A);
    const QMatrix F = identity_minus(X * A);
    for (int p : {2, 4, 8, 16}) {
      const NeumannResult naive = eval_neumann_poly(F, X, p, Schedule::Naive);
      const NeumannResult bin = eval_neumann_poly(F, X, p, Schedule::BinaryPow2);
      const NeumannResult ps = eval_neumann_poly(F, X, p, Schedule::PatersonStockmeyer);
      worst = std::max({worst, rel(bin.value, naive.value), rel(ps.value, naive.value)});
      if (p == 8) counts = counts && bin.square_products == 2;
      if (p == 16) counts = counts && bin.square_products == 3;
    }
    for (int p : {3, 5, 7}) {
      worst = std::max(worst, rel(eval_neumann_poly(F, X, p, Schedule::PatersonStockmeyer).value,
                                  eval_neumann_poly(F, X, p, Schedule::Naive).value));
    }
  }
  return {worst <= 1e-11 && counts,
          "max rel diff " + sci(worst) + ", binary squarings p=8/16 " + (counts ? "2/3" : "wrong")};
}

Outcome oracle_equivalence() {
  double worst = 0;
  std::string worst_method;
  int failures = 0;
  for (bool tall : {true, false}) {
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
      const QMatrix A = tall ? randn_qmat(24, 12, 1000 + seed) : randn_qmat(12, 24, 2000 + seed);
      const QMatrix Xq = pinv_qsvd(A), Xn = pinv_normal_eq(A);
      SolverConfig cfg;
      cfg.tol = 1e-12;
      cfg.maxit = 200;
      SketchConfig sk;
      sk.block_r = 6;
      sk.seed = seed;
      SolverConfig rcfg = cfg;
      rcfg.tol = 1e-11;
      rcfg.maxit = 5000;
      SolverConfig hcfg = rcfg;
      hcfg.order = 4;
      std::vector<std::pair<std::string, std::function<SolverResult()>>> solvers{
          {"ns", [&] { return ns_damped(A, cfg); }},
          {"hyperpower", [&] {
             SolverConfig c = cfg;
             c.order = 3;
             return ns_hyperpower(A, c);
           }},
          {"cgne", [&] { return cgne_q(A, cfg); }},
          {"cgne-precond", [&] { return cgne_q(A, cfg, sk); }},
          {"rsp", [&] { return tall ? rsp_column(A, rcfg, sk) : rsp_row(A, rcfg, sk); }},
          {"hybrid", [&] {
             if (tall) return hybrid_rsp_ns(A, hcfg, sk);
             SolverResult r = hybrid_rsp_ns(adjoint(A), hcfg, sk);
             r.X = adjoint(r.X);
             return r;
           }},
      };
      for (const auto& [name, solve] : solvers) {
        try {
          const QMatrix X = solve().X;
          const double d = std::max(rel(X, Xq), rel(X, Xn));
          if (d > worst) {
            worst = d;
            worst_method = name;
          }
        } catch (const std::exception&) {
          ++failures;
        }
      }
    }
  }
  return {worst <= 1e-6 && failures == 0, "6 solvers x 40 instances, worst " + sci(worst) + " (" +
                                               worst_method + "), exceptions " + std::to_string(failures)};
}

Outcome rsp_monotone_and_rate() {
  int violations = 0, runs = 0;
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    for (bool tall : {true, false}) {
      const QMatrix A = tall ? randn_qmat(40, 20, seed) : randn_qmat(20, 40, seed);
      const QMatrix Xs = pinv_qsvd(A);
      SolverConfig cfg;
      cfg.tol = 0;
      cfg.maxit = 100;
      SketchConfig sk;
      sk.block_r = 8;
      sk.seed = seed;
      double prev = INFINITY;
      auto obs = [&](int, const QMatrix& X) {
        const double d = fro_norm(X - Xs);
        if (d > prev * (1 + 1e-12) + 1e-14) ++violations;
        prev = d;
      };
      if (tall) rsp_column(A, cfg, sk, obs);
      else rsp_row(A, cfg, sk, obs);
      ++runs;
    }
  }
  std::ostringstream rates;
  bool rate_ok = true;
  const QMatrix A = randn_qmat(30, 10, 7);
  for (Index r : {1, 4, 8}) {
    SketchConfig sk;
    sk.block_r = r;
    sk.seed = 11;
    const RateEstimate e = rsp_rate_check(A, sk, 100);
    rate_ok = rate_ok && e.mean <= e.bound + 3 * e.std_error;
    rates << " r=" << r << ": " << std::to_string(e.mean).substr(0, 5) << "<=" << std::to_string(e.bound).substr(0, 5);
  }
  return {violations == 0 && rate_ok,
          std::to_string(runs) + " runs, " + std::to_string(violations) + " increases;" + rates.str()};
}

Outcome cgne_one_step() {
  double worst_x = 0;
  bool one_iter = true;
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const QMatrix Q = thin_qr(randn_qmat(12, 5, seed)).Q;
    SolverConfig cfg;
    cfg.alpha = 0.3 + 0.1 * static_cast<double>(seed);
    cfg.tol = 1e-12;
    const SolverResult r = cgne_q(Q, cfg);
    one_iter = one_iter && r.report.iterations == 1;
    worst_x = std::max(worst_x, fro_norm(r.X - adjoint(Q)));
  }
  int increases = 0;
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const QMatrix A = seed % 2 ? randn_qmat(16, 30, seed) : randn_qmat(30, 16, seed);
    SolverConfig cfg;
    cfg.tol = 1e-9;
    cfg.maxit = 300;
    double prev = INFINITY;
    cgne_q(A, cfg, std::nullopt, [&](int, const QMatrix& X) {
      const double f = 0.5 * fro_norm2(right_residual(A, X));
      if (!(f < prev)) ++increases;
      prev = f;
    });
  }
  return {one_iter && worst_x <= 1e-12 && increases == 0,
          std::string("one iteration: ") + (one_iter ? "yes" : "no") + ", max ||X1 - A^H|| " + sci(worst_x) +
              ", non-decreasing f steps " + std::to_string(increases)};
}

Outcome lorenz_envelope() {
  LorenzProblem p;
  p.N = 50;
  const auto t0 = std::chrono::steady_clock::now();
  const LorenzSystem sys = lorenz_build(p);
  const LorenzSolution s = lorenz_solve_ns(sys.X, sys.Y, 1e-6, 80);
  const double wall = seconds_since(t0);
  const double relres = s.report.final_residual();
  return {relres <= 1e-6 && s.report.iterations <= 80 && wall < 5.0,
          "N=50: " + std::to_string(s.report.iterations) + " iterations, RelRes " + sci(relres) + ", " +
              std::to_string(wall).substr(0, 5) + " s"};
}

Outcome deblur_parity() {
  double worst_rel = 0, worst_db = 0;
  for (Index n : {32, 64, 128}) {
    for (double lambda : {0.02, 0.05}) {
      DeblurProblem p;
      p.image = synthetic_image(n, n);
      p.lambda = lambda;
      const DeblurResult r = deblur_fft_ns(p);
      worst_rel = std::max(worst_rel, rel(r.restored, r.closed_form));
      worst_db = std::max(worst_db, std::abs(r.psnr_restored - r.psnr_closed_form));
    }
  }
  return {worst_rel <= 1e-10 && worst_db <= 0.01,
          "max rel diff " + sci(worst_rel) + ", max PSNR gap " + sci(worst_db) + " dB"};
}

Outcome cur_exactness() {
  const PinvFn ns = [](const QMatrix& M) {
    SolverConfig cfg;
    cfg.tol = 1e-12;
    cfg.maxit = 200;
    return ns_damped(M, cfg).X;
  };
  double worst_cur = 0;
  int tested = 0;
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const QMatrix A = low_rank_qmat(60, 60, 5, seed);
    const std::vector<Index> I = sample_indices(60, 5, seed + 100), J = sample_indices(60, 5, seed + 200);
    const Eigen::VectorXd sc = qsvd(select_cols(A, J)).S, sr = qsvd(select_rows(A, I)).S;
    if (!(sc(4) > 1e-8 * sc(0) && sr(4) > 1e-8 * sr(0))) continue;
    ++tested;
    worst_cur = std::max(worst_cur, rel(cur_reconstruct(A, I, J, CurMode::UOpt, ns), A));
  }

  const QMatrix truth = low_rank_qmat(60, 60, 5, 0);
  const CompletionResult res = complete(make_completion_problem(truth, 0.7, 5, 25, 0), ns);
  double rise = 0;
  for (std::size_t k = res.history.size() - 10; k < res.history.size(); ++k)
    rise = std::max(rise, (res.history[k] - res.history[k - 1]) / res.history[k - 1]);
  const bool tail_ok = rise <= 0.0;
  const bool end_ok = res.history.back() <= res.history.front();
  return {worst_cur <= 1e-8 && tested > 0 && tail_ok && end_ok,
          "CUR " + std::to_string(tested) + " draws, worst rel " + sci(worst_cur) +
              "; completion final/initial " + sci(res.history.back() / res.history.front()) +
              ", max tail rise " + sci(rise) + (tail_ok ? "" : " (tail not monotone)")};
}

Outcome determinism() {
  const std::vector<std::vector<std::string>> commands{
      {"pinv-bench", "--sizes", "12", "--seeds", "1,2"},
      {"recurrence-check", "--seeds", "0,1"},
      {"lorenz", "--sizes", "20", "--seeds", "0,1"},
      {"deblur", "--sizes", "32", "--seeds", "0,1"},
      {"cur-complete", "--sizes", "30", "--iters", "5", "--seeds", "0,1"},
  };
  auto run = [](std::vector<std::string> args) {
    args.insert(args.begin(), "quatpinv");
    std::vector<const char*> argv;
    for (const auto& a : args) argv.push_back(a.c_str());
    std::ostringstream out, err;
    run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
    // Drop the wall-time column.
    std::istringstream in(out.str());
    std::string line, header, kept;
    std::getline(in, header);
    std::vector<std::string> names;
    {
      std::stringstream hs(header);
      std::string c;
      while (std::getline(hs, c, ',')) names.push_back(c);
    }
    while (std::getline(in, line)) {
      std::stringstream ls(line);
      std::string c;
      for (std::size_t i = 0; std::getline(ls, c, ','); ++i)
        if (i >= names.size() || names[i] != "wall_s") kept += c + ",";
      kept += "\n";
    }
    return kept;
  };
  int differing = 0;
  for (const auto& cmd : commands) {
    const std::string a = run(cmd), b = run(cmd);
    if (a.empty() || a != b) ++differing;
  }
  return {differing == 0, std::to_string(commands.size()) + " commands, " + std::to_string(differing) + " differing"};
}

}  // namespace

int main(int argc, char** argv) {
  std::set<int> known_red;
  for (int i = 1; i < argc; ++i) {
    const std::string arg = argv[i];
    if (arg == "--known-red" && i + 1 < argc) {
      std::stringstream ss(argv[++i]);
      std::string tok;
      while (std::getline(ss, tok, ',')) known_red.insert(std::stoi(tok));
    } else {
      std::fprintf(stderr, "usage: %s [--known-red N[,N...]]\n", argv[0]);
      return 2;
    }
  }

  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
      {"Penrose residuals of NS on n x (n+50)", penrose_residuals_ns},
      {"exact residual recurrences", residual_recurrences},
      {"Neumann schedule equivalence and product counts", schedule_equivalence},
      {"oracle equivalence of all solvers", oracle_equivalence},
      {"RSP monotonicity and contraction rate", rsp_monotone_and_rate},
      {"CGNE one-step case and monotone objective", cgne_one_step},
      {"Lorenz N=50 envelope", lorenz_envelope},
      {"deblurring parity with closed form", deblur_parity},
      {"CUR exactness and completion tail", cur_exactness},
      {"determinism of CLI output", determinism},
  };
  int hard_failures = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const int id = static_cast<int>(i + 1);
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const bool known = known_red.count(id) > 0;
    if (!o.pass && !known) ++hard_failures;
    std::printf("%-4s criterion %2d: %s: %s%s\n", o.pass ? "PASS" : "FAIL", id, criteria[i].first.c_str(),
                o.detail.c_str(), !o.pass && known ? " [known red, see README]" : "");
    std::fflush(stdout);
  }
  return hard_failures == 0 ? 0 : 1;
}
