// Command-line driver: LFA sweeps, solver runs, grid studies and self-checks.
//
// Exit codes: 0 success, 1 computational failure, 2 usage error.

#include <chrono>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"
#include "stmg/experiments.hpp"
#include "stmg/verify.hpp"

namespace {

constexpr int kUsageError = 2;
constexpr int kComputeError = 1;

using json = nlohmann::json;

struct Output {
  std::string path;
  std::ostringstream buffer;

  void flush(const std::string& command, const json& params, double seconds) {
    if (path.empty() || path == "-") {
      std::cout << buffer.str();
      return;
    }
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open " + path + " for writing");
    out << buffer.str();
    stmg::write_manifest(path, command, params, seconds);
  }
};

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Space-time multigrid and local Fourier analysis for linear advection"};
  app.require_subcommand(1);
  int threads = 0;
  app.add_option("--threads", threads, "Worker threads for frequency sweeps (default: STMG_LFA_THREADS or all cores)")
      ->check(CLI::NonNegativeNumber);

  // lfa
  auto* lfa = app.add_subcommand("lfa", "Smoothing and two-grid factors from Fourier symbols");
  std::string lfa_strategy = "semi";
  int lfa_pt = 0;
  std::vector<double> lfa_mu{1, 10, 50, 100, 200, 400, 600, 800};
  int lfa_nx = 32;
  int lfa_slabs = 8;
  double lfa_omega = 0.5;
  int lfa_nu1 = 1;
  int lfa_nu2 = 1;
  std::string lfa_out;
  lfa->add_option("--strategy", lfa_strategy, "Coarsening strategy")->check(CLI::IsMember({"semi", "full"}));
  lfa->add_option("--pt", lfa_pt, "Temporal polynomial degree")->check(CLI::NonNegativeNumber);
  lfa->add_option("--mu-list", lfa_mu, "CFL numbers")->delimiter(',')->check(CLI::PositiveNumber);
  lfa->add_option("--nx", lfa_nx, "Spatial frequency grid size (even)")->check(CLI::PositiveNumber);
  lfa->add_option("--slabs", lfa_slabs, "Temporal frequency grid size (even)")->check(CLI::PositiveNumber);
  lfa->add_option("--omega", lfa_omega, "Damping parameter")->check(CLI::Range(0.0, 2.0));
  lfa->add_option("--nu1", lfa_nu1, "Pre-smoothing steps")->check(CLI::NonNegativeNumber);
  lfa->add_option("--nu2", lfa_nu2, "Post-smoothing steps")->check(CLI::NonNegativeNumber);
  lfa->add_option("--out", lfa_out, "CSV output path (default stdout)");

  // solve
  auto* solve = app.add_subcommand("solve", "Measure the two-grid convergence rate on the manufactured problem");
  stmg::ProblemSpec spec;
  int ny = 0;
  std::string solve_strategy = "semi";
  int iters = 60;
  stmg::MgConfig mg;
  std::string solve_out;
  solve->add_option("--dims", spec.dims, "Spatial dimension")->check(CLI::IsMember({1, 2}));
  solve->add_option("--pt", spec.p_t, "Temporal degree")->check(CLI::NonNegativeNumber);
  solve->add_option("--px", spec.p_x, "Spatial degree")->check(CLI::NonNegativeNumber);
  solve->add_option("--mu", spec.mu, "CFL number")->check(CLI::PositiveNumber);
  solve->add_option("--nx", spec.cells, "Cells per direction")->check(CLI::PositiveNumber);
  solve->add_option("--ny", ny, "Cells in the second direction (2D, must equal --nx)")->check(CLI::PositiveNumber);
  solve->add_option("--slabs", spec.slabs, "Number of space-time slabs")->check(CLI::PositiveNumber);
  solve->add_option("--strategy", solve_strategy, "Coarsening strategy")->check(CLI::IsMember({"semi", "full"}));
  solve->add_option("--iters", iters, "Multigrid iterations")->check(CLI::PositiveNumber);
  solve->add_option("--omega", mg.omega, "Damping parameter")->check(CLI::Range(0.0, 2.0));
  solve->add_option("--nu1", mg.nu1, "Pre-smoothing steps")->check(CLI::NonNegativeNumber);
  solve->add_option("--nu2", mg.nu2, "Post-smoothing steps")->check(CLI::NonNegativeNumber);
  solve->add_option("--out", solve_out, "CSV output path (default stdout)");

  // grid
  auto* grid = app.add_subcommand("grid", "Convergence rate against the number of cells at fixed CFL");
  std::vector<std::string> grid_strategies{"semi", "full"};
  std::vector<int> grid_p{0, 1};
  std::vector<int> grid_nx{32, 64, 128, 256, 512};
  double grid_mu = 600.0;
  int grid_slabs = 32;
  int grid_iters = 60;
  std::string grid_out;
  grid->add_option("--strategy", grid_strategies, "Coarsening strategies")
      ->delimiter(',')
      ->check(CLI::IsMember({"semi", "full"}));
  grid->add_option("--p", grid_p, "Degrees p = p_t = p_x")->delimiter(',')->check(CLI::NonNegativeNumber);
  grid->add_option("--nx-list", grid_nx, "Cell counts")->delimiter(',')->check(CLI::PositiveNumber);
  grid->add_option("--mu", grid_mu, "CFL number")->check(CLI::PositiveNumber);
  grid->add_option("--slabs", grid_slabs, "Number of space-time slabs")->check(CLI::PositiveNumber);
  grid->add_option("--iters", grid_iters, "Multigrid iterations")->check(CLI::PositiveNumber);
  grid->add_option("--out", grid_out, "CSV output path (default stdout)");

  // verify
  auto* verify = app.add_subcommand("verify", "Run the dense oracles and property checks on tiny grids");
  bool as_json = false;
  bool flip = false;
  verify->add_flag("--json", as_json, "Emit machine-readable results");
  verify->add_flag("--flip-coupling-sign", flip, "Negate the temporal coupling (fault injection)")
      ->group("");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : kUsageError;
  }

  try {
    const auto t0 = std::chrono::steady_clock::now();
    if (*lfa) {
      stmg::LfaSweepSpec sweep;
      sweep.strategies = {stmg::parse_coarsening(lfa_strategy)};
      sweep.p_t = {lfa_pt};
      sweep.mu = lfa_mu;
      sweep.nx = {lfa_nx};
      sweep.slabs = lfa_slabs;
      sweep.omega = lfa_omega;
      sweep.nu1 = lfa_nu1;
      sweep.nu2 = lfa_nu2;
      sweep.threads = threads;
      if (lfa_nx % 2 != 0 || lfa_slabs % 2 != 0) {
        std::cerr << "--nx and --slabs must be even\n";
        return kUsageError;
      }
      std::vector<stmg::LfaRow> rows;
      try {
        rows = stmg::run_lfa_sweep(sweep);
      } catch (const std::exception& e) {
        std::cerr << "lfa failed (strategy=" << lfa_strategy << ", p_t=" << lfa_pt << "): " << e.what() << '\n';
        return kComputeError;
      }
      Output out{lfa_out, {}};
      stmg::write_lfa_csv(out.buffer, rows);
      out.flush("lfa", json{{"strategy", lfa_strategy}, {"p_t", lfa_pt}, {"mu", lfa_mu}, {"nx", lfa_nx},
                            {"slabs", lfa_slabs}, {"omega", lfa_omega}, {"nu1", lfa_nu1}, {"nu2", lfa_nu2}},
                seconds_since(t0));
      return 0;
    }
    if (*solve) {
      if (spec.dims == 2 && ny != 0 && ny != spec.cells) {
        std::cerr << "--ny must equal --nx (square grids only)\n";
        return kUsageError;
      }
      mg.strategy = stmg::parse_coarsening(solve_strategy);
      stmg::SolverRun run;
      try {
        run = stmg::run_solver_experiment(spec, mg, iters);
      } catch (const stmg::Diverged& e) {
        std::cerr << "solve diverged at iteration " << e.iteration() << " (ratio " << e.ratio() << ")\n";
        return kComputeError;
      }
      Output out{solve_out, {}};
      stmg::write_rate_csv(out.buffer, run.result);
      out.flush("solve",
                json{{"dims", spec.dims}, {"p_t", spec.p_t}, {"p_x", spec.p_x}, {"mu", spec.mu},
                     {"nx", spec.cells}, {"slabs", spec.slabs}, {"strategy", solve_strategy}, {"iters", iters},
                     {"omega", mg.omega}, {"nu1", mg.nu1}, {"nu2", mg.nu2}, {"initial_guess", "zero"}},
                run.seconds);
      return 0;
    }
    if (*grid) {
      std::vector<stmg::Coarsening> strategies;
      for (const auto& s : grid_strategies) strategies.push_back(stmg::parse_coarsening(s));
      const auto rows = stmg::run_grid_independence(strategies, grid_p, grid_nx, grid_mu, grid_slabs, grid_iters);
      Output out{grid_out, {}};
      stmg::write_grid_csv(out.buffer, rows);
      out.flush("grid",
                json{{"strategy", grid_strategies}, {"p", grid_p}, {"nx", grid_nx}, {"mu", grid_mu},
                     {"slabs", grid_slabs}, {"iters", grid_iters}},
                seconds_since(t0));
      return 0;
    }
    if (*verify) {
      const auto results = stmg::run_verify({flip});
      const stmg::CheckResult* first_failure = nullptr;
      for (const auto& r : results) {
        if (!r.passed && first_failure == nullptr) first_failure = &r;
      }
      if (as_json) {
        json arr = json::array();
        for (const auto& r : results) {
          arr.push_back({{"name", r.name}, {"passed", r.passed}, {"value", r.value}, {"tolerance", r.tolerance},
                         {"seconds", r.seconds}});
        }
        json doc{{"checks", arr}, {"passed", first_failure == nullptr}};
        if (first_failure) doc["first_failure"] = first_failure->name;
        std::cout << doc.dump(2) << '\n';
      } else {
        std::cout << std::left << std::setw(28) << "check" << std::setw(8) << "result" << std::setw(14) << "value"
                  << "tolerance\n";
        for (const auto& r : results) {
          std::cout << std::left << std::setw(28) << r.name << std::setw(8) << (r.passed ? "PASS" : "FAIL")
                    << std::setw(14) << std::setprecision(3) << std::scientific << r.value << r.tolerance << '\n';
        }
        if (first_failure) std::cout << "first failing check: " << first_failure->name << '\n';
      }
      return first_failure ? kComputeError : 0;
    }
  } catch (const std::invalid_argument& e) {
    std::cerr << e.what() << '\n';
    return kUsageError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kComputeError;
  }
  return kUsageError;
}
