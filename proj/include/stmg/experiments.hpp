#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "json.hpp"
#include "stmg/lfa.hpp"
#include "stmg/multigrid.hpp"

namespace stmg {

/// Advection on the unit interval or square with exact solution
/// sin(π(x-t)) (1D) or sin(π(x1-t)) sin(π(x2-t)) (2D), speed 1 per direction.
/// Δx = 1/cells, Δt = μΔx/a and T = slabs·μ·Δx.
struct ProblemSpec {
  int dims = 1;
  int p_t = 0;
  int p_x = 0;
  int cells = 1024;
  int slabs = 8;
  double mu = 600.0;
  double speed = 1.0;

  double dx() const { return 1.0 / cells; }
  double dt() const { return mu * dx() / speed; }
  double final_time() const { return slabs * mu * dx(); }
  GridSpec grid() const;
};

double manufactured_value(int dims, const std::array<double, 2>& x, double t);
ScalarField manufactured_solution(int dims);

struct SolverRun {
  RateResult result;
  double seconds = 0.0;
};

SolverRun run_solver_experiment(const ProblemSpec& spec, const MgConfig& cfg, int iters = 60);

/// Space-time L² error of the sequential solve against the exact solution,
/// evaluated with the collocation quadrature.
double discretization_error(const ProblemSpec& spec);

struct LfaSweepSpec {
  std::vector<Coarsening> strategies{Coarsening::semi, Coarsening::full};
  std::vector<int> p_t{0, 1};
  std::vector<double> mu{1, 10, 50, 100, 200, 400, 600, 800};
  std::vector<int> nx{32, 1024};
  int slabs = 8;
  double omega = 0.5;
  int nu1 = 1;
  int nu2 = 1;
  int threads = 0;
};

struct LfaRow {
  Coarsening strategy = Coarsening::semi;
  int p_t = 0;
  double mu = 0.0;
  double omega = 0.0;
  int nu1 = 0;
  int nu2 = 0;
  double factor = 0.0;
  FrequencyPair argmax;
  int excluded = 0;
  int nx = 0;
  int slabs = 0;
  double smoothing = 0.0;
};

std::vector<LfaRow> run_lfa_sweep(const LfaSweepSpec& spec);

struct GridIndependenceRow {
  Coarsening strategy = Coarsening::semi;
  int p = 0;
  int cells = 0;
  std::optional<double> rate;
};

std::vector<GridIndependenceRow> run_grid_independence(const std::vector<Coarsening>& strategies,
                                                       const std::vector<int>& degrees,
                                                       const std::vector<int>& cells, double mu = 600.0,
                                                       int slabs = 32, int iters = 60);

/// Shortest representation that reads back to the same double.
std::string format_double(double v);

void write_lfa_csv(std::ostream& os, const std::vector<LfaRow>& rows);
void write_rate_csv(std::ostream& os, const RateResult& run);
void write_grid_csv(std::ostream& os, const std::vector<GridIndependenceRow>& rows);

/// Writes `<csv_path>.manifest.json` next to an emitted CSV file.
void write_manifest(const std::string& csv_path, const std::string& command, const nlohmann::json& params,
                    double seconds);

}  // namespace stmg
