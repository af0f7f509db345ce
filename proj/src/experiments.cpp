#include "stmg/experiments.hpp"

#include <charconv>
#include <chrono>
#include <cmath>
#include <ctime>
#include <fstream>
#include <numbers>
#include <ostream>

namespace stmg {

namespace {

double elapsed_since(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

}  // namespace

GridSpec ProblemSpec::grid() const {
  if (dims != 1 && dims != 2) throw std::invalid_argument("ProblemSpec: dims must be 1 or 2");
  GridSpec g;
  g.dims = dims;
  g.p_t = p_t;
  g.p_x = p_x;
  g.cells = cells;
  g.dx = dx();
  g.speed = speed;
  g.boundary = Boundary::inflow;
  g.slabs = slabs;
  g.dt = dt();
  g.periodic_in_time = false;
  g.data = manufactured_solution(dims);
  return g;
}

double manufactured_value(int dims, const std::array<double, 2>& x, double t) {
  const double u = std::sin(std::numbers::pi * (x[0] - t));
  return dims == 1 ? u : u * std::sin(std::numbers::pi * (x[1] - t));
}

ScalarField manufactured_solution(int dims) {
  return [dims](const std::array<double, 2>& x, double t) { return manufactured_value(dims, x, t); };
}

SolverRun run_solver_experiment(const ProblemSpec& spec, const MgConfig& cfg, int iters) {
  const auto start = std::chrono::steady_clock::now();
  const TwoGridSolver solver(spec.grid(), cfg);
  SolverRun run;
  run.result = measure_rate(solver, solver.fine().rhs, iters);
  run.seconds = elapsed_since(start);
  return run;
}

double discretization_error(const ProblemSpec& spec) {
  const GridSpec g = spec.grid();
  const SpaceTimeSystem sys = assemble(g);
  const RealVector u = sequential_solve(sys, sys.rhs);
  const RealVector exact = interpolate(g, g.data);
  const LglRule rt = lgl_rule(g.p_t + 1);
  const LglRule rx = lgl_rule(g.p_x + 1);
  const int nt = rt.n;
  const int n1 = g.cells * rx.n;
  const int n2 = g.dims == 1 ? 1 : n1;
  double sum = 0.0;
  Eigen::Index idx = 0;
  for (int n = 0; n < g.slabs; ++n) {
    for (int i1 = 0; i1 < n1; ++i1) {
      for (int i2 = 0; i2 < n2; ++i2) {
        double wx = 0.5 * g.dx * rx.weights(i1 % rx.n);
        if (g.dims == 2) wx *= 0.5 * g.dx * rx.weights(i2 % rx.n);
        for (int k = 0; k < nt; ++k, ++idx) {
          const double e = u(idx) - exact(idx);
          sum += wx * 0.5 * g.dt * rt.weights(k) * e * e;
        }
      }
    }
  }
  return std::sqrt(sum);
}

std::vector<LfaRow> run_lfa_sweep(const LfaSweepSpec& spec) {
  std::vector<LfaRow> rows;
  for (const Coarsening strategy : spec.strategies) {
    for (const int p_t : spec.p_t) {
      for (const int nx : spec.nx) {
        for (const double mu : spec.mu) {
          LfaConfig cfg;
          cfg.mu = mu;
          cfg.p_t = p_t;
          cfg.omega = spec.omega;
          cfg.nu1 = spec.nu1;
          cfg.nu2 = spec.nu2;
          cfg.strategy = strategy;
          const FrequencyGrid grid{nx, spec.slabs};
          const FactorResult tg = twogrid_factor(cfg, grid, spec.threads);
          const FactorResult sm = smoothing_factor(cfg, grid, spec.threads);
          LfaRow row;
          row.strategy = strategy;
          row.p_t = p_t;
          row.mu = mu;
          row.omega = spec.omega;
          row.nu1 = spec.nu1;
          row.nu2 = spec.nu2;
          row.factor = tg.factor;
          row.argmax = tg.argmax;
          row.excluded = tg.excluded;
          row.nx = nx;
          row.slabs = spec.slabs;
          row.smoothing = sm.factor;
          rows.push_back(row);
        }
      }
    }
  }
  return rows;
}

std::vector<GridIndependenceRow> run_grid_independence(const std::vector<Coarsening>& strategies,
                                                       const std::vector<int>& degrees,
                                                       const std::vector<int>& cells, double mu, int slabs,
                                                       int iters) {
  std::vector<GridIndependenceRow> rows;
  for (const Coarsening strategy : strategies) {
    for (const int p : degrees) {
      for (const int nx : cells) {
        ProblemSpec spec;
        spec.p_t = p;
        spec.p_x = p;
        spec.cells = nx;
        spec.slabs = slabs;
        spec.mu = mu;
        MgConfig cfg;
        cfg.strategy = strategy;
        rows.push_back({strategy, p, nx, run_solver_experiment(spec, cfg, iters).result.rate});
      }
    }
  }
  return rows;
}

std::string format_double(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

void write_lfa_csv(std::ostream& os, const std::vector<LfaRow>& rows) {
  os << "strategy,p_t,mu,omega_t,nu1,nu2,factor,argmax_theta_x,argmax_theta_t,excluded_count,nx,slabs,"
        "smoothing_factor\n";
  for (const auto& r : rows) {
    os << to_string(r.strategy) << ',' << r.p_t << ',' << format_double(r.mu) << ',' << format_double(r.omega)
       << ',' << r.nu1 << ',' << r.nu2 << ',' << format_double(r.factor) << ','
       << format_double(r.argmax.theta_x) << ',' << format_double(r.argmax.theta_t) << ',' << r.excluded << ','
       << r.nx << ',' << r.slabs << ',' << format_double(r.smoothing) << '\n';
  }
}

void write_rate_csv(std::ostream& os, const RateResult& run) {
  os << "iteration,residual_norm,ratio,rate\n";
  for (std::size_t i = 0; i < run.ratios.size(); ++i) {
    os << i + 1 << ',' << format_double(run.residuals[i + 1]) << ',' << format_double(run.ratios[i]) << ',';
    if (i + 1 == run.ratios.size() && run.rate) os << format_double(*run.rate);
    os << '\n';
  }
}

void write_grid_csv(std::ostream& os, const std::vector<GridIndependenceRow>& rows) {
  os << "strategy,p,cells,rate\n";
  for (const auto& r : rows) {
    os << to_string(r.strategy) << ',' << r.p << ',' << r.cells << ',';
    if (r.rate) os << format_double(*r.rate);
    os << '\n';
  }
}

void write_manifest(const std::string& csv_path, const std::string& command, const nlohmann::json& params,
                    double seconds) {
  const std::time_t now = std::time(nullptr);
  char stamp[32];
  std::strftime(stamp, sizeof(stamp), "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&now));
  nlohmann::json manifest;
  manifest["command"] = command;
  manifest["parameters"] = params;
  manifest["timestamp"] = stamp;
  manifest["duration_seconds"] = seconds;
  manifest["outputs"] = nlohmann::json::array({csv_path});
  manifest["eigen_version"] = std::to_string(EIGEN_WORLD_VERSION) + "." + std::to_string(EIGEN_MAJOR_VERSION) +
                              "." + std::to_string(EIGEN_MINOR_VERSION);
  std::ofstream out(csv_path + ".manifest.json");
  if (!out) throw std::runtime_error("cannot write manifest for " + csv_path);
  out << manifest.dump(2) << '\n';
}

}  // namespace stmg
