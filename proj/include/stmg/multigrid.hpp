#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <vector>

#include "stmg/operators.hpp"

namespace stmg {

enum class Coarsening { semi, full };

const char* to_string(Coarsening c);
Coarsening parse_coarsening(const std::string& name);

/// Local temporal restriction blocks. The coarse element covers two fine
/// elements; R1 acts on the first, R2 on the second. Prolongation blocks are
/// the transposes.
struct TimeTransfer {
  RealMatrix R1;
  RealMatrix R2;
};

/// R_iᵀ = M_τ⁻¹ M̃ⁱ with the cross-mass integrals evaluated by an LGL rule
/// with p_t + 2 nodes.
TimeTransfer build_time_transfer(int p_t);

/// Per-child spatial blocks for agglomerating two cells into one.
/// P_i interpolates the coarse polynomial on child i; R_i = ½ W⁻¹ P_iᵀ W.
/// For degree 0 this is R = ½[1 1], P = [1 1]ᵀ.
struct SpaceTransfer {
  RealMatrix R1, R2;
  RealMatrix P1, P2;
};

SpaceTransfer build_space_transfer(int p_x);

/// Global restriction and prolongation between two levels.
struct GridTransfer {
  SparseMatrix R;
  SparseMatrix P;

  RealVector restrict_vector(const RealVector& fine) const;
  RealVector prolong_vector(const RealVector& coarse) const;
};

GridSpec coarsen(const GridSpec& fine, Coarsening strategy);
GridTransfer build_grid_transfer(const GridSpec& fine, Coarsening strategy);

struct MgConfig {
  double omega = 0.5;
  int nu1 = 1;
  int nu2 = 1;
  Coarsening strategy = Coarsening::semi;
};

/// One damped block Jacobi sweep u + ω D⁻¹(b - L u) with one block per slab.
/// `order` permutes the per-slab updates; the result does not depend on it.
RealVector block_jacobi_sweep(const SpaceTimeSystem& sys, const RealVector& u, const RealVector& b,
                              double omega, std::span<const int> order = {});

/// Forward substitution over the slabs.
RealVector sequential_solve(const SpaceTimeSystem& sys, const RealVector& b);

/// Exact solve on a level: forward substitution, or a global sparse LU when
/// the level is periodic in time. A level periodic in both time and space has
/// constants in its kernel and the LU raises SingularMatrix.
class CoarseSolver {
 public:
  explicit CoarseSolver(const SpaceTimeSystem& sys);
  RealVector solve(const SpaceTimeSystem& sys, const RealVector& b) const;

 private:
  std::shared_ptr<const SlabSolver> global_;
  std::shared_ptr<const SparseMatrix> global_matrix_;
};

RealVector two_grid_cycle(const SpaceTimeSystem& fine, const SpaceTimeSystem& coarse,
                          const CoarseSolver& coarse_solver, const GridTransfer& transfer,
                          const RealVector& u, const RealVector& b, const MgConfig& cfg);

class TwoGridSolver {
 public:
  TwoGridSolver(const GridSpec& fine, const MgConfig& cfg);

  const SpaceTimeSystem& fine() const { return fine_; }
  const SpaceTimeSystem& coarse() const { return coarse_; }
  const GridTransfer& transfer() const { return transfer_; }
  const MgConfig& config() const { return cfg_; }

  RealVector cycle(const RealVector& u, const RealVector& b) const;

 private:
  MgConfig cfg_;
  SpaceTimeSystem fine_;
  SpaceTimeSystem coarse_;
  GridTransfer transfer_;
  CoarseSolver coarse_solver_;
};

struct RateResult {
  std::vector<double> residuals;  // ‖r^i‖₂, i = 0..performed iterations
  std::vector<double> ratios;     // ‖r^i‖₂ / ‖r^{i-1}‖₂
  std::optional<double> rate;
  bool stopped_early = false;
};

inline constexpr double kEarlyStop = 1e-14;
inline constexpr double kDivergenceRatio = 10.0;

/// max_{i=1..iters-1} ‖r^{i+1}‖₂/‖r^i‖₂ starting from u = 0.
///
/// Iteration stops once ‖r‖₂ < 1e-14 ‖r⁰‖₂; the max is then taken over the
/// ratios computed so far (0 if there are none). Without early stop and with
/// fewer than two iterations the rate is empty.
RateResult measure_rate(const std::function<RealVector(const RealVector&)>& step,
                        const std::function<RealVector(const RealVector&)>& residual,
                        Eigen::Index size, int iters = 60);

RateResult measure_rate(const TwoGridSolver& solver, const RealVector& b, int iters = 60);

}  // namespace stmg
