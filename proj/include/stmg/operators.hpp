#pragma once

#include <Eigen/SparseCore>
#include <Eigen/SparseLU>

#include <array>
#include <functional>
#include <memory>

#include "stmg/linalg.hpp"
#include "stmg/quadrature.hpp"

namespace stmg {

using SparseMatrix = Eigen::SparseMatrix<double>;

/// Element matrices of the temporal DG-SEM on one element of length dt.
struct TemporalOps {
  int p_t = 0;
  double dt = 1.0;
  LglRule rule;
  RealMatrix mass;        // M_τ = dt/2 diag(w)
  RealMatrix stiffness;   // K_τ = E - D_τᵀ M_τ
  RealMatrix coupling;    // C_τ, the upwind link to the previous element
  RealMatrix end;         // E, projector on the last node
  RealMatrix derivative;  // D_τ = (2/dt) ℓ'_j(τ_i)

  int nodes() const { return p_t + 1; }
};

TemporalOps temporal_operators(int p_t, double dt);

enum class Boundary { periodic, inflow };

/// Upwind DG-SEM advection operator on a uniform grid of [0, cells·dx]^dims.
///
/// degree 0 is the first order finite volume scheme. Unknowns are ordered
/// cell-major then node within each direction; in 2D the first direction is
/// the slower index.
struct SpatialOps {
  int dims = 1;
  int degree = 0;
  int cells = 0;
  double dx = 1.0;
  double speed = 1.0;
  Boundary boundary = Boundary::periodic;
  LglRule rule;
  SparseMatrix K;

  int nodes_per_cell() const { return degree + 1; }
  int dofs_1d() const { return cells * nodes_per_cell(); }
  int dofs() const { return dims == 1 ? dofs_1d() : dofs_1d() * dofs_1d(); }
  /// Physical coordinate of 1D unknown i.
  double node_coordinate(int i) const;
};

SpatialOps spatial_fv_operator(int cells, double dx, double speed, Boundary boundary);

SpatialOps spatial_dgsem_operator(int degree, int cells, double dx, double speed, int dims,
                                  Boundary boundary);

/// The 1D DG-SEM operator, returned as a dense cells·(p+1) square matrix.
RealMatrix dgsem_matrix_1d(int degree, int cells, double dx, double speed, Boundary boundary);

/// u(x, t) with x = (x1, x2); x2 is ignored in 1D.
using ScalarField = std::function<double(const std::array<double, 2>&, double)>;

/// Cached sparse LU factorization of a slab block.
class SlabSolver {
 public:
  explicit SlabSolver(const SparseMatrix& a);
  RealVector solve(const RealVector& b) const;

 private:
  Eigen::SparseLU<SparseMatrix, Eigen::COLAMDOrdering<int>> lu_;
};

/// Block lower-bidiagonal space-time system, optionally with a periodic
/// corner block coupling the last slab back into the first.
///
/// Flat index of (slab n, spatial unknown j, time node k) is
/// (n·spatial_dofs + j)·N_t + k.
struct SpaceTimeSystem {
  SparseMatrix A;
  SparseMatrix B;
  int slabs = 0;
  int slab_size = 0;
  bool periodic_in_time = false;
  RealVector rhs;
  std::shared_ptr<const SlabSolver> solver;

  Eigen::Index size() const { return static_cast<Eigen::Index>(slabs) * slab_size; }
  RealVector apply(const RealVector& u) const;
  RealVector residual(const RealVector& u, const RealVector& b) const;
  /// Full matrix as a sparse matrix; used by coarse solves of periodic systems and the oracles.
  SparseMatrix assemble_global() const;
};

SpaceTimeSystem assemble_system(const TemporalOps& t_ops, const SpatialOps& s_ops, int slabs,
                                bool periodic_in_time, const ScalarField& data = {});

/// Everything needed to rebuild a level of the space-time hierarchy.
struct GridSpec {
  int dims = 1;
  int p_t = 0;
  int p_x = 0;
  int cells = 2;
  double dx = 0.5;
  double speed = 1.0;
  Boundary boundary = Boundary::periodic;
  int slabs = 2;
  double dt = 1.0;
  bool periodic_in_time = false;
  ScalarField data;

  double cfl() const { return speed * dt / dx; }
  int spatial_dofs() const;
  Eigen::Index size() const { return static_cast<Eigen::Index>(slabs) * spatial_dofs() * (p_t + 1); }
};

SpaceTimeSystem assemble(const GridSpec& spec);

/// Nodal interpolant of `field` on every space-time node of `spec`.
RealVector interpolate(const GridSpec& spec, const ScalarField& field);

}  // namespace stmg
