#pragma once

// Dense reference constructions. These materialize full matrices and are
// meant for tiny grids only (tests and the verify command).

#include <vector>

#include "stmg/lfa.hpp"

namespace stmg::oracle {

RealMatrix to_dense(const SparseMatrix& m);
RealMatrix to_dense(const SpaceTimeSystem& sys);

/// Periodic-in-time, periodic-in-space FV space-time operator built by dense
/// Kronecker products; dt = 1 so the spatial coefficient is μ.
RealMatrix periodic_operator(int p_t, double dt, double coefficient, int nx, int slabs);

/// Block diagonal of `l` with blocks of size `block`.
RealMatrix block_diagonal_part(const RealMatrix& l, Eigen::Index block);

/// I - ω D⁻¹ L.
RealMatrix smoother_matrix(const RealMatrix& l, const RealMatrix& d, double omega);

struct DenseTransfer {
  RealMatrix R;
  RealMatrix P;
};

/// Transfers for a periodic FV grid with `nx` cells and `slabs` slabs.
DenseTransfer transfer_matrices(int p_t, int nx, int slabs, Coarsening strategy);

/// S^ν2 (I - P Lc⁺ R L) S^ν1 with the pseudo-inverse of the coarse operator.
RealMatrix twogrid_matrix(const RealMatrix& l, const RealMatrix& s, const RealMatrix& lc_pinv,
                          const DenseTransfer& t, int nu1, int nu2);

RealMatrix pseudo_inverse(const RealMatrix& m, double threshold = 1e-10);

struct TwoGridComparison {
  double dense_radius = 0.0;
  double symbol_radius = 0.0;
  std::vector<FrequencyPair> dense_excluded;
  std::vector<FrequencyPair> symbol_excluded;
  bool same_exclusions = false;
};

/// Spectral radius of the dense periodic two-grid matrix restricted to the
/// non-excluded harmonic groups, against the maximum over Fourier symbols.
TwoGridComparison compare_twogrid(const LfaConfig& cfg, int nx, int slabs);

/// Max over all grid frequencies of the difference between the symbol L̂ applied
/// to a sampled mode and the dense periodic operator applied to that mode.
double symbol_consistency_error(int p_t, double mu, int nx, int slabs);

}  // namespace stmg::oracle
