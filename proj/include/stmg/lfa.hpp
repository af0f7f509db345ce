#pragma once

#include <vector>

#include "stmg/multigrid.hpp"
#include "stmg/operators.hpp"

namespace stmg {

struct FrequencyPair {
  double theta_x = 0.0;
  double theta_t = 0.0;
};

/// γ(θ) = θ + π for θ < 0, θ - π otherwise.
double shift(double theta);

/// The four harmonics (θx,θt), (γθx,θt), (θx,γθt), (γθx,γθt).
std::array<FrequencyPair, 4> harmonics(const FrequencyPair& f);

/// Discrete frequencies 2kπ/N in (-π, π] for the spatial and temporal directions.
struct FrequencyGrid {
  int nx = 32;
  int nt = 8;

  static std::vector<double> thetas(int n);
  static bool is_low(double theta);
  /// Low for semi: θt low. Low for full: both low.
  static bool is_low(const FrequencyPair& f, Coarsening strategy);

  std::vector<FrequencyPair> all() const;
  std::vector<FrequencyPair> low(Coarsening strategy) const;
  /// Low in both directions; representatives of the four-harmonic groups.
  std::vector<FrequencyPair> low_groups() const;
  std::vector<FrequencyPair> high(Coarsening strategy) const;
};

struct LfaConfig {
  double mu = 800.0;
  int p_t = 0;
  double omega = 0.5;
  int nu1 = 1;
  int nu2 = 1;
  Coarsening strategy = Coarsening::semi;
  double sing_tol = 1e-10;
  bool coarse_correction = true;
};

/// True when |det x| < tol · (max |x_ij|)^n.
bool is_singular_symbol(const ComplexMatrix& x, double tol);

/// -e^{-iθt} C + K + (μ/Δt)(1 - e^{-iθx}) M for the given element matrices.
ComplexMatrix symbol_L(const FrequencyPair& f, double mu, const TemporalOps& t_ops);

/// The block Jacobi diagonal K + (μ/Δt)(1 - e^{-iθx}) M.
ComplexMatrix symbol_jacobi_block(double theta_x, double mu, const TemporalOps& t_ops);

/// (1-ω) I + ω e^{-iθt} Â⁻¹ C. Throws SingularSymbol when Â is singular.
ComplexMatrix symbol_S(const FrequencyPair& f, const LfaConfig& cfg, const TemporalOps& t_ops);

struct TransferSymbols {
  ComplexMatrix R_time;
  ComplexMatrix P_time;
  complex R_space;
  complex P_space;
};

TransferSymbols symbols_transfer(const FrequencyPair& f, const TimeTransfer& transfer);

/// Precomputed element matrices for a fine/coarse pair.
struct LfaContext {
  LfaConfig cfg;
  TemporalOps fine;
  TemporalOps coarse;
  TimeTransfer transfer;
  double coarse_mu = 0.0;  // μ entering the coarse symbol with the coarse Δt
};

LfaContext make_context(const LfaConfig& cfg);

/// Two-grid symbol over the four harmonics of a low frequency (4N_t square).
/// Throws ExcludedFrequency when a symbol that must be inverted is singular.
ComplexMatrix symbol_twogrid(const FrequencyPair& f, const LfaContext& ctx);

struct FactorResult {
  double factor = 0.0;
  FrequencyPair argmax;
  int excluded = 0;
  int evaluated = 0;
};

/// Max ρ(Ŝ) over the strategy's high frequencies.
FactorResult smoothing_factor(const LfaConfig& cfg, const FrequencyGrid& grid, int threads = 0);

struct DampingResult {
  double omega = 0.0;
  double factor = 0.0;
  FrequencyPair worst;
};

/// Grid search ω ∈ {0.01, ..., 1.00} minimizing the smoothing factor.
DampingResult optimal_damping(const LfaConfig& cfg, const FrequencyGrid& grid, int threads = 0);

/// Max ρ(M̂) over the low frequency groups, skipping excluded frequencies.
FactorResult twogrid_factor(const LfaConfig& cfg, const FrequencyGrid& grid, int threads = 0);

struct DftReport {
  double reconstruction_error = 0.0;
  double shifting_error = 0.0;
  double regrouping_error = 0.0;
};

/// Fourier decomposition of a vector laid out as (slab, cell, node) with
/// `grid.nt` slabs, `grid.nx` cells and `nodes` values per cell.
DftReport dft_verify(const RealVector& u, const FrequencyGrid& grid, int nodes);

/// Coefficients û(θx, θt) ∈ C^nodes for every pair of grid.all(), in that order.
std::vector<ComplexVector> dft_coefficients(const RealVector& u, const FrequencyGrid& grid, int nodes);

/// Number of worker threads: `requested` if positive, else STMG_LFA_THREADS, else hardware.
int resolve_threads(int requested);

}  // namespace stmg
