#pragma once

#include <string>
#include <vector>

namespace stmg {

struct VerifyOptions {
  /// Fault injection: negate the temporal coupling C_τ.
  bool flip_coupling_sign = false;
};

struct CheckResult {
  std::string name;
  bool passed = false;
  double value = 0.0;
  double tolerance = 0.0;
  double seconds = 0.0;
};

/// Runs the self-checks in a fixed order: Lobatto IIIC equivalence, the element
/// spectrum, symbol consistency, the dense two-grid oracle, DFT, transfers,
/// quadrature exactness and A-stability.
std::vector<CheckResult> run_verify(const VerifyOptions& options = {});

double lobatto_iiic_error(bool flip_coupling_sign = false);
double element_spectrum_error(bool flip_coupling_sign = false);
double dft_roundtrip_error();
double transfer_transpose_error();
double quadrature_exactness_error();
/// max |R(iy)| - 1 over sampled y and p_t ∈ {0,1,2,3}.
double a_stability_excess();

}  // namespace stmg
