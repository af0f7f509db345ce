#include "stmg/verify.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <functional>
#include <random>

#include "stmg/lfa.hpp"
#include "stmg/oracles.hpp"

namespace stmg {

namespace {

const std::vector<complex>& element_samples() {
  static const std::vector<complex> samples{{0.1, 0.0}, {1.0, 0.0}, {10.0, 0.0}, {1.0, 1.0}};
  return samples;
}

TemporalOps element(int p_t, bool flip) {
  TemporalOps t = temporal_operators(p_t, 1.0);
  if (flip) t.coupling = -t.coupling;
  return t;
}

CheckResult timed(const std::string& name, double tolerance, const std::function<double()>& fn) {
  const auto start = std::chrono::steady_clock::now();
  CheckResult r;
  r.name = name;
  r.tolerance = tolerance;
  try {
    r.value = fn();
    r.passed = std::isfinite(r.value) && r.value <= tolerance;
  } catch (const std::exception&) {
    r.value = std::numeric_limits<double>::infinity();
    r.passed = false;
  }
  r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return r;
}

}  // namespace

double lobatto_iiic_error(bool flip_coupling_sign) {
  double err = 0.0;
  for (int p_t = 1; p_t <= 3; ++p_t) {
    const TemporalOps t = element(p_t, flip_coupling_sign);
    const RationalPoly r = stability_function(p_t);
    const int n = t.nodes();
    ComplexVector prev = ComplexVector::Zero(n);
    prev(n - 1) = 1.0;
    for (const complex z : element_samples()) {
      const ComplexMatrix a = t.stiffness.cast<complex>() + z * t.mass.cast<complex>();
      const ComplexVector u = lu_solve(a, ComplexVector(t.coupling.cast<complex>() * prev));
      err = std::max(err, std::abs(u(n - 1) - r(-z)));
    }
  }
  return err;
}

double element_spectrum_error(bool flip_coupling_sign) {
  double err = 0.0;
  for (int p_t = 1; p_t <= 3; ++p_t) {
    const TemporalOps t = element(p_t, flip_coupling_sign);
    const RationalPoly r = stability_function(p_t);
    for (const complex z : element_samples()) {
      const ComplexMatrix a = t.stiffness.cast<complex>() + z * t.mass.cast<complex>();
      ComplexVector ev = eigenvalues(lu_solve(a, t.coupling.cast<complex>()));
      std::sort(ev.begin(), ev.end(), [](const complex& x, const complex& y) { return std::abs(x) < std::abs(y); });
      for (Eigen::Index i = 0; i + 1 < ev.size(); ++i) err = std::max(err, std::abs(ev(i)));
      err = std::max(err, std::abs(ev(ev.size() - 1) - r(-z)));
    }
  }
  return err;
}

double dft_roundtrip_error() {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  double err = 0.0;
  for (const int nodes : {1, 2}) {
    const FrequencyGrid grid{8, 4};
    RealVector u(static_cast<Eigen::Index>(grid.nx) * grid.nt * nodes);
    for (auto& v : u) v = dist(rng);
    const DftReport rep = dft_verify(u, grid, nodes);
    err = std::max({err, rep.reconstruction_error, rep.shifting_error, rep.regrouping_error});
  }
  return err;
}

double transfer_transpose_error() {
  double err = 0.0;
  for (int p = 0; p <= 2; ++p) {
    GridSpec g;
    g.p_t = p;
    g.cells = 8;
    g.dx = 1.0 / 8;
    g.slabs = 4;
    const GridTransfer semi = build_grid_transfer(g, Coarsening::semi);
    err = std::max(err, oracle::to_dense(SparseMatrix(semi.P - SparseMatrix(semi.R.transpose()))).cwiseAbs().maxCoeff());
    const GridTransfer full = build_grid_transfer(g, Coarsening::full);
    const SparseMatrix two_rt = 2.0 * SparseMatrix(full.R.transpose());
    err = std::max(err, oracle::to_dense(SparseMatrix(full.P - two_rt)).cwiseAbs().maxCoeff());
  }
  return err;
}

double quadrature_exactness_error() {
  double err = 0.0;
  for (int n = 2; n <= 10; ++n) {
    const LglRule rule = lgl_rule(n);
    for (int d = 0; d <= 2 * n - 3; ++d) {
      const double exact = d % 2 == 0 ? 2.0 / (d + 1) : 0.0;
      double q = 0.0;
      for (int i = 0; i < n; ++i) q += rule.weights(i) * std::pow(rule.nodes(i), d);
      err = std::max(err, std::abs(q - exact));
    }
  }
  return err;
}

double a_stability_excess() {
  double worst = -1.0;
  for (int p_t = 0; p_t <= 3; ++p_t) {
    const RationalPoly r = stability_function(p_t);
    for (int k = -10000; k <= 10000; ++k) {
      const complex z(0.0, 0.01 * k);
      worst = std::max(worst, std::abs(r(z)) - 1.0);
    }
  }
  return worst;
}

std::vector<CheckResult> run_verify(const VerifyOptions& options) {
  std::vector<CheckResult> out;
  out.push_back(timed("lobatto_iiic_equivalence", 1e-11,
                      [&] { return lobatto_iiic_error(options.flip_coupling_sign); }));
  out.push_back(timed("element_spectrum", 1e-9, [&] { return element_spectrum_error(options.flip_coupling_sign); }));
  out.push_back(timed("symbol_consistency", 1e-12, [] {
    double e = 0.0;
    for (const int p_t : {0, 1}) e = std::max(e, oracle::symbol_consistency_error(p_t, 1.0, 4, 4));
    return e;
  }));
  out.push_back(timed("twogrid_symbol_vs_dense", 1e-6, [] {
    double e = 0.0;
    for (const int p_t : {0, 1}) {
      for (const Coarsening s : {Coarsening::semi, Coarsening::full}) {
        LfaConfig cfg;
        cfg.mu = 1.0;
        cfg.p_t = p_t;
        cfg.strategy = s;
        const auto cmp = oracle::compare_twogrid(cfg, 4, 4);
        if (!cmp.same_exclusions) return std::numeric_limits<double>::infinity();
        e = std::max(e, std::abs(cmp.dense_radius - cmp.symbol_radius));
      }
    }
    return e;
  }));
  out.push_back(timed("dft_roundtrip", 1e-12, dft_roundtrip_error));
  out.push_back(timed("transfer_transpose", 0.0, transfer_transpose_error));
  out.push_back(timed("lgl_exactness", 1e-12, quadrature_exactness_error));
  out.push_back(timed("a_stability", 1e-12, a_stability_excess));
  return out;
}

}  // namespace stmg
