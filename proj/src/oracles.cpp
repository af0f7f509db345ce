#include "stmg/oracles.hpp"

#include <cmath>

namespace stmg::oracle {

namespace {

complex expi(double theta) { return std::polar(1.0, theta); }

RealMatrix periodic_fv(int nx, double coefficient) {
  RealMatrix k = coefficient * RealMatrix::Identity(nx, nx);
  for (int j = 0; j < nx; ++j) k(j, (j + nx - 1) % nx) -= coefficient;
  return k;
}

// Columns are normalized Fourier modes e^{i((j+1)θx + (n+1)θt)} placed on time node l,
// one column per (frequency, node).
ComplexMatrix fourier_columns(const std::vector<FrequencyPair>& freqs, int nx, int slabs, int nodes) {
  const Eigen::Index size = static_cast<Eigen::Index>(nx) * slabs * nodes;
  ComplexMatrix q = ComplexMatrix::Zero(size, static_cast<Eigen::Index>(freqs.size()) * nodes);
  const double scale = 1.0 / std::sqrt(static_cast<double>(nx) * slabs);
  for (std::size_t f = 0; f < freqs.size(); ++f) {
    for (int n = 0; n < slabs; ++n) {
      for (int j = 0; j < nx; ++j) {
        const complex phase = scale * expi((j + 1) * freqs[f].theta_x + (n + 1) * freqs[f].theta_t);
        for (int l = 0; l < nodes; ++l) {
          q((static_cast<Eigen::Index>(n) * nx + j) * nodes + l, static_cast<Eigen::Index>(f) * nodes + l) = phase;
        }
      }
    }
  }
  return q;
}

bool numerically_singular(const ComplexMatrix& m, double scale) {
  Eigen::JacobiSVD<ComplexMatrix> svd(m);
  const auto& s = svd.singularValues();
  return s.size() == 0 || s(s.size() - 1) < 1e-10 * scale;
}

// Restriction of `op` (acting on a grid of nx × slabs) to the modes `freqs`, split into
// nodes × nodes diagonal blocks; true when any block is singular.
bool any_singular_block(const RealMatrix& op, const std::vector<FrequencyPair>& freqs, int nx, int slabs,
                        int nodes) {
  const ComplexMatrix q = fourier_columns(freqs, nx, slabs, nodes);
  const ComplexMatrix r = q.adjoint() * op.cast<complex>() * q;
  const double scale = op.cwiseAbs().maxCoeff();
  for (std::size_t f = 0; f < freqs.size(); ++f) {
    const Eigen::Index o = static_cast<Eigen::Index>(f) * nodes;
    if (numerically_singular(r.block(o, o, nodes, nodes), scale)) return true;
  }
  return false;
}

}  // namespace

RealMatrix to_dense(const SparseMatrix& m) { return RealMatrix(m); }

RealMatrix to_dense(const SpaceTimeSystem& sys) {
  const Eigen::Index m = sys.slab_size;
  const RealMatrix a(sys.A);
  const RealMatrix b(sys.B);
  RealMatrix out = RealMatrix::Zero(sys.size(), sys.size());
  for (int n = 0; n < sys.slabs; ++n) {
    out.block(n * m, n * m, m, m) = a;
    if (n > 0) out.block(n * m, (n - 1) * m, m, m) += b;
  }
  if (sys.periodic_in_time) out.block(0, (sys.slabs - 1) * m, m, m) += b;
  return out;
}

RealMatrix periodic_operator(int p_t, double dt, double coefficient, int nx, int slabs) {
  const TemporalOps t = temporal_operators(p_t, dt);
  const RealMatrix id = RealMatrix::Identity(nx, nx);
  const RealMatrix a = kron(id, t.stiffness) + kron(periodic_fv(nx, coefficient), t.mass);
  const RealMatrix b = -kron(id, t.coupling);
  RealMatrix shift = RealMatrix::Zero(slabs, slabs);
  for (int n = 0; n < slabs; ++n) shift(n, (n + slabs - 1) % slabs) = 1.0;
  return kron(RealMatrix(RealMatrix::Identity(slabs, slabs)), a) + kron(shift, b);
}

RealMatrix block_diagonal_part(const RealMatrix& l, Eigen::Index block) {
  RealMatrix d = RealMatrix::Zero(l.rows(), l.cols());
  for (Eigen::Index o = 0; o < l.rows(); o += block) d.block(o, o, block, block) = l.block(o, o, block, block);
  return d;
}

RealMatrix smoother_matrix(const RealMatrix& l, const RealMatrix& d, double omega) {
  return RealMatrix::Identity(l.rows(), l.cols()) - omega * lu_solve(d, l);
}

DenseTransfer transfer_matrices(int p_t, int nx, int slabs, Coarsening strategy) {
  if (slabs % 2 != 0 || (strategy == Coarsening::full && nx % 2 != 0)) {
    throw OddDimension("transfer_matrices: odd extent");
  }
  const int n = p_t + 1;
  const TimeTransfer tt = build_time_transfer(p_t);
  const int cslabs = slabs / 2;
  RealMatrix rt = RealMatrix::Zero(cslabs * n, slabs * n);
  for (int c = 0; c < cslabs; ++c) {
    rt.block(c * n, 2 * c * n, n, n) = tt.R1;
    rt.block(c * n, (2 * c + 1) * n, n, n) = tt.R2;
  }
  const int cnx = strategy == Coarsening::full ? nx / 2 : nx;
  RealMatrix rx = RealMatrix::Zero(cnx, nx);
  RealMatrix px = RealMatrix::Zero(nx, cnx);
  if (strategy == Coarsening::full) {
    for (int j = 0; j < cnx; ++j) rx(j, 2 * j) = rx(j, 2 * j + 1) = 0.5;
    px = 2.0 * rx.transpose();
  } else {
    rx.setIdentity();
    px.setIdentity();
  }
  const RealMatrix pt = rt.transpose();
  DenseTransfer out;
  out.R = RealMatrix::Zero(static_cast<Eigen::Index>(cslabs) * cnx * n, static_cast<Eigen::Index>(slabs) * nx * n);
  out.P = RealMatrix::Zero(out.R.cols(), out.R.rows());
  for (int cs = 0; cs < cslabs; ++cs) {
    for (int fs = 0; fs < slabs; ++fs) {
      for (int cx = 0; cx < cnx; ++cx) {
        for (int fx = 0; fx < nx; ++fx) {
          for (int i = 0; i < n; ++i) {
            for (int k = 0; k < n; ++k) {
              const Eigen::Index ci = (static_cast<Eigen::Index>(cs) * cnx + cx) * n + i;
              const Eigen::Index fi = (static_cast<Eigen::Index>(fs) * nx + fx) * n + k;
              out.R(ci, fi) = rx(cx, fx) * rt(cs * n + i, fs * n + k);
              out.P(fi, ci) = px(fx, cx) * pt(fs * n + k, cs * n + i);
            }
          }
        }
      }
    }
  }
  return out;
}

RealMatrix pseudo_inverse(const RealMatrix& m, double threshold) {
  Eigen::CompleteOrthogonalDecomposition<RealMatrix> cod;
  cod.setThreshold(threshold);
  cod.compute(m);
  return cod.pseudoInverse();
}

RealMatrix twogrid_matrix(const RealMatrix& l, const RealMatrix& s, const RealMatrix& lc_pinv,
                          const DenseTransfer& t, int nu1, int nu2) {
  const RealMatrix cgc = RealMatrix::Identity(l.rows(), l.cols()) - t.P * lc_pinv * t.R * l;
  return matrix_power(s, nu2) * cgc * matrix_power(s, nu1);
}

TwoGridComparison compare_twogrid(const LfaConfig& cfg, int nx, int slabs) {
  const int n = cfg.p_t + 1;
  const RealMatrix l = periodic_operator(cfg.p_t, 1.0, cfg.mu, nx, slabs);
  const RealMatrix d = block_diagonal_part(l, static_cast<Eigen::Index>(nx) * n);
  const RealMatrix s = smoother_matrix(l, d, cfg.omega);
  const bool full = cfg.strategy == Coarsening::full;
  const int cnx = full ? nx / 2 : nx;
  // Coarse spatial coefficient a/Δx_c: unchanged for semi, halved for full.
  const double coarse_coefficient = full ? 0.5 * cfg.mu : cfg.mu;
  const RealMatrix lc = periodic_operator(cfg.p_t, 2.0, coarse_coefficient, cnx, slabs / 2);
  const DenseTransfer t = transfer_matrices(cfg.p_t, nx, slabs, cfg.strategy);
  const RealMatrix m = cfg.coarse_correction
                           ? twogrid_matrix(l, s, pseudo_inverse(lc), t, cfg.nu1, cfg.nu2)
                           : RealMatrix(matrix_power(s, cfg.nu2) * matrix_power(s, cfg.nu1));

  TwoGridComparison out;
  const FrequencyGrid grid{nx, slabs};
  std::vector<FrequencyPair> kept;
  for (const auto& f : grid.low_groups()) {
    const auto h = harmonics(f);
    const std::vector<FrequencyPair> fine_modes(h.begin(), h.end());
    std::vector<FrequencyPair> coarse_modes;
    if (full) {
      coarse_modes = {{2.0 * f.theta_x, 2.0 * f.theta_t}};
    } else {
      coarse_modes = {{f.theta_x, 2.0 * f.theta_t}, {shift(f.theta_x), 2.0 * f.theta_t}};
    }
    const bool excluded = any_singular_block(l, fine_modes, nx, slabs, n) ||
                          any_singular_block(d, fine_modes, nx, slabs, n) ||
                          (cfg.coarse_correction && any_singular_block(lc, coarse_modes, cnx, slabs / 2, n));
    if (excluded) {
      out.dense_excluded.push_back(f);
    } else {
      for (const auto& hf : h) kept.push_back(hf);
    }
  }
  if (!kept.empty()) {
    const ComplexMatrix q = fourier_columns(kept, nx, slabs, n);
    const ComplexMatrix restricted = q.adjoint() * m.cast<complex>() * q;
    out.dense_radius = spectral_radius(restricted);
  }

  const LfaContext ctx = make_context(cfg);
  for (const auto& f : grid.low_groups()) {
    try {
      out.symbol_radius = std::max(out.symbol_radius, spectral_radius(symbol_twogrid(f, ctx)));
    } catch (const SingularSymbol&) {
      out.symbol_excluded.push_back(f);
    }
  }
  out.same_exclusions = out.dense_excluded.size() == out.symbol_excluded.size();
  for (std::size_t i = 0; out.same_exclusions && i < out.dense_excluded.size(); ++i) {
    out.same_exclusions = out.dense_excluded[i].theta_x == out.symbol_excluded[i].theta_x &&
                          out.dense_excluded[i].theta_t == out.symbol_excluded[i].theta_t;
  }
  return out;
}

double symbol_consistency_error(int p_t, double mu, int nx, int slabs) {
  const int n = p_t + 1;
  const TemporalOps t = temporal_operators(p_t, 1.0);
  const RealMatrix l = periodic_operator(p_t, 1.0, mu, nx, slabs);
  const FrequencyGrid grid{nx, slabs};
  double err = 0.0;
  for (const auto& f : grid.all()) {
    const ComplexMatrix q = fourier_columns({f}, nx, slabs, n);
    const ComplexMatrix applied = l.cast<complex>() * q;
    const ComplexMatrix sym = symbol_L(f, mu, t);
    // Each node block of L q must equal the corresponding block of q L̂.
    err = std::max(err, (applied - q * sym).cwiseAbs().maxCoeff());
  }
  return err;
}

}  // namespace stmg::oracle
