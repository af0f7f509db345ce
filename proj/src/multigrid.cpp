#include "stmg/multigrid.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <numeric>
#include <stdexcept>

namespace stmg {

namespace {

using Triplet = Eigen::Triplet<double>;

SparseMatrix from_triplets(Eigen::Index rows, Eigen::Index cols, const std::vector<Triplet>& t) {
  SparseMatrix m(rows, cols);
  m.setFromTriplets(t.begin(), t.end());
  m.makeCompressed();
  return m;
}

// Child i of the reference element [-1, 1] covers [-1, 0] (i = 0) or [0, 1] (i = 1).
double to_parent(double xi, int child) { return 0.5 * (xi + (child == 0 ? -1.0 : 1.0)); }

SparseMatrix space_restriction_1d(const SpaceTransfer& st, int coarse_cells) {
  const Eigen::Index n = st.R1.rows();
  std::vector<Triplet> t;
  for (int c = 0; c < coarse_cells; ++c) {
    for (int child = 0; child < 2; ++child) {
      const RealMatrix& r = child == 0 ? st.R1 : st.R2;
      for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index j = 0; j < n; ++j) {
          if (r(i, j) != 0.0) t.emplace_back(c * n + i, (2 * c + child) * n + j, r(i, j));
        }
      }
    }
  }
  return from_triplets(coarse_cells * n, 2 * coarse_cells * n, t);
}

SparseMatrix space_prolongation_1d(const SpaceTransfer& st, int coarse_cells) {
  const Eigen::Index n = st.P1.rows();
  std::vector<Triplet> t;
  for (int c = 0; c < coarse_cells; ++c) {
    for (int child = 0; child < 2; ++child) {
      const RealMatrix& p = child == 0 ? st.P1 : st.P2;
      for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index j = 0; j < n; ++j) {
          if (p(i, j) != 0.0) t.emplace_back((2 * c + child) * n + i, c * n + j, p(i, j));
        }
      }
    }
  }
  return from_triplets(2 * coarse_cells * n, coarse_cells * n, t);
}

SparseMatrix sparse_kron(const SparseMatrix& a, const SparseMatrix& b) {
  std::vector<Triplet> t;
  t.reserve(static_cast<std::size_t>(a.nonZeros()) * b.nonZeros());
  for (int ka = 0; ka < a.outerSize(); ++ka) {
    for (SparseMatrix::InnerIterator ia(a, ka); ia; ++ia) {
      for (int kb = 0; kb < b.outerSize(); ++kb) {
        for (SparseMatrix::InnerIterator ib(b, kb); ib; ++ib) {
          t.emplace_back(ia.row() * b.rows() + ib.row(), ia.col() * b.cols() + ib.col(),
                         ia.value() * ib.value());
        }
      }
    }
  }
  return from_triplets(a.rows() * b.rows(), a.cols() * b.cols(), t);
}

// Combines a spatial operator (rows_s × cols_s) with per-child temporal blocks into the
// slab-major global layout. `fine_is_col` selects restriction (fine slabs index columns)
// or prolongation (fine slabs index rows).
SparseMatrix space_time_transfer(const SparseMatrix& space, const RealMatrix& t1, const RealMatrix& t2,
                                 int coarse_slabs, bool fine_is_col) {
  const Eigen::Index nt = t1.rows();
  const Eigen::Index rs = space.rows();
  const Eigen::Index cs = space.cols();
  std::vector<Triplet> t;
  for (int c = 0; c < coarse_slabs; ++c) {
    for (int child = 0; child < 2; ++child) {
      const RealMatrix& blk = child == 0 ? t1 : t2;
      const int row_slab = fine_is_col ? c : 2 * c + child;
      const int col_slab = fine_is_col ? 2 * c + child : c;
      for (int k = 0; k < space.outerSize(); ++k) {
        for (SparseMatrix::InnerIterator it(space, k); it; ++it) {
          for (Eigen::Index i = 0; i < nt; ++i) {
            for (Eigen::Index j = 0; j < nt; ++j) {
              if (blk(i, j) == 0.0) continue;
              t.emplace_back((row_slab * rs + it.row()) * nt + i, (col_slab * cs + it.col()) * nt + j,
                             it.value() * blk(i, j));
            }
          }
        }
      }
    }
  }
  const Eigen::Index rows = (fine_is_col ? coarse_slabs : 2 * coarse_slabs) * rs * nt;
  const Eigen::Index cols = (fine_is_col ? 2 * coarse_slabs : coarse_slabs) * cs * nt;
  return from_triplets(rows, cols, t);
}

}  // namespace

const char* to_string(Coarsening c) { return c == Coarsening::semi ? "semi" : "full"; }

Coarsening parse_coarsening(const std::string& name) {
  if (name == "semi") return Coarsening::semi;
  if (name == "full") return Coarsening::full;
  throw std::invalid_argument("unknown coarsening strategy '" + name + "'");
}

TimeTransfer build_time_transfer(int p_t) {
  if (p_t < 0) throw std::invalid_argument("build_time_transfer: negative degree");
  const LglRule basis = lgl_rule(p_t + 1);
  const LglRule quad = lgl_rule(p_t + 2);
  const int n = p_t + 1;
  TimeTransfer tr;
  for (int child = 0; child < 2; ++child) {
    RealMatrix cross = RealMatrix::Zero(n, n);  // (k, l) = ∫ ℓ̃_l ℓ_k on the child, reference scale
    for (int q = 0; q < quad.n; ++q) {
      const double tau = quad.nodes(q);
      const double sigma = to_parent(tau, child);
      for (int k = 0; k < n; ++k) {
        const double fine = lagrange_basis(basis.nodes, k, tau);
        for (int l = 0; l < n; ++l) {
          cross(k, l) += quad.weights(q) * lagrange_basis(basis.nodes, l, sigma) * fine;
        }
      }
    }
    const RealMatrix rt = basis.weights.cwiseInverse().asDiagonal() * cross;
    (child == 0 ? tr.R1 : tr.R2) = rt.transpose();
  }
  return tr;
}

SpaceTransfer build_space_transfer(int p_x) {
  if (p_x < 0) throw std::invalid_argument("build_space_transfer: negative degree");
  const LglRule rule = lgl_rule(p_x + 1);
  const int n = p_x + 1;
  SpaceTransfer st;
  for (int child = 0; child < 2; ++child) {
    RealMatrix p(n, n);
    for (int k = 0; k < n; ++k) {
      for (int l = 0; l < n; ++l) p(k, l) = lagrange_basis(rule.nodes, l, to_parent(rule.nodes(k), child));
    }
    const RealMatrix r =
        0.5 * rule.weights.cwiseInverse().asDiagonal() * p.transpose() * rule.weights.asDiagonal();
    if (child == 0) {
      st.P1 = p;
      st.R1 = r;
    } else {
      st.P2 = p;
      st.R2 = r;
    }
  }
  return st;
}

RealVector GridTransfer::restrict_vector(const RealVector& fine) const {
  if (fine.size() != R.cols()) throw InconsistentData("restrict: size mismatch");
  return R * fine;
}

RealVector GridTransfer::prolong_vector(const RealVector& coarse) const {
  if (coarse.size() != P.cols()) throw InconsistentData("prolong: size mismatch");
  return P * coarse;
}

GridSpec coarsen(const GridSpec& fine, Coarsening strategy) {
  if (fine.slabs % 2 != 0) {
    throw OddDimension("coarsen: slab count " + std::to_string(fine.slabs) + " is odd");
  }
  GridSpec coarse = fine;
  coarse.data = {};
  coarse.slabs = fine.slabs / 2;
  coarse.dt = 2.0 * fine.dt;
  if (strategy == Coarsening::full) {
    if (fine.cells % 2 != 0) {
      throw OddDimension("coarsen: cell count " + std::to_string(fine.cells) + " is odd");
    }
    coarse.cells = fine.cells / 2;
    coarse.dx = 2.0 * fine.dx;
  }
  return coarse;
}

GridTransfer build_grid_transfer(const GridSpec& fine, Coarsening strategy) {
  const GridSpec coarse = coarsen(fine, strategy);
  const TimeTransfer tt = build_time_transfer(fine.p_t);
  SparseMatrix rs;
  SparseMatrix ps;
  if (strategy == Coarsening::semi) {
    rs.resize(fine.spatial_dofs(), fine.spatial_dofs());
    rs.setIdentity();
    ps = rs;
  } else {
    const SpaceTransfer st = build_space_transfer(fine.p_x);
    rs = space_restriction_1d(st, coarse.cells);
    ps = space_prolongation_1d(st, coarse.cells);
    if (fine.dims == 2) {
      rs = sparse_kron(rs, rs);
      ps = sparse_kron(ps, ps);
    }
  }
  GridTransfer gt;
  gt.R = space_time_transfer(rs, tt.R1, tt.R2, coarse.slabs, true);
  gt.P = space_time_transfer(ps, tt.R1.transpose(), tt.R2.transpose(), coarse.slabs, false);
  return gt;
}

RealVector block_jacobi_sweep(const SpaceTimeSystem& sys, const RealVector& u, const RealVector& b,
                              double omega, std::span<const int> order) {
  if (u.size() != sys.size() || b.size() != sys.size()) {
    throw InconsistentData("block_jacobi_sweep: size mismatch");
  }
  std::vector<int> identity;
  if (order.empty()) {
    identity.resize(sys.slabs);
    std::iota(identity.begin(), identity.end(), 0);
    order = identity;
  }
  if (static_cast<int>(order.size()) != sys.slabs) {
    throw InconsistentData("block_jacobi_sweep: order must list every slab once");
  }
  RealVector out = u;
  const Eigen::Index m = sys.slab_size;
  for (const int n : order) {
    RealVector r = b.segment(n * m, m) - sys.A * u.segment(n * m, m);
    const int prev = n > 0 ? n - 1 : (sys.periodic_in_time ? sys.slabs - 1 : -1);
    if (prev >= 0) r -= sys.B * u.segment(prev * m, m);
    out.segment(n * m, m) += omega * sys.solver->solve(r);
  }
  return out;
}

RealVector sequential_solve(const SpaceTimeSystem& sys, const RealVector& b) {
  if (sys.periodic_in_time) throw InconsistentData("sequential_solve: system is periodic in time");
  if (b.size() != sys.size()) throw InconsistentData("sequential_solve: size mismatch");
  RealVector u(sys.size());
  const Eigen::Index m = sys.slab_size;
  for (int n = 0; n < sys.slabs; ++n) {
    RealVector rhs = b.segment(n * m, m);
    if (n > 0) rhs -= sys.B * u.segment((n - 1) * m, m);
    u.segment(n * m, m) = sys.solver->solve(rhs);
  }
  return u;
}

CoarseSolver::CoarseSolver(const SpaceTimeSystem& sys) {
  if (!sys.periodic_in_time) return;
  // SparseLU happily factors a matrix with constants in its kernel, so check first.
  const SparseMatrix l = sys.assemble_global();
  const RealVector one = RealVector::Ones(sys.size());
  double scale = 0.0;
  for (int k = 0; k < l.outerSize(); ++k) {
    for (SparseMatrix::InnerIterator it(l, k); it; ++it) scale = std::max(scale, std::abs(it.value()));
  }
  if ((l * one).cwiseAbs().maxCoeff() <= 1e-12 * scale) {
    throw SingularMatrix("coarse operator annihilates constants (periodic in space and time)");
  }
  global_ = std::make_shared<const SlabSolver>(l);
  global_matrix_ = std::make_shared<const SparseMatrix>(l);
}

RealVector CoarseSolver::solve(const SpaceTimeSystem& sys, const RealVector& b) const {
  if (!global_) return sequential_solve(sys, b);
  RealVector x = global_->solve(b);
  const double res = (*global_matrix_ * x - b).norm();
  if (!(res <= 1e-8 * std::max(b.norm(), std::numeric_limits<double>::min()))) {
    throw SingularMatrix("global coarse solve left a residual of " + std::to_string(res));
  }
  return x;
}

RealVector two_grid_cycle(const SpaceTimeSystem& fine, const SpaceTimeSystem& coarse,
                          const CoarseSolver& coarse_solver, const GridTransfer& transfer,
                          const RealVector& u, const RealVector& b, const MgConfig& cfg) {
  RealVector v = u;
  for (int i = 0; i < cfg.nu1; ++i) v = block_jacobi_sweep(fine, v, b, cfg.omega);
  const RealVector rc = transfer.restrict_vector(fine.residual(v, b));
  v += transfer.prolong_vector(coarse_solver.solve(coarse, rc));
  for (int i = 0; i < cfg.nu2; ++i) v = block_jacobi_sweep(fine, v, b, cfg.omega);
  return v;
}

TwoGridSolver::TwoGridSolver(const GridSpec& fine, const MgConfig& cfg)
    : cfg_(cfg),
      fine_(assemble(fine)),
      coarse_(assemble(coarsen(fine, cfg.strategy))),
      transfer_(build_grid_transfer(fine, cfg.strategy)),
      coarse_solver_(coarse_) {}

RealVector TwoGridSolver::cycle(const RealVector& u, const RealVector& b) const {
  return two_grid_cycle(fine_, coarse_, coarse_solver_, transfer_, u, b, cfg_);
}

RateResult measure_rate(const std::function<RealVector(const RealVector&)>& step,
                        const std::function<RealVector(const RealVector&)>& residual,
                        Eigen::Index size, int iters) {
  if (iters < 1) throw std::invalid_argument("measure_rate: iters must be positive");
  RateResult out;
  RealVector u = RealVector::Zero(size);
  const double r0 = residual(u).norm();
  out.residuals.push_back(r0);
  if (r0 == 0.0) {
    out.stopped_early = true;
    out.rate = 0.0;
    return out;
  }
  for (int i = 1; i <= iters; ++i) {
    u = step(u);
    const double r = residual(u).norm();
    const double ratio = r / out.residuals.back();
    out.residuals.push_back(r);
    out.ratios.push_back(ratio);
    if (!std::isfinite(ratio) || ratio > kDivergenceRatio) throw Diverged(i, ratio);
    if (r < kEarlyStop * r0) {
      out.stopped_early = true;
      break;
    }
  }
  if (out.ratios.size() >= 2) {
    double worst = 0.0;
    for (std::size_t i = 1; i < out.ratios.size(); ++i) worst = std::max(worst, out.ratios[i]);
    out.rate = worst;
  } else if (out.stopped_early) {
    out.rate = 0.0;
  }
  return out;
}

RateResult measure_rate(const TwoGridSolver& solver, const RealVector& b, int iters) {
  return measure_rate([&](const RealVector& u) { return solver.cycle(u, b); },
                      [&](const RealVector& u) { return solver.fine().residual(u, b); },
                      solver.fine().size(), iters);
}

}  // namespace stmg
