#include "stmg/operators.hpp"

#include <stdexcept>
#include <vector>

namespace stmg {

namespace {

using Triplet = Eigen::Triplet<double>;

SparseMatrix from_triplets(Eigen::Index rows, Eigen::Index cols, const std::vector<Triplet>& t) {
  SparseMatrix m(rows, cols);
  m.setFromTriplets(t.begin(), t.end());
  m.makeCompressed();
  return m;
}

void append_kron(std::vector<Triplet>& out, const SparseMatrix& a, const SparseMatrix& b) {
  for (int ka = 0; ka < a.outerSize(); ++ka) {
    for (SparseMatrix::InnerIterator ia(a, ka); ia; ++ia) {
      for (int kb = 0; kb < b.outerSize(); ++kb) {
        for (SparseMatrix::InnerIterator ib(b, kb); ib; ++ib) {
          out.emplace_back(ia.row() * b.rows() + ib.row(), ia.col() * b.cols() + ib.col(),
                           ia.value() * ib.value());
        }
      }
    }
  }
}

SparseMatrix sparse_identity(Eigen::Index n) {
  SparseMatrix id(n, n);
  id.setIdentity();
  return id;
}

double time_node(const TemporalOps& t_ops, int slab, int k) {
  return t_ops.dt * (slab + 0.5 * (t_ops.rule.nodes(k) + 1.0));
}

}  // namespace

TemporalOps temporal_operators(int p_t, double dt) {
  if (p_t < 0) throw std::invalid_argument("temporal_operators: negative degree");
  if (!(dt > 0.0)) throw std::invalid_argument("temporal_operators: dt must be positive");
  TemporalOps ops;
  ops.p_t = p_t;
  ops.dt = dt;
  ops.rule = lgl_rule(p_t + 1);
  const int n = p_t + 1;
  ops.mass = (0.5 * dt * ops.rule.weights).asDiagonal();
  ops.derivative = (2.0 / dt) * lagrange_derivative_matrix(ops.rule);
  ops.end = RealMatrix::Zero(n, n);
  ops.end(n - 1, n - 1) = 1.0;
  ops.coupling = RealMatrix::Zero(n, n);
  ops.coupling(0, n - 1) = 1.0;
  ops.stiffness = ops.end - ops.derivative.transpose() * ops.mass;
  return ops;
}

double SpatialOps::node_coordinate(int i) const {
  const int n = nodes_per_cell();
  const int cell = i / n;
  const int k = i % n;
  return dx * (cell + 0.5 * (rule.nodes(k) + 1.0));
}

RealMatrix dgsem_matrix_1d(int degree, int cells, double dx, double speed, Boundary boundary) {
  if (degree < 0) throw std::invalid_argument("spatial operator: negative degree");
  if (cells < 1) throw std::invalid_argument("spatial operator: need at least one cell");
  if (!(dx > 0.0) || !(speed > 0.0)) {
    throw std::invalid_argument("spatial operator: dx and speed must be positive");
  }
  const LglRule rule = lgl_rule(degree + 1);
  const int n = degree + 1;
  const RealMatrix d = lagrange_derivative_matrix(rule);
  const RealMatrix w = rule.weights.asDiagonal();
  const RealMatrix w_inv = rule.weights.cwiseInverse().asDiagonal();
  RealMatrix e_last = RealMatrix::Zero(n, n);
  e_last(n - 1, n - 1) = 1.0;
  const RealMatrix local = (2.0 / dx) * speed * w_inv * (e_last - d.transpose() * w);
  RealMatrix upwind = RealMatrix::Zero(n, n);
  upwind(0, n - 1) = -(2.0 / dx) * speed / rule.weights(0);

  RealMatrix k = RealMatrix::Zero(cells * n, cells * n);
  for (int c = 0; c < cells; ++c) {
    k.block(c * n, c * n, n, n) += local;
    if (c > 0) {
      k.block(c * n, (c - 1) * n, n, n) += upwind;
    } else if (boundary == Boundary::periodic) {
      k.block(0, (cells - 1) * n, n, n) += upwind;
    }
  }
  return k;
}

SpatialOps spatial_dgsem_operator(int degree, int cells, double dx, double speed, int dims,
                                  Boundary boundary) {
  if (dims != 1 && dims != 2) throw std::invalid_argument("spatial operator: dims must be 1 or 2");
  SpatialOps ops;
  ops.dims = dims;
  ops.degree = degree;
  ops.cells = cells;
  ops.dx = dx;
  ops.speed = speed;
  ops.boundary = boundary;
  ops.rule = lgl_rule(degree + 1);
  const SparseMatrix k1 = dgsem_matrix_1d(degree, cells, dx, speed, boundary).sparseView();
  if (dims == 1) {
    ops.K = k1;
  } else {
    const SparseMatrix id = sparse_identity(k1.rows());
    std::vector<Triplet> t;
    append_kron(t, k1, id);
    append_kron(t, id, k1);
    ops.K = from_triplets(k1.rows() * k1.rows(), k1.cols() * k1.cols(), t);
  }
  ops.K.makeCompressed();
  return ops;
}

SpatialOps spatial_fv_operator(int cells, double dx, double speed, Boundary boundary) {
  if (cells < 2) throw std::invalid_argument("spatial_fv_operator: need at least two cells");
  return spatial_dgsem_operator(0, cells, dx, speed, 1, boundary);
}

SlabSolver::SlabSolver(const SparseMatrix& a) {
  lu_.compute(a);
  if (lu_.info() != Eigen::Success) {
    throw SingularMatrix("slab block factorization failed: " + lu_.lastErrorMessage());
  }
}

RealVector SlabSolver::solve(const RealVector& b) const {
  RealVector x = lu_.solve(b);
  if (!x.allFinite()) throw SingularMatrix("slab solve produced non-finite values");
  return x;
}

RealVector SpaceTimeSystem::apply(const RealVector& u) const {
  if (u.size() != size()) throw InconsistentData("SpaceTimeSystem::apply: size mismatch");
  RealVector y(u.size());
  for (int n = 0; n < slabs; ++n) {
    auto yn = y.segment(static_cast<Eigen::Index>(n) * slab_size, slab_size);
    yn = A * u.segment(static_cast<Eigen::Index>(n) * slab_size, slab_size);
    const int prev = n > 0 ? n - 1 : (periodic_in_time ? slabs - 1 : -1);
    if (prev >= 0) {
      yn += B * u.segment(static_cast<Eigen::Index>(prev) * slab_size, slab_size);
    }
  }
  return y;
}

RealVector SpaceTimeSystem::residual(const RealVector& u, const RealVector& b) const {
  return b - apply(u);
}

SparseMatrix SpaceTimeSystem::assemble_global() const {
  std::vector<Triplet> t;
  t.reserve(static_cast<std::size_t>(slabs) * (A.nonZeros() + B.nonZeros()));
  auto add_block = [&](const SparseMatrix& m, Eigen::Index r0, Eigen::Index c0) {
    for (int k = 0; k < m.outerSize(); ++k) {
      for (SparseMatrix::InnerIterator it(m, k); it; ++it) {
        t.emplace_back(r0 + it.row(), c0 + it.col(), it.value());
      }
    }
  };
  for (int n = 0; n < slabs; ++n) {
    const Eigen::Index r0 = static_cast<Eigen::Index>(n) * slab_size;
    add_block(A, r0, r0);
    if (n > 0) {
      add_block(B, r0, r0 - slab_size);
    } else if (periodic_in_time) {
      add_block(B, r0, static_cast<Eigen::Index>(slabs - 1) * slab_size);
    }
  }
  return from_triplets(size(), size(), t);
}

SpaceTimeSystem assemble_system(const TemporalOps& t_ops, const SpatialOps& s_ops, int slabs,
                                bool periodic_in_time, const ScalarField& data) {
  if (slabs < 1) throw InconsistentData("assemble_system: need at least one slab");
  if (periodic_in_time && data) {
    throw InconsistentData("assemble_system: periodic in time requires homogeneous data");
  }
  const int nt = t_ops.nodes();
  const int s = s_ops.dofs();

  SpaceTimeSystem sys;
  sys.slabs = slabs;
  sys.slab_size = s * nt;
  sys.periodic_in_time = periodic_in_time;

  std::vector<Triplet> a;
  a.reserve(static_cast<std::size_t>(s) * nt * nt + s_ops.K.nonZeros() * nt);
  for (int j = 0; j < s; ++j) {
    for (int i = 0; i < nt; ++i) {
      for (int l = 0; l < nt; ++l) {
        if (t_ops.stiffness(i, l) != 0.0) a.emplace_back(j * nt + i, j * nt + l, t_ops.stiffness(i, l));
      }
    }
  }
  for (int k = 0; k < s_ops.K.outerSize(); ++k) {
    for (SparseMatrix::InnerIterator it(s_ops.K, k); it; ++it) {
      for (int i = 0; i < nt; ++i) {
        a.emplace_back(it.row() * nt + i, it.col() * nt + i, it.value() * t_ops.mass(i, i));
      }
    }
  }
  sys.A = from_triplets(sys.slab_size, sys.slab_size, a);

  std::vector<Triplet> b;
  b.reserve(s);
  for (int j = 0; j < s; ++j) b.emplace_back(j * nt, j * nt + nt - 1, -t_ops.coupling(0, nt - 1));
  sys.B = from_triplets(sys.slab_size, sys.slab_size, b);

  sys.rhs = RealVector::Zero(sys.size());
  if (data) {
    const int n1 = s_ops.dofs_1d();
    auto spatial_index = [&](int i1, int i2) { return s_ops.dims == 1 ? i1 : i1 * n1 + i2; };
    const int n2 = s_ops.dims == 1 ? 1 : n1;
    for (int i1 = 0; i1 < n1; ++i1) {
      for (int i2 = 0; i2 < n2; ++i2) {
        const std::array<double, 2> x{s_ops.node_coordinate(i1), s_ops.dims == 1 ? 0.0 : s_ops.node_coordinate(i2)};
        sys.rhs(static_cast<Eigen::Index>(spatial_index(i1, i2)) * nt) += t_ops.coupling(0, nt - 1) * data(x, 0.0);
      }
    }
    if (s_ops.boundary == Boundary::inflow) {
      const double face = 2.0 / (s_ops.dx * s_ops.rule.weights(0)) * s_ops.speed;
      for (int n = 0; n < slabs; ++n) {
        for (int k = 0; k < nt; ++k) {
          const double t = time_node(t_ops, n, k);
          const double scale = face * t_ops.mass(k, k);
          const Eigen::Index base = static_cast<Eigen::Index>(n) * sys.slab_size + k;
          if (s_ops.dims == 1) {
            sys.rhs(base) += scale * data({0.0, 0.0}, t);
            continue;
          }
          for (int i = 0; i < n1; ++i) {
            const double y = s_ops.node_coordinate(i);
            sys.rhs(base + static_cast<Eigen::Index>(spatial_index(0, i)) * nt) += scale * data({0.0, y}, t);
            sys.rhs(base + static_cast<Eigen::Index>(spatial_index(i, 0)) * nt) += scale * data({y, 0.0}, t);
          }
        }
      }
    }
  }

  sys.solver = std::make_shared<const SlabSolver>(sys.A);
  return sys;
}

int GridSpec::spatial_dofs() const {
  const int n1 = cells * (p_x + 1);
  return dims == 1 ? n1 : n1 * n1;
}

SpaceTimeSystem assemble(const GridSpec& spec) {
  const TemporalOps t_ops = temporal_operators(spec.p_t, spec.dt);
  const SpatialOps s_ops =
      spatial_dgsem_operator(spec.p_x, spec.cells, spec.dx, spec.speed, spec.dims, spec.boundary);
  return assemble_system(t_ops, s_ops, spec.slabs, spec.periodic_in_time, spec.data);
}

RealVector interpolate(const GridSpec& spec, const ScalarField& field) {
  const TemporalOps t_ops = temporal_operators(spec.p_t, spec.dt);
  const SpatialOps s_ops =
      spatial_dgsem_operator(spec.p_x, spec.cells, spec.dx, spec.speed, spec.dims, spec.boundary);
  const int nt = t_ops.nodes();
  const int n1 = s_ops.dofs_1d();
  const int n2 = spec.dims == 1 ? 1 : n1;
  RealVector u(spec.size());
  Eigen::Index idx = 0;
  for (int n = 0; n < spec.slabs; ++n) {
    for (int i1 = 0; i1 < n1; ++i1) {
      for (int i2 = 0; i2 < n2; ++i2) {
        const std::array<double, 2> x{s_ops.node_coordinate(i1), spec.dims == 1 ? 0.0 : s_ops.node_coordinate(i2)};
        for (int k = 0; k < nt; ++k) u(idx++) = field(x, time_node(t_ops, n, k));
      }
    }
  }
  return u;
}

}  // namespace stmg
