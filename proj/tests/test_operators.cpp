#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "stmg/multigrid.hpp"
#include "stmg/operators.hpp"
#include "stmg/oracles.hpp"

using namespace stmg;

namespace {

RealVector random_vector(Eigen::Index n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> d(-1.0, 1.0);
  RealVector v(n);
  for (auto& x : v) x = d(rng);
  return v;
}

GridSpec small_grid(int dims, int p_t, int p_x, int cells, int slabs, Boundary boundary, bool periodic) {
  GridSpec g;
  g.dims = dims;
  g.p_t = p_t;
  g.p_x = p_x;
  g.cells = cells;
  g.dx = 1.0 / cells;
  g.boundary = boundary;
  g.slabs = slabs;
  g.dt = 0.7 / cells;
  g.periodic_in_time = periodic;
  return g;
}

}  // namespace

TEST(TemporalOps, LowestOrderIsScalar) {
  const TemporalOps t = temporal_operators(0, 0.3);
  EXPECT_DOUBLE_EQ(t.mass(0, 0), 0.3);
  EXPECT_DOUBLE_EQ(t.stiffness(0, 0), 1.0);
  EXPECT_DOUBLE_EQ(t.coupling(0, 0), 1.0);
  EXPECT_DOUBLE_EQ(t.end(0, 0), 1.0);
  EXPECT_DOUBLE_EQ(t.derivative(0, 0), 0.0);
}

TEST(TemporalOps, LinearElementOfLengthTwo) {
  const TemporalOps t = temporal_operators(1, 2.0);
  RealMatrix k(2, 2);
  k << 0.5, 0.5, -0.5, 0.5;
  EXPECT_LE((t.stiffness - k).cwiseAbs().maxCoeff(), 1e-15);
  RealMatrix c = RealMatrix::Zero(2, 2);
  c(0, 1) = 1.0;
  EXPECT_EQ(t.coupling, c);
  EXPECT_LE((t.mass - RealMatrix::Identity(2, 2)).cwiseAbs().maxCoeff(), 1e-15);
}

TEST(TemporalOps, StructuralIdentities) {
  for (int p = 0; p <= 4; ++p) {
    for (const double dt : {0.01, 1.0, 3.0}) {
      const TemporalOps t = temporal_operators(p, dt);
      EXPECT_LE((t.stiffness - (t.end - t.derivative.transpose() * t.mass)).cwiseAbs().maxCoeff(), 1e-12);
      EXPECT_NEAR(t.mass.trace(), dt, 1e-14);
      for (int i = 0; i <= p; ++i) EXPECT_GT(t.mass(i, i), 0.0);
      // Summation by parts: M D + (M D)ᵀ = E - E_first.
      if (p > 0) {
        RealMatrix boundary = t.end;
        boundary(0, 0) -= 1.0;
        const RealMatrix md = t.mass * t.derivative;
        EXPECT_LE((md + md.transpose() - boundary).cwiseAbs().maxCoeff(), 1e-12);
      }
    }
  }
}

TEST(TemporalOps, OneStepMatchesStabilityFunctionOnRealAxis) {
  for (int p = 0; p <= 3; ++p) {
    const TemporalOps t = temporal_operators(p, 1.0);
    const RationalPoly r = stability_function(p);
    for (double z = 0.0; z <= 50.0; z += 0.25) {
      RealVector prev = RealVector::Zero(p + 1);
      prev(p) = 1.0;
      const RealVector u = lu_solve(RealMatrix(t.stiffness + z * t.mass), RealVector(t.coupling * prev));
      EXPECT_NEAR(u(p), r(-z), 1e-11) << p << " " << z;
    }
  }
}

TEST(SpatialFv, PeriodicThreeCells) {
  const SpatialOps s = spatial_fv_operator(3, 1.0, 1.0, Boundary::periodic);
  RealMatrix expected(3, 3);
  expected << 1, 0, -1, -1, 1, 0, 0, -1, 1;
  EXPECT_EQ(oracle::to_dense(s.K), expected);
}

TEST(SpatialFv, InflowDropsCorner) {
  const SpatialOps s = spatial_fv_operator(3, 0.5, 2.0, Boundary::inflow);
  RealMatrix expected(3, 3);
  expected << 4, 0, 0, -4, 4, 0, 0, -4, 4;
  EXPECT_EQ(oracle::to_dense(s.K), expected);
}

TEST(SpatialFv, PeriodicSpectrumIsUpwindSymbol) {
  const int n = 12;
  const SpatialOps s = spatial_fv_operator(n, 0.25, 1.5, Boundary::periodic);
  const ComplexVector ev = eigenvalues(oracle::to_dense(s.K));
  for (int k = 0; k < n; ++k) {
    const complex expected = (1.5 / 0.25) * (1.0 - std::polar(1.0, -2.0 * std::numbers::pi * k / n));
    double best = 1e300;
    for (const complex e : ev) best = std::min(best, std::abs(e - expected));
    EXPECT_LE(best, 1e-12);
  }
}

TEST(SpatialDgsem, DegreeZeroIsFiniteVolume) {
  for (const Boundary b : {Boundary::periodic, Boundary::inflow}) {
    const RealMatrix dg = dgsem_matrix_1d(0, 7, 0.1, 1.3, b);
    const RealMatrix fv = oracle::to_dense(spatial_fv_operator(7, 0.1, 1.3, b).K);
    EXPECT_LE((dg - fv).cwiseAbs().maxCoeff(), 1e-13);
  }
}

TEST(SpatialDgsem, FreeStreamPreservedOnPeriodicGrids) {
  for (int p = 0; p <= 3; ++p) {
    for (const int dims : {1, 2}) {
      const SpatialOps s = spatial_dgsem_operator(p, 5, 0.2, 1.0, dims, Boundary::periodic);
      const RealVector k1 = s.K * RealVector::Ones(s.dofs());
      EXPECT_LE(k1.cwiseAbs().maxCoeff(), 1e-11) << p << " " << dims;
    }
  }
}

TEST(SpatialDgsem, TwoDimensionalIsKroneckerSum) {
  for (int p = 0; p <= 2; ++p) {
    const RealMatrix k1 = dgsem_matrix_1d(p, 3, 0.5, 1.0, Boundary::inflow);
    const RealMatrix id = RealMatrix::Identity(k1.rows(), k1.cols());
    const RealMatrix expected = kron(k1, id) + kron(id, k1);
    const SpatialOps s = spatial_dgsem_operator(p, 3, 0.5, 1.0, 2, Boundary::inflow);
    EXPECT_LE((oracle::to_dense(s.K) - expected).cwiseAbs().maxCoeff(), 1e-12);
  }
}

TEST(SpatialDgsem, SpectrumInClosedLeftHalfPlaneOfMinusK) {
  // The upwind scheme is dissipative: eigenvalues of K have nonnegative real part.
  for (int p = 0; p <= 3; ++p) {
    const ComplexVector ev = eigenvalues(dgsem_matrix_1d(p, 6, 1.0 / 6, 1.0, Boundary::periodic));
    for (const complex e : ev) EXPECT_GE(e.real(), -1e-10) << p;
  }
}

TEST(Assembly, TwoSlabsTwoCellsByHand) {
  const TemporalOps t = temporal_operators(0, 1.0);
  const SpatialOps s = spatial_fv_operator(2, 1.0, 1.0, Boundary::periodic);
  const SpaceTimeSystem sys = assemble_system(t, s, 2, true);
  RealMatrix expected(4, 4);
  expected << 2, -1, -1, 0,  //
      -1, 2, 0, -1,          //
      -1, 0, 2, -1,          //
      0, -1, -1, 2;
  EXPECT_EQ(oracle::to_dense(sys), expected);
  EXPECT_EQ(oracle::to_dense(sys.assemble_global()), expected);
}

TEST(Assembly, SlabBlockIsKroneckerForm) {
  for (int p_t = 0; p_t <= 2; ++p_t) {
    for (int p_x = 0; p_x <= 1; ++p_x) {
      const TemporalOps t = temporal_operators(p_t, 0.3);
      const SpatialOps s = spatial_dgsem_operator(p_x, 3, 0.25, 1.0, 1, Boundary::inflow);
      const SpaceTimeSystem sys = assemble_system(t, s, 2, false);
      const RealMatrix ks = oracle::to_dense(s.K);
      const RealMatrix id = RealMatrix::Identity(ks.rows(), ks.cols());
      const RealMatrix a = kron(id, t.stiffness) + kron(ks, t.mass);
      EXPECT_LE((oracle::to_dense(sys.A) - a).cwiseAbs().maxCoeff(), 1e-12);
      EXPECT_LE((oracle::to_dense(sys.B) + kron(id, t.coupling)).cwiseAbs().maxCoeff(), 0.0);
    }
  }
}

TEST(Assembly, IndexConvention) {
  // Entry of L coupling (slab 1, cell 2, node 0) to (slab 0, cell 2, node 1) is -1.
  const GridSpec g = small_grid(1, 1, 0, 4, 3, Boundary::periodic, false);
  const RealMatrix l = oracle::to_dense(assemble(g));
  const auto idx = [&](int n, int j, int k) { return (n * 4 + j) * 2 + k; };
  EXPECT_EQ(l(idx(1, 2, 0), idx(0, 2, 1)), -1.0);
  EXPECT_EQ(l(idx(1, 2, 1), idx(0, 2, 1)), 0.0);
}

TEST(Assembly, ApplyMatchesDenseMatrix) {
  for (const bool periodic : {false, true}) {
    for (const int dims : {1, 2}) {
      const GridSpec g = small_grid(dims, 1, 1, 4, 3, Boundary::periodic, periodic);
      const SpaceTimeSystem sys = assemble(g);
      const RealMatrix l = oracle::to_dense(sys);
      for (int trial = 0; trial < 20; ++trial) {
        const RealVector u = random_vector(sys.size(), 100 + trial);
        const RealVector ref = l * u;
        EXPECT_LE((sys.apply(u) - ref).cwiseAbs().maxCoeff(), 1e-13 * std::max(1.0, ref.cwiseAbs().maxCoeff()));
      }
    }
  }
}

TEST(Assembly, PeriodicWithDataIsInconsistent) {
  GridSpec g = small_grid(1, 0, 0, 4, 2, Boundary::periodic, true);
  g.data = [](const std::array<double, 2>&, double) { return 1.0; };
  EXPECT_THROW(assemble(g), InconsistentData);
}

TEST(Assembly, HomogeneousDataGivesZeroSolution) {
  const GridSpec g = small_grid(1, 1, 1, 6, 4, Boundary::inflow, false);
  const SpaceTimeSystem sys = assemble(g);
  EXPECT_EQ(sys.rhs.cwiseAbs().maxCoeff(), 0.0);
  EXPECT_EQ(sequential_solve(sys, sys.rhs).cwiseAbs().maxCoeff(), 0.0);
}

TEST(Assembly, ConstantStateIsReproducedWithInflow) {
  for (const int dims : {1, 2}) {
    for (int p = 0; p <= 2; ++p) {
      GridSpec g = small_grid(dims, p, p, 5, 3, Boundary::inflow, false);
      g.data = [](const std::array<double, 2>&, double) { return 2.5; };
      const SpaceTimeSystem sys = assemble(g);
      const RealVector u = sequential_solve(sys, sys.rhs);
      EXPECT_LE((u.array() - 2.5).abs().maxCoeff(), 1e-11) << dims << " " << p;
    }
  }
}

TEST(Assembly, InterpolateUsesNodePositions) {
  GridSpec g = small_grid(1, 1, 0, 4, 2, Boundary::inflow, false);
  g.dt = 0.5;
  const RealVector v = interpolate(g, [](const std::array<double, 2>& x, double t) { return 10 * x[0] + t; });
  // Slab 1, cell 3, last time node: x = 3.5/4, t = 1.0.
  EXPECT_NEAR(v((1 * 4 + 3) * 2 + 1), 10 * 3.5 / 4 + 1.0, 1e-14);
  EXPECT_NEAR(v(0), 10 * 0.5 / 4 + 0.0, 1e-14);
}
