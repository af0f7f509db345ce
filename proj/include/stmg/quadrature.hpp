#pragma once

#include <complex>
#include <utility>
#include <vector>

#include "stmg/linalg.hpp"

namespace stmg {

/// Legendre-Gauss-Lobatto rule on [-1, 1].
///
/// n == 1 is the single midpoint node with weight 2, which is how the
/// lowest-order (finite volume / implicit Euler) scheme is expressed.
struct LglRule {
  int n = 0;
  RealVector nodes;
  RealVector weights;
};

LglRule lgl_rule(int n);

/// Legendre polynomial P_n(x) and its derivative.
std::pair<double, double> legendre(int n, double x);

/// Barycentric weights of a node set.
RealVector barycentric_weights(const RealVector& nodes);

/// Value of the j-th Lagrange basis polynomial of `nodes` at x.
double lagrange_basis(const RealVector& nodes, int j, double x);

/// Entry (i, j) = ℓ_j(targets_i).
RealMatrix interpolation_matrix(const RealVector& nodes, const RealVector& targets);

/// Entry (i, j) = ℓ'_j(τ_i) on the reference element (no 2/Δt factor).
RealMatrix lagrange_derivative_matrix(const LglRule& rule);

/// p(z)/q(z) with real coefficients in ascending powers.
class RationalPoly {
 public:
  RationalPoly(std::vector<double> numerator, std::vector<double> denominator);

  const std::vector<double>& numerator() const { return numerator_; }
  const std::vector<double>& denominator() const { return denominator_; }

  template <typename T>
  T operator()(const T& z) const {
    return horner(numerator_, z) / horner(denominator_, z);
  }

 private:
  template <typename T>
  static T horner(const std::vector<double>& c, const T& z) {
    T acc(0);
    for (auto it = c.rbegin(); it != c.rend(); ++it) acc = acc * z + T(*it);
    return acc;
  }

  std::vector<double> numerator_;
  std::vector<double> denominator_;
};

/// The (k, m) Padé approximant of exp(z).
RationalPoly pade_exponential(int k, int m);

/// Stability function of the temporal DG-SEM with p_t+1 LGL nodes.
RationalPoly stability_function(int p_t);

}  // namespace stmg
