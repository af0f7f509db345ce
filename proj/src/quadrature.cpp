#include "stmg/quadrature.hpp"

#include <cmath>
#include <cstdint>
#include <numbers>
#include <numeric>
#include <stdexcept>

namespace stmg {

namespace {

constexpr double kNewtonTolerance = 1e-15;
constexpr int kNewtonMaxIterations = 100;

std::uint64_t checked_mul(std::uint64_t a, std::uint64_t b) {
  std::uint64_t out = 0;
  if (__builtin_mul_overflow(a, b, &out)) {
    throw std::overflow_error("pade_exponential: factorial ratio exceeds 64-bit range");
  }
  return out;
}

// Exact falling factorial n (n-1) ... (n-count+1).
std::uint64_t falling_factorial(std::uint64_t n, std::uint64_t count) {
  std::uint64_t out = 1;
  for (std::uint64_t i = 0; i < count; ++i) out = checked_mul(out, n - i);
  return out;
}

// (k+m-j)! k! / ((k+m)! (k-j)! j!) as an exact reduced fraction.
double pade_coefficient(int k, int m, int j) {
  std::uint64_t num = falling_factorial(k, j);
  std::uint64_t den = checked_mul(falling_factorial(k + m, j), falling_factorial(j, j));
  const std::uint64_t g = std::gcd(num, den);
  num /= g;
  den /= g;
  return static_cast<double>(num) / static_cast<double>(den);
}

}  // namespace

std::pair<double, double> legendre(int n, double x) {
  if (n == 0) return {1.0, 0.0};
  double p_prev = 1.0;
  double p = x;
  double dp_prev = 0.0;
  double dp = 1.0;
  for (int k = 2; k <= n; ++k) {
    const double p_next = ((2.0 * k - 1.0) * x * p - (k - 1.0) * p_prev) / k;
    // P'_k = P'_{k-2} + (2k-1) P_{k-1}
    const double dp_next = dp_prev + (2.0 * k - 1.0) * p;
    p_prev = p;
    p = p_next;
    dp_prev = dp;
    dp = dp_next;
  }
  return {p, dp};
}

LglRule lgl_rule(int n) {
  if (n < 1) throw std::invalid_argument("lgl_rule: n must be at least 1");
  LglRule rule;
  rule.n = n;
  rule.nodes.resize(n);
  rule.weights.resize(n);
  if (n == 1) {
    rule.nodes(0) = 0.0;
    rule.weights(0) = 2.0;
    return rule;
  }

  const int degree = n - 1;
  const double lambda = degree * (degree + 1.0);
  for (int i = 0; i < n; ++i) {
    // Chebyshev-Gauss-Lobatto initial guess
    double x = -std::cos(std::numbers::pi * i / degree);
    if (i > 0 && i < degree) {
      // Newton on g(x) = (1-x²) P'_N(x), using g'(x) = -N(N+1) P_N(x).
      for (int it = 0; it < kNewtonMaxIterations; ++it) {
        const auto [p, dp] = legendre(degree, x);
        const double step = (1.0 - x * x) * dp / (lambda * p);
        x += step;
        if (std::abs(step) < kNewtonTolerance) break;
      }
    }
    rule.nodes(i) = x;
  }
  // Symmetrize: the rule is exactly symmetric about 0.
  for (int i = 0; i < n / 2; ++i) {
    const double s = 0.5 * (rule.nodes(n - 1 - i) - rule.nodes(i));
    rule.nodes(i) = -s;
    rule.nodes(n - 1 - i) = s;
  }
  if (n % 2 == 1) rule.nodes(n / 2) = 0.0;

  for (int i = 0; i < n; ++i) {
    const double p = legendre(degree, rule.nodes(i)).first;
    rule.weights(i) = 2.0 / (lambda * p * p);
  }
  return rule;
}

RealVector barycentric_weights(const RealVector& nodes) {
  const Eigen::Index n = nodes.size();
  RealVector w = RealVector::Ones(n);
  for (Eigen::Index j = 0; j < n; ++j) {
    for (Eigen::Index k = 0; k < n; ++k) {
      if (k != j) w(j) /= (nodes(j) - nodes(k));
    }
  }
  return w;
}

double lagrange_basis(const RealVector& nodes, int j, double x) {
  double value = 1.0;
  for (Eigen::Index k = 0; k < nodes.size(); ++k) {
    if (k != j) value *= (x - nodes(k)) / (nodes(j) - nodes(k));
  }
  return value;
}

RealMatrix interpolation_matrix(const RealVector& nodes, const RealVector& targets) {
  RealMatrix out(targets.size(), nodes.size());
  for (Eigen::Index i = 0; i < targets.size(); ++i) {
    for (Eigen::Index j = 0; j < nodes.size(); ++j) {
      out(i, j) = lagrange_basis(nodes, static_cast<int>(j), targets(i));
    }
  }
  return out;
}

RealMatrix lagrange_derivative_matrix(const LglRule& rule) {
  const int n = rule.n;
  RealMatrix d = RealMatrix::Zero(n, n);
  if (n == 1) return d;
  const RealVector w = barycentric_weights(rule.nodes);
  for (int i = 0; i < n; ++i) {
    double diag = 0.0;
    for (int j = 0; j < n; ++j) {
      if (i == j) continue;
      d(i, j) = (w(j) / w(i)) / (rule.nodes(i) - rule.nodes(j));
      diag -= d(i, j);
    }
    d(i, i) = diag;
  }
  return d;
}

RationalPoly::RationalPoly(std::vector<double> numerator, std::vector<double> denominator)
    : numerator_(std::move(numerator)), denominator_(std::move(denominator)) {
  if (numerator_.empty() || denominator_.empty()) {
    throw std::invalid_argument("RationalPoly: empty coefficient list");
  }
}

RationalPoly pade_exponential(int k, int m) {
  if (k < 0 || m < 0) throw std::invalid_argument("pade_exponential: negative degree");
  std::vector<double> p(k + 1);
  std::vector<double> q(m + 1);
  p[0] = 1.0;
  q[0] = 1.0;
  for (int j = 1; j <= k; ++j) p[j] = pade_coefficient(k, m, j);
  for (int j = 1; j <= m; ++j) q[j] = (j % 2 == 0 ? 1.0 : -1.0) * pade_coefficient(m, k, j);
  return RationalPoly(std::move(p), std::move(q));
}

RationalPoly stability_function(int p_t) {
  if (p_t < 0) throw std::invalid_argument("stability_function: negative degree");
  if (p_t == 0) return pade_exponential(0, 1);
  return pade_exponential(p_t - 1, p_t + 1);
}

}  // namespace stmg
