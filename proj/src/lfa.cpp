#include "stmg/lfa.hpp"

#include <atomic>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <limits>
#include <numbers>
#include <thread>

namespace stmg {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kEdgeTolerance = 1e-12;

complex expi(double theta) { return std::polar(1.0, theta); }

// Evaluates fn(i) for i in [0, count) on up to `threads` workers. Results are stored by
// index so any reduction over them is independent of scheduling.
template <typename T, typename Fn>
std::vector<T> parallel_map(std::size_t count, int threads, Fn fn) {
  std::vector<T> out(count);
  const int workers = std::max(1, std::min<int>(resolve_threads(threads), static_cast<int>(count)));
  if (workers <= 1) {
    for (std::size_t i = 0; i < count; ++i) out[i] = fn(i);
    return out;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::exception_ptr> errors(workers);
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (int w = 0; w < workers; ++w) {
    pool.emplace_back([&, w] {
      try {
        for (std::size_t i = next++; i < count; i = next++) out[i] = fn(i);
      } catch (...) {
        errors[w] = std::current_exception();
        next = count;
      }
    });
  }
  for (auto& t : pool) t.join();
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  return out;
}

ComplexMatrix block_diagonal(const std::vector<ComplexMatrix>& blocks) {
  Eigen::Index n = 0;
  for (const auto& b : blocks) n += b.rows();
  ComplexMatrix out = ComplexMatrix::Zero(n, n);
  Eigen::Index offset = 0;
  for (const auto& b : blocks) {
    out.block(offset, offset, b.rows(), b.cols()) = b;
    offset += b.rows();
  }
  return out;
}

struct Evaluation {
  double radius = 0.0;
  bool excluded = false;
};

FactorResult reduce(const std::vector<FrequencyPair>& freqs, const std::vector<Evaluation>& evals) {
  FactorResult res;
  for (std::size_t i = 0; i < freqs.size(); ++i) {
    if (evals[i].excluded) {
      ++res.excluded;
      continue;
    }
    ++res.evaluated;
    if (res.evaluated == 1 || evals[i].radius > res.factor) {
      res.factor = evals[i].radius;
      res.argmax = freqs[i];
    }
  }
  return res;
}

}  // namespace

int resolve_threads(int requested) {
  if (requested > 0) return requested;
  if (const char* env = std::getenv("STMG_LFA_THREADS")) {
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (end != env && *end == '\0' && v > 0) return static_cast<int>(v);
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : static_cast<int>(hw);
}

double shift(double theta) { return theta < 0.0 ? theta + kPi : theta - kPi; }

std::array<FrequencyPair, 4> harmonics(const FrequencyPair& f) {
  const double gx = shift(f.theta_x);
  const double gt = shift(f.theta_t);
  return {FrequencyPair{f.theta_x, f.theta_t}, FrequencyPair{gx, f.theta_t},
          FrequencyPair{f.theta_x, gt}, FrequencyPair{gx, gt}};
}

std::vector<double> FrequencyGrid::thetas(int n) {
  if (n < 2 || n % 2 != 0) throw OddDimension("frequency grid size must be even and at least 2");
  std::vector<double> out;
  out.reserve(n);
  for (int k = 1 - n / 2; k <= n / 2; ++k) out.push_back(2.0 * kPi * k / n);
  return out;
}

bool FrequencyGrid::is_low(double theta) {
  return theta > -0.5 * kPi + kEdgeTolerance && theta <= 0.5 * kPi + kEdgeTolerance;
}

bool FrequencyGrid::is_low(const FrequencyPair& f, Coarsening strategy) {
  if (strategy == Coarsening::semi) return is_low(f.theta_t);
  return is_low(f.theta_x) && is_low(f.theta_t);
}

std::vector<FrequencyPair> FrequencyGrid::all() const {
  std::vector<FrequencyPair> out;
  for (const double tx : thetas(nx)) {
    for (const double tt : thetas(nt)) out.push_back({tx, tt});
  }
  return out;
}

std::vector<FrequencyPair> FrequencyGrid::low(Coarsening strategy) const {
  std::vector<FrequencyPair> out;
  for (const auto& f : all()) {
    if (is_low(f, strategy)) out.push_back(f);
  }
  return out;
}

std::vector<FrequencyPair> FrequencyGrid::low_groups() const { return low(Coarsening::full); }

std::vector<FrequencyPair> FrequencyGrid::high(Coarsening strategy) const {
  std::vector<FrequencyPair> out;
  for (const auto& f : all()) {
    if (!is_low(f, strategy)) out.push_back(f);
  }
  return out;
}

bool is_singular_symbol(const ComplexMatrix& x, double tol) {
  const double scale = x.cwiseAbs().maxCoeff();
  if (scale == 0.0) return true;
  const double det = std::abs(x.determinant());
  return !(det >= tol * std::pow(scale, static_cast<double>(x.rows())));
}

ComplexMatrix symbol_jacobi_block(double theta_x, double mu, const TemporalOps& t_ops) {
  const complex beta = (mu / t_ops.dt) * (1.0 - expi(-theta_x));
  return t_ops.stiffness.cast<complex>() + beta * t_ops.mass.cast<complex>();
}

ComplexMatrix symbol_L(const FrequencyPair& f, double mu, const TemporalOps& t_ops) {
  return symbol_jacobi_block(f.theta_x, mu, t_ops) - expi(-f.theta_t) * t_ops.coupling.cast<complex>();
}

ComplexMatrix symbol_S(const FrequencyPair& f, const LfaConfig& cfg, const TemporalOps& t_ops) {
  const ComplexMatrix a = symbol_jacobi_block(f.theta_x, cfg.mu, t_ops);
  if (is_singular_symbol(a, cfg.sing_tol)) throw SingularSymbol("smoother symbol block is singular");
  const Eigen::Index n = a.rows();
  return (1.0 - cfg.omega) * ComplexMatrix::Identity(n, n) +
         cfg.omega * expi(-f.theta_t) * lu_solve(a, t_ops.coupling.cast<complex>());
}

TransferSymbols symbols_transfer(const FrequencyPair& f, const TimeTransfer& transfer) {
  const ComplexMatrix r1 = transfer.R1.cast<complex>();
  const ComplexMatrix r2 = transfer.R2.cast<complex>();
  TransferSymbols s;
  s.R_time = expi(-f.theta_t) * r1 + r2;
  s.P_time = 0.5 * (expi(f.theta_t) * r1.transpose() + r2.transpose());
  s.R_space = 0.5 * (expi(-f.theta_x) + 1.0);
  s.P_space = 0.5 * (expi(f.theta_x) + 1.0);
  return s;
}

LfaContext make_context(const LfaConfig& cfg) {
  if (!(cfg.mu > 0.0)) throw std::invalid_argument("LfaConfig: mu must be positive");
  if (!(cfg.sing_tol > 0.0)) throw std::invalid_argument("LfaConfig: sing_tol must be positive");
  LfaContext ctx;
  ctx.cfg = cfg;
  ctx.fine = temporal_operators(cfg.p_t, 1.0);
  ctx.coarse = temporal_operators(cfg.p_t, 2.0);
  ctx.transfer = build_time_transfer(cfg.p_t);
  // Semi keeps Δx so μ doubles with Δt; full doubles both.
  ctx.coarse_mu = cfg.strategy == Coarsening::semi ? 2.0 * cfg.mu : cfg.mu;
  return ctx;
}

ComplexMatrix symbol_twogrid(const FrequencyPair& f, const LfaContext& ctx) {
  const LfaConfig& cfg = ctx.cfg;
  const Eigen::Index n = cfg.p_t + 1;
  const auto h = harmonics(f);

  std::vector<ComplexMatrix> l_blocks;
  std::vector<ComplexMatrix> s_blocks;
  for (const auto& hf : h) {
    const ComplexMatrix l = symbol_L(hf, cfg.mu, ctx.fine);
    if (is_singular_symbol(l, cfg.sing_tol)) throw ExcludedFrequency("fine symbol is singular");
    if (is_singular_symbol(symbol_jacobi_block(hf.theta_x, cfg.mu, ctx.fine), cfg.sing_tol)) {
      throw ExcludedFrequency("smoother block is singular");
    }
    l_blocks.push_back(l);
    s_blocks.push_back(symbol_S(hf, cfg, ctx.fine));
  }
  const ComplexMatrix s_hat = block_diagonal(s_blocks);
  const ComplexMatrix l_hat = block_diagonal(l_blocks);

  ComplexMatrix correction = ComplexMatrix::Identity(4 * n, 4 * n);
  if (cfg.coarse_correction) {
    const TransferSymbols base = symbols_transfer(f, ctx.transfer);
    const TransferSymbols shifted = symbols_transfer({f.theta_x, shift(f.theta_t)}, ctx.transfer);
    ComplexMatrix l_coarse;
    ComplexMatrix r_hat;
    ComplexMatrix p_hat;
    if (cfg.strategy == Coarsening::semi) {
      std::vector<ComplexMatrix> coarse_blocks;
      for (const double tx : {f.theta_x, shift(f.theta_x)}) {
        const ComplexMatrix lc = symbol_L({tx, 2.0 * f.theta_t}, ctx.coarse_mu, ctx.coarse);
        if (is_singular_symbol(lc, cfg.sing_tol)) throw ExcludedFrequency("coarse symbol is singular");
        coarse_blocks.push_back(lc);
      }
      l_coarse = block_diagonal(coarse_blocks);
      r_hat = ComplexMatrix::Zero(2 * n, 4 * n);
      p_hat = ComplexMatrix::Zero(4 * n, 2 * n);
      for (int b = 0; b < 2; ++b) {
        r_hat.block(b * n, b * n, n, n) = base.R_time;
        r_hat.block(b * n, (2 + b) * n, n, n) = shifted.R_time;
        p_hat.block(b * n, b * n, n, n) = base.P_time;
        p_hat.block((2 + b) * n, b * n, n, n) = shifted.P_time;
      }
    } else {
      l_coarse = symbol_L({2.0 * f.theta_x, 2.0 * f.theta_t}, ctx.coarse_mu, ctx.coarse);
      if (is_singular_symbol(l_coarse, cfg.sing_tol)) throw ExcludedFrequency("coarse symbol is singular");
      r_hat = ComplexMatrix::Zero(n, 4 * n);
      p_hat = ComplexMatrix::Zero(4 * n, n);
      for (int k = 0; k < 4; ++k) {
        const TransferSymbols ts = symbols_transfer(h[k], ctx.transfer);
        r_hat.block(0, k * n, n, n) = ts.R_space * ts.R_time;
        p_hat.block(k * n, 0, n, n) = ts.P_space * ts.P_time;
      }
    }
    correction -= p_hat * lu_solve(l_coarse, r_hat * l_hat);
  }
  return matrix_power(s_hat, cfg.nu2) * correction * matrix_power(s_hat, cfg.nu1);
}

FactorResult smoothing_factor(const LfaConfig& cfg, const FrequencyGrid& grid, int threads) {
  const TemporalOps t_ops = temporal_operators(cfg.p_t, 1.0);
  const auto freqs = grid.high(cfg.strategy);
  const auto evals = parallel_map<Evaluation>(freqs.size(), threads, [&](std::size_t i) {
    try {
      return Evaluation{spectral_radius(symbol_S(freqs[i], cfg, t_ops)), false};
    } catch (const SingularSymbol&) {
      return Evaluation{0.0, true};
    } catch (const SingularMatrix&) {
      return Evaluation{0.0, true};
    }
  });
  return reduce(freqs, evals);
}

DampingResult optimal_damping(const LfaConfig& cfg, const FrequencyGrid& grid, int threads) {
  const TemporalOps t_ops = temporal_operators(cfg.p_t, 1.0);
  const auto freqs = grid.high(cfg.strategy);
  // Ŝ(ω) = (1-ω)I + ωG, so the spectrum of G per frequency is all the search needs.
  struct Spectrum {
    ComplexVector values;
    bool excluded = false;
  };
  const auto spectra = parallel_map<Spectrum>(freqs.size(), threads, [&](std::size_t i) {
    const ComplexMatrix a = symbol_jacobi_block(freqs[i].theta_x, cfg.mu, t_ops);
    if (is_singular_symbol(a, cfg.sing_tol)) return Spectrum{ComplexVector(), true};
    const ComplexMatrix g = expi(-freqs[i].theta_t) * lu_solve(a, t_ops.coupling.cast<complex>());
    return Spectrum{eigenvalues(g), false};
  });

  DampingResult best;
  best.factor = std::numeric_limits<double>::infinity();
  for (int step = 1; step <= 100; ++step) {
    const double omega = step / 100.0;
    double worst = std::abs(1.0 - omega);
    FrequencyPair worst_f{};
    double worst_freq_value = -1.0;
    for (std::size_t i = 0; i < freqs.size(); ++i) {
      if (spectra[i].excluded) continue;
      double r = 0.0;
      for (const complex& lambda : spectra[i].values) r = std::max(r, std::abs(1.0 - omega + omega * lambda));
      if (r > worst_freq_value) {
        worst_freq_value = r;
        worst_f = freqs[i];
      }
      worst = std::max(worst, r);
    }
    if (worst < best.factor) {
      best.factor = worst;
      best.omega = omega;
      best.worst = worst_f;
    }
  }
  return best;
}

FactorResult twogrid_factor(const LfaConfig& cfg, const FrequencyGrid& grid, int threads) {
  const LfaContext ctx = make_context(cfg);
  const auto freqs = grid.low_groups();
  const auto evals = parallel_map<Evaluation>(freqs.size(), threads, [&](std::size_t i) {
    try {
      return Evaluation{spectral_radius(symbol_twogrid(freqs[i], ctx)), false};
    } catch (const SingularSymbol&) {
      return Evaluation{0.0, true};
    } catch (const SingularMatrix&) {
      return Evaluation{0.0, true};
    }
  });
  return reduce(freqs, evals);
}

std::vector<ComplexVector> dft_coefficients(const RealVector& u, const FrequencyGrid& grid, int nodes) {
  const Eigen::Index expected = static_cast<Eigen::Index>(grid.nx) * grid.nt * nodes;
  if (u.size() != expected) throw InconsistentData("dft_coefficients: size mismatch");
  std::vector<ComplexVector> out;
  const double scale = 1.0 / (static_cast<double>(grid.nx) * grid.nt);
  for (const auto& f : grid.all()) {
    ComplexVector c = ComplexVector::Zero(nodes);
    for (int n = 0; n < grid.nt; ++n) {
      for (int j = 0; j < grid.nx; ++j) {
        const complex phase = expi(-(j + 1) * f.theta_x - (n + 1) * f.theta_t);
        for (int l = 0; l < nodes; ++l) c(l) += u((static_cast<Eigen::Index>(n) * grid.nx + j) * nodes + l) * phase;
      }
    }
    out.push_back(scale * c);
  }
  return out;
}

DftReport dft_verify(const RealVector& u, const FrequencyGrid& grid, int nodes) {
  const auto freqs = grid.all();
  const auto coeffs = dft_coefficients(u, grid, nodes);
  const Eigen::Index size = u.size();
  auto index = [&](int n, int j, int l) { return (static_cast<Eigen::Index>(n) * grid.nx + j) * nodes + l; };
  auto add_mode = [&](ComplexVector& acc, const FrequencyPair& f, const ComplexVector& c) {
    for (int n = 0; n < grid.nt; ++n) {
      for (int j = 0; j < grid.nx; ++j) {
        const complex phase = expi((j + 1) * f.theta_x + (n + 1) * f.theta_t);
        for (int l = 0; l < nodes; ++l) acc(index(n, j, l)) += c(l) * phase;
      }
    }
  };

  DftReport report;
  ComplexVector rec = ComplexVector::Zero(size);
  for (std::size_t i = 0; i < freqs.size(); ++i) add_mode(rec, freqs[i], coeffs[i]);
  report.reconstruction_error = (rec - u.cast<complex>()).cwiseAbs().maxCoeff();

  for (std::size_t i = 0; i < freqs.size(); ++i) {
    ComplexVector psi = ComplexVector::Zero(size);
    add_mode(psi, freqs[i], coeffs[i]);
    const complex et = expi(-freqs[i].theta_t);
    const complex ex = expi(-freqs[i].theta_x);
    for (int n = 0; n < grid.nt; ++n) {
      for (int j = 0; j < grid.nx; ++j) {
        for (int l = 0; l < nodes; ++l) {
          const complex here = psi(index(n, j, l));
          if (n > 0) report.shifting_error = std::max(report.shifting_error, std::abs(psi(index(n - 1, j, l)) - et * here));
          if (j > 0) report.shifting_error = std::max(report.shifting_error, std::abs(psi(index(n, j - 1, l)) - ex * here));
        }
      }
    }
  }

  // Coefficients at shifted frequencies are those of the aliased grid frequency.
  auto coefficient_at = [&](const FrequencyPair& f) {
    ComplexVector c = ComplexVector::Zero(nodes);
    const double scale = 1.0 / (static_cast<double>(grid.nx) * grid.nt);
    for (int n = 0; n < grid.nt; ++n) {
      for (int j = 0; j < grid.nx; ++j) {
        const complex phase = expi(-(j + 1) * f.theta_x - (n + 1) * f.theta_t);
        for (int l = 0; l < nodes; ++l) c(l) += u(index(n, j, l)) * phase;
      }
    }
    return ComplexVector(scale * c);
  };
  ComplexVector regrouped = ComplexVector::Zero(size);
  for (const auto& f : grid.low_groups()) {
    for (const auto& hf : harmonics(f)) add_mode(regrouped, hf, coefficient_at(hf));
  }
  report.regrouping_error = (regrouped - u.cast<complex>()).cwiseAbs().maxCoeff();
  return report;
}

}  // namespace stmg
