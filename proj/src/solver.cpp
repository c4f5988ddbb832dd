#include "afshape/solver.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>

namespace afshape {

void SolverConfig::validate() const {
  if (n < 2) throw ConfigError("n", "code length must be >= 2, got " + std::to_string(n));
  region.validate(n);
  if (gamma1 < 1) throw ConfigError("gamma1", "outer iteration cap must be >= 1, got " + std::to_string(gamma1));
  if (gamma2 < 1) throw ConfigError("gamma2", "inner iteration count must be >= 1, got " + std::to_string(gamma2));
  if (!(epsilon > 0.0)) throw ConfigError("epsilon", "stopping tolerance must be positive");
  if (!(inner_epsilon >= 0.0)) throw ConfigError("inner_epsilon", "inner tolerance must be >= 0");
  if (!(delta > 0.0)) throw ConfigError("delta", "loading margin must be positive");
}

CodeSequence init_random_code(int n, std::uint64_t seed) {
  if (n < 2) throw ConfigError("n", "code length must be >= 2, got " + std::to_string(n));
  std::mt19937_64 gen(seed);
  std::vector<double> ph(static_cast<std::size_t>(n));
  for (double& a : ph) {
    const double u = static_cast<double>(gen() >> 11) * 0x1.0p-53;  // [0, 1)
    a = 2.0 * std::numbers::pi * u;
  }
  return CodeSequence(std::move(ph));
}

AuxiliarySet update_aux(const CodeSequence& x, const LoadedRegion& loaded) {
  const Eigen::VectorXcd v = x.to_vector();
  AuxiliarySet aux;
  aux.u_r.reserve(loaded.pairs.size());
  aux.u_i.reserve(loaded.pairs.size());
  for (const auto& lp : loaded.pairs) {
    Eigen::VectorXcd ur = lp.Ar_sqrt * v;
    Eigen::VectorXcd ui = lp.Ai_sqrt * v;
    const double nr = ur.norm(), ni = ui.norm();
    // Loaded matrices are PD and x != 0, so neither product can vanish.
    if (!(nr > 0.0) || !(ni > 0.0)) throw NumericalError("zero-norm auxiliary projection");
    aux.u_r.push_back(ur / nr);
    aux.u_i.push_back(ui / ni);
  }
  return aux;
}

double m2_objective(const CodeSequence& x, const AuxiliarySet& aux, const LoadedRegion& loaded) {
  const Eigen::VectorXcd v = x.to_vector();
  const double c = std::sqrt(loaded.zeta * loaded.n);
  double acc = 0.0;
  for (std::size_t i = 0; i < loaded.pairs.size(); ++i) {
    const auto& lp = loaded.pairs[i];
    acc += (lp.Ar_sqrt * v - c * aux.u_r[i]).squaredNorm();
    acc += (lp.Ai_sqrt * v - c * aux.u_i[i]).squaredNorm();
  }
  return acc;
}

Eigen::VectorXcd uqp_linear_term(const AuxiliarySet& aux, const LoadedRegion& loaded) {
  Eigen::VectorXcd s = Eigen::VectorXcd::Zero(loaded.n);
  for (std::size_t i = 0; i < loaded.pairs.size(); ++i) {
    s.noalias() += loaded.pairs[i].Ar_sqrt * aux.u_r[i];
    s.noalias() += loaded.pairs[i].Ai_sqrt * aux.u_i[i];
  }
  return -std::sqrt(loaded.zeta * loaded.n) * s;
}

Eigen::MatrixXcd build_quadratic_form(const AuxiliarySet& aux, const LoadedRegion& loaded) {
  const int n = loaded.n;
  const Eigen::VectorXcd s = uqp_linear_term(aux, loaded);
  Eigen::MatrixXcd b(n + 1, n + 1);
  b.topLeftCorner(n, n) = loaded.R;
  b.topRightCorner(n, 1) = s;
  b.bottomLeftCorner(1, n) = s.adjoint();
  b(n, n) = 0.0;
  return b;
}

Eigen::MatrixXcd build_uqp(const AuxiliarySet& aux, const LoadedRegion& loaded, GammaMode mode) {
  const Eigen::MatrixXcd b = build_quadratic_form(aux, loaded);
  double gamma = 0.0;
  if (mode == GammaMode::kFrobenius) {
    gamma = b.norm();
  } else {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(b, Eigen::EigenvaluesOnly);
    const double top = std::max(0.0, es.eigenvalues().maxCoeff());
    gamma = top + 1e-9 * std::max(1.0, top);
  }
  Eigen::MatrixXcd d = -b;
  d.diagonal().array() += gamma;
  return d;
}

double uqp_objective(const Eigen::MatrixXcd& d, const CodeSequence& x) {
  const auto n = static_cast<Eigen::Index>(x.size());
  Eigen::VectorXcd xb(n + 1);
  xb.head(n) = x.to_vector();
  xb(n) = 1.0;
  return xb.dot(d * xb).real();
}

PmliResult pmli_inner(const Eigen::MatrixXcd& d, const CodeSequence& x_start, int gamma2, double inner_epsilon) {
  const auto n = static_cast<Eigen::Index>(x_start.size());
  if (d.rows() != n + 1 || d.cols() != n + 1) throw ConfigError("n", "UQP matrix size does not match code length");
  if (gamma2 < 1) throw ConfigError("gamma2", "inner iteration count must be >= 1");

  std::vector<double> phases = x_start.phases();
  Eigen::VectorXcd xb(n + 1);
  xb.head(n) = x_start.to_vector();
  xb(n) = 1.0;

  PmliResult out{x_start, {}, 0};
  out.objective.reserve(static_cast<std::size_t>(gamma2) + 1);
  Eigen::VectorXcd y = d * xb;
  out.objective.push_back(xb.dot(y).real());

  for (int s = 0; s < gamma2; ++s) {
    for (Eigen::Index i = 0; i < n; ++i) {
      if (y(i) != cplx{0.0, 0.0}) phases[static_cast<std::size_t>(i)] = std::arg(y(i));
      xb(i) = std::polar(1.0, phases[static_cast<std::size_t>(i)]);
    }
    y.noalias() = d * xb;
    const double prev = out.objective.back();
    out.objective.push_back(xb.dot(y).real());
    ++out.steps;
    if (inner_epsilon > 0.0 && prev != 0.0 && (out.objective.back() - prev) / std::abs(prev) < inner_epsilon) break;
  }
  out.x = CodeSequence(std::move(phases));
  return out;
}

namespace {

double worst_relative_step(const std::vector<double>& obj) {
  double worst = std::numeric_limits<double>::infinity();
  for (std::size_t s = 1; s < obj.size(); ++s) {
    const double scale = std::max(std::abs(obj[s - 1]), std::numeric_limits<double>::min());
    worst = std::min(worst, (obj[s] - obj[s - 1]) / scale);
  }
  return std::isfinite(worst) ? worst : 0.0;
}

}  // namespace

SolverResult run_from(const SolverConfig& config, const CodeSequence& start) {
  config.validate();
  if (start.length() != config.n)
    throw ConfigError("n", "starting code has length " + std::to_string(start.length()) + ", config says " +
                               std::to_string(config.n));

  using clock = std::chrono::steady_clock;
  const auto t0 = clock::now();
  auto elapsed = [&] { return std::chrono::duration<double, std::milli>(clock::now() - t0).count(); };

  const LoadedRegion loaded = prepare_region(config.n, config.region, config.zeta_policy, config.delta);

  SolverResult res{start, start, {}, loaded.zeta};
  CodeSequence x = start;
  AuxiliarySet aux = update_aux(x, loaded);
  double c_prev = eval_objective(x, config.region);
  res.trace.outer.push_back({0, c_prev, m2_objective(x, aux, loaded), elapsed(), 0.0, 0});

  for (int t = 1; t <= config.gamma1; ++t) {
    const Eigen::MatrixXcd d = build_uqp(aux, loaded, config.gamma_mode);
    PmliResult inner = pmli_inner(d, x, config.gamma2, config.inner_epsilon);
    x = std::move(inner.x);
    aux = update_aux(x, loaded);

    const double c = eval_objective(x, config.region);
    res.trace.outer.push_back(
        {t, c, m2_objective(x, aux, loaded), elapsed(), worst_relative_step(inner.objective), inner.steps});
    if (config.record_inner) res.trace.inner.push_back(std::move(inner.objective));

    const bool stalled = c_prev == 0.0 || std::abs((c - c_prev) / c_prev) <= config.epsilon;
    c_prev = c;
    if (stalled) {
      res.trace.converged = true;
      break;
    }
  }
  res.code = std::move(x);
  return res;
}

SolverResult run(const SolverConfig& config) {
  config.validate();
  return run_from(config, init_random_code(config.n, config.seed));
}

}  // namespace afshape
