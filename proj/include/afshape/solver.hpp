// Cyclic minimisation of the region objective over unimodular codes.
//
// Each outer iteration alternates two blocks of the lifted problem
//
//     min_{x, u}  sum_cells ||Ar_t^{1/2} x - sqrt(zeta N) u_r||^2
//                         + ||Ai_t^{1/2} x - sqrt(zeta N) u_i||^2
//
// x-block: with u fixed the objective is x_bar^H B_x x_bar + const over
// x_bar = [x; 1]. It is maximised in the loaded form D_x = gamma I - B_x by
// the power-method-like map x <- exp(j arg([D_x x_bar]_{1..N})).
// u-block: closed-form normalised projections u = S x / ||S x||.

#pragma once

#include <cstdint>
#include <vector>

#include <Eigen/Dense>

#include "afshape/af_core.hpp"
#include "afshape/reformulation.hpp"

namespace afshape {

enum class GammaMode {
  kFrobenius,  // gamma_x = ||B_x||_F
  kExact,      // gamma_x = lambda_max(B_x) (clipped at 0) plus a small margin
};

struct SolverConfig {
  int n = 31;
  RegionSpec region;
  int gamma1 = 1000;
  int gamma2 = 500;
  double epsilon = 1e-6;
  // 0 disables the inner early exit; the inner loop then runs exactly gamma2 steps.
  double inner_epsilon = 0.0;
  std::uint64_t seed = 0;
  ZetaPolicy zeta_policy = ZetaPolicy::kExact;
  double delta = kDefaultZetaMargin;
  GammaMode gamma_mode = GammaMode::kFrobenius;
  bool record_inner = false;

  /// Throws ConfigError naming the offending field.
  void validate() const;
};

/// Unit vectors u_r, u_i in the order of LoadedRegion::pairs.
struct AuxiliarySet {
  std::vector<Eigen::VectorXcd> u_r;
  std::vector<Eigen::VectorXcd> u_i;
};

struct OuterRecord {
  int outer_iter = 0;
  double C = 0.0;
  double m2_objective = 0.0;
  double elapsed_ms = 0.0;
  // Worst relative change of the UQP objective between consecutive PMLI
  // steps of this block (>= 0 means monotone). 0 for the initial record.
  double uqp_worst_step = 0.0;
  int inner_steps = 0;
};

struct ConvergenceTrace {
  std::vector<OuterRecord> outer;
  // Per outer iteration, the UQP objective x_bar^H D_x x_bar at each PMLI
  // step. Only filled when SolverConfig::record_inner is set.
  std::vector<std::vector<double>> inner;
  bool converged = false;  // epsilon criterion fired before the gamma1 cap
};

struct SolverResult {
  CodeSequence initial;
  CodeSequence code;
  ConvergenceTrace trace;
  double zeta = 0.0;
};

/// Phases i.i.d. uniform on [0, 2 pi), reproducible across platforms for a
/// given seed (mt19937_64, 53-bit mantissa draws).
CodeSequence init_random_code(int n, std::uint64_t seed);

AuxiliarySet update_aux(const CodeSequence& x, const LoadedRegion& loaded);

/// sum_cells ||Ar_sqrt x - sqrt(zeta N) u_r||^2 + ||Ai_sqrt x - sqrt(zeta N) u_i||^2
double m2_objective(const CodeSequence& x, const AuxiliarySet& aux, const LoadedRegion& loaded);

/// s_x = -sqrt(zeta N) sum_cells (Ar_sqrt u_r + Ai_sqrt u_i).
Eigen::VectorXcd uqp_linear_term(const AuxiliarySet& aux, const LoadedRegion& loaded);

/// B_x = [[R, s_x], [s_x^H, 0]].
Eigen::MatrixXcd build_quadratic_form(const AuxiliarySet& aux, const LoadedRegion& loaded);

/// D_x = gamma_x I - B_x, positive semidefinite.
Eigen::MatrixXcd build_uqp(const AuxiliarySet& aux, const LoadedRegion& loaded,
                           GammaMode mode = GammaMode::kFrobenius);

/// x_bar^H D x_bar with x_bar = [x; 1] (real for Hermitian D).
double uqp_objective(const Eigen::MatrixXcd& d, const CodeSequence& x);

struct PmliResult {
  CodeSequence x;
  // Objective before the first step and after every step (steps + 1 values).
  std::vector<double> objective;
  int steps = 0;
};

/// Runs up to gamma2 steps of x <- exp(j arg([D x_bar]_{1..N})). An entry
/// whose argument is exactly zero keeps its previous phase. When
/// inner_epsilon > 0, stops once the relative objective gain drops below it.
PmliResult pmli_inner(const Eigen::MatrixXcd& d, const CodeSequence& x_start, int gamma2,
                      double inner_epsilon = 0.0);

/// Full cyclic algorithm. Deterministic for a given config.
SolverResult run(const SolverConfig& config);

/// Same, starting from a caller-supplied code instead of a seeded draw.
SolverResult run_from(const SolverConfig& config, const CodeSequence& start);

}  // namespace afshape
