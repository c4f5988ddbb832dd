#include "afshape/reformulation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace afshape {

namespace {

const cplx kJ{0.0, 1.0};

double min_eigenvalue(const Eigen::MatrixXcd& h) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(h, Eigen::EigenvaluesOnly);
  return es.eigenvalues().minCoeff();
}

std::string cell_name(const BinIndex& c) {
  return "(k=" + std::to_string(c.lag) + ", p=" + std::to_string(c.doppler) + ")";
}

}  // namespace

SplitPair split_kernel(const AFKernel& kernel) {
  const Eigen::MatrixXcd ah = kernel.A.adjoint();
  return {{kernel.lag, kernel.doppler}, 0.5 * (kernel.A + ah), (0.5 * kJ) * (kernel.A - ah)};
}

double min_split_eigenvalue(std::span<const SplitPair> splits) {
  double lo = std::numeric_limits<double>::infinity();
  for (const auto& s : splits) lo = std::min({lo, min_eigenvalue(s.Ar), min_eigenvalue(s.Ai_j)});
  return lo;
}

double choose_zeta(std::span<const SplitPair> splits, ZetaPolicy policy, double delta) {
  if (!(delta > 0.0)) throw ConfigError("delta", "loading margin must be positive");
  if (splits.empty()) throw ConfigError("k", "cannot choose a loading for an empty region");
  if (policy == ZetaPolicy::kBound) return 1.0 + delta;
  return std::max(0.0, -min_split_eigenvalue(splits)) + delta;
}

Eigen::MatrixXcd hermitian_sqrt(const Eigen::MatrixXcd& m, double* min_eig) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(m);
  if (es.info() != Eigen::Success) throw NumericalError("eigendecomposition failed");
  const Eigen::VectorXd lambda = es.eigenvalues();
  if (min_eig) *min_eig = lambda.minCoeff();
  const Eigen::VectorXd root = lambda.cwiseMax(0.0).cwiseSqrt();
  const Eigen::MatrixXcd& v = es.eigenvectors();
  Eigen::MatrixXcd s = v * root.cast<cplx>().asDiagonal() * v.adjoint();
  return 0.5 * (s + s.adjoint());
}

LoadedPair load_and_root(const SplitPair& split, double zeta) {
  const auto n = split.Ar.rows();
  const Eigen::MatrixXcd loading = zeta * Eigen::MatrixXcd::Identity(n, n);
  LoadedPair out;
  out.cell = split.cell;
  out.zeta = zeta;
  out.Ar_t = split.Ar + loading;
  out.Ai_t = split.Ai_j + loading;
  out.Ar_sqrt = hermitian_sqrt(out.Ar_t, &out.min_eig_r);
  out.Ai_sqrt = hermitian_sqrt(out.Ai_t, &out.min_eig_i);
  const double floor = 1e-12 * std::abs(zeta);
  if (!(out.min_eig_r > floor) || !(out.min_eig_i > floor)) {
    throw NumericalError("loaded matrix not positive definite at " + cell_name(split.cell) +
                         ": min eigenvalues " + std::to_string(out.min_eig_r) + ", " +
                         std::to_string(out.min_eig_i) + " with zeta " + std::to_string(zeta));
  }
  return out;
}

LoadedRegion prepare_region(int n, const RegionSpec& region, ZetaPolicy policy, double delta) {
  region.validate(n);
  std::vector<SplitPair> splits;
  splits.reserve(region.cell_count());
  for (const auto& c : region.cells()) splits.push_back(split_kernel(build_kernel(c.lag, c.doppler, n)));

  LoadedRegion out;
  out.n = n;
  out.zeta = choose_zeta(splits, policy, delta);
  out.R = Eigen::MatrixXcd::Zero(n, n);
  out.pairs.reserve(splits.size());
  for (const auto& s : splits) {
    out.pairs.push_back(load_and_root(s, out.zeta));
    out.R += out.pairs.back().Ar_t + out.pairs.back().Ai_t;
  }
  return out;
}

double loaded_objective(const CodeSequence& x, const LoadedRegion& loaded) {
  const Eigen::VectorXcd v = x.to_vector();
  const double target = loaded.zeta * loaded.n;
  double acc = 0.0;
  for (const auto& lp : loaded.pairs) {
    acc += std::norm(v.dot(lp.Ar_t * v) - target);
    acc += std::norm(v.dot(lp.Ai_t * v) - target);
  }
  return acc;
}

}  // namespace afshape
