// Quartic-to-quadratic reformulation of the region objective.
//
// Each kernel A is split into a Hermitian part Ar = (A + A^H)/2 and the
// Hermitian matrix Ai_j = j(A - A^H)/2, so that for any z
//
//     |z^H A z|^2 = |z^H Ar z|^2 + |z^H Ai_j z|^2.
//
// Both are then loaded with zeta*I to make them positive definite, and the
// loaded matrices are paired with their Hermitian square roots.

#pragma once

#include <span>
#include <vector>

#include <Eigen/Dense>

#include "afshape/af_core.hpp"

namespace afshape {

struct SplitPair {
  BinIndex cell;
  Eigen::MatrixXcd Ar;
  Eigen::MatrixXcd Ai_j;
};

SplitPair split_kernel(const AFKernel& kernel);

enum class ZetaPolicy {
  kExact,  // per-matrix minimum eigenvalue
  kBound,  // unitary spectral bound, all eigenvalues in [-1, 1]
};

inline constexpr double kDefaultZetaMargin = 0.01;

/// Smallest eigenvalue over every Ar and Ai_j in the collection.
double min_split_eigenvalue(std::span<const SplitPair> splits);

/// zeta = max(0, -min_eig) + delta under kExact, 1 + delta under kBound.
/// The result is always > 0 so that sqrt(zeta*N) is defined.
double choose_zeta(std::span<const SplitPair> splits, ZetaPolicy policy = ZetaPolicy::kExact,
                   double delta = kDefaultZetaMargin);

struct LoadedPair {
  BinIndex cell;
  Eigen::MatrixXcd Ar_t;
  Eigen::MatrixXcd Ai_t;
  Eigen::MatrixXcd Ar_sqrt;
  Eigen::MatrixXcd Ai_sqrt;
  double zeta = 0.0;
  double min_eig_r = 0.0;
  double min_eig_i = 0.0;
};

/// Loads both halves with zeta*I and takes Hermitian square roots through an
/// eigendecomposition. Throws NumericalError naming the cell when a loaded
/// matrix has min eigenvalue <= 1e-12*zeta.
LoadedPair load_and_root(const SplitPair& split, double zeta);

/// Hermitian PSD square root V*sqrt(L)*V^H of a Hermitian matrix. Also
/// reports the smallest eigenvalue through min_eig.
Eigen::MatrixXcd hermitian_sqrt(const Eigen::MatrixXcd& m, double* min_eig = nullptr);

/// All loaded pairs of a region, precomputed once per solve.
struct LoadedRegion {
  int n = 0;
  double zeta = 0.0;
  std::vector<LoadedPair> pairs;
  Eigen::MatrixXcd R;  // sum over cells of (Ar_t + Ai_t)
};

LoadedRegion prepare_region(int n, const RegionSpec& region, ZetaPolicy policy = ZetaPolicy::kExact,
                            double delta = kDefaultZetaMargin);

/// sum over cells of |x^H Ar_t x - zeta N|^2 + |x^H Ai_t x - zeta N|^2.
/// Equal to the region objective C for unimodular x.
double loaded_objective(const CodeSequence& x, const LoadedRegion& loaded);

}  // namespace afshape
