// Discrete (slow-time) ambiguity function of a unimodular code.
//
// The code x has N entries x_n = exp(j*phase_n). Its discrete ambiguity
// function at delay lag k and Doppler bin p is
//
//     r[k,p] = sum_n x_n conj(x_{n-k}) exp(-j 2 pi (n-k) p / N)
//
// with cyclic indexing of n-k, which is the same quantity as the quadratic
// form x^H D_p J_k x. The chirp-level sinc(pi p/N) factor of the exact
// ambiguity function is dropped (slow-target approximation).

#pragma once

#include <complex>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

namespace afshape {

using cplx = std::complex<double>;

/// Raised for invalid user-supplied parameters (bad N, out-of-range indices, ...).
class ConfigError : public std::invalid_argument {
 public:
  ConfigError(std::string field, const std::string& what)
      : std::invalid_argument(field + ": " + what), field_(std::move(field)) {}
  const std::string& field() const noexcept { return field_; }

 private:
  std::string field_;
};

/// Raised when a numerical precondition fails at run time (e.g. loss of
/// positive definiteness after loading).
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Unimodular code stored as phases, so |x_n| = 1 holds by construction.
class CodeSequence {
 public:
  explicit CodeSequence(std::vector<double> phases);

  static CodeSequence from_complex(const Eigen::VectorXcd& x);

  std::size_t size() const noexcept { return phases_.size(); }
  int length() const noexcept { return static_cast<int>(phases_.size()); }
  const std::vector<double>& phases() const noexcept { return phases_; }

  cplx operator[](std::size_t i) const { return std::polar(1.0, phases_[i]); }
  Eigen::VectorXcd to_vector() const;

  /// Same code multiplied by exp(j*phi).
  CodeSequence rotated(double phi) const;

 private:
  std::vector<double> phases_;
};

struct BinIndex {
  int lag = 0;
  int doppler = 0;
  friend bool operator==(const BinIndex&, const BinIndex&) = default;
};

/// Smallest and largest Doppler bin for length n: -n/2..n/2-1 for even n,
/// -(n-1)/2..(n-1)/2 for odd n. Exactly n bins either way.
std::pair<int, int> doppler_range(int n);

/// Suppression region: the cartesian product of delay lags and Doppler bins.
class RegionSpec {
 public:
  RegionSpec() = default;
  /// Sorts and de-duplicates both sets. Validation against a code length
  /// happens in validate().
  RegionSpec(std::vector<int> lags, std::vector<int> bins);

  const std::vector<int>& lags() const noexcept { return lags_; }
  const std::vector<int>& bins() const noexcept { return bins_; }

  /// Bins in fixed order: lags ascending, then Doppler ascending.
  std::vector<BinIndex> cells() const;
  std::size_t cell_count() const noexcept { return lags_.size() * bins_.size(); }

  /// Throws ConfigError (field "k" or "p") on empty sets, out-of-range
  /// indices, or when the mainlobe (0,0) falls inside the region.
  void validate(int n) const;

 private:
  std::vector<int> lags_;
  std::vector<int> bins_;
};

/// D_p = Diag(exp(-j 2 pi n p / N)), n = 1..N.
Eigen::MatrixXcd build_doppler_diag(int p, int n);

/// Cyclic shift with (J_k x)_i = x_{(i+k) mod N} (0-based); J_{-k} = J_k^H.
Eigen::MatrixXcd build_shift(int k, int n);

/// A_{k,p} = D_p J_k.
struct AFKernel {
  int lag;
  int doppler;
  Eigen::MatrixXcd A;
};

AFKernel build_kernel(int k, int p, int n);

/// Direct cyclic sum. Throws ConfigError for out-of-range (k,p).
cplx eval_af(const CodeSequence& x, int k, int p);

/// Same value through the quadratic form x^H A_{k,p} x.
cplx eval_af_matrix(const CodeSequence& x, int k, int p);

/// C = sum over the region of |r[k,p]|^2.
double eval_objective(const CodeSequence& x, const RegionSpec& region);

/// |r| normalised to the mainlobe, in dB, floored at -100 dB.
double level_db(double magnitude, int n);

inline constexpr double kDbFloor = -100.0;

/// Full (2N-1) x N grid of |r[k,p]|. Rows are lags -N+1..N-1, columns are
/// Doppler bins in doppler_range(N) order.
struct AFGrid {
  int n = 0;
  std::vector<int> lags;
  std::vector<int> bins;
  Eigen::MatrixXd magnitude;

  Eigen::MatrixXd magnitude_db() const;
  double at(int k, int p) const;
};

AFGrid af_grid(const CodeSequence& x);

}  // namespace afshape
