#include "afshape/af_core.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace afshape {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

void require_length(int n) {
  if (n < 2) throw ConfigError("n", "code length must be >= 2, got " + std::to_string(n));
}

int wrap(long long i, int n) {
  long long r = i % n;
  return static_cast<int>(r < 0 ? r + n : r);
}

// exp(-j 2 pi m p / N) with the integer product reduced mod N first.
cplx doppler_phasor(long long m, int p, int n) {
  const int e = wrap(m * p, n);
  return std::polar(1.0, -kTwoPi * e / n);
}

Eigen::VectorXcd doppler_vector(int p, int n) {
  Eigen::VectorXcd d(n);
  for (int i = 0; i < n; ++i) d(i) = doppler_phasor(i + 1, p, n);
  return d;
}

void require_cell(int k, int p, int n) {
  if (std::abs(k) > n - 1)
    throw ConfigError("k", "lag " + std::to_string(k) + " outside [-" + std::to_string(n - 1) + ", " +
                               std::to_string(n - 1) + "]");
  const auto [lo, hi] = doppler_range(n);
  if (p < lo || p > hi)
    throw ConfigError("p", "Doppler bin " + std::to_string(p) + " outside [" + std::to_string(lo) + ", " +
                               std::to_string(hi) + "]");
}

}  // namespace

CodeSequence::CodeSequence(std::vector<double> phases) : phases_(std::move(phases)) {
  require_length(static_cast<int>(phases_.size()));
}

CodeSequence CodeSequence::from_complex(const Eigen::VectorXcd& x) {
  std::vector<double> ph(static_cast<std::size_t>(x.size()));
  for (Eigen::Index i = 0; i < x.size(); ++i) ph[static_cast<std::size_t>(i)] = std::arg(x(i));
  return CodeSequence(std::move(ph));
}

Eigen::VectorXcd CodeSequence::to_vector() const {
  Eigen::VectorXcd v(length());
  for (std::size_t i = 0; i < phases_.size(); ++i) v(static_cast<Eigen::Index>(i)) = (*this)[i];
  return v;
}

CodeSequence CodeSequence::rotated(double phi) const {
  std::vector<double> ph = phases_;
  for (double& a : ph) a += phi;
  return CodeSequence(std::move(ph));
}

std::pair<int, int> doppler_range(int n) {
  if (n % 2 == 0) return {-n / 2, n / 2 - 1};
  return {-(n - 1) / 2, (n - 1) / 2};
}

RegionSpec::RegionSpec(std::vector<int> lags, std::vector<int> bins)
    : lags_(std::move(lags)), bins_(std::move(bins)) {
  for (auto* v : {&lags_, &bins_}) {
    std::sort(v->begin(), v->end());
    v->erase(std::unique(v->begin(), v->end()), v->end());
  }
}

std::vector<BinIndex> RegionSpec::cells() const {
  std::vector<BinIndex> out;
  out.reserve(cell_count());
  for (int k : lags_)
    for (int p : bins_) out.push_back({k, p});
  return out;
}

void RegionSpec::validate(int n) const {
  require_length(n);
  if (lags_.empty()) throw ConfigError("k", "delay lag set is empty");
  if (bins_.empty()) throw ConfigError("p", "Doppler bin set is empty");
  for (int k : lags_) require_cell(k, 0, n);
  for (int p : bins_) require_cell(0, p, n);
  const bool zero_lag = std::binary_search(lags_.begin(), lags_.end(), 0);
  const bool zero_bin = std::binary_search(bins_.begin(), bins_.end(), 0);
  if (zero_lag && zero_bin)
    throw ConfigError("k", "region contains the mainlobe (k,p) = (0,0), which cannot be suppressed");
}

Eigen::MatrixXcd build_doppler_diag(int p, int n) {
  require_length(n);
  return doppler_vector(p, n).asDiagonal();
}

Eigen::MatrixXcd build_shift(int k, int n) {
  require_length(n);
  if (std::abs(k) > n - 1)
    throw ConfigError("k", "lag " + std::to_string(k) + " must satisfy |k| <= N-1 = " + std::to_string(n - 1));
  Eigen::MatrixXcd j = Eigen::MatrixXcd::Zero(n, n);
  for (int i = 0; i < n; ++i) j(i, wrap(i + k, n)) = 1.0;
  return j;
}

AFKernel build_kernel(int k, int p, int n) {
  const Eigen::MatrixXcd j = build_shift(k, n);
  return {k, p, doppler_vector(p, n).asDiagonal() * j};
}

cplx eval_af(const CodeSequence& x, int k, int p) {
  const int n = x.length();
  require_cell(k, p, n);
  cplx acc{0.0, 0.0};
  for (int m = 0; m < n; ++m) {
    acc += x[static_cast<std::size_t>(wrap(m + k, n))] * std::conj(x[static_cast<std::size_t>(m)]) *
           doppler_phasor(m + 1, p, n);
  }
  return acc;
}

cplx eval_af_matrix(const CodeSequence& x, int k, int p) {
  const int n = x.length();
  require_cell(k, p, n);
  const Eigen::VectorXcd v = x.to_vector();
  return v.dot(build_kernel(k, p, n).A * v);  // dot() conjugates the left operand
}

double eval_objective(const CodeSequence& x, const RegionSpec& region) {
  region.validate(x.length());
  double c = 0.0;
  for (const auto& cell : region.cells()) c += std::norm(eval_af(x, cell.lag, cell.doppler));
  return c;
}

double level_db(double magnitude, int n) {
  if (!(magnitude > 0.0)) return kDbFloor;
  const double db = 20.0 * std::log10(magnitude / n);
  return std::clamp(db, kDbFloor, 0.0);
}

Eigen::MatrixXd AFGrid::magnitude_db() const {
  return magnitude.unaryExpr([this](double m) { return level_db(m, n); });
}

double AFGrid::at(int k, int p) const {
  require_cell(k, p, n);
  return magnitude(k + n - 1, p - bins.front());
}

AFGrid af_grid(const CodeSequence& x) {
  AFGrid g;
  g.n = x.length();
  const auto [lo, hi] = doppler_range(g.n);
  for (int k = -(g.n - 1); k <= g.n - 1; ++k) g.lags.push_back(k);
  for (int p = lo; p <= hi; ++p) g.bins.push_back(p);
  g.magnitude.resize(static_cast<Eigen::Index>(g.lags.size()), static_cast<Eigen::Index>(g.bins.size()));
  for (std::size_t r = 0; r < g.lags.size(); ++r)
    for (std::size_t c = 0; c < g.bins.size(); ++c)
      g.magnitude(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) =
          std::abs(eval_af(x, g.lags[r], g.bins[c]));
  return g;
}

}  // namespace afshape
