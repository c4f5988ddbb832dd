#include <doctest.h>

#include "afshape/reformulation.hpp"
#include "oracles.hpp"

using namespace afshape;

namespace {

const cplx kJ{0.0, 1.0};

double min_eig(const Eigen::MatrixXcd& h) {
  return Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd>(h, Eigen::EigenvaluesOnly).eigenvalues().minCoeff();
}

RegionSpec reference_region() { return RegionSpec({5, 6, 7}, {-15, -14, -13, 11, 12, 13, 14}); }

}  // namespace

TEST_CASE("split of trivial kernels") {
  const int n = 4;
  const Eigen::MatrixXcd id = Eigen::MatrixXcd::Identity(n, n);
  const SplitPair s1 = split_kernel({0, 0, id});
  CHECK(s1.Ar.isApprox(id));
  CHECK(s1.Ai_j.norm() == 0.0);

  // A = jI: A - A^H = 2jI, so Ai_j = j * jI = -I, and Ar - j*Ai_j = jI = A.
  const SplitPair s2 = split_kernel({0, 0, kJ * id});
  CHECK(s2.Ar.norm() == 0.0);
  CHECK((s2.Ai_j + id).norm() < 1e-15);
  CHECK((s2.Ar - kJ * s2.Ai_j - kJ * id).norm() < 1e-15);
}

TEST_CASE("split invariants and the modulus identity") {
  std::mt19937_64 gen(17);
  for (int n : {4, 8, 16}) {
    for (int trial = 0; trial < 30; ++trial) {
      const Eigen::MatrixXcd a = oracle::random_unitary(n, gen);
      const Eigen::VectorXcd z = oracle::random_vector(n, gen);
      const SplitPair s = split_kernel({0, 0, a});
      CHECK((s.Ar - s.Ar.adjoint()).norm() < 1e-12);
      CHECK((s.Ai_j - s.Ai_j.adjoint()).norm() < 1e-12);
      CHECK((s.Ar - kJ * s.Ai_j - a).norm() < 1e-12);
      CHECK(min_eig(s.Ar) >= -1.0 - 1e-12);
      CHECK(min_eig(-s.Ar) >= -1.0 - 1e-12);
      CHECK(min_eig(s.Ai_j) >= -1.0 - 1e-12);

      const cplx qa = z.dot(a * z), qr = z.dot(s.Ar * z), qi = z.dot(s.Ai_j * z);
      CHECK(std::abs(qr.imag()) < 1e-10 * std::abs(qa) + 1e-12);
      CHECK(std::abs(qi.imag()) < 1e-10 * std::abs(qa) + 1e-12);
      CHECK(oracle::rel_err(std::norm(qr) + std::norm(qi), std::norm(qa)) < 1e-10);
    }
  }
}

TEST_CASE("zeta choice") {
  const int n = 4;
  const Eigen::MatrixXcd id = Eigen::MatrixXcd::Identity(n, n);
  const std::vector<SplitPair> trivial = {split_kernel({0, 0, id}), split_kernel({0, 0, id})};
  CHECK(choose_zeta(trivial) == doctest::Approx(kDefaultZetaMargin));
  CHECK(choose_zeta(trivial, ZetaPolicy::kBound) == doctest::Approx(1.01));
  CHECK(choose_zeta(trivial, ZetaPolicy::kBound, 0.5) == doctest::Approx(1.5));
  CHECK_THROWS_AS(choose_zeta(std::vector<SplitPair>{}), ConfigError);
  CHECK_THROWS_AS(choose_zeta(trivial, ZetaPolicy::kExact, 0.0), ConfigError);

  // Reference region at N = 31. The smallest eigenvalue over all 42 split
  // matrices, computed independently with numpy.linalg.eigvalsh, is
  // -0.9987165071710534 (= -cos(pi/62)).
  std::vector<SplitPair> splits;
  for (const auto& c : reference_region().cells()) splits.push_back(split_kernel(build_kernel(c.lag, c.doppler, 31)));
  CHECK(min_split_eigenvalue(splits) == doctest::Approx(-0.9987165071710534).epsilon(1e-12));
  const double zeta = choose_zeta(splits);
  CHECK(zeta == doctest::Approx(0.9987165071710534 + 0.01).epsilon(1e-12));
  CHECK(zeta > 1.0);
  CHECK(zeta <= 1.01);
  for (const auto& s : splits) {
    CHECK(zeta > -min_eig(s.Ar));
    CHECK(zeta > -min_eig(s.Ai_j));
  }
}

TEST_CASE("load and root") {
  const int n = 5;
  const Eigen::MatrixXcd id = Eigen::MatrixXcd::Identity(n, n);
  const LoadedPair lp = load_and_root(split_kernel({0, 0, id}), 1.0);
  CHECK(lp.Ar_t.isApprox(2.0 * id));
  CHECK((lp.Ar_sqrt - std::sqrt(2.0) * id).norm() < 1e-13);
  CHECK((lp.Ai_sqrt - id).norm() < 1e-13);

  // A = I has Ar = I, Ai_j = 0; loading by zeta = 0 leaves Ai_t singular.
  try {
    load_and_root(split_kernel({3, -2, id}), 0.0);
    FAIL("expected NumericalError");
  } catch (const NumericalError& e) {
    CHECK(std::string(e.what()).find("k=3, p=-2") != std::string::npos);
  }
}

TEST_CASE("square roots reconstruct the loaded matrices") {
  std::mt19937_64 gen(3);
  for (int n : {4, 9}) {
    for (int trial = 0; trial < 10; ++trial) {
      const LoadedPair lp = load_and_root(split_kernel({0, 0, oracle::random_unitary(n, gen)}), 1.01);
      for (const auto* pr : {&lp.Ar_sqrt, &lp.Ai_sqrt}) CHECK((*pr - pr->adjoint()).norm() == 0.0);
      CHECK((lp.Ar_sqrt * lp.Ar_sqrt - lp.Ar_t).norm() / lp.Ar_t.norm() < 1e-9);
      CHECK((lp.Ai_sqrt * lp.Ai_sqrt - lp.Ai_t).norm() / lp.Ai_t.norm() < 1e-9);
      CHECK(min_eig(lp.Ar_sqrt) >= 0.0);
      CHECK(min_eig(lp.Ai_sqrt) >= 0.0);
      CHECK(lp.min_eig_r > 0.0);
      CHECK(lp.min_eig_i > 0.0);
    }
  }
}

TEST_CASE("loaded objective equals the quartic objective") {
  std::mt19937_64 gen(99);
  for (const auto policy : {ZetaPolicy::kExact, ZetaPolicy::kBound}) {
    const LoadedRegion loaded = prepare_region(31, reference_region(), policy);
    CHECK(loaded.pairs.size() == 21);
    for (int trial = 0; trial < 5; ++trial) {
      const CodeSequence x = oracle::random_code(31, gen);
      CHECK(oracle::rel_err(loaded_objective(x, loaded), eval_objective(x, reference_region())) < 1e-8);
    }
  }
  const LoadedRegion small = prepare_region(6, RegionSpec({1, -2}, {-1, 2}));
  Eigen::MatrixXcd r = Eigen::MatrixXcd::Zero(6, 6);
  for (const auto& lp : small.pairs) r += lp.Ar_t + lp.Ai_t;
  CHECK((small.R - r).norm() == 0.0);
}
