#include <doctest.h>

#include <cmath>
#include <limits>
#include <random>

#include <unsupported/Eigen/MatrixFunctions>

#include "magsplit/lanczos.hpp"

using namespace magsplit;
using cd = std::complex<double>;
using CV = ComplexVector<double>;
using CM = ComplexMatrix<double>;
using RV = RealVector<double>;
using RM = RealMatrix<double>;

namespace {

CV random_vector(Index n, std::mt19937_64& rng) {
  std::normal_distribution<double> nd;
  CV v(n);
  for (auto& z : v) z = cd(nd(rng), nd(rng));
  return v;
}

// exp(A) by scaling and squaring of a 30-term Taylor series
CM taylor_expm(const CM& A) {
  int s = 0;
  double nrm = A.cwiseAbs().rowwise().sum().maxCoeff();
  while (nrm > 0.5) {
    nrm /= 2;
    ++s;
  }
  const CM B = A / std::pow(2.0, s);
  CM term = CM::Identity(A.rows(), A.cols());
  CM sum = term;
  for (int k = 1; k <= 30; ++k) {
    term = term * B / double(k);
    sum += term;
  }
  for (int i = 0; i < s; ++i) sum = sum * sum;
  return sum;
}

CM random_hermitian(Index n, std::mt19937_64& rng, double scale) {
  std::normal_distribution<double> nd;
  CM A(n, n);
  for (Index i = 0; i < n; ++i)
    for (Index j = 0; j < n; ++j) A(i, j) = cd(nd(rng), nd(rng));
  return scale * (A + A.adjoint()) / 2.0;
}

}  // namespace

TEST_CASE("expm_tridiag trivial cases") {
  const CM E0 = expm_tridiag<double>(RV(RV::Zero(5)), RV(RV::Zero(4)));
  CHECK((E0 - CM::Identity(5, 5)).norm() <= 1e-15);

  RV theta(4);
  theta << 0.3, -1.2, 2.5, 7.0;
  const CM Ed = expm_tridiag<double>(theta, RV(RV::Zero(3)));
  for (Index i = 0; i < 4; ++i)
    for (Index j = 0; j < 4; ++j)
      CHECK(std::abs(Ed(i, j) - (i == j ? std::polar(1.0, theta[i]) : cd(0))) <= 1e-15);

  CHECK(expm_tridiag<double>(RV(0), RV(0)).size() == 0);
  CHECK_THROWS_AS(expm_tridiag<double>(RV(RV::Zero(3)), RV(RV::Zero(3))), std::invalid_argument);
  CHECK_THROWS_AS(expm_tridiag<double>(RM(RM::Zero(2, 3))), std::invalid_argument);
}

TEST_CASE("expm_tridiag on a random tridiagonal matches scaling and squaring") {
  std::mt19937_64 rng(21);
  std::normal_distribution<double> nd;
  RV d(8), e(7);
  for (auto& x : d) x = nd(rng);
  for (auto& x : e) x = nd(rng);
  RM T = RM::Zero(8, 8);
  T.diagonal() = d;
  T.diagonal(1) = e;
  T.diagonal(-1) = e;
  const CM oracle = taylor_expm(cd(0, 1) * T.cast<cd>());
  const CM E = expm_tridiag<double>(d, e);
  CHECK((E - oracle).norm() <= 1e-12 * oracle.norm());
  CHECK((E.adjoint() * E - CM::Identity(8, 8)).norm() <= 1e-13);
  CHECK((expm_tridiag<double>(T) - E).norm() <= 1e-15);
}

TEST_CASE("Lanczos with H = 0 returns v after one iteration") {
  std::mt19937_64 rng(2);
  const CV v = random_vector(20, rng);
  auto zero = [](const CV& x, CV& y) { y = CV::Zero(x.size()); };
  const auto r = expm_krylov<double>(zero, v, KrylovConfig<double>{});
  CHECK(r.iterations == 1);
  CHECK(r.converged);
  CHECK(r.breakdown);
  CHECK((r.value - v).norm() == 0.0);
}

TEST_CASE("Lanczos on a diagonal with m = N is exact") {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> ud(-3, 3);
  RV diag(32);
  for (auto& x : diag) x = ud(rng);
  const CV v = random_vector(32, rng);
  auto mv = [&](const CV& x, CV& y) { y = (diag.cast<cd>().array() * x.array()).matrix(); };
  KrylovConfig<double> cfg;
  cfg.max_iters = 32;
  cfg.tol = 1e-14;
  const auto r = expm_krylov<double>(mv, v, cfg);
  CV expected(32);
  for (Index j = 0; j < 32; ++j) expected[j] = std::polar(1.0, diag[j]) * v[j];
  CHECK((r.value - expected).norm() <= 1e-12 * v.norm());
}

TEST_CASE("Lanczos at full dimension reproduces the dense exponential") {
  std::mt19937_64 rng(4);
  const CM H = random_hermitian(64, rng, 0.2);
  const CV v = random_vector(64, rng);
  const CM oracle = (cd(0, 1) * H).exp();
  auto mv = [&](const CV& x, CV& y) { y = H * x; };
  KrylovConfig<double> cfg;
  cfg.max_iters = 64;
  cfg.tol = 1e-13;
  const auto r = expm_krylov<double>(mv, v, cfg);
  CHECK(r.converged);
  CHECK((r.value - oracle * v).norm() <= 1e-10 * v.norm());
}

TEST_CASE("converged output keeps the norm within 10 tol") {
  std::mt19937_64 rng(5);
  const CM H = random_hermitian(48, rng, 0.1);
  auto mv = [&](const CV& x, CV& y) { y = H * x; };
  for (double tol : {1e-8, 1e-10, 1e-12}) {
    const CV v = random_vector(48, rng);
    KrylovConfig<double> cfg;
    cfg.max_iters = 40;
    cfg.tol = tol;
    const auto r = expm_krylov<double>(mv, v, cfg);
    REQUIRE(r.converged);
    CHECK(std::abs(r.value.norm() - v.norm()) <= 10 * tol * v.norm());
    CHECK((r.value - (cd(0, 1) * H).exp() * v).norm() <= 10 * tol * v.norm());
  }
}

TEST_CASE("fixed iteration mode runs exactly max_iters") {
  std::mt19937_64 rng(6);
  const CM H = random_hermitian(40, rng, 0.05);
  auto mv = [&](const CV& x, CV& y) { y = H * x; };
  const CV v = random_vector(40, rng);
  KrylovConfig<double> cfg;
  cfg.max_iters = 9;
  cfg.fixed_iterations = true;
  cfg.tol = 1e-3;
  CHECK(expm_krylov<double>(mv, v, cfg).iterations == 9);
  cfg.fixed_iterations = false;
  CHECK(expm_krylov<double>(mv, v, cfg).iterations < 9);
}

TEST_CASE("error paths") {
  std::mt19937_64 rng(7);
  const CV v = random_vector(10, rng);
  auto id = [](const CV& x, CV& y) { y = x; };

  KrylovConfig<double> bad;
  bad.max_iters = 0;
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
  CHECK_THROWS_AS(expm_krylov<double>(id, v, bad), std::invalid_argument);
  bad = {};
  bad.tol = 0;
  CHECK_THROWS_AS(expm_krylov<double>(id, v, bad), std::invalid_argument);

  CHECK_THROWS_AS(expm_krylov<double>(id, CV(CV::Zero(10)), KrylovConfig<double>{}), std::invalid_argument);

  auto nan = [](const CV& x, CV& y) { y = CV::Constant(x.size(), cd(std::numeric_limits<double>::quiet_NaN(), 0)); };
  CHECK_THROWS_AS(expm_krylov<double>(nan, v, KrylovConfig<double>{}), KrylovError);

  // large spectrum, two iterations: reported, not thrown
  const CM H = random_hermitian(30, rng, 10.0);
  auto mv = [&](const CV& x, CV& y) { y = H * x; };
  KrylovConfig<double> tight;
  tight.max_iters = 2;
  const auto r = expm_krylov<double>(mv, random_vector(30, rng), tight);
  CHECK_FALSE(r.converged);
  CHECK(r.iterations == 2);
  CHECK(r.error_estimate > tight.tol);
}
