#include "verify.hpp"

#include <cmath>
#include <cstdio>
#include <numbers>

#include <Eigen/SVD>

#include "magsplit/moments.hpp"

namespace magsplit::harness {

namespace {

GridPtr<double> periodic_grid(Index n, double length = 2 * std::numbers::pi) {
  return std::make_shared<const Grid1D<double>>(0.0, length, n);
}

double relative(const ComplexVector<double>& a, const ComplexVector<double>& b) {
  const double scale = std::max(a.norm(), b.norm());
  return scale == 0 ? 0.0 : (a - b).norm() / scale;
}

void report(std::ostream& log, std::vector<VerifyCheck>& out, std::string name, double value, double limit) {
  const bool ok = value <= limit;
  char line[200];
  std::snprintf(line, sizeof line, "%-4s %-58s %.3e (limit %.1e)", ok ? "ok" : "FAIL", name.c_str(), value, limit);
  log << line << '\n';
  out.push_back({std::move(name), value, limit, ok});
}

}  // namespace

RealVector<double> random_smooth_samples(const Grid1D<double>& grid, std::mt19937_64& rng, Index band) {
  std::normal_distribution<double> normal(0.0, 1.0);
  const auto& x = grid.nodes();
  RealVector<double> f = RealVector<double>::Constant(grid.size(), normal(rng));
  const double base = 2 * std::numbers::pi / grid.length();
  for (Index m = 1; m <= band; ++m) {
    const double c = normal(rng) / double(m);
    const double s = normal(rng) / double(m);
    f += (c * (base * double(m) * (x.array() - grid.a())).cos() + s * (base * double(m) * (x.array() - grid.a())).sin())
             .matrix();
  }
  return f;
}

SymOpSum<double> random_symop(GridPtr<double> grid, std::mt19937_64& rng, int max_order) {
  std::uniform_int_distribution<int> count(1, 4);
  std::uniform_int_distribution<int> order(0, max_order);
  std::uniform_real_distribution<double> coeff(-2.0, 2.0);
  SymOpSum<double> op(grid);
  const int terms = count(rng);
  for (int t = 0; t < terms; ++t) op.add(order(rng), random_smooth_samples(*grid, rng, grid->size() / 8), coeff(rng));
  return op;
}

std::vector<VerifyCheck> run_verification(std::ostream& log, std::uint64_t seed) {
  std::vector<VerifyCheck> checks;
  std::mt19937_64 rng(seed);

  log << "commutator identities\n";
  {
    auto g = periodic_grid(64);
    const RealVector<double> mu = g->nodes().array().sin().matrix();
    const auto r = verify_commutator_identities(mu, g);
    for (int i = 0; i < 4; ++i)
      report(log, checks, std::string("mu = sin x, n = 64: ") + CommutatorIdentityReport<double>::names[i],
             r.relative_errors[i], 1e-9);
  }
  {
    auto g = periodic_grid(128);
    const RealVector<double> mu = (g->nodes().array().sin() + 0.3 * (2 * g->nodes().array()).cos()).matrix();
    const auto r = verify_commutator_identities(mu, g);
    report(log, checks, "mu = sin x + 0.3 cos 2x, n = 128: max over identities", r.max_error(), 1e-9);
  }

  log << "fast matvec vs dense materialisation\n";
  {
    double worst = 0;
    double worst_skew = 0;
    bool counts_ok = true;
    for (int trial = 0; trial < 50; ++trial) {
      const Index n = Index(16) << (trial % 3);
      auto g = periodic_grid(n, 3.0);
      SpectralWorkspace<double> ws(g);
      const SymOpSum<double> op = random_symop(g, rng);
      ComplexVector<double> v(n);
      std::normal_distribution<double> normal(0.0, 1.0);
      for (Index j = 0; j < n; ++j) v[j] = {normal(rng), normal(rng)};
      ComplexVector<double> fast;
      ws.reset_transforms();
      apply_into(ws, op, v, fast);
      const std::uint64_t used = ws.transforms();
      const Index diff = op.differential_terms();
      counts_ok = counts_ok && used == std::uint64_t(diff == 0 ? 0 : 2 + 2 * diff);
      const ComplexMatrix<double> A = materialize_dense(ws, op);
      worst = std::max(worst, relative(fast, A * v));
      worst_skew = std::max(worst_skew, (A + A.adjoint()).norm() / std::max(A.norm(), 1e-300));
    }
    report(log, checks, "50 random operators, n in {16,32,64}: max relative error", worst, 1e-11);
    report(log, checks, "skew-Hermitian defect |A + A^H| / |A|", worst_skew, 1e-12);
    report(log, checks, "transform count = 2 + 2 per differential term", counts_ok ? 0.0 : 1.0, 0.0);
  }

  log << "Lanczos exponential\n";
  {
    const Index n = 32;
    std::uniform_real_distribution<double> uni(-3.0, 3.0);
    RealVector<double> d(n);
    ComplexVector<double> v(n);
    for (Index j = 0; j < n; ++j) {
      d[j] = uni(rng);
      v[j] = {uni(rng), uni(rng)};
    }
    KrylovConfig<double> cfg;
    cfg.max_iters = int(n);
    cfg.fixed_iterations = true;
    auto matvec = [&](const ComplexVector<double>& x, ComplexVector<double>& y) {
      y = (d.cast<std::complex<double>>().array() * x.array()).matrix();
    };
    const auto res = expm_krylov<double>(matvec, v, cfg);
    ComplexVector<double> exact(n);
    for (Index j = 0; j < n; ++j) exact[j] = std::polar(1.0, d[j]) * v[j];
    report(log, checks, "diagonal H, m = N = 32 vs exp(i diag) v", relative(res.value, exact), 1e-12);
  }

  log << "quadrature\n";
  {
    const auto rule = gauss_legendre<double>(3);
    double q = 0;
    for (Index i = 0; i < rule.size(); ++i) q += rule.weights[i] * std::pow(rule.knots[i], 5);
    report(log, checks, "3-knot Gauss-Legendre integral of z^5 over [0,1]", std::abs(q - 1.0 / 6), 1e-15);
  }
  return checks;
}

std::vector<CommutatorSizeRow> commutator_size_table(const std::vector<double>& epsilons) {
  const Index n = 256;
  auto g = std::make_shared<const Grid1D<double>>(-5.0, 5.0, n);
  SpectralWorkspace<double> ws(g);
  // smooth periodic stand-in for a double well
  const RealVector<double> mu = (-2.0 * (2 * std::numbers::pi * g->nodes().array() / 10.0).cos() +
                                 0.5 * (4 * std::numbers::pi * g->nodes().array() / 10.0).cos())
                                    .matrix();
  const ComplexMatrix<double> L = dense_derivative(ws, 2);
  const ComplexMatrix<double> M = mu.cast<std::complex<double>>().asDiagonal();
  std::vector<CommutatorSizeRow> rows;
  for (double eps : epsilons) {
    // orthonormal basis of Fourier modes with |kappa| <= 1/eps
    std::vector<Index> modes;
    for (Index m = 0; m < n; ++m)
      if (m != g->nyquist_index() && std::abs(g->wavenumbers()[m]) <= 1.0 / eps) modes.push_back(m);
    ComplexMatrix<double> P(n, Index(modes.size()));
    for (Index c = 0; c < P.cols(); ++c)
      for (Index j = 0; j < n; ++j)
        P(j, c) = std::polar(1.0 / std::sqrt(double(n)), g->wavenumbers()[modes[c]] * (g->nodes()[j] - g->a()));
    const ComplexMatrix<double> X = eps * L;
    const ComplexMatrix<double> Y = M / eps;
    const ComplexMatrix<double> YX = Y * X - X * Y;
    auto norm2 = [&](const ComplexMatrix<double>& A) {
      const ComplexMatrix<double> R = P.adjoint() * A * P;
      return Eigen::JacobiSVD<ComplexMatrix<double>>(R).singularValues()(0);
    };
    rows.push_back({eps, norm2(YX), norm2(YX * X - X * YX), norm2(YX * Y - Y * YX)});
  }
  return rows;
}

}  // namespace magsplit::harness
