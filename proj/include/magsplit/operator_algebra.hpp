#pragma once

// Sums of symmetrised differential operators
//
//   W = sum_t coeff_t i^(k_t+1) <f_t>_{k_t},   <f>_k = (f d^k + d^k f) / 2,
//
// with f stored as real node samples. Real f and real coeff give a
// skew-Hermitian W on the grid.

#include <algorithm>
#include <array>
#include <map>
#include <numbers>
#include <cmath>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "magsplit/spectral_grid.hpp"

namespace magsplit {

template <typename Real = double>
struct SymOpTerm {
  int order = 0;
  RealVector<Real> f;
  Real coeff = 1;
};

template <typename Real = double>
class SymOpSum {
 public:
  explicit SymOpSum(GridPtr<Real> grid) : grid_(std::move(grid)) {
    if (!grid_) throw std::invalid_argument("SymOpSum: null grid");
  }

  SymOpSum& add(int order, RealVector<Real> f, Real coeff = 1) {
    if (order < 0) throw std::invalid_argument("SymOpSum: negative order");
    if (f.size() != grid_->size()) throw std::invalid_argument("SymOpSum: f length does not match grid");
    terms_.push_back({order, std::move(f), coeff});
    return *this;
  }

  const Grid1D<Real>& grid() const { return *grid_; }
  const GridPtr<Real>& grid_ptr() const { return grid_; }
  const std::vector<SymOpTerm<Real>>& terms() const { return terms_; }

  /// Number of terms with k >= 1; the fast matvec costs 2 + 2 * this.
  Index differential_terms() const {
    Index c = 0;
    for (const auto& t : terms_) c += t.order >= 1 ? 1 : 0;
    return c;
  }

 private:
  GridPtr<Real> grid_;
  std::vector<SymOpTerm<Real>> terms_;
};

/// out = W v using one shared forward and one shared inverse transform plus
/// one transform per differential term in each half.
template <typename Real>
void apply_into(SpectralWorkspace<Real>& ws, const SymOpSum<Real>& op, const ComplexVector<Real>& v,
                ComplexVector<Real>& out) {
  if (!ws.grid().same_as(op.grid())) throw std::invalid_argument("SymOpSum apply: grid mismatch");
  if (v.size() != op.grid().size()) throw std::invalid_argument("SymOpSum apply: vector length mismatch");
  const Complex<Real> I(0, 1);
  const Index n = v.size();

  RealVector<Real> f0 = RealVector<Real>::Zero(n);
  bool any_diff = false;
  for (const auto& t : op.terms()) {
    if (t.order == 0)
      f0 += t.coeff * t.f;
    else
      any_diff = true;
  }
  out = I * (f0.array().template cast<Complex<Real>>() * v.array()).matrix();
  if (!any_diff) return;

  ComplexVector<Real> v_hat, tmp, back;
  ComplexVector<Real> spectral_sum = ComplexVector<Real>::Zero(n);
  ws.forward(v, v_hat);
  for (const auto& t : op.terms()) {
    if (t.order == 0) continue;
    const Complex<Real> c = Real(0.5) * t.coeff * i_power<Real>(t.order + 1);
    const auto& sym = ws.symbol(t.order).values;
    // f * K_k v
    tmp = (sym.array() * v_hat.array()).matrix();
    ws.inverse(tmp, back);
    out.array() += c * t.f.array().template cast<Complex<Real>>() * back.array();
    // accumulate c_k * F(f v) for the shared inverse
    tmp = (t.f.array().template cast<Complex<Real>>() * v.array()).matrix();
    ws.forward(tmp, back);
    spectral_sum.array() += c * sym.array() * back.array();
  }
  ws.inverse(spectral_sum, back);
  out += back;
}

template <typename Real>
WaveFunction<Real> apply(SpectralWorkspace<Real>& ws, const SymOpSum<Real>& op, const WaveFunction<Real>& u) {
  if (!op.grid().same_as(u.grid())) throw std::invalid_argument("SymOpSum apply: grid mismatch");
  ComplexVector<Real> out;
  apply_into(ws, op, u.values(), out);
  return WaveFunction<Real>(u.grid_ptr(), std::move(out));
}

constexpr Index kDenseLimit = 256;

/// Dense matrix of the spectral differentiation operator K_k = F^-1 D_{c_k} F.
template <typename Real>
ComplexMatrix<Real> dense_derivative(SpectralWorkspace<Real>& ws, int k) {
  const Index n = ws.grid().size();
  if (n > kDenseLimit) throw std::length_error("dense_derivative: grid too large for dense work");
  ComplexMatrix<Real> K(n, n);
  for (Index col = 0; col < n; ++col) {
    ComplexVector<Real> e = ComplexVector<Real>::Zero(n);
    e[col] = 1;
    ws.apply_fourier_multiplier(ws.symbol(k).values, e);
    K.col(col) = e;
  }
  return K;
}

template <typename Real>
ComplexMatrix<Real> materialize_dense(SpectralWorkspace<Real>& ws, const SymOpSum<Real>& op) {
  const Index n = op.grid().size();
  if (n > kDenseLimit)
    throw std::length_error("materialize_dense: n_points " + std::to_string(n) + " exceeds " +
                            std::to_string(kDenseLimit));
  if (!ws.grid().same_as(op.grid())) throw std::invalid_argument("materialize_dense: grid mismatch");
  ComplexMatrix<Real> A = ComplexMatrix<Real>::Zero(n, n);
  std::map<int, ComplexMatrix<Real>> derivs;
  for (const auto& t : op.terms()) {
    const Complex<Real> c = t.coeff * i_power<Real>(t.order + 1);
    const auto Df = t.f.template cast<Complex<Real>>().asDiagonal();
    if (t.order == 0) {
      A += c * ComplexMatrix<Real>(Df);
      continue;
    }
    auto it = derivs.find(t.order);
    if (it == derivs.end()) it = derivs.emplace(t.order, dense_derivative(ws, t.order)).first;
    const ComplexMatrix<Real>& K = it->second;
    A += (Real(0.5) * c) * (Df * K + K * Df);
  }
  return A;
}

/// Dense <f>_k without the i^(k+1) prefactor.
template <typename Real>
ComplexMatrix<Real> dense_symmetrised(SpectralWorkspace<Real>& ws, const RealVector<Real>& f, int k) {
  SymOpSum<Real> op(ws.grid_ptr());
  // coeff chosen to cancel i^(k+1)
  op.add(k, f, 1);
  return materialize_dense(ws, op) / i_power<Real>(k + 1);
}

/// Highest Fourier mode carrying energy above rel_tol of the peak.
template <typename Real>
Index highest_mode(SpectralWorkspace<Real>& ws, const RealVector<Real>& f, Real rel_tol = Real(1e-12)) {
  ComplexVector<Real> in = f.template cast<Complex<Real>>();
  ComplexVector<Real> spec;
  ws.forward(in, spec);
  const Index n = f.size();
  const Real peak = spec.cwiseAbs().maxCoeff();
  Index highest = 0;
  if (peak == 0) return 0;
  for (Index m = 0; m < n; ++m) {
    const Index mode = m < n / 2 ? m : n - m;
    if (std::abs(spec[m]) > rel_tol * peak) highest = std::max(highest, mode);
  }
  return highest;
}

template <typename Real = double>
struct CommutatorIdentityReport {
  static constexpr std::array<const char*, 4> names = {
      "[<mu>_0,<1>_2] = -2<mu'>_1",
      "[[<mu>_0,<1>_2],<1>_2] = 4<mu''>_2 - <mu''''>_0",
      "[<mu'>_1,<1>_2] = -2<mu''>_2 + 1/2<mu''''>_0",
      "[[<mu>_0,<1>_2],<mu>_0] = -2<(mu')^2>_0",
  };
  std::array<Real, 4> relative_errors{};
  Index band = 0;       // highest mode of mu
  Index test_band = 0;  // input modes |m| <= test_band were compared
  Real max_error() const {
    Real m = 0;
    for (Real e : relative_errors) m = std::max(m, e);
    return m;
  }
};

/// Checks the four simplified-commutator identities with nested dense
/// commutators on the left and materialised symmetrised operators on the
/// right. Both sides are compared on trigonometric polynomials of degree
/// <= n/2 - 1 - 2M (M = band of mu), where no product aliases.
template <typename Real>
CommutatorIdentityReport<Real> verify_commutator_identities(const RealVector<Real>& mu, GridPtr<Real> grid) {
  SpectralWorkspace<Real> ws(grid);
  const Index n = grid->size();
  if (mu.size() != n) throw std::invalid_argument("verify_commutator_identities: length mismatch");
  const Index band = highest_mode(ws, mu);
  if (band >= n / 4)
    throw std::domain_error("verify_commutator_identities: mu has modes up to " + std::to_string(band) +
                            ", identities need band < n/4 = " + std::to_string(n / 4));
  const Index test_band = n / 2 - 1 - 2 * band;

  const RealVector<Real> d1 = spectral_derivative(ws, mu, 1);
  const RealVector<Real> d2 = spectral_derivative(ws, mu, 2);
  const RealVector<Real> d4 = spectral_derivative(ws, mu, 4);

  const ComplexMatrix<Real> M = mu.template cast<Complex<Real>>().asDiagonal();
  const ComplexMatrix<Real> L = dense_derivative(ws, 2);
  auto comm = [](const ComplexMatrix<Real>& A, const ComplexMatrix<Real>& B) -> ComplexMatrix<Real> {
    return A * B - B * A;
  };
  auto sym = [&](const RealVector<Real>& f, int k) { return dense_symmetrised(ws, f, k); };

  // Columns: Fourier modes |m| <= test_band as grid vectors.
  ComplexMatrix<Real> P(n, 2 * test_band + 1);
  {
    Index col = 0;
    for (Index m = -test_band; m <= test_band; ++m, ++col) {
      const Real kap = Real(2) * std::numbers::pi_v<Real> * static_cast<Real>(m) / grid->length();
      for (Index j = 0; j < n; ++j)
        P(j, col) = std::polar(Real(1), kap * (grid->nodes()[j] - grid->a()));
    }
  }
  const Real p_norm = P.norm();
  // Relative Frobenius error on the test subspace; when both sides vanish
  // (e.g. constant mu) the error is measured per unit input instead.
  auto rel = [&](const ComplexMatrix<Real>& lhs, const ComplexMatrix<Real>& rhs) {
    const ComplexMatrix<Real> l = lhs * P;
    const ComplexMatrix<Real> r = rhs * P;
    const Real scale = std::max(l.norm(), r.norm());
    const Real diff = (l - r).norm();
    return diff / std::max(scale, Real(1e-8) * p_norm);
  };

  CommutatorIdentityReport<Real> report;
  report.band = band;
  report.test_band = test_band;

  const ComplexMatrix<Real> c1 = comm(M, L);
  report.relative_errors[0] = rel(c1, Real(-2) * sym(d1, 1));
  report.relative_errors[1] = rel(comm(c1, L), Real(4) * sym(d2, 2) - sym(d4, 0));
  // third identity with g = mu' as the first-order coefficient
  report.relative_errors[2] = rel(comm(sym(d1, 1), L), Real(-2) * sym(d2, 2) + Real(0.5) * sym(d4, 0));
  report.relative_errors[3] = rel(comm(c1, M), Real(-2) * sym(d1.array().square().matrix(), 0));
  return report;
}

}  // namespace magsplit
