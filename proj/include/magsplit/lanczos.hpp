#pragma once

// Lanczos approximation of exp(iH) v for Hermitian H given as a matvec.

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Eigenvalues>

#include "magsplit/types.hpp"

namespace magsplit {

template <typename Real = double>
struct KrylovConfig {
  int max_iters = 12;
  Real tol = Real(1e-12);
  bool reorthogonalize = true;
  /// Run exactly max_iters iterations (unless the Krylov space closes early).
  bool fixed_iterations = false;

  void validate() const {
    if (max_iters < 1) throw std::invalid_argument("KrylovConfig: max_iters must be >= 1");
    if (!(tol > 0)) throw std::invalid_argument("KrylovConfig: tol must be positive");
  }
};

template <typename Real = double>
struct KrylovResult {
  ComplexVector<Real> value;
  int iterations = 0;  // matvecs performed
  bool converged = false;
  bool breakdown = false;
  Real error_estimate = 0;
};

class KrylovError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// exp(iT) for real symmetric tridiagonal T given by its diagonal and
/// off-diagonal, via the symmetric eigendecomposition.
template <typename Real>
ComplexMatrix<Real> expm_tridiag(const RealVector<Real>& diag, const RealVector<Real>& offdiag) {
  const Index m = diag.size();
  if (offdiag.size() != std::max<Index>(m - 1, 0))
    throw std::invalid_argument("expm_tridiag: off-diagonal must have m-1 entries");
  if (m == 0) return ComplexMatrix<Real>(0, 0);
  Eigen::SelfAdjointEigenSolver<RealMatrix<Real>> eig;
  eig.computeFromTridiagonal(diag, offdiag, Eigen::ComputeEigenvectors);
  if (eig.info() != Eigen::Success) throw KrylovError("expm_tridiag: eigensolver failed");
  const RealMatrix<Real>& Q = eig.eigenvectors();
  ComplexVector<Real> phases(m);
  for (Index j = 0; j < m; ++j) phases[j] = std::polar(Real(1), eig.eigenvalues()[j]);
  const ComplexMatrix<Real> Qc = Q.template cast<Complex<Real>>();
  return Qc * phases.asDiagonal() * Qc.transpose();
}

template <typename Real>
ComplexMatrix<Real> expm_tridiag(const RealMatrix<Real>& T) {
  if (T.rows() != T.cols()) throw std::invalid_argument("expm_tridiag: matrix must be square");
  const Index m = T.rows();
  RealVector<Real> d = T.diagonal();
  RealVector<Real> e = m > 1 ? RealVector<Real>(T.diagonal(-1)) : RealVector<Real>(0);
  return expm_tridiag<Real>(d, e);
}

/// Approximates exp(iH) v. `matvec(x, y)` must set y = H x with H Hermitian.
template <typename Real, typename Matvec>
KrylovResult<Real> expm_krylov(Matvec&& matvec, const ComplexVector<Real>& v, const KrylovConfig<Real>& config) {
  config.validate();
  const Index n = v.size();
  const Real beta0 = v.norm();
  if (!(beta0 > 0)) throw std::invalid_argument("expm_krylov: starting vector must be nonzero");

  const int max_m = static_cast<int>(std::min<Index>(config.max_iters, n));
  ComplexMatrix<Real> V(n, max_m);
  std::vector<Real> alpha;
  std::vector<Real> beta;  // beta[j] couples basis vectors j and j+1
  V.col(0) = v / beta0;

  KrylovResult<Real> result;
  ComplexVector<Real> w(n);
  ComplexMatrix<Real> E;
  for (int j = 0; j < max_m; ++j) {
    matvec(V.col(j).eval(), w);
    ++result.iterations;
    if (!w.allFinite()) throw KrylovError("expm_krylov: matvec produced non-finite values");
    const Real a = std::real(V.col(j).dot(w));
    alpha.push_back(a);
    w -= a * V.col(j);
    if (j > 0) w -= beta[j - 1] * V.col(j - 1);
    if (config.reorthogonalize) {
      for (int pass = 0; pass < 2; ++pass)
        for (int i = 0; i <= j; ++i) w -= V.col(i).dot(w) * V.col(i);
    }
    const Real b = w.norm();
    const Real scale = std::abs(a) + (j > 0 ? beta[j - 1] : Real(0));
    const bool closed = b <= Real(64) * std::numeric_limits<Real>::epsilon() * scale || b == 0;

    if (closed && j == 0) {
      // v spans an invariant subspace: exp(iH) v = exp(i alpha) v exactly.
      result.value = std::polar(Real(1), a) * v;
      result.converged = true;
      result.breakdown = true;
      return result;
    }

    RealVector<Real> d = Eigen::Map<const RealVector<Real>>(alpha.data(), j + 1);
    RealVector<Real> e = Eigen::Map<const RealVector<Real>>(beta.data(), j);
    E = expm_tridiag<Real>(d, e);
    result.error_estimate = beta0 * b * std::abs(E(j, 0));

    if (closed) {
      result.breakdown = true;
      result.converged = true;
      break;
    }
    const bool last = j + 1 == max_m;
    if (!config.fixed_iterations && result.error_estimate < config.tol * beta0) {
      result.converged = true;
      break;
    }
    if (last) {
      result.converged = result.error_estimate < config.tol * beta0;
      break;
    }
    beta.push_back(b);
    V.col(j + 1) = w / b;
  }
  const Index m = static_cast<Index>(alpha.size());
  result.value = beta0 * (V.leftCols(m) * E.col(0));
  return result;
}

}  // namespace magsplit
