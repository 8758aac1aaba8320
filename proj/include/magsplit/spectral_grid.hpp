#pragma once

// Periodic uniform grids, Fourier differentiation symbols and the two
// exponential kernels every scheme is built from: circulant (diagonal in
// Fourier space) and pointwise diagonal.

#include <cmath>
#include <cstdint>
#include <map>
#include <memory>
#include <numbers>
#include <stdexcept>
#include <string>

#include <unsupported/Eigen/FFT>

#include "magsplit/types.hpp"

namespace magsplit {

template <typename Real = double>
class Grid1D {
 public:
  Grid1D(Real a, Real b, Index n_points) : a_(a), b_(b), n_(n_points) {
    if (!(b > a)) throw std::invalid_argument("Grid1D: need b > a");
    if (n_points < 4 || n_points % 2 != 0)
      throw std::invalid_argument("Grid1D: n_points must be even and >= 4, got " +
                                  std::to_string(n_points));
    const Real dx = (b - a) / static_cast<Real>(n_points);
    nodes_.resize(n_points);
    for (Index j = 0; j < n_points; ++j) nodes_[j] = a + static_cast<Real>(j) * dx;

    const Real base = Real(2) * std::numbers::pi_v<Real> / (b - a);
    wavenumbers_.resize(n_points);
    for (Index m = 0; m < n_points; ++m) {
      const Index mode = m < n_points / 2 ? m : m - n_points;
      wavenumbers_[m] = base * static_cast<Real>(mode);
    }
  }

  Real a() const { return a_; }
  Real b() const { return b_; }
  Real length() const { return b_ - a_; }
  Index size() const { return n_; }
  Real dx() const { return (b_ - a_) / static_cast<Real>(n_); }
  const RealVector<Real>& nodes() const { return nodes_; }
  const RealVector<Real>& wavenumbers() const { return wavenumbers_; }
  /// FFT-ordered slot of the Nyquist mode m = -n/2.
  Index nyquist_index() const { return n_ / 2; }

  bool same_as(const Grid1D& other) const {
    return n_ == other.n_ && a_ == other.a_ && b_ == other.b_;
  }

 private:
  Real a_;
  Real b_;
  Index n_;
  RealVector<Real> nodes_;
  RealVector<Real> wavenumbers_;
};

template <typename Real>
using GridPtr = std::shared_ptr<const Grid1D<Real>>;

template <typename Real = double>
struct Symbol {
  int order = 0;
  ComplexVector<Real> values;
};

/// Symbol of the k-th spectral derivative: (i kappa_m)^k, Nyquist entry zeroed
/// for odd k so that odd derivatives stay skew-Hermitian on real data.
template <typename Real>
Symbol<Real> make_symbol(const Grid1D<Real>& grid, int k) {
  if (k < 0) throw std::invalid_argument("make_symbol: negative order");
  Symbol<Real> sym;
  sym.order = k;
  sym.values.resize(grid.size());
  const Complex<Real> ik = i_power<Real>(k);
  for (Index m = 0; m < grid.size(); ++m) {
    Real p = 1;
    for (int q = 0; q < k; ++q) p *= grid.wavenumbers()[m];
    sym.values[m] = ik * p;
  }
  if (k % 2 == 1) sym.values[grid.nyquist_index()] = Complex<Real>(0);
  return sym;
}

template <typename Real = double>
class WaveFunction {
 public:
  WaveFunction(GridPtr<Real> grid, ComplexVector<Real> values)
      : grid_(std::move(grid)), values_(std::move(values)) {
    if (!grid_) throw std::invalid_argument("WaveFunction: null grid");
    if (values_.size() != grid_->size())
      throw std::invalid_argument("WaveFunction: value count does not match grid");
  }

  const Grid1D<Real>& grid() const { return *grid_; }
  const GridPtr<Real>& grid_ptr() const { return grid_; }
  ComplexVector<Real>& values() { return values_; }
  const ComplexVector<Real>& values() const { return values_; }

  Real norm() const { return std::sqrt(grid_->dx() * values_.squaredNorm()); }

 private:
  GridPtr<Real> grid_;
  ComplexVector<Real> values_;
};

/// Discrete L2 norm sqrt(dx * sum |u_j|^2).
template <typename Real>
Real l2_norm(const Grid1D<Real>& grid, const ComplexVector<Real>& u) {
  return std::sqrt(grid.dx() * u.squaredNorm());
}

template <typename Real>
Real l2_distance(const WaveFunction<Real>& u, const WaveFunction<Real>& v) {
  if (!u.grid().same_as(v.grid())) throw std::invalid_argument("l2_distance: grid mismatch");
  return l2_norm(u.grid(), (u.values() - v.values()).eval());
}

/// Owns the FFT plan for one grid together with a transform counter and a
/// cache of derivative symbols. Not thread-safe: use one per worker.
template <typename Real = double>
class SpectralWorkspace {
 public:
  explicit SpectralWorkspace(GridPtr<Real> grid) : grid_(std::move(grid)) {
    if (!grid_) throw std::invalid_argument("SpectralWorkspace: null grid");
    scratch_.resize(grid_->size());
  }

  const Grid1D<Real>& grid() const { return *grid_; }
  const GridPtr<Real>& grid_ptr() const { return grid_; }

  const Symbol<Real>& symbol(int k) {
    auto it = symbols_.find(k);
    if (it == symbols_.end()) it = symbols_.emplace(k, make_symbol(*grid_, k)).first;
    return it->second;
  }

  void forward(const ComplexVector<Real>& in, ComplexVector<Real>& out) {
    check_size(in);
    out.resize(in.size());
    fft_.fwd(out, in);
    ++transforms_;
  }

  void inverse(const ComplexVector<Real>& in, ComplexVector<Real>& out) {
    check_size(in);
    out.resize(in.size());
    fft_.inv(out, in);
    ++transforms_;
  }

  /// Fourier multiplier exp(i theta c2), memoised by theta. Steps of equal
  /// length reuse the same few entries.
  const ComplexVector<Real>& laplacian_exponential(Real theta) {
    auto it = lap_cache_.find(theta);
    if (it != lap_cache_.end()) return it->second;
    if (lap_cache_.size() >= kLapCacheLimit) lap_cache_.clear();
    const auto& c2 = symbol(2).values;
    ComplexVector<Real> m(c2.size());
    for (Index j = 0; j < m.size(); ++j) m[j] = std::polar(Real(1), theta * c2[j].real());
    return lap_cache_.emplace(theta, std::move(m)).first->second;
  }

  /// u <- F^{-1} diag(multiplier) F u, two transforms.
  void apply_fourier_multiplier(const ComplexVector<Real>& multiplier, ComplexVector<Real>& u) {
    if (multiplier.size() != grid_->size())
      throw std::invalid_argument("apply_fourier_multiplier: length mismatch");
    forward(u, scratch_);
    scratch_.array() *= multiplier.array();
    inverse(scratch_, u);
  }

  std::uint64_t transforms() const { return transforms_; }
  void reset_transforms() { transforms_ = 0; }

 private:
  void check_size(const ComplexVector<Real>& v) const {
    if (v.size() != grid_->size()) throw std::invalid_argument("FFT: length mismatch");
  }

  GridPtr<Real> grid_;
  Eigen::FFT<Real> fft_;
  static constexpr std::size_t kLapCacheLimit = 64;
  std::map<int, Symbol<Real>> symbols_;
  std::map<Real, ComplexVector<Real>> lap_cache_;
  ComplexVector<Real> scratch_;
  std::uint64_t transforms_ = 0;
};

template <typename Real>
WaveFunction<Real> apply_derivative(SpectralWorkspace<Real>& ws, const WaveFunction<Real>& u, int k) {
  if (!ws.grid().same_as(u.grid())) throw std::invalid_argument("apply_derivative: grid mismatch");
  ComplexVector<Real> out = u.values();
  ws.apply_fourier_multiplier(ws.symbol(k).values, out);
  return WaveFunction<Real>(u.grid_ptr(), std::move(out));
}

/// Spectral k-th derivative of real samples (imaginary round-off dropped).
template <typename Real>
RealVector<Real> spectral_derivative(SpectralWorkspace<Real>& ws, const RealVector<Real>& f, int k) {
  ComplexVector<Real> tmp = f.template cast<Complex<Real>>();
  ws.apply_fourier_multiplier(ws.symbol(k).values, tmp);
  return tmp.real();
}

/// exp of the per-mode exponent vector, i.e. the Fourier multiplier of a
/// circulant exponential.
template <typename Real>
ComplexVector<Real> circulant_multiplier(const ComplexVector<Real>& exponent) {
  return exponent.array().exp().matrix();
}

template <typename Real>
WaveFunction<Real> exp_circulant(SpectralWorkspace<Real>& ws, const ComplexVector<Real>& exponent,
                                 const WaveFunction<Real>& u) {
  if (!ws.grid().same_as(u.grid())) throw std::invalid_argument("exp_circulant: grid mismatch");
  ComplexVector<Real> out = u.values();
  ws.apply_fourier_multiplier(circulant_multiplier(exponent), out);
  return WaveFunction<Real>(u.grid_ptr(), std::move(out));
}

/// u_j <- exp(i phase_j) u_j in place.
template <typename Real>
void apply_phase(const RealVector<Real>& phase, ComplexVector<Real>& u) {
  if (phase.size() != u.size()) throw std::invalid_argument("exp_diagonal: length mismatch");
  for (Index j = 0; j < u.size(); ++j) u[j] *= std::polar(Real(1), phase[j]);
}

template <typename Real>
WaveFunction<Real> exp_diagonal(const RealVector<Real>& phase, const WaveFunction<Real>& u) {
  ComplexVector<Real> out = u.values();
  apply_phase(phase, out);
  return WaveFunction<Real>(u.grid_ptr(), std::move(out));
}

}  // namespace magsplit
