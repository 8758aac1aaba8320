#pragma once

// Static potentials, laser pulse profiles and time-dependent potentials.
//
// Sign convention throughout: V(x, t) = V0(x) + e(t) x.

#include <algorithm>
#include <cmath>
#include <functional>
#include <numbers>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "magsplit/spectral_grid.hpp"

namespace magsplit {

template <typename Real = double>
struct StaticPotential {
  std::function<Real(Real)> value;
  std::function<Real(Real)> gradient;
  std::function<Real(Real)> second;  // optional
  std::function<Real(Real)> fourth;  // optional
  std::string label;

  RealVector<Real> sample(const Grid1D<Real>& grid) const { return sample_with(value, grid); }
  RealVector<Real> sample_gradient(const Grid1D<Real>& grid) const {
    return sample_with(gradient, grid);
  }

  static RealVector<Real> sample_with(const std::function<Real(Real)>& f, const Grid1D<Real>& grid) {
    if (!f) throw std::logic_error("StaticPotential: evaluator not available");
    RealVector<Real> out(grid.size());
    for (Index j = 0; j < grid.size(); ++j) out[j] = f(grid.nodes()[j]);
    return out;
  }
};

/// Node samples of V0 and its analytic derivatives; higher derivatives are
/// empty when the potential does not provide them.
template <typename Real = double>
struct StaticSamples {
  RealVector<Real> value;
  RealVector<Real> gradient;
  RealVector<Real> second;
  RealVector<Real> fourth;
};

template <typename Real>
StaticSamples<Real> sample_static(const StaticPotential<Real>& v0, const Grid1D<Real>& grid) {
  StaticSamples<Real> out;
  out.value = v0.sample(grid);
  out.gradient = v0.sample_gradient(grid);
  if (v0.second) out.second = StaticPotential<Real>::sample_with(v0.second, grid);
  if (v0.fourth) out.fourth = StaticPotential<Real>::sample_with(v0.fourth, grid);
  return out;
}

/// x^4 - 15 x^2
template <typename Real = double>
StaticPotential<Real> double_well_1() {
  return {[](Real x) { return x * x * x * x - 15 * x * x; },
          [](Real x) { return 4 * x * x * x - 30 * x; },
          [](Real x) { return 12 * x * x - 30; },
          [](Real) { return Real(24); },
          "double_well_1"};
}

/// x^4 / 5 - 2 x^2
template <typename Real = double>
StaticPotential<Real> double_well_2() {
  return {[](Real x) { return x * x * x * x / 5 - 2 * x * x; },
          [](Real x) { return Real(4) / 5 * x * x * x - 4 * x; },
          [](Real x) { return Real(12) / 5 * x * x - 4; },
          [](Real) { return Real(24) / 5; },
          "double_well_2"};
}

/// omega2 * x^2
template <typename Real = double>
StaticPotential<Real> harmonic_potential(Real omega2 = 1) {
  return {[omega2](Real x) { return omega2 * x * x; },
          [omega2](Real x) { return 2 * omega2 * x; },
          [omega2](Real) { return 2 * omega2; },
          [](Real) { return Real(0); },
          "harmonic"};
}

template <typename Real = double>
StaticPotential<Real> zero_potential() {
  auto zero = [](Real) { return Real(0); };
  return {zero, zero, zero, zero, "zero"};
}

/// Potential given by samples on a periodic grid, extended by trigonometric
/// interpolation. Derivatives are the exact derivatives of the interpolant.
template <typename Real = double>
StaticPotential<Real> tabulated_potential(const Grid1D<Real>& grid, const RealVector<Real>& samples,
                                          std::string label = "tabulated") {
  if (samples.size() != grid.size())
    throw std::invalid_argument("tabulated_potential: sample count does not match grid");
  const Index n = grid.size();
  Eigen::FFT<Real> fft;
  ComplexVector<Real> in = samples.template cast<Complex<Real>>();
  ComplexVector<Real> coeffs(n);
  fft.fwd(coeffs, in);
  coeffs /= static_cast<Real>(n);
  // Split the Nyquist coefficient symmetrically so the interpolant is real.
  struct Data {
    ComplexVector<Real> c;
    RealVector<Real> kappa;
    Real a;
  };
  auto data = std::make_shared<Data>(Data{coeffs, grid.wavenumbers(), grid.a()});
  auto derivative = [data, n](int k) {
    return [data, n, k](Real x) {
      Real acc = 0;
      for (Index m = 0; m < n; ++m) {
        const Real kap = data->kappa[m];
        Complex<Real> term = data->c[m] * std::polar(Real(1), kap * (x - data->a));
        for (int q = 0; q < k; ++q) term *= Complex<Real>(0, kap);
        if (m == n / 2) {
          // average of +N/2 and -N/2 branches
          Complex<Real> mirror = data->c[m] * std::polar(Real(1), -kap * (x - data->a));
          for (int q = 0; q < k; ++q) mirror *= Complex<Real>(0, -kap);
          term = (term + mirror) / Real(2);
        }
        acc += term.real();
      }
      return acc;
    };
  };
  return {derivative(0), derivative(1), derivative(2), derivative(4), std::move(label)};
}

template <typename Real = double>
struct LaserPulse {
  std::function<Real(Real)> value;
  std::string label;
  bool smooth = true;
  /// Discontinuities of e (or its derivatives) strictly inside (t0, t1).
  std::function<std::vector<Real>(Real, Real)> breakpoints;
  /// Optional closed form for (r, s) over [t0, t0 + h]; bypasses quadrature.
  std::function<std::pair<Real, Real>(Real, Real)> analytic_moments;

  Real operator()(Real t) const { return value(t); }
};

/// Asymmetric sine lobes: sin(25 pi t) on [3n/5, 3n/5 + 1/25] and
/// sin(5 pi t) on (3n/5 + 1/25, 3n/5 + 6/25], n >= 1; zero elsewhere.
template <typename Real = double>
Real pulse_e1(Real t) {
  constexpr Real pi = std::numbers::pi_v<Real>;
  const Real period = Real(3) / 5;
  const auto n = static_cast<long>(std::floor(t / period));
  if (n < 1) return 0;
  const Real start = period * static_cast<Real>(n);
  const Real offset = t - start;
  if (offset <= Real(1) / 25) return std::sin(25 * pi * t);
  if (offset <= Real(6) / 25) return std::sin(5 * pi * t);
  return 0;
}

/// Chirped pulse 10 exp(-10 (t-1)^2) sin(500 (t-1)^4 + 10).
template <typename Real = double>
Real pulse_e2(Real t) {
  const Real d = t - 1;
  const Real d2 = d * d;
  return 10 * std::exp(-10 * d2) * std::sin(500 * d2 * d2 + 10);
}

template <typename Real = double>
LaserPulse<Real> lobe_pulse() {
  LaserPulse<Real> p;
  p.value = [](Real t) { return pulse_e1(t); };
  p.label = "e1";
  p.smooth = false;
  p.breakpoints = [](Real t0, Real t1) {
    std::vector<Real> out;
    const Real period = Real(3) / 5;
    const long first = std::max(1L, static_cast<long>(std::floor(t0 / period)));
    for (long n = first; static_cast<Real>(n) * period <= t1; ++n) {
      const Real start = period * static_cast<Real>(n);
      for (Real b : {start, start + Real(1) / 25, start + Real(6) / 25})
        if (b > t0 && b < t1) out.push_back(b);
    }
    return out;
  };
  return p;
}

template <typename Real = double>
LaserPulse<Real> chirped_pulse() {
  LaserPulse<Real> p;
  p.value = [](Real t) { return pulse_e2(t); };
  p.label = "e2";
  return p;
}

template <typename Real = double>
LaserPulse<Real> zero_pulse() {
  LaserPulse<Real> p;
  p.value = [](Real) { return Real(0); };
  p.label = "zero";
  p.analytic_moments = [](Real, Real) { return std::pair<Real, Real>{0, 0}; };
  return p;
}

template <typename Real = double>
LaserPulse<Real> constant_pulse(Real c) {
  LaserPulse<Real> p;
  p.value = [c](Real) { return c; };
  p.label = "constant";
  p.analytic_moments = [c](Real, Real) { return std::pair<Real, Real>{c, 0}; };
  return p;
}

/// amplitude * sin(omega t)
template <typename Real = double>
LaserPulse<Real> sine_pulse(Real amplitude, Real omega) {
  LaserPulse<Real> p;
  p.value = [amplitude, omega](Real t) { return amplitude * std::sin(omega * t); };
  p.label = "sine";
  return p;
}

/// V~_j = V0(x_j) + r x_j from cached V0 samples.
template <typename Real>
RealVector<Real> v_tilde_from_samples(const RealVector<Real>& v0, const Grid1D<Real>& grid, Real r) {
  return v0 + r * grid.nodes();
}

/// V^_j = V~_j - h^2/24 (V0'(x_j) + r)^2 from cached samples.
template <typename Real>
RealVector<Real> v_hat_from_samples(const RealVector<Real>& v0, const RealVector<Real>& dv0,
                                    const Grid1D<Real>& grid, Real r, Real h) {
  const auto grad = (dv0.array() + r);
  return (v_tilde_from_samples(v0, grid, r).array() - h * h / 24 * grad.square()).matrix();
}

template <typename Real>
RealVector<Real> eval_V_tilde(const StaticPotential<Real>& v0, Real r, const Grid1D<Real>& grid) {
  return v_tilde_from_samples(v0.sample(grid), grid, r);
}

template <typename Real>
RealVector<Real> eval_V_hat(const StaticPotential<Real>& v0, Real r, Real h, const Grid1D<Real>& grid) {
  if (!(h > 0)) throw std::invalid_argument("eval_V_hat: h must be positive");
  return v_hat_from_samples(v0.sample(grid), v0.sample_gradient(grid), grid, r, h);
}

template <typename Real = double>
struct TimeDependentPotential {
  std::function<Real(Real, Real)> value;
  std::function<Real(Real, Real)> dx;
  std::function<Real(Real, Real)> dxx;
  std::function<Real(Real, Real)> dxxxx;  // optional
  std::string label;
  std::function<std::vector<Real>(Real, Real)> breakpoints;  // optional
};

/// V0(x) + e(t) x
template <typename Real>
TimeDependentPotential<Real> laser_potential(const StaticPotential<Real>& v0, const LaserPulse<Real>& pulse) {
  TimeDependentPotential<Real> v;
  auto f = v0.value;
  auto g = v0.gradient;
  auto e = pulse.value;
  v.value = [f, e](Real x, Real t) { return f(x) + e(t) * x; };
  v.dx = [g, e](Real x, Real t) { return g(x) + e(t); };
  if (v0.second) {
    auto s = v0.second;
    v.dxx = [s](Real x, Real) { return s(x); };
  }
  if (v0.fourth) {
    auto q = v0.fourth;
    v.dxxxx = [q](Real x, Real) { return q(x); };
  }
  v.label = v0.label + "+" + pulse.label;
  v.breakpoints = pulse.breakpoints;
  return v;
}

/// Time-independent potential viewed as V(x, t) = V0(x).
template <typename Real>
TimeDependentPotential<Real> static_as_time_dependent(const StaticPotential<Real>& v0) {
  TimeDependentPotential<Real> v;
  auto f = v0.value;
  auto g = v0.gradient;
  v.value = [f](Real x, Real) { return f(x); };
  v.dx = [g](Real x, Real) { return g(x); };
  if (v0.second) {
    auto s = v0.second;
    v.dxx = [s](Real x, Real) { return s(x); };
  }
  if (v0.fourth) {
    auto q = v0.fourth;
    v.dxxxx = [q](Real x, Real) { return q(x); };
  }
  v.label = v0.label;
  return v;
}

}  // namespace magsplit
