#pragma once

// Per-step Magnus integrals.
//
//   r(t,h)  = (1/h) int_0^h e(t+z) dz
//   s(t,h)  = 2 int_0^h (z - h/2) e(t+z) dz
//   mu00(x) = int_0^h V(x, t+z) dz
//   mu11(x) = int_0^h (z - h/2) V(x, t+z) dz
//
// Integrals are evaluated with a Gauss-Legendre rule on [0,1], applied
// piecewise between the integrand's breakpoints when it has any.

#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <string>
#include <vector>

#include "magsplit/potentials.hpp"

namespace magsplit {

template <typename Real = double>
struct QuadratureRule {
  RealVector<Real> knots;     // on [0,1]
  RealVector<Real> weights;   // sum to 1
  RealVector<Real> centered;  // knots - 1/2, exactly antisymmetric
  Index size() const { return knots.size(); }
};

/// Gauss-Legendre rule with n knots mapped to [0,1]. Newton iteration on P_n.
template <typename Real = double>
QuadratureRule<Real> gauss_legendre(int n) {
  if (n < 1 || n > 32)
    throw std::invalid_argument("gauss_legendre: knot count must be in [1, 32], got " +
                                std::to_string(n));
  QuadratureRule<Real> rule;
  rule.knots.resize(n);
  rule.weights.resize(n);
  rule.centered.resize(n);
  constexpr Real pi = std::numbers::pi_v<Real>;
  const int half = (n + 1) / 2;
  for (int i = 0; i < half; ++i) {
    Real x = std::cos(pi * (Real(i) + Real(0.75)) / (Real(n) + Real(0.5)));
    Real dp = 0;
    for (int iter = 0; iter < 100; ++iter) {
      Real p0 = 1, p1 = x;
      for (int k = 2; k <= n; ++k) {
        const Real pk = ((2 * k - 1) * x * p1 - (k - 1) * p0) / k;
        p0 = p1;
        p1 = pk;
      }
      // p1 = P_n(x), p0 = P_{n-1}(x)
      dp = n == 1 ? Real(1) : n * (x * p1 - p0) / (x * x - 1);
      const Real dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) <= 4 * std::numeric_limits<Real>::epsilon()) break;
    }
    {
      Real p0 = 1, p1 = x;
      for (int k = 2; k <= n; ++k) {
        const Real pk = ((2 * k - 1) * x * p1 - (k - 1) * p0) / k;
        p0 = p1;
        p1 = pk;
      }
      dp = n == 1 ? Real(1) : n * (x * p1 - p0) / (x * x - 1);
    }
    const Real w = 2 / ((1 - x * x) * dp * dp);
    // nodes on [-1,1]: -x and x; map to [0,1], weights halve
    rule.knots[i] = (1 - x) / 2;
    rule.knots[n - 1 - i] = (1 + x) / 2;
    rule.weights[i] = w / 2;
    rule.weights[n - 1 - i] = w / 2;
    rule.centered[i] = -x / 2;
    rule.centered[n - 1 - i] = x / 2;
  }
  if (n % 2 == 1) {
    rule.knots[n / 2] = Real(0.5);
    rule.centered[n / 2] = 0;
  }
  return rule;
}

/// Sub-intervals of [t0, t0+h] separated by the given breakpoints.
template <typename Real>
std::vector<std::pair<Real, Real>> split_interval(Real t0, Real h, const std::function<std::vector<Real>(Real, Real)>& breakpoints) {
  std::vector<std::pair<Real, Real>> pieces;
  Real start = t0;
  if (breakpoints) {
    for (Real b : breakpoints(t0, t0 + h)) {
      if (b > start && b < t0 + h) {
        pieces.emplace_back(start, b);
        start = b;
      }
    }
  }
  pieces.emplace_back(start, t0 + h);
  return pieces;
}

template <typename Real = double>
struct ScalarMoments {
  Real r = 0;
  Real s = 0;
  Real t0 = 0;
  Real h = 0;
};

template <typename Real>
ScalarMoments<Real> scalar_moments(const LaserPulse<Real>& pulse, Real t0, Real h, const QuadratureRule<Real>& rule) {
  if (!(h > 0)) throw std::invalid_argument("scalar_moments: h must be positive");
  ScalarMoments<Real> m;
  m.t0 = t0;
  m.h = h;
  if (pulse.analytic_moments) {
    auto [r, s] = pulse.analytic_moments(t0, h);
    m.r = r;
    m.s = s;
    return m;
  }
  Real integral = 0;
  Real first = 0;
  const Index n = rule.size();
  for (auto [lo, hi] : split_interval(t0, h, pulse.breakpoints)) {
    const Real len = hi - lo;
    // piece centre relative to the step centre; exactly 0 for an unsplit step
    const Real shift = (lo - t0) + len / 2 - h / 2;
    Real piece = 0;
    Real odd = 0;
    for (Index i = 0; i < (n + 1) / 2; ++i) {
      const Index mirror = n - 1 - i;
      const Real w = rule.weights[i] * len;
      const Real e_lo = pulse.value(lo + rule.knots[i] * len);
      if (mirror == i) {
        piece += w * e_lo;
        continue;
      }
      const Real e_hi = pulse.value(lo + rule.knots[mirror] * len);
      piece += w * e_lo + w * e_hi;
      odd += w * rule.centered[i] * len * (e_lo - e_hi);
    }
    integral += piece;
    first += odd + shift * piece;
  }
  m.r = integral / h;
  m.s = 2 * first;
  return m;
}

template <typename Real = double>
struct GridMoments {
  RealVector<Real> mu00;
  RealVector<Real> mu11;
  RealVector<Real> dx_mu00;
  RealVector<Real> dxx_mu00;
  RealVector<Real> dx_mu11;
  RealVector<Real> dxxxx_mu00;  // empty when the potential has no fourth derivative
  Real t0 = 0;
  Real h = 0;
};

template <typename Real>
GridMoments<Real> grid_moments(const TimeDependentPotential<Real>& v, const Grid1D<Real>& grid, Real t0, Real h,
                               const QuadratureRule<Real>& rule) {
  if (!(h > 0)) throw std::invalid_argument("grid_moments: h must be positive");
  if (!v.value || !v.dx || !v.dxx)
    throw std::invalid_argument("grid_moments: potential needs value, dx and dxx evaluators");
  const Index n = grid.size();
  const bool fourth = static_cast<bool>(v.dxxxx);
  GridMoments<Real> m;
  m.t0 = t0;
  m.h = h;
  m.mu00.setZero(n);
  m.mu11.setZero(n);
  m.dx_mu00.setZero(n);
  m.dxx_mu00.setZero(n);
  m.dx_mu11.setZero(n);
  if (fourth) m.dxxxx_mu00.setZero(n);
  const auto& x = grid.nodes();
  const Index nk = rule.size();
  struct Samples {
    RealVector<Real> val, d1, d2, d4;
  };
  auto sample = [&](Real t) {
    Samples out{RealVector<Real>(n), RealVector<Real>(n), RealVector<Real>(n), RealVector<Real>()};
    if (fourth) out.d4.resize(n);
    for (Index j = 0; j < n; ++j) {
      out.val[j] = v.value(x[j], t);
      out.d1[j] = v.dx(x[j], t);
      out.d2[j] = v.dxx(x[j], t);
      if (fourth) out.d4[j] = v.dxxxx(x[j], t);
    }
    return out;
  };
  for (auto [lo, hi] : split_interval(t0, h, v.breakpoints)) {
    const Real len = hi - lo;
    const Real shift = (lo - t0) + len / 2 - h / 2;
    RealVector<Real> piece_val = RealVector<Real>::Zero(n);
    RealVector<Real> piece_d1 = RealVector<Real>::Zero(n);
    // Knots are taken in mirrored pairs so the first moment of a
    // time-independent integrand cancels exactly.
    for (Index i = 0; i < (nk + 1) / 2; ++i) {
      const Index mirror = nk - 1 - i;
      const Real w = rule.weights[i] * len;
      const Samples a = sample(lo + rule.knots[i] * len);
      if (mirror == i) {
        piece_val += w * a.val;
        piece_d1 += w * a.d1;
        m.dxx_mu00 += w * a.d2;
        if (fourth) m.dxxxx_mu00 += w * a.d4;
        continue;
      }
      const Samples b = sample(lo + rule.knots[mirror] * len);
      const Real wc = w * rule.centered[i] * len;
      piece_val += w * a.val + w * b.val;
      piece_d1 += w * a.d1 + w * b.d1;
      m.dxx_mu00 += w * a.d2 + w * b.d2;
      if (fourth) m.dxxxx_mu00 += w * a.d4 + w * b.d4;
      m.mu11 += wc * (a.val - b.val);
      m.dx_mu11 += wc * (a.d1 - b.d1);
    }
    m.mu00 += piece_val;
    m.dx_mu00 += piece_d1;
    m.mu11 += shift * piece_val;
    m.dx_mu11 += shift * piece_d1;
  }
  return m;
}

/// Grid moments of V0(x) + e(t) x in closed form from the scalar moments:
///   mu00 = h V0 + h r x,  mu11 = (s/2) x.
template <typename Real>
GridMoments<Real> laser_grid_moments(const StaticSamples<Real>& v0, const Grid1D<Real>& grid,
                                     const ScalarMoments<Real>& sm) {
  if (v0.second.size() != grid.size())
    throw std::invalid_argument("laser_grid_moments: second-derivative samples required");
  const Real h = sm.h;
  const auto& x = grid.nodes();
  const Index n = grid.size();
  GridMoments<Real> m;
  m.t0 = sm.t0;
  m.h = h;
  m.mu00 = h * v0.value + (h * sm.r) * x;
  m.mu11 = (sm.s / 2) * x;
  m.dx_mu00 = (h * v0.gradient.array() + h * sm.r).matrix();
  m.dxx_mu00 = h * v0.second;
  m.dx_mu11 = RealVector<Real>::Constant(n, sm.s / 2);
  if (v0.fourth.size() == n) m.dxxxx_mu00 = h * v0.fourth;
  return m;
}

}  // namespace magsplit
