#pragma once

// One-step propagators for
//
//   i eps u_t = -eps^2 u_xx + V(x,t) u,    V = V0(x) + e(t) x  (laser form)
//
// MZ2      exponential midpoint / Strang, exp(1/2 W0) exp(W1) exp(1/2 W0)
// MZ4      fourth-order Magnus-Zassenhaus, inner exponent by Lanczos
// MaStBM   Strang wrapper around the Blanes-Moan splitting
// MaStBMc  MaStBM with the outer shifts folded into the a1 Laplacians
// MaStCC   Strang wrapper around the Chin-Chen splitting
// MaCC     Chin-Chen applied directly to the Magnus exponent

#include <array>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>

#include "magsplit/lanczos.hpp"
#include "magsplit/moments.hpp"
#include "magsplit/operator_algebra.hpp"
#include "magsplit/potentials.hpp"
#include "magsplit/spectral_grid.hpp"

namespace magsplit {

enum class SchemeId { MZ2, MZ4, MaStBM, MaStBMc, MaStCC, MaCC };

inline constexpr std::array<SchemeId, 6> kAllSchemes = {SchemeId::MZ2,    SchemeId::MZ4,     SchemeId::MaStBM,
                                                        SchemeId::MaStBMc, SchemeId::MaStCC, SchemeId::MaCC};

inline std::string_view to_string(SchemeId id) {
  switch (id) {
    case SchemeId::MZ2: return "MZ2";
    case SchemeId::MZ4: return "MZ4";
    case SchemeId::MaStBM: return "MaStBM";
    case SchemeId::MaStBMc: return "MaStBMc";
    case SchemeId::MaStCC: return "MaStCC";
    case SchemeId::MaCC: return "MaCC";
  }
  return "?";
}

inline SchemeId parse_scheme_id(std::string_view name) {
  for (SchemeId id : kAllSchemes)
    if (to_string(id) == name) return id;
  throw std::invalid_argument("unknown scheme id '" + std::string(name) + "'");
}

/// Magnus-Strang and Magnus-Chin-Chen schemes need the laser form V0 + e(t) x.
inline bool needs_laser_form(SchemeId id) { return id != SchemeId::MZ2 && id != SchemeId::MZ4; }

/// Schemes whose outer shift exponentials can be merged across steps.
inline bool supports_boundary_fusion(SchemeId id) { return id == SchemeId::MaStBM || id == SchemeId::MaStCC; }

/// Transforms per step when the budget does not depend on Lanczos work
/// (everything except MZ4, which costs 4 + 6 per matvec).
inline std::optional<int> transforms_per_step(SchemeId id, bool fuse_boundary = false) {
  const bool fused = fuse_boundary && supports_boundary_fusion(id);
  switch (id) {
    case SchemeId::MZ2: return 4;
    case SchemeId::MZ4: return std::nullopt;
    case SchemeId::MaStBM: return fused ? 16 : 18;
    case SchemeId::MaStBMc: return 14;
    case SchemeId::MaStCC: return fused ? 6 : 8;
    case SchemeId::MaCC: return 4;
  }
  return std::nullopt;
}

/// Fourth-order Blanes-Moan coefficients (palindromic, 13 factors).
template <typename Real = double>
struct BlanesMoan {
  static constexpr Real a1 = Real(0.0792036964311957);
  static constexpr Real a2 = Real(0.353172906049774);
  static constexpr Real a3 = Real(-0.0420650803577195);
  static constexpr Real a4 = 1 - 2 * (a1 + a2 + a3);
  static constexpr Real b1 = Real(0.209515106613362);
  static constexpr Real b2 = Real(-0.143851773179818);
  static constexpr Real b3 = Real(0.5) - b1 - b2;
};

template <typename Real = double>
struct SchemeSpec {
  SchemeId id = SchemeId::MaCC;
  Real epsilon = 1;
  QuadratureRule<Real> quad = gauss_legendre<Real>(3);
  KrylovConfig<Real> krylov{};
  bool fuse_boundary = false;
  /// MZ4: keep -(1/24) i h^2 eps <d^4 mu00>_0 in the inner exponent.
  bool keep_h3_term = true;
  /// Diagnostic: replace s by 0 in the Magnus-Strang/Chin-Chen schemes.
  bool drop_drift = false;

  void validate() const {
    if (!(epsilon > 0 && epsilon <= 1)) throw std::invalid_argument("SchemeSpec: epsilon must lie in (0, 1]");
    if (quad.size() < 1) throw std::invalid_argument("SchemeSpec: empty quadrature rule");
    krylov.validate();
  }
};

template <typename Real = double>
struct Problem {
  GridPtr<Real> grid;
  std::optional<StaticPotential<Real>> static_potential;
  std::optional<LaserPulse<Real>> pulse;
  TimeDependentPotential<Real> potential;

  static Problem laser(GridPtr<Real> grid, StaticPotential<Real> v0, LaserPulse<Real> e) {
    Problem p;
    p.grid = std::move(grid);
    p.potential = laser_potential(v0, e);
    p.static_potential = std::move(v0);
    p.pulse = std::move(e);
    return p;
  }

  static Problem general(GridPtr<Real> grid, TimeDependentPotential<Real> v) {
    Problem p;
    p.grid = std::move(grid);
    p.potential = std::move(v);
    return p;
  }

  bool has_laser_form() const { return static_potential.has_value() && pulse.has_value(); }
};

/// Per-step data for the laser-form schemes.
template <typename Real = double>
struct LaserStepContext {
  Real t0 = 0;
  Real h = 0;
  ScalarMoments<Real> moments;
  RealVector<Real> v_tilde;
  RealVector<Real> v_hat;  // only filled for the Chin-Chen schemes
};

template <typename Real = double>
struct ZassenhausStepContext {
  Real t0 = 0;
  Real h = 0;
  GridMoments<Real> moments;
};

namespace kernels {

/// Fourier multiplier exp(i a h eps c2 + shift c1), shift = -s/2 for the drift.
template <typename Real>
ComplexVector<Real> laplacian_multiplier(SpectralWorkspace<Real>& ws, Real a, Real h, Real eps, Real shift = 0) {
  const ComplexVector<Real>& lap = ws.laplacian_exponential(a * h * eps);
  if (shift == 0) return lap;
  const RealVector<Real>& kappa = ws.grid().wavenumbers();
  ComplexVector<Real> out(lap.size());
  // c1 = i kappa with the Nyquist entry zeroed
  for (Index j = 0; j < out.size(); ++j) {
    const Real k = j == ws.grid().nyquist_index() ? Real(0) : kappa[j];
    out[j] = lap[j] * std::polar(Real(1), shift * k);
  }
  return out;
}

template <typename Real>
ComplexVector<Real> shift_multiplier(SpectralWorkspace<Real>& ws, Real shift) {
  return laplacian_multiplier(ws, Real(0), Real(0), Real(0), shift);
}

/// exp(-i b h eps^-1 V) as a phase vector.
template <typename Real>
void potential_phase(const RealVector<Real>& v, Real b, Real h, Real eps, ComplexVector<Real>& u) {
  apply_phase<Real>((-b * h / eps) * v, u);
}

}  // namespace kernels

template <typename Real>
LaserStepContext<Real> make_laser_context(const Grid1D<Real>& grid, const RealVector<Real>& v0,
                                          const RealVector<Real>& dv0, const LaserPulse<Real>& pulse,
                                          const SchemeSpec<Real>& spec, Real t0, Real h) {
  LaserStepContext<Real> ctx;
  ctx.t0 = t0;
  ctx.h = h;
  ctx.moments = scalar_moments(pulse, t0, h, spec.quad);
  if (spec.drop_drift) ctx.moments.s = 0;
  ctx.v_tilde = v_tilde_from_samples(v0, grid, ctx.moments.r);
  if (spec.id == SchemeId::MaStCC || spec.id == SchemeId::MaCC)
    ctx.v_hat = v_hat_from_samples(v0, dv0, grid, ctx.moments.r, h);
  return ctx;
}

/// exp(-1/2 s d/dx) as a circulant kernel.
template <typename Real>
void apply_shift(SpectralWorkspace<Real>& ws, Real s, ComplexVector<Real>& u) {
  ws.apply_fourier_multiplier(kernels::shift_multiplier(ws, Real(-0.5) * s), u);
}

/// Blanes-Moan body for X = i h eps d^2, Y = -i h eps^-1 V~. When fold_shift
/// is set, the outer a1 Laplacians carry the drift -1/2 s d/dx as well.
template <typename Real>
void blanes_moan_body(SpectralWorkspace<Real>& ws, Real eps, const LaserStepContext<Real>& ctx, ComplexVector<Real>& u,
                      bool fold_shift) {
  using C = BlanesMoan<Real>;
  const Real h = ctx.h;
  const Real outer_shift = fold_shift ? Real(-0.5) * ctx.moments.s : Real(0);
  const ComplexVector<Real> m1 = kernels::laplacian_multiplier(ws, C::a1, h, eps, outer_shift);
  const ComplexVector<Real> m2 = kernels::laplacian_multiplier(ws, C::a2, h, eps);
  const ComplexVector<Real> m3 = kernels::laplacian_multiplier(ws, C::a3, h, eps);
  const ComplexVector<Real> m4 = kernels::laplacian_multiplier(ws, C::a4, h, eps);
  const RealVector<Real>& v = ctx.v_tilde;
  ws.apply_fourier_multiplier(m1, u);
  kernels::potential_phase(v, C::b1, h, eps, u);
  ws.apply_fourier_multiplier(m2, u);
  kernels::potential_phase(v, C::b2, h, eps, u);
  ws.apply_fourier_multiplier(m3, u);
  kernels::potential_phase(v, C::b3, h, eps, u);
  ws.apply_fourier_multiplier(m4, u);
  kernels::potential_phase(v, C::b3, h, eps, u);
  ws.apply_fourier_multiplier(m3, u);
  kernels::potential_phase(v, C::b2, h, eps, u);
  ws.apply_fourier_multiplier(m2, u);
  kernels::potential_phase(v, C::b1, h, eps, u);
  ws.apply_fourier_multiplier(m1, u);
}

/// Chin-Chen body exp(Y/6) exp(X/2) exp(2/3 Y^) exp(X/2) exp(Y/6), where the
/// half Laplacians optionally carry the drift (MaCC).
template <typename Real>
void chin_chen_body(SpectralWorkspace<Real>& ws, Real eps, const LaserStepContext<Real>& ctx, ComplexVector<Real>& u,
                    bool with_drift) {
  const Real h = ctx.h;
  const Real shift = with_drift ? Real(-0.5) * ctx.moments.s : Real(0);
  const ComplexVector<Real> half = kernels::laplacian_multiplier(ws, Real(0.5), h, eps, shift);
  kernels::potential_phase(ctx.v_tilde, Real(1) / 6, h, eps, u);
  ws.apply_fourier_multiplier(half, u);
  kernels::potential_phase(ctx.v_hat, Real(2) / 3, h, eps, u);
  ws.apply_fourier_multiplier(half, u);
  kernels::potential_phase(ctx.v_tilde, Real(1) / 6, h, eps, u);
}

template <typename Real>
void step_MaStBM(SpectralWorkspace<Real>& ws, const SchemeSpec<Real>& spec, const LaserStepContext<Real>& ctx,
                 ComplexVector<Real>& u, bool outer_shifts = true) {
  if (outer_shifts) apply_shift(ws, ctx.moments.s, u);
  blanes_moan_body(ws, spec.epsilon, ctx, u, false);
  if (outer_shifts) apply_shift(ws, ctx.moments.s, u);
}

template <typename Real>
void step_MaStBMc(SpectralWorkspace<Real>& ws, const SchemeSpec<Real>& spec, const LaserStepContext<Real>& ctx,
                  ComplexVector<Real>& u) {
  blanes_moan_body(ws, spec.epsilon, ctx, u, true);
}

template <typename Real>
void step_MaStCC(SpectralWorkspace<Real>& ws, const SchemeSpec<Real>& spec, const LaserStepContext<Real>& ctx,
                 ComplexVector<Real>& u, bool outer_shifts = true) {
  if (outer_shifts) apply_shift(ws, ctx.moments.s, u);
  chin_chen_body(ws, spec.epsilon, ctx, u, false);
  if (outer_shifts) apply_shift(ws, ctx.moments.s, u);
}

template <typename Real>
void step_MaCC(SpectralWorkspace<Real>& ws, const SchemeSpec<Real>& spec, const LaserStepContext<Real>& ctx,
               ComplexVector<Real>& u) {
  chin_chen_body(ws, spec.epsilon, ctx, u, true);
}

template <typename Real>
void step_MZ2(SpectralWorkspace<Real>& ws, const SchemeSpec<Real>& spec, const ZassenhausStepContext<Real>& ctx,
              ComplexVector<Real>& u) {
  const Real eps = spec.epsilon;
  const ComplexVector<Real> half = kernels::laplacian_multiplier(ws, Real(0.5), ctx.h, eps);
  ws.apply_fourier_multiplier(half, u);
  apply_phase<Real>((-1 / eps) * ctx.moments.mu00, u);
  ws.apply_fourier_multiplier(half, u);
}

/// Inner exponent of MZ4,
///   W2 = 1/6 i h eps^-1 (mu00')^2 - 2 <mu11'>_1 + 1/6 i h^2 eps <mu00''>_2
///        [- 1/24 i h^2 eps <mu00''''>_0]
/// in the convention sum coeff i^(k+1) <f>_k.
template <typename Real>
SymOpSum<Real> mz4_inner_operator(SpectralWorkspace<Real>& ws, const SchemeSpec<Real>& spec,
                                  const GridMoments<Real>& m) {
  const Real eps = spec.epsilon;
  const Real h = m.h;
  RealVector<Real> f0 = (h / (6 * eps)) * m.dx_mu00.array().square().matrix();
  if (spec.keep_h3_term) {
    const RealVector<Real> d4 =
        m.dxxxx_mu00.size() == m.mu00.size() ? m.dxxxx_mu00 : spectral_derivative(ws, m.mu00, 4);
    f0 -= (h * h * eps / 24) * d4;
  }
  SymOpSum<Real> op(ws.grid_ptr());
  op.add(0, std::move(f0));
  op.add(1, Real(2) * m.dx_mu11);
  op.add(2, (-h * h * eps / 6) * m.dxx_mu00);
  return op;
}

/// exp(W) v for skew-Hermitian W via Lanczos on H = -i W.
template <typename Real>
KrylovResult<Real> expm_skew(SpectralWorkspace<Real>& ws, const SymOpSum<Real>& op, const ComplexVector<Real>& v,
                             const KrylovConfig<Real>& config) {
  const Complex<Real> minus_i(0, -1);
  auto matvec = [&](const ComplexVector<Real>& x, ComplexVector<Real>& y) {
    apply_into(ws, op, x, y);
    y *= minus_i;
  };
  return expm_krylov<Real>(matvec, v, config);
}

template <typename Real>
KrylovResult<Real> step_MZ4(SpectralWorkspace<Real>& ws, const SchemeSpec<Real>& spec,
                            const ZassenhausStepContext<Real>& ctx, ComplexVector<Real>& u) {
  const Real eps = spec.epsilon;
  const ComplexVector<Real> half = kernels::laplacian_multiplier(ws, Real(0.5), ctx.h, eps);
  const RealVector<Real> half_phase = (Real(-0.5) / eps) * ctx.moments.mu00;
  ws.apply_fourier_multiplier(half, u);
  apply_phase(half_phase, u);
  const SymOpSum<Real> w2 = mz4_inner_operator(ws, spec, ctx.moments);
  KrylovResult<Real> inner = expm_skew(ws, w2, u, spec.krylov);
  u = inner.value;
  apply_phase(half_phase, u);
  ws.apply_fourier_multiplier(half, u);
  inner.value.resize(0);
  return inner;
}

/// Stepping driver: owns the transform workspace, caches V0 samples and
/// handles cross-step fusion of the outer shift exponentials.
template <typename Real = double>
class Propagator {
 public:
  Propagator(Problem<Real> problem, SchemeSpec<Real> spec)
      : problem_(std::move(problem)), spec_(std::move(spec)), ws_(problem_.grid) {
    spec_.validate();
    if (needs_laser_form(spec_.id)) {
      if (!problem_.has_laser_form())
        throw std::invalid_argument(std::string(to_string(spec_.id)) + " needs a potential of the form V0(x) + e(t) x");
      v0_ = problem_.static_potential->sample(*problem_.grid);
      dv0_ = problem_.static_potential->sample_gradient(*problem_.grid);
    } else if (problem_.has_laser_form() && problem_.static_potential->second) {
      static_samples_ = sample_static(*problem_.static_potential, *problem_.grid);
    }
  }

  const SchemeSpec<Real>& spec() const { return spec_; }
  const Problem<Real>& problem() const { return problem_; }
  SpectralWorkspace<Real>& workspace() { return ws_; }
  std::uint64_t transforms() const { return ws_.transforms(); }

  /// Advances u from t0 to t0 + h. With boundary fusion active the trailing
  /// shift is deferred; call finish() before reading the state.
  void step(ComplexVector<Real>& u, Real t0, Real h) {
    if (!(h > 0)) throw std::invalid_argument("Propagator::step: h must be positive");
    switch (spec_.id) {
      case SchemeId::MZ2:
      case SchemeId::MZ4: {
        ZassenhausStepContext<Real> ctx{t0, h, zassenhaus_moments(t0, h)};
        if (spec_.id == SchemeId::MZ2) {
          step_MZ2(ws_, spec_, ctx, u);
        } else {
          const KrylovResult<Real> r = step_MZ4(ws_, spec_, ctx, u);
          last_krylov_iterations_ = r.iterations;
          krylov_matvecs_ += static_cast<std::uint64_t>(r.iterations);
          if (!r.converged && !spec_.krylov.fixed_iterations) ++krylov_failures_;
        }
        return;
      }
      default: break;
    }
    const LaserStepContext<Real> ctx = make_laser_context(*problem_.grid, v0_, dv0_, *problem_.pulse, spec_, t0, h);
    const bool fuse = spec_.fuse_boundary && supports_boundary_fusion(spec_.id);
    if (fuse) {
      // leading shift merged with the previous step's trailing one
      apply_shift(ws_, pending_shift_ + ctx.moments.s, u);
      pending_shift_ = ctx.moments.s;
    }
    switch (spec_.id) {
      case SchemeId::MaStBM: step_MaStBM(ws_, spec_, ctx, u, !fuse); break;
      case SchemeId::MaStBMc: step_MaStBMc(ws_, spec_, ctx, u); break;
      case SchemeId::MaStCC: step_MaStCC(ws_, spec_, ctx, u, !fuse); break;
      case SchemeId::MaCC: step_MaCC(ws_, spec_, ctx, u); break;
      default: break;
    }
  }

  /// Laser-form potentials take the closed form built from (r, s); anything
  /// else goes through node-wise quadrature.
  GridMoments<Real> zassenhaus_moments(Real t0, Real h) const {
    if (static_samples_)
      return laser_grid_moments(*static_samples_, *problem_.grid, scalar_moments(*problem_.pulse, t0, h, spec_.quad));
    return grid_moments(problem_.potential, *problem_.grid, t0, h, spec_.quad);
  }

  /// Applies any deferred trailing shift.
  void finish(ComplexVector<Real>& u) {
    if (pending_shift_ != 0) apply_shift(ws_, pending_shift_, u);
    pending_shift_ = 0;
  }

  bool has_pending_shift() const { return pending_shift_ != 0; }
  int last_krylov_iterations() const { return last_krylov_iterations_; }
  std::uint64_t krylov_matvecs() const { return krylov_matvecs_; }
  std::uint64_t krylov_failures() const { return krylov_failures_; }

 private:
  Problem<Real> problem_;
  SchemeSpec<Real> spec_;
  SpectralWorkspace<Real> ws_;
  RealVector<Real> v0_;
  RealVector<Real> dv0_;
  std::optional<StaticSamples<Real>> static_samples_;
  Real pending_shift_ = 0;
  int last_krylov_iterations_ = 0;
  std::uint64_t krylov_matvecs_ = 0;
  std::uint64_t krylov_failures_ = 0;
};

}  // namespace magsplit
