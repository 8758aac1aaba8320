#include "observables.hpp"

#include <stdexcept>

namespace magsplit::harness {

Observables observables(SpectralWorkspace<double>& ws, const WaveFunction<double>& u,
                        const RealVector<double>& v_samples, double epsilon) {
  if (v_samples.size() != u.values().size()) throw std::invalid_argument("observables: potential length mismatch");
  const double dx = u.grid().dx();
  const double mass = dx * u.values().squaredNorm();
  Observables o;
  o.norm = std::sqrt(mass);
  if (mass == 0) return o;
  const WaveFunction<double> du = apply_derivative(ws, u, 1);
  const double kinetic = epsilon * epsilon * dx * du.values().squaredNorm();
  const double potential = dx * (v_samples.array() * u.values().array().abs2()).sum();
  o.energy = (kinetic + potential) / mass;
  return o;
}

Observables observables(SpectralWorkspace<double>& ws, const WaveFunction<double>& u,
                        const TimeDependentPotential<double>& v, double t, double epsilon) {
  const auto& x = u.grid().nodes();
  RealVector<double> samples(x.size());
  for (Index j = 0; j < x.size(); ++j) samples[j] = v.value(x[j], t);
  return observables(ws, u, samples, epsilon);
}

}  // namespace magsplit::harness
