#pragma once

#include "magsplit/spectral_grid.hpp"
#include "magsplit/potentials.hpp"

namespace magsplit::harness {

struct Observables {
  double norm = 0;
  double energy = 0;
};

struct EnergySample {
  double t = 0;
  double norm = 0;
  double energy = 0;
};

/// norm = discrete L2; energy = (eps^2 ‖u_x‖^2 + sum V |u|^2 dx) / ‖u‖^2.
Observables observables(SpectralWorkspace<double>& ws, const WaveFunction<double>& u,
                        const RealVector<double>& v_samples, double epsilon);
Observables observables(SpectralWorkspace<double>& ws, const WaveFunction<double>& u,
                        const TimeDependentPotential<double>& v, double t, double epsilon);

}  // namespace magsplit::harness
