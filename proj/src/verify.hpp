#pragma once

#include <cstdint>
#include <ostream>
#include <random>
#include <string>
#include <vector>

#include "magsplit/lanczos.hpp"
#include "magsplit/operator_algebra.hpp"

namespace magsplit::harness {

struct VerifyCheck {
  std::string name;
  double value = 0;
  double limit = 0;
  bool passed = false;
};

/// Smooth random real samples: random Fourier coefficients up to `band`.
RealVector<double> random_smooth_samples(const Grid1D<double>& grid, std::mt19937_64& rng, Index band);

/// Random SymOpSum with 1..4 terms of orders <= max_order.
SymOpSum<double> random_symop(GridPtr<double> grid, std::mt19937_64& rng, int max_order = 2);

std::vector<VerifyCheck> run_verification(std::ostream& log, std::uint64_t seed = 7);

struct CommutatorSizeRow {
  double epsilon = 0;
  double first = 0;   // ‖[Y, X]‖
  double second = 0;  // ‖[[Y, X], X]‖
  double mixed = 0;   // ‖[[Y, X], Y]‖
};

/// Spectral norms of nested commutators of X = eps d^2 and Y = eps^-1 mu
/// restricted to Fourier modes |kappa| <= 1/eps. Diagnostic only.
std::vector<CommutatorSizeRow> commutator_size_table(const std::vector<double>& epsilons);

}  // namespace magsplit::harness
