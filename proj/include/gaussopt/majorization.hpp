#pragma once

#include "gaussopt/spectra.hpp"

namespace gaussopt {

/// Outcome of a partial-sum majorization test. `holds` iff the worst gap
/// (descending partial sums of a minus those of b) stays above -tol.
struct MajorizationVerdict {
  bool holds = false;
  double worst_partial_sum_gap = 0.0;
  int index_of_worst = 0;
};

/// Hardy-Littlewood-Polya criterion on sorted descending copies of the
/// inputs, zero-padded to equal length. Total masses must agree within tol.
MajorizationVerdict majorizes(const std::vector<double>& a,
                              const std::vector<double>& b, double tol = 1e-9);
MajorizationVerdict majorizes(const Spectrum& a, const Spectrum& b,
                              double tol = 1e-9);
MajorizationVerdict majorizes(const ProbVector& a, const ProbVector& b,
                              double tol = 1e-9);

/// Fock-diagonal state carrying the spectrum of rho in descending order on
/// ascending photon number; the minimum-energy state with that spectrum.
/// Multi-mode inputs order the basis by total photon number (ties by index).
DensityMatrix passive_rearrangement(const DensityMatrix& rho,
                                    const GlobalConfig& cfg = {});

/// Stable descending sort of the weights.
ProbVector decreasing_rearrangement(const ProbVector& p);

}  // namespace gaussopt
