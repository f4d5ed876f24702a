#pragma once

#include <vector>

#include "gaussopt/fock.hpp"

namespace gaussopt {

/// Descending-sorted eigenvalue list of a state; entries are clamped
/// nonnegative and renormalized to unit mass.
struct Spectrum {
  std::vector<double> values;

  double sum() const;
};

/// Truncated distribution on {0..L-1}. The weights may sum to slightly less
/// than one; the deficit is the truncated tail.
struct ProbVector {
  std::vector<double> weights;

  ProbVector() = default;
  explicit ProbVector(std::vector<double> w, const GlobalConfig& cfg = {});

  int size() const { return static_cast<int>(weights.size()); }
  double mass() const;
  double tail_deficit() const { return 1.0 - mass(); }
  double mean() const;
};

/// Truncated geometric distribution with mean photon number E (not
/// renormalized; the tail is reported by the ProbVector itself).
ProbVector geometric_dist(double energy, int len);

/// Descending eigenvalues of a state. Eigenvalues in [-tol_psd, 0) are
/// clamped to zero and the spectrum is renormalized; anything more negative
/// aborts with DomainError.
Spectrum spectrum(const DensityMatrix& rho, const GlobalConfig& cfg = {});

/// Schatten p-norm from singular values; p may be infinity.
double schatten_norm(const Mat& x, double p);
double schatten_norm(const LinearOperator& x, double p);
double schatten_norm(const DensityMatrix& rho, double p,
                     const GlobalConfig& cfg = {});

double von_neumann_entropy(const Spectrum& s);
double von_neumann_entropy(const DensityMatrix& rho,
                           const GlobalConfig& cfg = {});
/// Renyi entropy p/(1-p) ln ||rho||_p, defined for p > 1 only.
double renyi_entropy(const DensityMatrix& rho, double p,
                     const GlobalConfig& cfg = {});
double renyi_entropy(const Spectrum& s, double p);

double shannon_entropy(const ProbVector& p);
double shannon_entropy(const std::vector<double>& w);
/// l^r norm of the weight sequence, r >= 1 (infinity allowed).
double lp_norm(const ProbVector& p, double r);

/// Entropy of the thermal state of mean photon number E:
/// g(E) = (E+1)ln(E+1) - E ln E, g(0) = 0.
double g_func(double energy);
/// Derivative g'(E) = ln(E+1) - ln(E).
double g_deriv(double energy);
/// Inverse of g by bisection on [0, e^s]; monotonicity makes it unique.
double g_inv(double entropy_value);

/// S(A|M) = S(AM) - S(M) where the given state lives on A union M and
/// modes_m names the memory modes (may be empty: trivial memory).
double conditional_entropy(const DensityMatrix& rho_am,
                           const std::vector<int>& modes_m,
                           const GlobalConfig& cfg = {});

/// I(A:B) = S(A) + S(B) - S(AB); modes_a and modes_b must partition the
/// state's modes.
double mutual_information(const DensityMatrix& rho_ab,
                          const std::vector<int>& modes_a,
                          const std::vector<int>& modes_b,
                          const GlobalConfig& cfg = {});

/// I(A:B|M) = S(AM) + S(BM) - S(ABM) - S(M); the three sets must be disjoint
/// and cover all modes.
double cond_mutual_information(const DensityMatrix& rho_abm,
                               const std::vector<int>& modes_a,
                               const std::vector<int>& modes_b,
                               const std::vector<int>& modes_m,
                               const GlobalConfig& cfg = {});

}  // namespace gaussopt
