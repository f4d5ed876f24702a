#pragma once

#include <string>

#include "gaussopt/spectra.hpp"

namespace gaussopt {

/// Bernoulli thinning on the truncated support:
/// [T_lambda(p)]_n = sum_{k>=n} C(k,n) lambda^n (1-lambda)^(k-n) p_k.
/// The finite sum is exact and mass-preserving.
ProbVector thin(const ProbVector& p, double lambda);

/// max |diag(attenuator(diag p)) - T_lambda(p)| at cutoff dim; the two paths
/// are computed independently.
double check_thinning_attenuator(const ProbVector& p, double lambda, int dim,
                                 const GlobalConfig& cfg = {});

/// S(T_lambda p) - g(lambda g^{-1}(S(p))), the signed entropy-inequality gap.
double thinning_entropy_gap(const ProbVector& p, double lambda);

/// ||T_lambda w||_q / ||w||_p for the truncated geometric family, evaluated
/// through the closed geometric forms (T_lambda maps geometric(E) to
/// geometric(lambda E)).
double thinning_geometric_ratio(double energy, double lambda, double p_exp,
                                double q_exp);

/// l^r norm of the infinite geometric sequence with mean E (closed form).
double geometric_lp_norm(double energy, double r);

struct ThinningNormReport {
  double lambda = 0.0;
  double p_exp = 1.0;
  double q_exp = 1.0;
  double family_value = 0.0;   // sup over the geometric family
  double family_argmax = 0.0;  // maximizing E (last grid point when divergent)
  double search_value = 0.0;   // best value from the general-distribution search
  std::string regime;          // "achieved", "asymptotic", "divergent"
};

/// Geometric-family supremum (grid + golden-section refinement) against a
/// random-restart local search over general truncated distributions.
ThinningNormReport thinning_norm_estimate(double p_exp, double q_exp,
                                          double lambda, int support,
                                          int restarts, std::uint64_t seed);

}  // namespace gaussopt
