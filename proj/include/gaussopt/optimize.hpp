#pragma once

#include <functional>
#include <utility>

#include "gaussopt/fock.hpp"
#include "gaussopt/rng.hpp"
#include "gaussopt/spectra.hpp"

namespace gaussopt {

/// Knobs for the derivative-free suprema. The seed is recorded in every
/// report so reruns reproduce gaps exactly.
struct OptimizerConfig {
  double grid_lo = 0.0;
  double grid_hi = 8.0;
  int grid_steps = 33;
  int refine_iters = 80;
  int restarts = 50;
  int local_steps = 60;
  double perturbation = 0.25;
  std::uint64_t seed = 1;

  void validate() const {
    if (grid_steps < 2 || refine_iters < 1 || restarts < 1 || local_steps < 1 ||
        perturbation <= 0)
      throw DomainError("OptimizerConfig: all knobs must be positive");
  }
};

/// Golden-section maximization on [lo, hi]; returns (argmax, max).
std::pair<double, double> golden_section_max(
    const std::function<double(double)>& f, double lo, double hi, int iters);

/// Coarse grid scan followed by golden-section refinement around the best
/// grid point.
std::pair<double, double> grid_refine_max(const std::function<double(double)>& f,
                                          double lo, double hi, int steps,
                                          int refine_iters);

/// Nelder-Mead simplex maximization (small dimensions).
std::pair<Eigen::VectorXd, double> nelder_mead_max(
    const std::function<double(const Eigen::VectorXd&)>& f,
    const Eigen::VectorXd& x0, double step, int iters);

// ---- random samplers ---------------------------------------------------------

/// Ginibre-induced state G G^dag / Tr with the given rank.
DensityMatrix random_state(const FockSpace& space, int rank, Rng& rng,
                           const GlobalConfig& cfg = {});

/// Fock-diagonal state with symmetric Dirichlet(1) weights.
DensityMatrix random_fock_diagonal(const FockSpace& space, Rng& rng,
                                   const GlobalConfig& cfg = {});

/// Symmetric Dirichlet(1) distribution on {0..len-1}.
ProbVector random_prob(int len, Rng& rng);

/// Haar-ish random unit vector.
Vec random_pure_vector(int dim, Rng& rng);

/// Unnormalized PSD matrix G G^dag of the given rank.
Mat random_psd(int dim, int rank, Rng& rng);

// ---- local searches ----------------------------------------------------------

struct SearchResult {
  double value = 0.0;
  Mat argmax;  // PSD search
  std::vector<double> argmax_weights;  // sequence search
};

/// Random-restart hill climb over PSD matrices X = L L^dag; the objective
/// must be scale-invariant or handle normalization itself.
SearchResult psd_search_max(const std::function<double(const Mat&)>& f, int dim,
                            int rank, Rng& rng, int restarts, int steps,
                            double perturbation);

/// Random-restart hill climb over nonnegative sequences w_i = y_i^2.
SearchResult sequence_search_max(
    const std::function<double(const std::vector<double>&)>& f, int len,
    Rng& rng, int restarts, int steps, double perturbation);

}  // namespace gaussopt
