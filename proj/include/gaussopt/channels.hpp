#pragma once

#include <Eigen/SparseCore>
#include <memory>
#include <optional>
#include <utility>
#include <vector>

#include "gaussopt/fock.hpp"
#include "gaussopt/spectra.hpp"

namespace gaussopt {

using SpMat = Eigen::SparseMatrix<cxd>;

enum class ChannelKind {
  AttenuatorQL,
  AmplifierQL,
  AttenuatorThermal,
  AmplifierThermal,
  BeamSplitterReduce,
  HeatSemigroup,
  Transpose,
  Dual,
  Complementary,
};

const char* channel_kind_name(ChannelKind k);

/// Declared vs internal cutoffs. Inputs are zero-padded from `in` to
/// `guard_in` before the Kraus pass; outputs are projected from `guard_out`
/// down to `out`, and the projected-away mass is the reported leakage.
struct CutoffSpec {
  FockSpace in;
  FockSpace out;
  FockSpace guard_in;
  FockSpace guard_out;
};

/// One Kraus pass. Channels built from a composition (thermal kinds) carry
/// several stages applied in order.
struct KrausStage {
  std::vector<SpMat> ops;
  int rows = 0;
  int cols = 0;
};

/// A quantum channel as kind + parameters + regenerable Kraus data.
/// BeamSplitterReduce keeps the two-mode unitary instead of a Kraus list and
/// is applied by conjugation plus partial trace; Transpose carries no data.
struct ChannelRep {
  ChannelKind kind = ChannelKind::AttenuatorQL;
  double param = 1.0;       // lambda, kappa, or diffusion time t
  double env_energy = 0.0;  // thermal environments
  int quad_order = 15;      // heat semigroup grid order per axis
  int copies = 1;           // modewise tensor power
  CutoffSpec cutoffs;
  std::vector<KrausStage> stages;
  SpMat unitary;  // BeamSplitterReduce only; block-diagonal, kept sparse
  std::shared_ptr<ChannelRep> inner;  // Dual / Complementary
  /// Max deviation of the completeness (or unitality) sum from the identity
  /// on the declared input block.
  double completeness_defect = 0.0;
};

struct ApplyResult {
  DensityMatrix state;
  double leakage = 0.0;
};

// ---- constructors -----------------------------------------------------------

/// Quantum-limited attenuator with binomial Kraus operators; exactly
/// trace-preserving on the cutoff block, no guard needed.
ChannelRep kraus_attenuator_ql(double lambda, int dim_in,
                               const GlobalConfig& cfg = {});

/// Quantum-limited amplifier with negative-binomial Kraus operators, built
/// up to `guard_out` (auto-sized for completeness <= 1e-10 when <= 0).
ChannelRep kraus_amplifier_ql(double kappa, int dim_in, int guard_out = -1,
                              const GlobalConfig& cfg = {});

/// Thermal attenuator/amplifier as quantum-limited attenuator followed by a
/// quantum-limited amplifier; the composition parameters reproduce the mean
/// photon-number transfer of the dilation definition and are checked against
/// it in the test suite.
ChannelRep thermal_channel(ChannelKind kind, double param, double env_energy,
                           int dim_in, int guard_out = -1,
                           const GlobalConfig& cfg = {});

/// Composition parameters (tau, kappa') used by thermal_channel.
std::pair<double, double> thermal_decomposition(ChannelKind kind, double param,
                                                double env_energy);

/// Gaussian mixture of displacements on a 2-D Gauss-Hermite grid; the Kraus
/// family is re-orthonormalized so that completeness holds exactly at the
/// guard cutoff. t = 0 yields the identity channel. Diffusion populates the
/// guard levels, so the declared output defaults to the guard itself; pass
/// out_dim = dim to project back.
ChannelRep heat_semigroup(double t, int dim, int quad_order = 15,
                          const GlobalConfig& cfg = {}, int guard_dim = -1,
                          int out_dim = -1);

/// Entrywise transposition in the Fock basis (positive but not CP; used as a
/// composition factor).
ChannelRep transpose_channel(int dim);

/// Kraus adjoints; satisfies the unitality counterpart of completeness.
ChannelRep dual_channel(const ChannelRep& c);

/// Complementary channel of a quantum-limited attenuator or amplifier,
/// obtained by tracing the system instead of the environment. Thermal kinds
/// are rejected: their environment is not pure.
ChannelRep complementary_ql(const ChannelRep& c);

/// Modewise n-fold tensor power.
ChannelRep tensor_power(const ChannelRep& c, int copies);

/// Two-mode mixing unitary on the given (guard) space: beam-splitter for
/// 0 <= param <= 1, two-mode squeezer for param >= 1. Block-diagonal
/// structure (total photon number / photon number difference) is exploited,
/// so the result is exactly unitary.
LinearOperator beam_splitter_unitary(double param, const FockSpace& space2);

/// AB -> A reduction channel: conjugate by the mixing unitary, trace B.
ChannelRep beam_splitter_reduce(double param, int dim_a, int dim_b,
                                int out_dim = -1,
                                std::pair<int, int> guards = {-1, -1},
                                const GlobalConfig& cfg = {});

/// Guard policy for the two-mode unitary: exact for param <= 1, tail-sized
/// for the squeezer.
std::pair<int, int> beam_guards(double param, int dim_a, int dim_b);

// ---- application ------------------------------------------------------------

/// Raw action on an operator supported on `cutoffs.in`: embed, run all Kraus
/// stages, project to `cutoffs.out`. No renormalization, no validation.
Mat apply_to_matrix(const ChannelRep& c, const Mat& x);

/// Action on a state: as above, then the projected-away trace is reported as
/// leakage and the output is renormalized into a valid DensityMatrix.
ApplyResult apply(const ChannelRep& c, const DensityMatrix& rho,
                  const GlobalConfig& cfg = {});

/// Same, but throws TruncationError when leakage exceeds cfg.leakage_max.
DensityMatrix apply_checked(const ChannelRep& c, const DensityMatrix& rho,
                            const GlobalConfig& cfg = {});

/// B_lambda on a two-mode state (modes 0,1): returns the reduced output on
/// mode A. Guards default to the exact policy for param <= 1.
ApplyResult apply_B(const DensityMatrix& rho_ab, double param,
                    int out_dim = -1, std::pair<int, int> guards = {-1, -1},
                    const GlobalConfig& cfg = {});

/// (B_lambda tensor I_M): modes 0,1 enter the mixing unitary, the remaining
/// modes ride along untouched; mode B is traced out.
ApplyResult apply_B_extended(const DensityMatrix& rho_abm, double param,
                             int out_dim = -1,
                             std::pair<int, int> guards = {-1, -1},
                             const GlobalConfig& cfg = {});

// ---- dilation (oracle path) ---------------------------------------------------

/// Stinespring data for attenuator/amplifier channels: mixing unitary on the
/// guard two-mode space plus the (Fock-diagonal) environment state. Kept
/// separate from the Kraus production path so the two can be checked against
/// each other.
struct DilationRep {
  SpMat unitary;    // block-diagonal mixing unitary
  FockSpace space;  // its two-mode guard space
  DensityMatrix env_state;
  int traced_mode = 1;  // 1: direct channel, 0: complementary
};

DilationRep make_dilation(double param, double env_energy, int dim_in,
                          std::pair<int, int> guards = {-1, -1},
                          const GlobalConfig& cfg = {});

/// Channel action through the dilation on an operator given at dim_in,
/// projected to out_dim. Decomposes the diagonal environment into pure
/// levels so only unitary columns are touched.
Mat dilation_apply(const DilationRep& d, const Mat& x, int out_dim);

/// Dilation action on the matrix unit |m><n|.
Mat dilation_unit_action(const DilationRep& d, int m, int n, int out_dim);

// ---- zero-CMI constructor -----------------------------------------------------

/// One direct-sum block: weight, state on (A, M_A), state on (B, M_B).
struct ZeroCmiBlock {
  double weight = 1.0;
  DensityMatrix rho_am;
  DensityMatrix rho_bm;
};

/// Direct sum of product blocks embedded into a single memory space of
/// summed sector dimension; the output has vanishing I(A:B|M) by
/// construction. Result lives on modes [A, B, M].
DensityMatrix zero_cmi_state(const std::vector<ZeroCmiBlock>& blocks,
                             const GlobalConfig& cfg = {});

/// Gauss-Hermite nodes/weights for int f(x) e^{-x^2} dx.
void gauss_hermite(int order, std::vector<double>& nodes,
                   std::vector<double>& weights);

}  // namespace gaussopt
