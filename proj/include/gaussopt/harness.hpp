#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "gaussopt/channels.hpp"
#include "gaussopt/optimize.hpp"
#include "json.hpp"

namespace gaussopt {

enum class VerifyStatus { Pass, Fail, Probe };
const char* status_name(VerifyStatus s);

/// Per-theorem verification record. `gap` is LHS - RHS of the inequality in
/// its asserted direction, so negative gaps below tolerance are violations.
struct VerificationReport {
  std::string theorem_id;
  nlohmann::ordered_json params = nlohmann::ordered_json::object();
  double gap = 0.0;
  double tolerance = 0.0;
  double leakage = 0.0;
  int trials = 0;
  VerifyStatus status = VerifyStatus::Probe;
  std::uint64_t seed = 0;
};

/// Status rule: proven statements fail only on a real violation (gap below
/// -tolerance with leakage an order of magnitude under it); everything else
/// that cannot be trusted degrades to probe. Open conjectures never fail.
VerifyStatus judge(double gap, double tolerance, double leakage, bool proven);

/// One-mode channel selector used by all verifiers.
struct ChannelSpec {
  ChannelKind kind = ChannelKind::AttenuatorQL;
  double param = 0.5;       // lambda or kappa
  double env_energy = 0.0;  // thermal kinds only
};

ChannelRep build_channel(const ChannelSpec& spec, int dim, int guard = -1,
                         const GlobalConfig& cfg = {});

struct HarnessOptions {
  int trials = 500;
  int dim = 10;
  int jobs = 1;
  std::uint64_t seed = 1;
  std::string dump_dir;  // candidate counterexamples are dumped here if set
  GlobalConfig cfg;
};

/// Deterministic parallel sweep: trial i always runs with the same derived
/// RNG stream and results are reduced in index order.
void parallel_for(int n, int jobs, const std::function<void(int)>& fn);

// ---- closed-form right-hand sides ---------------------------------------------

/// Output entropy of the channel on the thermal state matching input entropy
/// s_in (per mode), the constrained minimum-output-entropy bound.
double cmoe_rhs(const ChannelSpec& spec, double s_in, int n_modes);

/// Minimum output entropy of the two-input mixing channel over inputs with
/// per-mode entropies sa, sb.
double epni_rhs(double sa, double sb, double param);

/// Mean photon number of the channel output for thermal input of mean e_in.
double thermal_transfer(const ChannelSpec& spec, double e_in);

// ---- theorem verifiers -----------------------------------------------------------

VerificationReport verify_moe(const ChannelSpec& spec, int n_modes,
                              const HarnessOptions& opt);
VerificationReport verify_constrained_moe(const ChannelSpec& spec, int n_modes,
                                          const HarnessOptions& opt);
VerificationReport verify_maj(const ChannelSpec& spec, int n_modes,
                              const HarnessOptions& opt);
VerificationReport verify_maj2(const ChannelSpec& spec, int n_modes,
                               const HarnessOptions& opt);
VerificationReport verify_majT(double lambda, const HarnessOptions& opt);

VerificationReport verify_one_to_p(const ChannelSpec& spec, double p_exp,
                                   const HarnessOptions& opt,
                                   const OptimizerConfig& ocfg);
VerificationReport norm_pq_estimate(const ChannelSpec& spec, double p_exp,
                                    double q_exp, const HarnessOptions& opt,
                                    const OptimizerConfig& ocfg);
VerificationReport verify_infty_bound(const ChannelSpec& spec, double p_exp,
                                      const HarnessOptions& opt,
                                      const OptimizerConfig& ocfg);
/// Duality checks: the trace pairing of a channel with its dual, the
/// amplifier-dual closed form, and agreement of the searched 2->2 norms of a
/// channel and its dual with the exact superoperator value.
VerificationReport verify_duality(const ChannelSpec& spec,
                                  const HarnessOptions& opt,
                                  const OptimizerConfig& ocfg);

VerificationReport epni_probe(double param, const HarnessOptions& opt);
VerificationReport qepi_verify(double param, const HarnessOptions& opt);
VerificationReport qcepi_verify(double param, const HarnessOptions& opt);

VerificationReport young_c1_estimate(double p_exp, double q_exp, double r_exp,
                                     double lambda, const HarnessOptions& opt,
                                     const OptimizerConfig& ocfg);
/// Renyi-entropy lower bound implied by the Young constant, on random pairs.
VerificationReport young_src_check(double p_exp, double q_exp, double r_exp,
                                   double lambda, const HarnessOptions& opt);
/// Multiplicative p->q norm upper bound implied by the Young constant,
/// against the thermal-family norm value.
VerificationReport young_pqbound_check(double p_exp, double q_exp,
                                       double lambda, double env_energy,
                                       const HarnessOptions& opt);
/// Entropy lower bound from the r->1 limit of the Young constant against the
/// photon-number bound on thermal pairs.
VerificationReport young_epni_consistency(double lambda, double sa, double sb,
                                          const HarnessOptions& opt);

VerificationReport iso_derivative_check(const HarnessOptions& opt,
                                        double h = 1e-4);
VerificationReport log_sobolev_check(double p_exp, const HarnessOptions& opt,
                                     double h = 1e-4);
VerificationReport fisher_de_bruijn_check(const HarnessOptions& opt,
                                          double h = 1e-3,
                                          int quad_order = 20);
VerificationReport stam_check(double lambda, const HarnessOptions& opt,
                              double h = 1e-3);
VerificationReport entropy_scaling_probe(const std::vector<double>& t_list,
                                         const HarnessOptions& opt);
VerificationReport pq_to_entropy_bridge(double kappa, double q_exp,
                                        const HarnessOptions& opt);

VerificationReport thinning_entropy_verify(double lambda,
                                           const HarnessOptions& opt);
VerificationReport thinning_norm_verify(double p_exp, double q_exp,
                                        double lambda,
                                        const HarnessOptions& opt,
                                        const OptimizerConfig& ocfg);

// ---- instance-level helpers (used by the sweeps and directly testable) ---------

/// exp(S(out)) - lambda exp(S_A) - |1-lambda| exp(S_B) for a product input.
double qepi_instance_gap(const DensityMatrix& rho_a, const DensityMatrix& rho_b,
                         double param, double* leakage = nullptr,
                         const GlobalConfig& cfg = {});

/// S(out) - g(...) photon-number bound for a product input.
double epni_instance_gap(const DensityMatrix& rho_a, const DensityMatrix& rho_b,
                         double param, double* leakage = nullptr,
                         const GlobalConfig& cfg = {});

/// Conditional version on a zero-CMI tripartite state (modes A, B, M).
double qcepi_instance_gap(const DensityMatrix& rho_abm, double param,
                          double* leakage = nullptr,
                          std::pair<int, int> guards = {-1, -1},
                          const GlobalConfig& cfg = {});

/// Random zero-CMI state with the given block layout.
DensityMatrix random_zero_cmi_state(int da, int db, int blocks, int mem_a,
                                    int mem_b, Rng& rng,
                                    const GlobalConfig& cfg = {});

/// Thermal-family value of the Young ratio at (ea, eb).
double young_thermal_ratio(double ea, double eb, double p_exp, double q_exp,
                           double r_exp, double lambda);

/// Thermal-family supremum of the Young ratio with regime classification.
struct YoungFamilyResult {
  double value = 0.0;
  double ea = 0.0, eb = 0.0;
  std::string regime;
};
YoungFamilyResult young_family_sup(double p_exp, double q_exp, double r_exp,
                                   double lambda, const OptimizerConfig& ocfg);

/// Thermal-family value of the channel norm ratio at energy e.
double pq_thermal_ratio(const ChannelSpec& spec, double e, double p_exp,
                        double q_exp);

}  // namespace gaussopt
