#pragma once

#include <stdexcept>
#include <string>

namespace gaussopt {

/// Global numerical tolerances and the guard-cutoff multiplier used by every
/// photon-number-raising operation. Defaults sit an order of magnitude below
/// the loosest tolerance any check asserts.
struct GlobalConfig {
  double tol_herm = 1e-10;
  double tol_psd = 1e-10;
  double tol_trace = 1e-10;
  double leakage_max = 1e-6;
  int guard_factor = 2;

  void validate() const {
    if (tol_herm <= 0 || tol_psd <= 0 || tol_trace <= 0)
      throw std::invalid_argument("GlobalConfig: tolerances must be positive");
    if (leakage_max <= 0 || leakage_max >= 1)
      throw std::invalid_argument("GlobalConfig: leakage_max must be in (0,1)");
    if (guard_factor < 1)
      throw std::invalid_argument("GlobalConfig: guard_factor must be >= 1");
  }
};

// Error taxonomy. Everything derives from std::runtime_error so callers can
// catch coarsely; the CLI maps these onto exit code 2.
struct DomainError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct ShapeError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
/// Raised when a truncation-induced deficit (trace mass, unitarity defect)
/// exceeds GlobalConfig::leakage_max. The message names the cutoff that
/// would have sufficed whenever that is computable.
struct TruncationError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct NumericError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct ConstructionError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace gaussopt
