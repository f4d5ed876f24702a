#pragma once

#include <Eigen/Dense>
#include <complex>
#include <vector>

#include "gaussopt/config.hpp"

namespace gaussopt {

using Mat = Eigen::MatrixXcd;
using Vec = Eigen::VectorXcd;
using cxd = std::complex<double>;

/// A multi-mode Fock space truncated mode-by-mode: mode k keeps photon
/// numbers 0..mode_dims[k]-1. Basis order is row-major in the mode list.
struct FockSpace {
  std::vector<int> mode_dims;

  FockSpace() = default;
  explicit FockSpace(std::vector<int> dims);
  static FockSpace single(int dim) { return FockSpace({dim}); }

  int modes() const { return static_cast<int>(mode_dims.size()); }
  int total_dim() const;
  bool operator==(const FockSpace&) const = default;
};

/// Joint space with concatenated mode lists.
FockSpace tensor(const FockSpace& a, const FockSpace& b);

/// General operator between two truncated spaces; rows index space_out.
struct LinearOperator {
  FockSpace space_in;
  FockSpace space_out;
  Mat mat;

  LinearOperator() = default;
  LinearOperator(FockSpace in, FockSpace out, Mat m);
  /// Square operator on one space.
  LinearOperator(FockSpace space, Mat m);

  const FockSpace& space() const { return space_in; }
  LinearOperator adjoint() const;
};

/// Positive unit-trace operator on a truncated Fock space. Construction
/// checks Hermiticity, trace, and the diagonal part of positivity; the full
/// spectral positivity check runs wherever eigenvalues are computed anyway
/// (see spectrum()).
class DensityMatrix {
 public:
  DensityMatrix() = default;
  DensityMatrix(FockSpace space, Mat m, const GlobalConfig& cfg = {});

  const FockSpace& space() const { return space_; }
  const Mat& mat() const { return mat_; }
  int dim() const { return static_cast<int>(mat_.rows()); }

  /// Full eigenvalue positivity check; throws DomainError on violation.
  void validate_psd(const GlobalConfig& cfg = {}) const;

 private:
  FockSpace space_;
  Mat mat_;
};

// ---- mode-index bookkeeping -------------------------------------------------

/// Row-major mixed-radix index arithmetic over a mode-dimension list.
struct ModeIndexer {
  std::vector<int> dims;
  std::vector<int> strides;

  explicit ModeIndexer(const std::vector<int>& d);
  int flatten(const std::vector<int>& digits) const;
  std::vector<int> unflatten(int idx) const;
};

/// Zero-pad each mode of a state/operator matrix into a larger space.
Mat embed_matrix(const Mat& m, const FockSpace& from, const FockSpace& to);
/// Keep the low-photon block of each mode; drops everything else.
Mat project_matrix(const Mat& m, const FockSpace& from, const FockSpace& to);

// ---- constructors -----------------------------------------------------------

/// Annihilation operator on a single mode: A[n-1,n] = sqrt(n).
LinearOperator ladder(const FockSpace& space);
/// Photon number operator diag(0,1,...,D-1).
LinearOperator number_operator(const FockSpace& space);
LinearOperator identity_operator(const FockSpace& space);

/// Rank-one projector |n><n|.
DensityMatrix fock_state(int n, const FockSpace& space,
                         const GlobalConfig& cfg = {});

/// Vacuum on an arbitrary space.
DensityMatrix vacuum_state(const FockSpace& space, const GlobalConfig& cfg = {});

/// Fock-diagonal state with geometric weights of mean photon number E,
/// renormalized to unit trace. Fails when the truncated tail exceeds
/// cfg.leakage_max; `tail_out`, when given, receives the pre-renormalization
/// tail mass.
DensityMatrix thermal_state(double energy, const FockSpace& space,
                            const GlobalConfig& cfg = {},
                            double* tail_out = nullptr);

/// Unit-trace geometric weights evaluated on 0..dim-1 before renormalization.
std::vector<double> thermal_weights(double energy, int dim);

/// exp(z a^dag - conj(z) a), built at guard_factor * D and projected back to
/// D. The unitarity defect of the retained block is written to `defect_out`
/// when given; the call throws TruncationError when it exceeds leakage_max.
LinearOperator displacement(cxd z, const FockSpace& space,
                            const GlobalConfig& cfg = {},
                            double* defect_out = nullptr);

// ---- algebra ----------------------------------------------------------------

LinearOperator tensor(const LinearOperator& a, const LinearOperator& b);
DensityMatrix tensor(const DensityMatrix& a, const DensityMatrix& b,
                     const GlobalConfig& cfg = {});

/// Reduced state on the kept modes (original relative order preserved).
DensityMatrix partial_trace(const DensityMatrix& rho,
                            const std::vector<int>& keep,
                            const GlobalConfig& cfg = {});
/// Same contraction for raw matrices.
Mat partial_trace_matrix(const Mat& m, const FockSpace& space,
                         const std::vector<int>& keep);

/// Tr[obs rho] for Hermitian obs; throws DomainError otherwise.
double expectation(const LinearOperator& obs, const DensityMatrix& rho,
                   const GlobalConfig& cfg = {});

/// Mean photon number summed over all modes.
double mean_photon_number(const DensityMatrix& rho);

double hermiticity_defect(const Mat& m);
cxd trace_product(const Mat& a, const Mat& b);  // Tr[a b]

}  // namespace gaussopt
