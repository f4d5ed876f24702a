#include "gaussopt/fock.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "gaussopt/expm.hpp"

namespace gaussopt {

FockSpace::FockSpace(std::vector<int> dims) : mode_dims(std::move(dims)) {
  if (mode_dims.empty())
    throw ShapeError("FockSpace: at least one mode required");
  for (int d : mode_dims)
    if (d < 1) throw ShapeError("FockSpace: every mode_dim must be >= 1");
}

int FockSpace::total_dim() const {
  long long total = 1;
  for (int d : mode_dims) total *= d;
  return static_cast<int>(total);
}

FockSpace tensor(const FockSpace& a, const FockSpace& b) {
  std::vector<int> dims = a.mode_dims;
  dims.insert(dims.end(), b.mode_dims.begin(), b.mode_dims.end());
  return FockSpace(dims);
}

LinearOperator::LinearOperator(FockSpace in, FockSpace out, Mat m)
    : space_in(std::move(in)), space_out(std::move(out)), mat(std::move(m)) {
  if (mat.cols() != space_in.total_dim() || mat.rows() != space_out.total_dim())
    throw ShapeError("LinearOperator: matrix shape inconsistent with spaces");
}

LinearOperator::LinearOperator(FockSpace space, Mat m)
    : LinearOperator(space, space, std::move(m)) {}

LinearOperator LinearOperator::adjoint() const {
  return LinearOperator(space_out, space_in, mat.adjoint());
}

double hermiticity_defect(const Mat& m) {
  return (m - m.adjoint()).cwiseAbs().maxCoeff();
}

cxd trace_product(const Mat& a, const Mat& b) {
  return (a.transpose().cwiseProduct(b)).sum();
}

DensityMatrix::DensityMatrix(FockSpace space, Mat m, const GlobalConfig& cfg)
    : space_(std::move(space)), mat_(std::move(m)) {
  if (mat_.rows() != mat_.cols() || mat_.rows() != space_.total_dim())
    throw ShapeError("DensityMatrix: matrix shape inconsistent with space");
  if (hermiticity_defect(mat_) > cfg.tol_herm)
    throw DomainError("DensityMatrix: Hermiticity defect above tol_herm");
  double tr = mat_.trace().real();
  if (std::abs(tr - 1.0) > cfg.tol_trace)
    throw DomainError("DensityMatrix: trace deviates from 1 beyond tol_trace");
  for (int i = 0; i < mat_.rows(); ++i)
    if (mat_(i, i).real() < -cfg.tol_psd)
      throw DomainError("DensityMatrix: negative diagonal entry beyond tol_psd");
}

void DensityMatrix::validate_psd(const GlobalConfig& cfg) const {
  Eigen::SelfAdjointEigenSolver<Mat> es(0.5 * (mat_ + mat_.adjoint()),
                                        Eigen::EigenvaluesOnly);
  if (es.info() != Eigen::Success)
    throw NumericError("DensityMatrix: eigensolver failed");
  if (es.eigenvalues().minCoeff() < -cfg.tol_psd)
    throw DomainError("DensityMatrix: eigenvalue below -tol_psd");
}

ModeIndexer::ModeIndexer(const std::vector<int>& d) : dims(d) {
  strides.assign(dims.size(), 1);
  for (int k = static_cast<int>(dims.size()) - 2; k >= 0; --k)
    strides[k] = strides[k + 1] * dims[k + 1];
}

int ModeIndexer::flatten(const std::vector<int>& digits) const {
  int idx = 0;
  for (std::size_t k = 0; k < dims.size(); ++k) idx += digits[k] * strides[k];
  return idx;
}

std::vector<int> ModeIndexer::unflatten(int idx) const {
  std::vector<int> digits(dims.size());
  for (std::size_t k = 0; k < dims.size(); ++k) {
    digits[k] = idx / strides[k];
    idx %= strides[k];
  }
  return digits;
}

namespace {

// Per-row map from indices of `from` into indices of `to`; -1 marks a basis
// state that does not survive projection.
std::vector<int> index_map(const FockSpace& from, const FockSpace& to) {
  if (from.modes() != to.modes())
    throw ShapeError("index_map: mode count mismatch");
  ModeIndexer src(from.mode_dims), dst(to.mode_dims);
  std::vector<int> map(from.total_dim());
  for (int i = 0; i < from.total_dim(); ++i) {
    auto digits = src.unflatten(i);
    bool ok = true;
    for (int k = 0; k < to.modes(); ++k)
      if (digits[k] >= to.mode_dims[k]) { ok = false; break; }
    map[i] = ok ? dst.flatten(digits) : -1;
  }
  return map;
}

}  // namespace

Mat embed_matrix(const Mat& m, const FockSpace& from, const FockSpace& to) {
  for (int k = 0; k < from.modes(); ++k)
    if (to.mode_dims[k] < from.mode_dims[k])
      throw ShapeError("embed_matrix: target mode smaller than source");
  auto map = index_map(from, to);
  Mat out = Mat::Zero(to.total_dim(), to.total_dim());
  for (int i = 0; i < m.rows(); ++i)
    for (int j = 0; j < m.cols(); ++j) out(map[i], map[j]) = m(i, j);
  return out;
}

Mat project_matrix(const Mat& m, const FockSpace& from, const FockSpace& to) {
  for (int k = 0; k < from.modes(); ++k)
    if (to.mode_dims[k] > from.mode_dims[k])
      throw ShapeError("project_matrix: target mode larger than source");
  auto map = index_map(to, from);  // target index -> source index
  Mat out(to.total_dim(), to.total_dim());
  for (int i = 0; i < out.rows(); ++i)
    for (int j = 0; j < out.cols(); ++j) out(i, j) = m(map[i], map[j]);
  return out;
}

LinearOperator ladder(const FockSpace& space) {
  if (space.modes() != 1) throw ShapeError("ladder: single-mode space required");
  const int d = space.mode_dims[0];
  Mat a = Mat::Zero(d, d);
  for (int n = 1; n < d; ++n) a(n - 1, n) = std::sqrt(double(n));
  return LinearOperator(space, std::move(a));
}

LinearOperator number_operator(const FockSpace& space) {
  if (space.modes() != 1)
    throw ShapeError("number_operator: single-mode space required");
  const int d = space.mode_dims[0];
  Mat n = Mat::Zero(d, d);
  for (int k = 0; k < d; ++k) n(k, k) = double(k);
  return LinearOperator(space, std::move(n));
}

LinearOperator identity_operator(const FockSpace& space) {
  int d = space.total_dim();
  return LinearOperator(space, Mat::Identity(d, d));
}

DensityMatrix fock_state(int n, const FockSpace& space, const GlobalConfig& cfg) {
  if (space.modes() != 1)
    throw ShapeError("fock_state: single-mode space required");
  const int d = space.mode_dims[0];
  if (n < 0 || n >= d)
    throw DomainError("fock_state: photon number out of range for cutoff");
  Mat m = Mat::Zero(d, d);
  m(n, n) = 1.0;
  return DensityMatrix(space, std::move(m), cfg);
}

DensityMatrix vacuum_state(const FockSpace& space, const GlobalConfig& cfg) {
  int d = space.total_dim();
  Mat m = Mat::Zero(d, d);
  m(0, 0) = 1.0;
  return DensityMatrix(space, std::move(m), cfg);
}

std::vector<double> thermal_weights(double energy, int dim) {
  std::vector<double> w(dim, 0.0);
  if (energy == 0.0) {
    w[0] = 1.0;
    return w;
  }
  const double ratio = energy / (energy + 1.0);
  double term = 1.0 / (energy + 1.0);
  for (int n = 0; n < dim; ++n) {
    w[n] = term;
    term *= ratio;
  }
  return w;
}

DensityMatrix thermal_state(double energy, const FockSpace& space,
                            const GlobalConfig& cfg, double* tail_out) {
  if (space.modes() != 1)
    throw ShapeError("thermal_state: single-mode space required");
  if (energy < 0) throw DomainError("thermal_state: energy must be >= 0");
  const int d = space.mode_dims[0];
  auto w = thermal_weights(energy, d);
  double mass = std::accumulate(w.begin(), w.end(), 0.0);
  double tail = 1.0 - mass;
  if (tail_out) *tail_out = tail;
  if (tail > cfg.leakage_max) {
    // tail = (E/(E+1))^D, so the required cutoff is directly solvable
    int needed = static_cast<int>(std::ceil(
        std::log(cfg.leakage_max) / std::log(energy / (energy + 1.0))));
    throw TruncationError("thermal_state: tail mass " + std::to_string(tail) +
                          " exceeds leakage_max; need mode_dim >= " +
                          std::to_string(needed));
  }
  Mat m = Mat::Zero(d, d);
  for (int n = 0; n < d; ++n) m(n, n) = w[n] / mass;
  return DensityMatrix(space, std::move(m), cfg);
}

namespace {

Mat displacement_at(cxd z, int g) {
  Mat gen = Mat::Zero(g, g);
  for (int n = 1; n < g; ++n) {
    gen(n, n - 1) = z * std::sqrt(double(n));              // z a^dag
    gen(n - 1, n) = -std::conj(z) * std::sqrt(double(n));  // -conj(z) a
  }
  return matrix_exp(gen);
}

}  // namespace

LinearOperator displacement(cxd z, const FockSpace& space,
                            const GlobalConfig& cfg, double* defect_out) {
  if (space.modes() != 1)
    throw ShapeError("displacement: single-mode space required");
  const int d = space.mode_dims[0];
  const int g = std::max(d + 1, cfg.guard_factor * d);
  Mat u = displacement_at(z, g);
  // Truncation diagnostic: how far the retained entries move when the guard
  // grows by another block. A projected displacement is never unitary at the
  // very top of the block (high Fock states spread under displacement), so
  // entry convergence, not block unitarity, is the meaningful defect.
  Mat wide = displacement_at(z, g + d);
  double defect =
      (u.topLeftCorner(d, d) - wide.topLeftCorner(d, d)).cwiseAbs().maxCoeff();
  if (defect_out) *defect_out = defect;
  if (defect > cfg.leakage_max)
    throw TruncationError(
        "displacement: truncation defect " + std::to_string(defect) +
        " exceeds leakage_max; raise guard_factor or cutoff");
  return LinearOperator(space, u.topLeftCorner(d, d));
}

LinearOperator tensor(const LinearOperator& a, const LinearOperator& b) {
  FockSpace in = tensor(a.space_in, b.space_in);
  FockSpace out = tensor(a.space_out, b.space_out);
  Mat m(out.total_dim(), in.total_dim());
  for (int i = 0; i < a.mat.rows(); ++i)
    for (int j = 0; j < a.mat.cols(); ++j)
      m.block(i * b.mat.rows(), j * b.mat.cols(), b.mat.rows(), b.mat.cols()) =
          a.mat(i, j) * b.mat;
  return LinearOperator(std::move(in), std::move(out), std::move(m));
}

DensityMatrix tensor(const DensityMatrix& a, const DensityMatrix& b,
                     const GlobalConfig& cfg) {
  FockSpace space = tensor(a.space(), b.space());
  Mat m(space.total_dim(), space.total_dim());
  for (int i = 0; i < a.dim(); ++i)
    for (int j = 0; j < a.dim(); ++j)
      m.block(i * b.dim(), j * b.dim(), b.dim(), b.dim()) = a.mat()(i, j) * b.mat();
  return DensityMatrix(std::move(space), std::move(m), cfg);
}

Mat partial_trace_matrix(const Mat& m, const FockSpace& space,
                         const std::vector<int>& keep) {
  if (keep.empty()) throw DomainError("partial_trace: keep set must be nonempty");
  std::vector<bool> kept(space.modes(), false);
  for (int k : keep) {
    if (k < 0 || k >= space.modes())
      throw DomainError("partial_trace: mode index out of range");
    if (kept[k]) throw DomainError("partial_trace: duplicate mode index");
    kept[k] = true;
  }

  std::vector<int> keep_sorted, traced;
  std::vector<int> keep_dims, traced_dims;
  for (int k = 0; k < space.modes(); ++k) {
    if (kept[k]) {
      keep_sorted.push_back(k);
      keep_dims.push_back(space.mode_dims[k]);
    } else {
      traced.push_back(k);
      traced_dims.push_back(space.mode_dims[k]);
    }
  }

  ModeIndexer full(space.mode_dims);
  ModeIndexer kp(keep_dims);
  int traced_total = 1;
  for (int d : traced_dims) traced_total *= d;
  ModeIndexer tr(traced_dims.empty() ? std::vector<int>{1} : traced_dims);

  int keep_total = 1;
  for (int d : keep_dims) keep_total *= d;
  Mat out = Mat::Zero(keep_total, keep_total);

  std::vector<int> digits(space.modes(), 0);
  for (int r = 0; r < keep_total; ++r) {
    auto rk = kp.unflatten(r);
    for (int c = 0; c < keep_total; ++c) {
      auto ck = kp.unflatten(c);
      cxd sum = 0.0;
      for (int t = 0; t < traced_total; ++t) {
        auto td = traced_dims.empty() ? std::vector<int>{} : tr.unflatten(t);
        for (std::size_t k = 0; k < keep_sorted.size(); ++k)
          digits[keep_sorted[k]] = rk[k];
        for (std::size_t k = 0; k < traced.size(); ++k)
          digits[traced[k]] = td[k];
        int row = full.flatten(digits);
        for (std::size_t k = 0; k < keep_sorted.size(); ++k)
          digits[keep_sorted[k]] = ck[k];
        int col = full.flatten(digits);
        sum += m(row, col);
      }
      out(r, c) = sum;
    }
  }
  return out;
}

DensityMatrix partial_trace(const DensityMatrix& rho,
                            const std::vector<int>& keep,
                            const GlobalConfig& cfg) {
  Mat out = partial_trace_matrix(rho.mat(), rho.space(), keep);
  std::vector<int> dims;
  std::vector<bool> kept(rho.space().modes(), false);
  for (int k : keep) kept[k] = true;
  for (int k = 0; k < rho.space().modes(); ++k)
    if (kept[k]) dims.push_back(rho.space().mode_dims[k]);
  return DensityMatrix(FockSpace(dims), std::move(out), cfg);
}

double expectation(const LinearOperator& obs, const DensityMatrix& rho,
                   const GlobalConfig& cfg) {
  if (obs.mat.rows() != rho.dim())
    throw ShapeError("expectation: dimension mismatch");
  if (hermiticity_defect(obs.mat) > cfg.tol_herm)
    throw DomainError("expectation: observable is not Hermitian");
  cxd val = trace_product(obs.mat, rho.mat());
  if (std::abs(val.imag()) > cfg.tol_herm * std::max(1.0, std::abs(val.real())))
    throw NumericError("expectation: imaginary residue above tolerance");
  return val.real();
}

double mean_photon_number(const DensityMatrix& rho) {
  ModeIndexer idx(rho.space().mode_dims);
  double total = 0.0;
  for (int i = 0; i < rho.dim(); ++i) {
    auto digits = idx.unflatten(i);
    double n = std::accumulate(digits.begin(), digits.end(), 0.0);
    total += n * rho.mat()(i, i).real();
  }
  return total;
}

}  // namespace gaussopt
