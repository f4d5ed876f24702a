#include "gaussopt/spectra.hpp"

#include <Eigen/SVD>
#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <set>

namespace gaussopt {

double Spectrum::sum() const {
  return std::accumulate(values.begin(), values.end(), 0.0);
}

ProbVector::ProbVector(std::vector<double> w, const GlobalConfig& cfg)
    : weights(std::move(w)) {
  if (weights.empty()) throw DomainError("ProbVector: empty weight list");
  for (double& x : weights) {
    if (x < -cfg.tol_psd)
      throw DomainError("ProbVector: negative weight beyond tolerance");
    if (x < 0) x = 0.0;
  }
  if (mass() > 1.0 + cfg.tol_trace)
    throw DomainError("ProbVector: total mass exceeds 1 beyond tolerance");
}

double ProbVector::mass() const {
  return std::accumulate(weights.begin(), weights.end(), 0.0);
}

double ProbVector::mean() const {
  double m = 0.0;
  for (int n = 0; n < size(); ++n) m += n * weights[n];
  return m;
}

ProbVector geometric_dist(double energy, int len) {
  if (energy < 0) throw DomainError("geometric_dist: energy must be >= 0");
  return ProbVector(thermal_weights(energy, len));
}

Spectrum spectrum(const DensityMatrix& rho, const GlobalConfig& cfg) {
  Eigen::SelfAdjointEigenSolver<Mat> es(0.5 * (rho.mat() + rho.mat().adjoint()),
                                        Eigen::EigenvaluesOnly);
  if (es.info() != Eigen::Success)
    throw NumericError("spectrum: eigensolver failed");
  std::vector<double> vals(es.eigenvalues().data(),
                           es.eigenvalues().data() + es.eigenvalues().size());
  std::sort(vals.begin(), vals.end(), std::greater<double>());
  double total = 0.0;
  for (double& v : vals) {
    if (v < -cfg.tol_psd)
      throw DomainError("spectrum: eigenvalue below -tol_psd, invalid state");
    if (v < 0) v = 0.0;
    total += v;
  }
  if (total <= 0) throw NumericError("spectrum: vanishing total mass");
  for (double& v : vals) v /= total;
  return Spectrum{std::move(vals)};
}

namespace {

double power_sum_norm(const std::vector<double>& s, double p) {
  // (sum s_k^p)^(1/p), evaluated relative to the largest value so that large
  // p does not underflow.
  double top = 0.0;
  for (double v : s) top = std::max(top, v);
  if (top == 0.0) return 0.0;
  double acc = 0.0;
  for (double v : s)
    if (v > 0) acc += std::pow(v / top, p);
  return top * std::pow(acc, 1.0 / p);
}

}  // namespace

double schatten_norm(const Mat& x, double p) {
  if (x.rows() != x.cols()) throw ShapeError("schatten_norm: square operator required");
  if (p < 1.0) throw DomainError("schatten_norm: p must be >= 1");
  std::vector<double> s;
  if (hermiticity_defect(x) < 1e-11 * std::max(1.0, x.cwiseAbs().maxCoeff())) {
    // Hermitian: singular values are the absolute eigenvalues, and the
    // symmetric solver is far cheaper than an SVD.
    Eigen::SelfAdjointEigenSolver<Mat> es(0.5 * (x + x.adjoint()),
                                          Eigen::EigenvaluesOnly);
    if (es.info() != Eigen::Success)
      throw NumericError("schatten_norm: eigensolver failed");
    s.assign(es.eigenvalues().data(),
             es.eigenvalues().data() + es.eigenvalues().size());
    for (double& v : s) v = std::abs(v);
  } else if (x.rows() >= 32) {
    Eigen::BDCSVD<Mat> svd(x);
    s.assign(svd.singularValues().data(),
             svd.singularValues().data() + svd.singularValues().size());
  } else {
    Eigen::JacobiSVD<Mat> svd(x);
    s.assign(svd.singularValues().data(),
             svd.singularValues().data() + svd.singularValues().size());
  }
  if (std::isinf(p)) return s.empty() ? 0.0 : *std::max_element(s.begin(), s.end());
  return power_sum_norm(s, p);
}

double schatten_norm(const LinearOperator& x, double p) {
  return schatten_norm(x.mat, p);
}

double schatten_norm(const DensityMatrix& rho, double p, const GlobalConfig& cfg) {
  if (p < 1.0) throw DomainError("schatten_norm: p must be >= 1");
  // States are PSD, so singular values coincide with the clamped spectrum.
  Spectrum s = spectrum(rho, cfg);
  if (std::isinf(p)) return s.values.front();
  return power_sum_norm(s.values, p);
}

double von_neumann_entropy(const Spectrum& s) {
  double h = 0.0;
  for (double v : s.values)
    if (v > 0) h -= v * std::log(v);
  return h;
}

double von_neumann_entropy(const DensityMatrix& rho, const GlobalConfig& cfg) {
  return von_neumann_entropy(spectrum(rho, cfg));
}

double renyi_entropy(const Spectrum& s, double p) {
  if (p <= 1.0) throw DomainError("renyi_entropy: p must be > 1");
  double norm = power_sum_norm(s.values, p);
  return p / (1.0 - p) * std::log(norm);
}

double renyi_entropy(const DensityMatrix& rho, double p, const GlobalConfig& cfg) {
  return renyi_entropy(spectrum(rho, cfg), p);
}

double shannon_entropy(const std::vector<double>& w) {
  double h = 0.0;
  for (double v : w)
    if (v > 0) h -= v * std::log(v);
  return h;
}

double shannon_entropy(const ProbVector& p) { return shannon_entropy(p.weights); }

double lp_norm(const ProbVector& p, double r) {
  if (r < 1.0) throw DomainError("lp_norm: r must be >= 1");
  if (std::isinf(r))
    return *std::max_element(p.weights.begin(), p.weights.end());
  return power_sum_norm(p.weights, r);
}

double g_func(double energy) {
  if (energy < 0) throw DomainError("g_func: energy must be >= 0");
  if (energy == 0) return 0.0;
  return (energy + 1.0) * std::log(energy + 1.0) - energy * std::log(energy);
}

double g_deriv(double energy) {
  if (energy <= 0) throw DomainError("g_deriv: energy must be > 0");
  return std::log(energy + 1.0) - std::log(energy);
}

double g_inv(double s) {
  if (s < 0) throw DomainError("g_inv: entropy must be >= 0");
  if (s == 0) return 0.0;
  // g(E) >= ln(E+1), so E = e^s brackets the root from above.
  double lo = 0.0, hi = std::exp(s);
  for (int it = 0; it < 200; ++it) {
    double mid = 0.5 * (lo + hi);
    if (g_func(mid) < s)
      lo = mid;
    else
      hi = mid;
    if (hi - lo < 1e-13 * std::max(1.0, hi)) break;
  }
  return 0.5 * (lo + hi);
}

namespace {

std::vector<int> all_modes(const DensityMatrix& rho) {
  std::vector<int> m(rho.space().modes());
  std::iota(m.begin(), m.end(), 0);
  return m;
}

void check_partition(const DensityMatrix& rho,
                     const std::vector<const std::vector<int>*>& parts,
                     bool must_cover) {
  std::set<int> seen;
  int total = 0;
  for (const auto* p : parts)
    for (int k : *p) {
      if (k < 0 || k >= rho.space().modes())
        throw DomainError("partition: mode index out of range");
      if (!seen.insert(k).second)
        throw DomainError("partition: mode appears in two blocks");
      ++total;
    }
  if (must_cover && total != rho.space().modes())
    throw DomainError("partition: blocks must cover all modes");
}

double subset_entropy(const DensityMatrix& rho, std::vector<int> keep,
                      const GlobalConfig& cfg) {
  if (keep.empty()) return 0.0;
  if (static_cast<int>(keep.size()) == rho.space().modes())
    return von_neumann_entropy(rho, cfg);
  return von_neumann_entropy(partial_trace(rho, keep, cfg), cfg);
}

std::vector<int> set_union(const std::vector<int>& a, const std::vector<int>& b) {
  std::vector<int> u = a;
  u.insert(u.end(), b.begin(), b.end());
  std::sort(u.begin(), u.end());
  return u;
}

}  // namespace

double conditional_entropy(const DensityMatrix& rho_am,
                           const std::vector<int>& modes_m,
                           const GlobalConfig& cfg) {
  check_partition(rho_am, {&modes_m}, false);
  if (static_cast<int>(modes_m.size()) == rho_am.space().modes())
    throw DomainError("conditional_entropy: conditioned system is empty");
  double s_am = von_neumann_entropy(rho_am, cfg);
  double s_m = subset_entropy(rho_am, modes_m, cfg);
  return s_am - s_m;
}

double mutual_information(const DensityMatrix& rho_ab,
                          const std::vector<int>& modes_a,
                          const std::vector<int>& modes_b,
                          const GlobalConfig& cfg) {
  check_partition(rho_ab, {&modes_a, &modes_b}, true);
  if (modes_a.empty() || modes_b.empty())
    throw DomainError("mutual_information: empty block");
  return subset_entropy(rho_ab, modes_a, cfg) +
         subset_entropy(rho_ab, modes_b, cfg) - von_neumann_entropy(rho_ab, cfg);
}

double cond_mutual_information(const DensityMatrix& rho_abm,
                               const std::vector<int>& modes_a,
                               const std::vector<int>& modes_b,
                               const std::vector<int>& modes_m,
                               const GlobalConfig& cfg) {
  check_partition(rho_abm, {&modes_a, &modes_b, &modes_m}, true);
  if (modes_a.empty() || modes_b.empty())
    throw DomainError("cond_mutual_information: empty A or B block");
  double s_am = subset_entropy(rho_abm, set_union(modes_a, modes_m), cfg);
  double s_bm = subset_entropy(rho_abm, set_union(modes_b, modes_m), cfg);
  double s_abm = von_neumann_entropy(rho_abm, cfg);
  double s_m = subset_entropy(rho_abm, modes_m, cfg);
  return s_am + s_bm - s_abm - s_m;
}

}  // namespace gaussopt
