#include "gaussopt/majorization.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace gaussopt {

MajorizationVerdict majorizes(const std::vector<double>& a,
                              const std::vector<double>& b, double tol) {
  std::vector<double> x = a, y = b;
  std::sort(x.begin(), x.end(), std::greater<double>());
  std::sort(y.begin(), y.end(), std::greater<double>());
  std::size_t len = std::max(x.size(), y.size());
  x.resize(len, 0.0);
  y.resize(len, 0.0);

  double mass_x = std::accumulate(x.begin(), x.end(), 0.0);
  double mass_y = std::accumulate(y.begin(), y.end(), 0.0);
  if (std::abs(mass_x - mass_y) > std::max(tol, 1e-12))
    throw DomainError("majorizes: total masses differ beyond tolerance");

  MajorizationVerdict v;
  double sx = 0.0, sy = 0.0;
  double worst = std::numeric_limits<double>::infinity();
  int worst_idx = 0;
  for (std::size_t k = 0; k < len; ++k) {
    sx += x[k];
    sy += y[k];
    double gap = sx - sy;
    if (gap < worst) {
      worst = gap;
      worst_idx = static_cast<int>(k);
    }
  }
  v.worst_partial_sum_gap = worst;
  v.index_of_worst = worst_idx;
  v.holds = worst >= -tol;
  return v;
}

MajorizationVerdict majorizes(const Spectrum& a, const Spectrum& b, double tol) {
  return majorizes(a.values, b.values, tol);
}

MajorizationVerdict majorizes(const ProbVector& a, const ProbVector& b,
                              double tol) {
  return majorizes(a.weights, b.weights, tol);
}

DensityMatrix passive_rearrangement(const DensityMatrix& rho,
                                    const GlobalConfig& cfg) {
  Spectrum s = spectrum(rho, cfg);
  const int dim = rho.dim();

  // Basis order of ascending energy: total photon number, ties by flat index.
  ModeIndexer idx(rho.space().mode_dims);
  std::vector<int> order(dim);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](int i, int j) {
    auto di = idx.unflatten(i);
    auto dj = idx.unflatten(j);
    int ni = std::accumulate(di.begin(), di.end(), 0);
    int nj = std::accumulate(dj.begin(), dj.end(), 0);
    return ni < nj;
  });

  Mat m = Mat::Zero(dim, dim);
  for (int k = 0; k < dim; ++k) m(order[k], order[k]) = s.values[k];
  return DensityMatrix(rho.space(), std::move(m), cfg);
}

ProbVector decreasing_rearrangement(const ProbVector& p) {
  std::vector<double> w = p.weights;
  std::stable_sort(w.begin(), w.end(), std::greater<double>());
  ProbVector out;
  out.weights = std::move(w);
  return out;
}

}  // namespace gaussopt
