#include "gaussopt/optimize.hpp"

#include <algorithm>
#include <cmath>

namespace gaussopt {

std::pair<double, double> golden_section_max(
    const std::function<double(double)>& f, double lo, double hi, int iters) {
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double a = lo, b = hi;
  double c = b - inv_phi * (b - a);
  double d = a + inv_phi * (b - a);
  double fc = f(c), fd = f(d);
  for (int i = 0; i < iters; ++i) {
    if (fc > fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - inv_phi * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + inv_phi * (b - a);
      fd = f(d);
    }
  }
  double x = 0.5 * (a + b);
  return {x, f(x)};
}

std::pair<double, double> grid_refine_max(const std::function<double(double)>& f,
                                          double lo, double hi, int steps,
                                          int refine_iters) {
  if (steps < 2) throw DomainError("grid_refine_max: need at least two points");
  double best_x = lo, best_v = -std::numeric_limits<double>::infinity();
  int best_i = 0;
  for (int i = 0; i < steps; ++i) {
    double x = lo + (hi - lo) * i / (steps - 1);
    double v = f(x);
    if (v > best_v) {
      best_v = v;
      best_x = x;
      best_i = i;
    }
  }
  double span = (hi - lo) / (steps - 1);
  double a = std::max(lo, best_x - span);
  double b = std::min(hi, best_x + span);
  auto [x, v] = golden_section_max(f, a, b, refine_iters);
  if (v >= best_v) return {x, v};
  return {best_x, best_v};
  (void)best_i;
}

std::pair<Eigen::VectorXd, double> nelder_mead_max(
    const std::function<double(const Eigen::VectorXd&)>& f,
    const Eigen::VectorXd& x0, double step, int iters) {
  const int n = static_cast<int>(x0.size());
  std::vector<Eigen::VectorXd> pts(n + 1, x0);
  for (int i = 0; i < n; ++i) pts[i + 1](i) += step;
  std::vector<double> vals(n + 1);
  for (int i = 0; i <= n; ++i) vals[i] = f(pts[i]);

  auto order = [&] {
    std::vector<int> idx(n + 1);
    for (int i = 0; i <= n; ++i) idx[i] = i;
    std::sort(idx.begin(), idx.end(),
              [&](int a, int b) { return vals[a] > vals[b]; });
    std::vector<Eigen::VectorXd> p2;
    std::vector<double> v2;
    for (int i : idx) {
      p2.push_back(pts[i]);
      v2.push_back(vals[i]);
    }
    pts = std::move(p2);
    vals = std::move(v2);
  };
  order();

  for (int it = 0; it < iters; ++it) {
    Eigen::VectorXd centroid = Eigen::VectorXd::Zero(n);
    for (int i = 0; i < n; ++i) centroid += pts[i];
    centroid /= n;

    Eigen::VectorXd refl = centroid + (centroid - pts[n]);
    double fr = f(refl);
    if (fr > vals[0]) {
      Eigen::VectorXd exp_pt = centroid + 2.0 * (centroid - pts[n]);
      double fe = f(exp_pt);
      if (fe > fr) {
        pts[n] = exp_pt;
        vals[n] = fe;
      } else {
        pts[n] = refl;
        vals[n] = fr;
      }
    } else if (fr > vals[n - 1]) {
      pts[n] = refl;
      vals[n] = fr;
    } else {
      Eigen::VectorXd contr = centroid + 0.5 * (pts[n] - centroid);
      double fc = f(contr);
      if (fc > vals[n]) {
        pts[n] = contr;
        vals[n] = fc;
      } else {
        for (int i = 1; i <= n; ++i) {
          pts[i] = pts[0] + 0.5 * (pts[i] - pts[0]);
          vals[i] = f(pts[i]);
        }
      }
    }
    order();
  }
  return {pts[0], vals[0]};
}

DensityMatrix random_state(const FockSpace& space, int rank, Rng& rng,
                           const GlobalConfig& cfg) {
  const int d = space.total_dim();
  rank = std::clamp(rank, 1, d);
  Mat g(d, rank);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < rank; ++j) g(i, j) = cxd(rng.normal(), rng.normal());
  Mat rho = g * g.adjoint();
  rho /= rho.trace().real();
  return DensityMatrix(space, std::move(rho), cfg);
}

DensityMatrix random_fock_diagonal(const FockSpace& space, Rng& rng,
                                   const GlobalConfig& cfg) {
  const int d = space.total_dim();
  ProbVector p = random_prob(d, rng);
  Mat m = Mat::Zero(d, d);
  for (int i = 0; i < d; ++i) m(i, i) = p.weights[i];
  return DensityMatrix(space, std::move(m), cfg);
}

ProbVector random_prob(int len, Rng& rng) {
  std::vector<double> w(len);
  double sum = 0.0;
  for (double& x : w) {
    x = -std::log(1.0 - rng.uniform());  // Exp(1) marginals give Dirichlet(1)
    sum += x;
  }
  for (double& x : w) x /= sum;
  return ProbVector(std::move(w));
}

Vec random_pure_vector(int dim, Rng& rng) {
  Vec v(dim);
  for (int i = 0; i < dim; ++i) v(i) = cxd(rng.normal(), rng.normal());
  v.normalize();
  return v;
}

Mat random_psd(int dim, int rank, Rng& rng) {
  rank = std::clamp(rank, 1, dim);
  Mat g(dim, rank);
  for (int i = 0; i < dim; ++i)
    for (int j = 0; j < rank; ++j) g(i, j) = cxd(rng.normal(), rng.normal());
  return g * g.adjoint();
}

SearchResult psd_search_max(const std::function<double(const Mat&)>& f, int dim,
                            int rank, Rng& rng, int restarts, int steps,
                            double perturbation) {
  SearchResult best;
  best.value = -std::numeric_limits<double>::infinity();
  for (int r = 0; r < restarts; ++r) {
    Rng local = rng.stream(r);
    Mat l(dim, rank);
    for (int i = 0; i < dim; ++i)
      for (int j = 0; j < rank; ++j) l(i, j) = cxd(local.normal(), local.normal());
    Mat x = l * l.adjoint();
    double fx = f(x);
    double scale = perturbation;
    for (int s = 0; s < steps; ++s) {
      Mat l2 = l;
      for (int i = 0; i < dim; ++i)
        for (int j = 0; j < rank; ++j)
          l2(i, j) += scale * cxd(local.normal(), local.normal());
      Mat x2 = l2 * l2.adjoint();
      double f2 = f(x2);
      if (f2 > fx) {
        fx = f2;
        l = std::move(l2);
        x = std::move(x2);
      } else {
        scale *= 0.92;
      }
    }
    if (fx > best.value) {
      best.value = fx;
      best.argmax = x;
    }
  }
  return best;
}

SearchResult sequence_search_max(
    const std::function<double(const std::vector<double>&)>& f, int len,
    Rng& rng, int restarts, int steps, double perturbation) {
  SearchResult best;
  best.value = -std::numeric_limits<double>::infinity();
  std::vector<double> w(len);
  for (int r = 0; r < restarts; ++r) {
    Rng local = rng.stream(r);
    std::vector<double> y(len);
    for (double& v : y) v = local.normal();
    auto eval = [&](const std::vector<double>& ys) {
      for (int i = 0; i < len; ++i) w[i] = ys[i] * ys[i];
      return f(w);
    };
    double fy = eval(y);
    double scale = perturbation;
    for (int s = 0; s < steps; ++s) {
      std::vector<double> y2 = y;
      for (double& v : y2) v += scale * local.normal();
      double f2 = eval(y2);
      if (f2 > fy) {
        fy = f2;
        y = std::move(y2);
      } else {
        scale *= 0.92;
      }
    }
    if (fy > best.value) {
      best.value = fy;
      for (int i = 0; i < len; ++i) w[i] = y[i] * y[i];
      best.argmax_weights = w;
    }
  }
  return best;
}

}  // namespace gaussopt
