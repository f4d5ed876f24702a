#include "gaussopt/thinning.hpp"

#include <algorithm>
#include <cmath>

#include "gaussopt/channels.hpp"
#include "gaussopt/optimize.hpp"

namespace gaussopt {

namespace {

double lchoose(int n, int k) {
  return std::lgamma(n + 1.0) - std::lgamma(k + 1.0) - std::lgamma(n - k + 1.0);
}

}  // namespace

ProbVector thin(const ProbVector& p, double lambda) {
  if (lambda < 0.0 || lambda > 1.0)
    throw DomainError("thin: lambda must lie in [0,1]");
  const int len = p.size();
  std::vector<double> out(len, 0.0);
  if (lambda == 1.0) {
    out = p.weights;
  } else if (lambda == 0.0) {
    out[0] = p.mass();
  } else {
    const double ll = std::log(lambda), lm = std::log(1.0 - lambda);
    for (int n = 0; n < len; ++n) {
      double acc = 0.0;
      for (int k = n; k < len; ++k) {
        if (p.weights[k] == 0.0) continue;
        acc += std::exp(lchoose(k, n) + n * ll + (k - n) * lm) * p.weights[k];
      }
      out[n] = acc;
    }
  }
  ProbVector r;
  r.weights = std::move(out);
  return r;
}

double check_thinning_attenuator(const ProbVector& p, double lambda, int dim,
                                 const GlobalConfig& cfg) {
  if (p.size() > dim)
    throw DomainError("check_thinning_attenuator: support exceeds cutoff");
  std::vector<double> w = p.weights;
  w.resize(dim, 0.0);
  double mass = p.mass();
  Mat m = Mat::Zero(dim, dim);
  for (int i = 0; i < dim; ++i) m(i, i) = w[i] / mass;
  DensityMatrix rho(FockSpace::single(dim), std::move(m), cfg);

  ChannelRep att = kraus_attenuator_ql(lambda, dim, cfg);
  Mat out = apply_to_matrix(att, rho.mat());

  ProbVector q = thin(ProbVector(w), lambda);
  double worst = 0.0;
  for (int n = 0; n < dim; ++n)
    worst = std::max(worst,
                     std::abs(out(n, n).real() * mass - q.weights[n]));
  return worst;
}

double thinning_entropy_gap(const ProbVector& p, double lambda) {
  double s_in = shannon_entropy(p);
  double s_out = shannon_entropy(thin(p, lambda));
  return s_out - g_func(lambda * g_inv(s_in));
}

double geometric_lp_norm(double energy, double r) {
  if (r < 1.0) throw DomainError("geometric_lp_norm: r must be >= 1");
  if (energy == 0.0) return 1.0;
  const double mu = energy / (energy + 1.0);
  if (std::isinf(r)) return 1.0 / (energy + 1.0);
  return (1.0 / (energy + 1.0)) * std::pow(1.0 - std::pow(mu, r), -1.0 / r);
}

double thinning_geometric_ratio(double energy, double lambda, double p_exp,
                                double q_exp) {
  return geometric_lp_norm(lambda * energy, q_exp) /
         geometric_lp_norm(energy, p_exp);
}

ThinningNormReport thinning_norm_estimate(double p_exp, double q_exp,
                                          double lambda, int support,
                                          int restarts, std::uint64_t seed) {
  if (p_exp < 1.0 || q_exp < 1.0)
    throw DomainError("thinning_norm_estimate: exponents must be >= 1");
  ThinningNormReport rep;
  rep.lambda = lambda;
  rep.p_exp = p_exp;
  rep.q_exp = q_exp;

  auto family = [&](double e) {
    return thinning_geometric_ratio(e, lambda, p_exp, q_exp);
  };

  if (p_exp < q_exp) {
    rep.regime = "achieved";
    auto [e, v] = grid_refine_max(family, 0.0, 64.0, 129, 100);
    rep.family_argmax = e;
    rep.family_value = v;
  } else {
    // Supremum approached along E -> infinity; report the trend endpoint.
    rep.regime = (p_exp == q_exp) ? "asymptotic" : "divergent";
    double e_hi = 1e6;
    rep.family_argmax = e_hi;
    rep.family_value = family(e_hi);
  }

  Rng rng(seed);
  auto objective = [&](const std::vector<double>& w) {
    ProbVector pw;
    pw.weights = w;
    double denom = lp_norm(pw, p_exp);
    if (denom <= 0) return -1.0;
    return lp_norm(thin(pw, lambda), q_exp) / denom;
  };
  SearchResult sr =
      sequence_search_max(objective, support, rng, restarts, 60, 0.3);
  rep.search_value = sr.value;
  return rep;
}

}  // namespace gaussopt
