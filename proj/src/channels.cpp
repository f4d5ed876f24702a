#include "gaussopt/channels.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <numbers>
#include <numeric>
#include <tuple>

#include "gaussopt/expm.hpp"

namespace gaussopt {

namespace {

double lchoose(int n, int k) {
  return std::lgamma(n + 1.0) - std::lgamma(k + 1.0) - std::lgamma(n - k + 1.0);
}

// b^e with the 0^0 = 1 convention, safe for b = 0 under a log-accumulated
// exponent.
double pow_term(double b, double e) {
  if (e == 0.0) return 1.0;
  if (b == 0.0) return 0.0;
  return std::exp(e * std::log(b));
}

SpMat to_sparse(const Mat& m) {
  SpMat s = m.sparseView();
  s.makeCompressed();
  return s;
}

std::vector<int> embedding_map(const FockSpace& from, const FockSpace& to) {
  ModeIndexer src(from.mode_dims), dst(to.mode_dims);
  std::vector<int> map(from.total_dim());
  for (int i = 0; i < from.total_dim(); ++i) map[i] = dst.flatten(src.unflatten(i));
  return map;
}

// Completeness sum  Sigma K^dag K  of the composite stage list, evaluated on
// the declared input block; `unital` flips every factor for dual channels.
double composite_defect(const std::vector<KrausStage>& stages,
                        const FockSpace& declared, const FockSpace& guard,
                        bool unital) {
  if (stages.empty()) return 0.0;
  Mat m;
  if (!unital) {
    m = Mat::Identity(stages.back().rows, stages.back().rows);
    for (auto it = stages.rbegin(); it != stages.rend(); ++it) {
      Mat next = Mat::Zero(it->cols, it->cols);
      for (const auto& k : it->ops) next += k.adjoint() * m * k;
      m = std::move(next);
    }
  } else {
    m = Mat::Identity(stages.front().cols, stages.front().cols);
    for (const auto& st : stages) {
      Mat next = Mat::Zero(st.rows, st.rows);
      for (const auto& k : st.ops) next += k * m * k.adjoint();
      m = std::move(next);
    }
  }
  auto map = embedding_map(declared, guard);
  double defect = 0.0;
  for (std::size_t i = 0; i < map.size(); ++i)
    for (std::size_t j = 0; j < map.size(); ++j) {
      cxd want = (i == j) ? 1.0 : 0.0;
      defect = std::max(defect, std::abs(m(map[i], map[j]) - want));
    }
  return defect;
}

void finalize_defect(ChannelRep& c, double threshold) {
  bool unital = c.kind == ChannelKind::Dual;
  const FockSpace& declared = unital ? c.cutoffs.out : c.cutoffs.in;
  const FockSpace& guard = unital ? c.cutoffs.guard_out : c.cutoffs.guard_in;
  c.completeness_defect = composite_defect(c.stages, declared, guard, unital);
  if (c.completeness_defect > threshold)
    throw ConstructionError(std::string("channel construction: ") +
                            channel_kind_name(c.kind) +
                            " completeness defect " +
                            std::to_string(c.completeness_defect) +
                            " exceeds threshold; enlarge guard cutoff");
}

KrausStage attenuator_stage(double lambda, int dim) {
  KrausStage st;
  st.rows = st.cols = dim;
  for (int j = 0; j < dim; ++j) {
    Mat k = Mat::Zero(dim, dim);
    bool any = false;
    for (int n = j; n < dim; ++n) {
      double c = std::exp(lchoose(n, j)) * pow_term(lambda, n - j) *
                 pow_term(1.0 - lambda, j);
      if (c > 0) {
        k(n - j, n) = std::sqrt(c);
        any = true;
      }
    }
    if (any) st.ops.push_back(to_sparse(k));
  }
  return st;
}

KrausStage amplifier_stage(double kappa, int dim_in, int guard_out) {
  KrausStage st;
  st.rows = guard_out;
  st.cols = dim_in;
  const double x = (kappa - 1.0) / kappa;
  for (int j = 0; j < guard_out; ++j) {
    Mat k = Mat::Zero(guard_out, dim_in);
    bool any = false;
    for (int n = 0; n < dim_in && n + j < guard_out; ++n) {
      double c = std::exp(lchoose(n + j, j)) * pow_term(1.0 / kappa, n + 1) *
                 pow_term(x, j);
      if (c > 0) {
        k(n + j, n) = std::sqrt(c);
        any = true;
      }
    }
    if (any) st.ops.push_back(to_sparse(k));
  }
  return st;
}

// Worst completeness deficit of the truncated negative-binomial Kraus family
// over the declared input block.
double amplifier_deficit(double kappa, int dim_in, int guard_out) {
  const double x = (kappa - 1.0) / kappa;
  double worst = 0.0;
  for (int n = 0; n < dim_in; ++n) {
    double term = pow_term(1.0 / kappa, n + 1);
    double sum = 0.0;
    for (int j = 0; n + j < guard_out; ++j) {
      sum += term;
      term *= x * double(n + j + 1) / double(j + 1);
    }
    worst = std::max(worst, 1.0 - sum);
  }
  return worst;
}

int auto_amplifier_guard(double kappa, int dim_in, double target) {
  int g = std::max(dim_in + 1, static_cast<int>(std::ceil(kappa * dim_in)) + 8);
  while (amplifier_deficit(kappa, dim_in, g) > target) {
    g = g + std::max(4, g / 4);
    if (g > 16384)
      throw ConstructionError(
          "amplifier guard sizing diverged; parameters out of desk scale");
  }
  return g;
}

// Thread-safe cache of mixing unitaries keyed by (param, guard dims); sweeps
// re-apply the same channel thousands of times. The unitaries are
// block-diagonal and stored sparse.
const SpMat& cached_mixing_unitary(double param, int ga, int gb) {
  static std::map<std::tuple<double, int, int>, SpMat> cache;
  static std::mutex mu;
  std::lock_guard<std::mutex> lock(mu);
  auto key = std::make_tuple(param, ga, gb);
  auto it = cache.find(key);
  if (it == cache.end()) {
    SpMat u =
        beam_splitter_unitary(param, FockSpace({ga, gb})).mat.sparseView();
    u.makeCompressed();
    it = cache.emplace(key, std::move(u)).first;
  }
  return it->second;
}

// (u tensor I_rest) x (u tensor I_rest)^dag with u acting on the leading
// factor. rest_dim == 1 collapses to a plain conjugation.
Mat conjugate_head(const SpMat& u, const Mat& x, int rest_dim) {
  if (rest_dim == 1) {
    Mat tmp = u * x;
    return tmp * u.adjoint();
  }
  const int dim = static_cast<int>(x.rows());
  Mat b = Mat::Zero(dim, dim);
  for (int col = 0; col < u.outerSize(); ++col)
    for (SpMat::InnerIterator it(u, col); it; ++it)
      b.middleRows(static_cast<long>(it.row()) * rest_dim, rest_dim) +=
          it.value() *
          x.middleRows(static_cast<long>(it.col()) * rest_dim, rest_dim);
  Mat out = Mat::Zero(dim, dim);
  for (int col = 0; col < u.outerSize(); ++col)
    for (SpMat::InnerIterator it(u, col); it; ++it)
      out.middleCols(static_cast<long>(it.row()) * rest_dim, rest_dim) +=
          std::conj(it.value()) *
          b.middleCols(static_cast<long>(it.col()) * rest_dim, rest_dim);
  return out;
}

}  // namespace

const char* channel_kind_name(ChannelKind k) {
  switch (k) {
    case ChannelKind::AttenuatorQL: return "attenuator_ql";
    case ChannelKind::AmplifierQL: return "amplifier_ql";
    case ChannelKind::AttenuatorThermal: return "attenuator_thermal";
    case ChannelKind::AmplifierThermal: return "amplifier_thermal";
    case ChannelKind::BeamSplitterReduce: return "beam_splitter_reduce";
    case ChannelKind::HeatSemigroup: return "heat_semigroup";
    case ChannelKind::Transpose: return "transpose";
    case ChannelKind::Dual: return "dual";
    case ChannelKind::Complementary: return "complementary";
  }
  return "unknown";
}

ChannelRep kraus_attenuator_ql(double lambda, int dim_in,
                               const GlobalConfig& cfg) {
  if (lambda < 0.0 || lambda > 1.0)
    throw DomainError("attenuator: lambda must lie in [0,1]");
  if (dim_in < 1) throw DomainError("attenuator: dim_in must be >= 1");
  ChannelRep c;
  c.kind = ChannelKind::AttenuatorQL;
  c.param = lambda;
  FockSpace s = FockSpace::single(dim_in);
  c.cutoffs = {s, s, s, s};
  c.stages.push_back(attenuator_stage(lambda, dim_in));
  finalize_defect(c, 1e-12);
  return c;
}

ChannelRep kraus_amplifier_ql(double kappa, int dim_in, int guard_out,
                              const GlobalConfig& cfg) {
  if (kappa < 1.0) throw DomainError("amplifier: kappa must be >= 1");
  if (dim_in < 1) throw DomainError("amplifier: dim_in must be >= 1");
  if (guard_out <= 0) guard_out = auto_amplifier_guard(kappa, dim_in, 1e-10);
  if (guard_out < dim_in)
    throw DomainError("amplifier: guard_out smaller than dim_in");
  ChannelRep c;
  c.kind = ChannelKind::AmplifierQL;
  c.param = kappa;
  c.cutoffs = {FockSpace::single(dim_in), FockSpace::single(guard_out),
               FockSpace::single(dim_in), FockSpace::single(guard_out)};
  c.stages.push_back(amplifier_stage(kappa, dim_in, guard_out));
  finalize_defect(c, cfg.leakage_max);
  return c;
}

std::pair<double, double> thermal_decomposition(ChannelKind kind, double param,
                                                double env_energy) {
  // Match the photon-number transfer n -> gain*n + offset of the thermal
  // channel with the composition amplifier(kappa') o attenuator(tau):
  // n -> kappa'*tau*n + (kappa'-1).
  if (kind == ChannelKind::AttenuatorThermal) {
    double kp = 1.0 + (1.0 - param) * env_energy;
    return {param / kp, kp};
  }
  if (kind == ChannelKind::AmplifierThermal) {
    double kp = 1.0 + (param - 1.0) * (env_energy + 1.0);
    return {param / kp, kp};
  }
  throw DomainError("thermal_decomposition: not a thermal kind");
}

ChannelRep thermal_channel(ChannelKind kind, double param, double env_energy,
                           int dim_in, int guard_out, const GlobalConfig& cfg) {
  if (env_energy < 0) throw DomainError("thermal_channel: env energy must be >= 0");
  if (kind == ChannelKind::AttenuatorThermal && (param < 0 || param > 1))
    throw DomainError("thermal_channel: lambda must lie in [0,1]");
  if (kind == ChannelKind::AmplifierThermal && param < 1)
    throw DomainError("thermal_channel: kappa must be >= 1");
  auto [tau, kp] = thermal_decomposition(kind, param, env_energy);

  ChannelRep c;
  c.kind = kind;
  c.param = param;
  c.env_energy = env_energy;
  if (guard_out <= 0)
    guard_out = (kp > 1.0) ? auto_amplifier_guard(kp, dim_in, 1e-10) : dim_in;
  c.cutoffs = {FockSpace::single(dim_in), FockSpace::single(guard_out),
               FockSpace::single(dim_in), FockSpace::single(guard_out)};
  if (tau < 1.0) c.stages.push_back(attenuator_stage(tau, dim_in));
  if (kp > 1.0) c.stages.push_back(amplifier_stage(kp, dim_in, guard_out));
  if (c.stages.empty()) {  // identity channel (param==1 quantum-limited)
    KrausStage st;
    st.rows = st.cols = dim_in;
    st.ops.push_back(to_sparse(Mat::Identity(dim_in, dim_in)));
    c.stages.push_back(std::move(st));
  }
  if (c.stages.back().rows != guard_out) {
    // attenuator-only composition: output cutoff equals the input cutoff
    c.cutoffs.out = c.cutoffs.guard_out = FockSpace::single(c.stages.back().rows);
  }
  finalize_defect(c, cfg.leakage_max);
  return c;
}

ChannelRep heat_semigroup(double t, int dim, int quad_order,
                          const GlobalConfig& cfg, int guard_dim, int out_dim) {
  if (t < 0) throw DomainError("heat_semigroup: t must be >= 0");
  if (quad_order < 2) throw DomainError("heat_semigroup: order must be >= 2");
  ChannelRep c;
  c.kind = ChannelKind::HeatSemigroup;
  c.param = t;
  c.quad_order = quad_order;
  FockSpace s = FockSpace::single(dim);
  if (t == 0.0) {
    c.cutoffs = {s, s, s, s};
    KrausStage st;
    st.rows = st.cols = dim;
    st.ops.push_back(to_sparse(Mat::Identity(dim, dim)));
    c.stages.push_back(std::move(st));
    finalize_defect(c, 1e-12);
    return c;
  }
  const int g =
      (guard_dim > 0) ? std::max(guard_dim, dim)
                      : std::max(dim + 2, cfg.guard_factor * dim);
  if (out_dim <= 0) out_dim = g;
  FockSpace gs = FockSpace::single(g);
  c.cutoffs = {s, FockSpace::single(out_dim), gs, gs};

  std::vector<double> nodes, weights;
  gauss_hermite(quad_order, nodes, weights);
  const double sqrt_t = std::sqrt(t);

  // The displacement matrix elements carry their own factor e^{-t|z|^2}, so
  // the effective Gaussian weight is e^{-(1+t)|z|^2}. Substituting
  // z = u/sqrt(1+t) folds all of it into the quadrature weight and leaves the
  // grid integrating near-polynomials.
  const double shrink = 1.0 / std::sqrt(1.0 + t);
  std::vector<Mat> kraus;
  for (int a = 0; a < quad_order; ++a)
    for (int b = 0; b < quad_order; ++b) {
      cxd z = shrink * cxd(nodes[a], nodes[b]);
      double w = weights[a] * weights[b] * std::exp(t * std::norm(z)) /
                 (std::numbers::pi * (1.0 + t));
      cxd alpha = sqrt_t * z;
      Mat gen = Mat::Zero(g, g);
      for (int n = 1; n < g; ++n) {
        gen(n, n - 1) = alpha * std::sqrt(double(n));
        gen(n - 1, n) = -std::conj(alpha) * std::sqrt(double(n));
      }
      kraus.push_back(std::sqrt(w) * matrix_exp(gen));
    }

  // Enforce exact completeness at the guard cutoff: right-multiply the whole
  // family by (Sigma K^dag K)^{-1/2}.
  Mat total = Mat::Zero(g, g);
  for (const auto& k : kraus) total += k.adjoint() * k;
  Eigen::SelfAdjointEigenSolver<Mat> es(total);
  if (es.info() != Eigen::Success || es.eigenvalues().minCoeff() <= 0)
    throw NumericError("heat_semigroup: completeness factor not positive");
  Mat fix = es.eigenvectors() *
            es.eigenvalues().cwiseSqrt().cwiseInverse().asDiagonal() *
            es.eigenvectors().adjoint();
  KrausStage st;
  st.rows = st.cols = g;
  for (auto& k : kraus) st.ops.push_back(to_sparse(k * fix));
  c.stages.push_back(std::move(st));
  finalize_defect(c, 1e-10);
  return c;
}

ChannelRep transpose_channel(int dim) {
  ChannelRep c;
  c.kind = ChannelKind::Transpose;
  FockSpace s = FockSpace::single(dim);
  c.cutoffs = {s, s, s, s};
  return c;
}

ChannelRep dual_channel(const ChannelRep& c) {
  if (c.kind == ChannelKind::Transpose) {
    ChannelRep d = c;
    d.inner = std::make_shared<ChannelRep>(c);
    return d;  // transposition is self-dual
  }
  if (c.kind == ChannelKind::BeamSplitterReduce)
    throw ConstructionError("dual_channel: beam-splitter reduction unsupported");
  ChannelRep d;
  d.kind = ChannelKind::Dual;
  d.param = c.param;
  d.env_energy = c.env_energy;
  d.copies = c.copies;
  d.cutoffs = {c.cutoffs.out, c.cutoffs.in, c.cutoffs.guard_out,
               c.cutoffs.guard_in};
  for (auto it = c.stages.rbegin(); it != c.stages.rend(); ++it) {
    KrausStage st;
    st.rows = it->cols;
    st.cols = it->rows;
    for (const auto& k : it->ops) {
      SpMat adj = k.adjoint();
      adj.makeCompressed();
      st.ops.push_back(std::move(adj));
    }
    d.stages.push_back(std::move(st));
  }
  d.inner = std::make_shared<ChannelRep>(c);
  finalize_defect(d, 1e-9);
  return d;
}

ChannelRep complementary_ql(const ChannelRep& c) {
  if (c.copies != 1)
    throw ConstructionError("complementary_ql: tensor powers unsupported");
  const int din = c.cutoffs.in.total_dim();
  ChannelRep e;
  e.kind = ChannelKind::Complementary;
  e.param = c.param;
  e.inner = std::make_shared<ChannelRep>(c);

  KrausStage st;
  if (c.kind == ChannelKind::AttenuatorQL) {
    const double lambda = c.param;
    // amplitude <n-j, j|U|n, 0> = (-1)^j sqrt(C(n,j) lambda^(n-j) (1-lambda)^j);
    // the system index m = n-j labels the Kraus operators of the complement.
    st.rows = st.cols = din;
    for (int m = 0; m < din; ++m) {
      Mat k = Mat::Zero(din, din);
      bool any = false;
      for (int n = m; n < din; ++n) {
        int j = n - m;
        double c2 = std::exp(lchoose(n, j)) * pow_term(lambda, m) *
                    pow_term(1.0 - lambda, j);
        if (c2 > 0) {
          k(j, n) = ((j % 2) ? -1.0 : 1.0) * std::sqrt(c2);
          any = true;
        }
      }
      if (any) st.ops.push_back(to_sparse(k));
    }
  } else if (c.kind == ChannelKind::AmplifierQL) {
    const double kappa = c.param;
    const double x = (kappa - 1.0) / kappa;
    const int g = c.cutoffs.guard_out.total_dim();
    // amplitude <n+j, j|U|n, 0> = sqrt(C(n+j,j) kappa^-(n+1) x^j); Kraus are
    // labelled by the system output m = n+j.
    st.rows = g;
    st.cols = din;
    for (int m = 0; m < g; ++m) {
      Mat k = Mat::Zero(g, din);
      bool any = false;
      for (int n = std::max(0, m - (g - 1)); n < din && n <= m; ++n) {
        int j = m - n;
        double c2 = std::exp(lchoose(m, j)) * pow_term(1.0 / kappa, n + 1) *
                    pow_term(x, j);
        if (c2 > 0) {
          k(j, n) = std::sqrt(c2);
          any = true;
        }
      }
      if (any) st.ops.push_back(to_sparse(k));
    }
  } else {
    throw ConstructionError(
        "complementary_ql: only quantum-limited kinds have a pure environment");
  }
  int rows = st.rows;
  e.cutoffs = {c.cutoffs.in, FockSpace::single(rows), c.cutoffs.in,
               FockSpace::single(rows)};
  e.stages.push_back(std::move(st));
  finalize_defect(e, std::max(1e-9, c.completeness_defect * 4.0));
  return e;
}

namespace {

SpMat sparse_kron(const SpMat& a, const SpMat& b) {
  SpMat out(a.rows() * b.rows(), a.cols() * b.cols());
  std::vector<Eigen::Triplet<cxd>> trip;
  trip.reserve(static_cast<std::size_t>(a.nonZeros()) * b.nonZeros());
  for (int ka = 0; ka < a.outerSize(); ++ka)
    for (SpMat::InnerIterator ita(a, ka); ita; ++ita)
      for (int kb = 0; kb < b.outerSize(); ++kb)
        for (SpMat::InnerIterator itb(b, kb); itb; ++itb)
          trip.emplace_back(ita.row() * b.rows() + itb.row(),
                            ita.col() * b.cols() + itb.col(),
                            ita.value() * itb.value());
  out.setFromTriplets(trip.begin(), trip.end());
  return out;
}

FockSpace repeat_space(const FockSpace& s, int copies) {
  std::vector<int> dims;
  for (int c = 0; c < copies; ++c)
    dims.insert(dims.end(), s.mode_dims.begin(), s.mode_dims.end());
  return FockSpace(dims);
}

}  // namespace

ChannelRep tensor_power(const ChannelRep& c, int copies) {
  if (copies < 1) throw DomainError("tensor_power: copies must be >= 1");
  if (copies == 1) return c;
  if (c.stages.empty())
    throw ConstructionError("tensor_power: kind without Kraus data");
  ChannelRep t;
  t.kind = c.kind;
  t.param = c.param;
  t.env_energy = c.env_energy;
  t.quad_order = c.quad_order;
  t.copies = c.copies * copies;
  t.cutoffs = {repeat_space(c.cutoffs.in, copies),
               repeat_space(c.cutoffs.out, copies),
               repeat_space(c.cutoffs.guard_in, copies),
               repeat_space(c.cutoffs.guard_out, copies)};
  for (const auto& st : c.stages) {
    KrausStage big;
    big.rows = 1;
    big.cols = 1;
    std::vector<SpMat> acc = {to_sparse(Mat::Identity(1, 1))};
    for (int rep = 0; rep < copies; ++rep) {
      std::vector<SpMat> next;
      next.reserve(acc.size() * st.ops.size());
      for (const auto& a : acc)
        for (const auto& k : st.ops) next.push_back(sparse_kron(a, k));
      acc = std::move(next);
    }
    big.ops = std::move(acc);
    for (int rep = 0; rep < copies; ++rep) {
      big.rows *= st.rows;
      big.cols *= st.cols;
    }
    t.stages.push_back(std::move(big));
  }
  finalize_defect(t, std::max(1e-12, c.completeness_defect * copies * 4.0));
  return t;
}

LinearOperator beam_splitter_unitary(double param, const FockSpace& space2) {
  if (space2.modes() != 2)
    throw ShapeError("beam_splitter_unitary: two-mode space required");
  if (param < 0) throw DomainError("beam_splitter_unitary: parameter must be >= 0");
  const int ga = space2.mode_dims[0];
  const int gb = space2.mode_dims[1];
  const int dim = ga * gb;
  Mat u = Mat::Zero(dim, dim);
  auto flat = [gb](int k, int l) { return k * gb + l; };

  if (param <= 1.0) {
    // Mixing generator preserves total photon number; exponentiate per block.
    const double phi = std::acos(std::sqrt(param));
    for (int n = 0; n <= ga + gb - 2; ++n) {
      int kmin = std::max(0, n - (gb - 1));
      int kmax = std::min(n, ga - 1);
      int size = kmax - kmin + 1;
      if (size <= 0) continue;
      Mat gen = Mat::Zero(size, size);
      for (int i = 0; i + 1 < size; ++i) {
        int k = kmin + i;
        int l = n - k;
        double amp = phi * std::sqrt(double(k + 1) * double(l));
        gen(i + 1, i) = amp;
        gen(i, i + 1) = -amp;
      }
      Mat ub = matrix_exp(gen);
      for (int i = 0; i < size; ++i)
        for (int j = 0; j < size; ++j)
          u(flat(kmin + i, n - kmin - i), flat(kmin + j, n - kmin - j)) = ub(i, j);
    }
  } else {
    // Squeezing generator preserves the photon-number difference.
    const double r = std::acosh(std::sqrt(param));
    for (int d = -(gb - 1); d <= ga - 1; ++d) {
      int mmax = std::min(ga - 1 - std::max(d, 0), gb - 1 - std::max(-d, 0));
      int size = mmax + 1;
      if (size <= 0) continue;
      Mat gen = Mat::Zero(size, size);
      for (int i = 0; i + 1 < size; ++i) {
        int k = i + std::max(d, 0);
        int l = i + std::max(-d, 0);
        double amp = r * std::sqrt(double(k + 1) * double(l + 1));
        gen(i + 1, i) = amp;
        gen(i, i + 1) = -amp;
      }
      Mat ub = matrix_exp(gen);
      for (int i = 0; i < size; ++i)
        for (int j = 0; j < size; ++j)
          u(flat(i + std::max(d, 0), i + std::max(-d, 0)),
            flat(j + std::max(d, 0), j + std::max(-d, 0))) = ub(i, j);
    }
  }
  return LinearOperator(space2, std::move(u));
}

std::pair<int, int> beam_guards(double param, int dim_a, int dim_b) {
  const int base = dim_a + dim_b - 1;
  if (param <= 1.0) return {base, base};  // total photon number conserved
  const double x = (param - 1.0) / param;
  int margin = std::max(14, static_cast<int>(std::ceil(std::log(1e-14) / std::log(x))));
  int g = static_cast<int>(std::ceil(param * base)) + margin;
  return {g, g};
}

namespace {

int default_b_out(double param, int dim_a, int dim_b, int guard_a) {
  if (param <= 1.0) return guard_a;  // exact
  const int base = dim_a + dim_b - 1;
  int reach = static_cast<int>(std::ceil(param * base));
  int margin = guard_a - reach;
  int out = reach + margin - std::max(4, margin / 3);
  return std::min(std::max(out, reach), guard_a);
}

}  // namespace

ChannelRep beam_splitter_reduce(double param, int dim_a, int dim_b, int out_dim,
                                std::pair<int, int> guards,
                                const GlobalConfig& cfg) {
  if (param < 0) throw DomainError("beam_splitter_reduce: parameter must be >= 0");
  auto [ga, gb] = guards;
  if (ga <= 0 || gb <= 0) std::tie(ga, gb) = beam_guards(param, dim_a, dim_b);
  if (out_dim <= 0) out_dim = default_b_out(param, dim_a, dim_b, ga);
  ChannelRep c;
  c.kind = ChannelKind::BeamSplitterReduce;
  c.param = param;
  c.cutoffs = {FockSpace({dim_a, dim_b}), FockSpace::single(out_dim),
               FockSpace({ga, gb}), FockSpace::single(ga)};
  c.unitary = cached_mixing_unitary(param, ga, gb);
  c.completeness_defect = 0.0;
  return c;
}

Mat apply_to_matrix(const ChannelRep& c, const Mat& x) {
  if (x.rows() != c.cutoffs.in.total_dim())
    throw ShapeError("apply_to_matrix: input dimension mismatch");
  if (c.kind == ChannelKind::Transpose) return x.transpose();

  Mat cur = (c.cutoffs.in == c.cutoffs.guard_in)
                ? x
                : embed_matrix(x, c.cutoffs.in, c.cutoffs.guard_in);

  if (c.kind == ChannelKind::BeamSplitterReduce) {
    Mat y = conjugate_head(c.unitary, cur, 1);
    Mat reduced = partial_trace_matrix(y, c.cutoffs.guard_in, {0});
    FockSpace ga = FockSpace::single(c.cutoffs.guard_in.mode_dims[0]);
    if (ga == c.cutoffs.out) return reduced;
    return project_matrix(reduced, ga, c.cutoffs.out);
  }

  for (const auto& st : c.stages) {
    Mat next = Mat::Zero(st.rows, st.rows);
    for (const auto& k : st.ops) {
      Mat tmp = k * cur;
      next.noalias() += tmp * k.adjoint();
    }
    cur = std::move(next);
  }
  if (c.cutoffs.guard_out == c.cutoffs.out) return cur;
  return project_matrix(cur, c.cutoffs.guard_out, c.cutoffs.out);
}

ApplyResult apply(const ChannelRep& c, const DensityMatrix& rho,
                  const GlobalConfig& cfg) {
  Mat out = apply_to_matrix(c, rho.mat());
  double tr = out.trace().real();
  if (tr <= 0) throw NumericError("apply: output trace not positive");
  double leakage = 1.0 - tr;
  out /= tr;
  return {DensityMatrix(c.cutoffs.out, std::move(out), cfg), leakage};
}

DensityMatrix apply_checked(const ChannelRep& c, const DensityMatrix& rho,
                            const GlobalConfig& cfg) {
  ApplyResult r = apply(c, rho, cfg);
  if (r.leakage > cfg.leakage_max)
    throw TruncationError("apply: leakage " + std::to_string(r.leakage) +
                          " exceeds leakage_max; enlarge guard cutoffs");
  return std::move(r.state);
}

ApplyResult apply_B(const DensityMatrix& rho_ab, double param, int out_dim,
                    std::pair<int, int> guards, const GlobalConfig& cfg) {
  if (rho_ab.space().modes() != 2)
    throw ShapeError("apply_B: two-mode state required");
  return apply_B_extended(rho_ab, param, out_dim, guards, cfg);
}

ApplyResult apply_B_extended(const DensityMatrix& rho_abm, double param,
                             int out_dim, std::pair<int, int> guards,
                             const GlobalConfig& cfg) {
  const FockSpace& sp = rho_abm.space();
  if (sp.modes() < 2)
    throw ShapeError("apply_B_extended: need modes A and B in front");
  const int da = sp.mode_dims[0];
  const int db = sp.mode_dims[1];
  auto [ga, gb] = guards;
  if (ga <= 0 || gb <= 0) std::tie(ga, gb) = beam_guards(param, da, db);
  if (out_dim <= 0) out_dim = default_b_out(param, da, db, ga);

  std::vector<int> emb_dims = sp.mode_dims;
  emb_dims[0] = ga;
  emb_dims[1] = gb;
  FockSpace emb_space(emb_dims);
  int rest_dim = 1;
  for (int k = 2; k < sp.modes(); ++k) rest_dim *= sp.mode_dims[k];

  Mat x = embed_matrix(rho_abm.mat(), sp, emb_space);
  const SpMat& u = cached_mixing_unitary(param, ga, gb);
  Mat y = conjugate_head(u, x, rest_dim);

  std::vector<int> keep = {0};
  for (int k = 2; k < sp.modes(); ++k) keep.push_back(k);
  Mat reduced = partial_trace_matrix(y, emb_space, keep);

  std::vector<int> red_dims = {ga};
  for (int k = 2; k < sp.modes(); ++k) red_dims.push_back(sp.mode_dims[k]);
  FockSpace red_space(red_dims);

  std::vector<int> out_dims = red_dims;
  out_dims[0] = out_dim;
  FockSpace out_space(out_dims);
  Mat proj = (out_dim == ga) ? reduced
                             : project_matrix(reduced, red_space, out_space);
  double tr = proj.trace().real();
  if (tr <= 0) throw NumericError("apply_B: output trace not positive");
  double leakage = 1.0 - tr;
  proj /= tr;
  return {DensityMatrix(out_space, std::move(proj), cfg), leakage};
}

DilationRep make_dilation(double param, double env_energy, int dim_in,
                          std::pair<int, int> guards, const GlobalConfig& cfg) {
  int env_needed = 1;
  if (env_energy > 0) {
    env_needed = static_cast<int>(std::ceil(
        std::log(1e-10) / std::log(env_energy / (env_energy + 1.0))));
    env_needed = std::max(env_needed, 4);
  }
  auto [ga, gb] = guards;
  if (ga <= 0 || gb <= 0)
    std::tie(ga, gb) = beam_guards(param, dim_in, std::max(env_needed, dim_in));
  DilationRep d;
  d.space = FockSpace({ga, gb});
  d.unitary = beam_splitter_unitary(param, d.space).mat.sparseView();
  d.unitary.makeCompressed();
  GlobalConfig env_cfg = cfg;
  env_cfg.leakage_max = std::max(cfg.leakage_max, 1e-9);
  d.env_state = thermal_state(env_energy, FockSpace::single(gb), env_cfg);
  d.traced_mode = 1;
  return d;
}

Mat dilation_unit_action(const DilationRep& d, int m, int n, int out_dim) {
  const int ga = d.space.mode_dims[0];
  const int gb = d.space.mode_dims[1];
  using RowMat =
      Eigen::Matrix<cxd, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
  Mat out = Mat::Zero(out_dim, out_dim);
  // The environment is Fock-diagonal: split it into pure levels and act on
  // the columns U|m, e>, U|n, e> only.
  for (int e = 0; e < gb; ++e) {
    double w = d.env_state.mat()(e, e).real();
    if (w < 1e-18) continue;
    Vec um = d.unitary.col(m * gb + e);
    Vec un = d.unitary.col(n * gb + e);
    Eigen::Map<const RowMat> pm(um.data(), ga, gb), pn(un.data(), ga, gb);
    if (d.traced_mode == 1)
      out += w * (pm * pn.adjoint()).topLeftCorner(out_dim, out_dim);
    else
      out += w * (pm.transpose() * pn.conjugate()).topLeftCorner(out_dim, out_dim);
  }
  return out;
}

Mat dilation_apply(const DilationRep& d, const Mat& x, int out_dim) {
  double offdiag = 0.0;
  for (int i = 0; i < d.env_state.dim(); ++i)
    for (int j = 0; j < d.env_state.dim(); ++j)
      if (i != j) offdiag = std::max(offdiag, std::abs(d.env_state.mat()(i, j)));
  if (offdiag > 1e-14)
    throw DomainError("dilation_apply: environment must be Fock-diagonal");
  const int din = static_cast<int>(x.rows());
  Mat out = Mat::Zero(out_dim, out_dim);
  for (int m = 0; m < din; ++m)
    for (int n = 0; n < din; ++n) {
      if (x(m, n) == cxd(0.0)) continue;
      out += x(m, n) * dilation_unit_action(d, m, n, out_dim);
    }
  return out;
}

DensityMatrix zero_cmi_state(const std::vector<ZeroCmiBlock>& blocks,
                             const GlobalConfig& cfg) {
  if (blocks.empty()) throw DomainError("zero_cmi_state: no blocks");
  const int da = blocks[0].rho_am.space().mode_dims[0];
  const int db = blocks[0].rho_bm.space().mode_dims[0];
  double wsum = 0.0;
  int dm = 0;
  for (const auto& b : blocks) {
    if (b.rho_am.space().modes() != 2 || b.rho_bm.space().modes() != 2)
      throw ShapeError("zero_cmi_state: each block state must have two modes");
    if (b.rho_am.space().mode_dims[0] != da ||
        b.rho_bm.space().mode_dims[0] != db)
      throw DomainError("zero_cmi_state: inconsistent A or B dimension");
    if (b.weight < 0) throw DomainError("zero_cmi_state: negative weight");
    wsum += b.weight;
    dm += b.rho_am.space().mode_dims[1] * b.rho_bm.space().mode_dims[1];
  }
  if (std::abs(wsum - 1.0) > cfg.tol_trace)
    throw DomainError("zero_cmi_state: weights must sum to 1");

  FockSpace space({da, db, dm});
  ModeIndexer idx(space.mode_dims);
  Mat out = Mat::Zero(space.total_dim(), space.total_dim());
  int offset = 0;
  for (const auto& blk : blocks) {
    const int ma = blk.rho_am.space().mode_dims[1];
    const int mb = blk.rho_bm.space().mode_dims[1];
    const Mat& r1 = blk.rho_am.mat();
    const Mat& r2 = blk.rho_bm.mat();
    for (int a = 0; a < da; ++a)
      for (int ia = 0; ia < ma; ++ia)
        for (int a2 = 0; a2 < da; ++a2)
          for (int ia2 = 0; ia2 < ma; ++ia2) {
            cxd v1 = r1(a * ma + ia, a2 * ma + ia2);
            if (v1 == cxd(0.0)) continue;
            for (int b = 0; b < db; ++b)
              for (int ib = 0; ib < mb; ++ib)
                for (int b2 = 0; b2 < db; ++b2)
                  for (int ib2 = 0; ib2 < mb; ++ib2) {
                    cxd v2 = r2(b * mb + ib, b2 * mb + ib2);
                    if (v2 == cxd(0.0)) continue;
                    int row = idx.flatten({a, b, offset + ia * mb + ib});
                    int col = idx.flatten({a2, b2, offset + ia2 * mb + ib2});
                    out(row, col) += blk.weight * v1 * v2;
                  }
          }
    offset += ma * mb;
  }
  return DensityMatrix(space, std::move(out), cfg);
}

void gauss_hermite(int order, std::vector<double>& nodes,
                   std::vector<double>& weights) {
  Eigen::MatrixXd j = Eigen::MatrixXd::Zero(order, order);
  for (int k = 1; k < order; ++k) {
    double b = std::sqrt(k / 2.0);
    j(k, k - 1) = b;
    j(k - 1, k) = b;
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(j);
  if (es.info() != Eigen::Success)
    throw NumericError("gauss_hermite: eigensolver failed");
  nodes.resize(order);
  weights.resize(order);
  const double sqrt_pi = std::sqrt(std::numbers::pi);
  for (int i = 0; i < order; ++i) {
    nodes[i] = es.eigenvalues()(i);
    double v0 = es.eigenvectors()(0, i);
    weights[i] = sqrt_pi * v0 * v0;
  }
}

}  // namespace gaussopt
