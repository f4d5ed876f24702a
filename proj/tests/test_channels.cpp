#include <cmath>

#include "doctest.h"
#include "gaussopt/channels.hpp"
#include "gaussopt/optimize.hpp"
#include "oracles.hpp"

using namespace gaussopt;

TEST_SUITE_BEGIN("channels");

namespace {

Mat unit(int d, int m, int n) {
  Mat e = Mat::Zero(d, d);
  e(m, n) = 1.0;
  return e;
}

// max entrywise difference between the Kraus action and the dilation action
// over all matrix units of the input block
double kraus_vs_dilation(const ChannelRep& c, const DilationRep& d, int dim_in,
                         int out_dim) {
  double worst = 0.0;
  for (int m = 0; m < dim_in; ++m)
    for (int n = 0; n < dim_in; ++n) {
      Mat via_kraus = apply_to_matrix(c, unit(dim_in, m, n));
      Mat via_dilation = dilation_unit_action(d, m, n, out_dim);
      worst = std::max(
          worst, (via_kraus.topLeftCorner(out_dim, out_dim) - via_dilation)
                     .cwiseAbs()
                     .maxCoeff());
    }
  return worst;
}

}  // namespace

TEST_CASE("attenuator basics") {
  auto id = kraus_attenuator_ql(1.0, 6);
  CHECK(id.stages[0].ops.size() == 1);
  CHECK(id.completeness_defect < 1e-14);

  auto att = kraus_attenuator_ql(0.6, 8);
  CHECK(att.completeness_defect < 1e-13);

  auto vac = vacuum_state(FockSpace::single(8));
  auto out = apply(att, vac);
  CHECK(out.leakage == doctest::Approx(0.0).epsilon(1e-13));
  CHECK((out.state.mat() - vac.mat()).cwiseAbs().maxCoeff() < 1e-13);

  auto one = fock_state(1, FockSpace::single(8));
  auto out1 = apply(att, one).state;
  CHECK(out1.mat()(1, 1).real() == doctest::Approx(0.6).epsilon(1e-13));
  CHECK(out1.mat()(0, 0).real() == doctest::Approx(0.4).epsilon(1e-13));

  CHECK_THROWS_AS(kraus_attenuator_ql(1.2, 8), DomainError);
  CHECK_THROWS_AS(kraus_attenuator_ql(-0.1, 8), DomainError);
}

TEST_CASE("attenuator keeps Fock-diagonal states diagonal") {
  Rng rng(2);
  auto rho = random_fock_diagonal(FockSpace::single(10), rng);
  auto out = apply(kraus_attenuator_ql(0.37, 10), rho).state;
  double off = 0.0;
  for (int i = 0; i < 10; ++i)
    for (int j = 0; j < 10; ++j)
      if (i != j) off = std::max(off, std::abs(out.mat()(i, j)));
  CHECK(off <= 1e-12);
}

TEST_CASE("amplifier basics") {
  auto id = kraus_amplifier_ql(1.0, 6, 6);
  auto one = fock_state(1, FockSpace::single(6));
  CHECK((apply(id, one).state.mat() - one.mat()).cwiseAbs().maxCoeff() < 1e-13);

  const double kappa = 1.3;
  auto amp = kraus_amplifier_ql(kappa, 12);
  CHECK(amp.completeness_defect < 1e-10);
  auto vac = vacuum_state(FockSpace::single(12));
  auto res = apply(amp, vac);
  CHECK(std::abs(res.leakage) < 1e-10);
  int g = amp.cutoffs.out.total_dim();
  auto want = thermal_state(kappa - 1.0, FockSpace::single(g));
  CHECK((res.state.mat() - want.mat()).cwiseAbs().maxCoeff() < 1e-6);

  CHECK_THROWS_AS(kraus_amplifier_ql(0.9, 8), DomainError);
}

TEST_CASE("amplifier trace deficit stays small at desk cutoffs") {
  Rng rng(9);
  for (double kappa : {1.2, 1.5}) {
    auto amp = kraus_amplifier_ql(kappa, 16, 48);
    for (int t = 0; t < 5; ++t) {
      auto rho = random_state(FockSpace::single(16), 16, rng);
      CHECK(std::abs(apply(amp, rho).leakage) < 1e-6);
    }
  }
}

TEST_CASE("mixing unitary: identity, blocks, ladder conjugation") {
  const int g = 12;
  FockSpace s2({g, g});
  auto u1 = beam_splitter_unitary(1.0, s2);
  CHECK((u1.mat - Mat::Identity(g * g, g * g)).cwiseAbs().maxCoeff() < 1e-13);

  auto u = beam_splitter_unitary(0.35, s2);
  CHECK((u.mat.adjoint() * u.mat - Mat::Identity(g * g, g * g))
            .cwiseAbs()
            .maxCoeff() < 1e-12);
  // block structure: entries only between equal total photon number
  for (int a = 0; a < g; ++a)
    for (int b = 0; b < g; ++b)
      for (int c = 0; c < g; ++c)
        for (int d = 0; d < g; ++d)
          if (a + b != c + d) CHECK(u.mat(a * g + b, c * g + d) == cxd(0.0));

  // U^dag (a x I) U = sqrt(l) a x I + sqrt(1-l) I x b on an inner block
  const double l = 0.35;
  Mat a_op = tensor(ladder(FockSpace::single(g)),
                    identity_operator(FockSpace::single(g))).mat;
  Mat b_op = tensor(identity_operator(FockSpace::single(g)),
                    ladder(FockSpace::single(g))).mat;
  Mat conj = u.mat.adjoint() * a_op * u.mat;
  Mat want = std::sqrt(l) * a_op + std::sqrt(1.0 - l) * b_op;
  const int inner = 6;  // stay away from the cutoff boundary
  double worst = 0.0;
  ModeIndexer idx({g, g});
  for (int r = 0; r < g * g; ++r)
    for (int c = 0; c < g * g; ++c) {
      auto dr = idx.unflatten(r), dc = idx.unflatten(c);
      if (dr[0] < inner && dr[1] < inner && dc[0] < inner && dc[1] < inner)
        worst = std::max(worst, std::abs(conj(r, c) - want(r, c)));
    }
  CHECK(worst < 1e-8);

  CHECK_THROWS_AS(beam_splitter_unitary(-0.2, s2), DomainError);
}

TEST_CASE("squeezer conjugation rule") {
  const int g = 28;
  const double kappa = 1.4;
  auto u = beam_splitter_unitary(kappa, FockSpace({g, g}));
  Mat a_op = tensor(ladder(FockSpace::single(g)),
                    identity_operator(FockSpace::single(g))).mat;
  Mat bdag = tensor(identity_operator(FockSpace::single(g)),
                    ladder(FockSpace::single(g))).mat.adjoint();
  Mat conj = u.mat.adjoint() * a_op * u.mat;
  Mat want = std::sqrt(kappa) * a_op + std::sqrt(kappa - 1.0) * bdag;
  ModeIndexer idx({g, g});
  double worst = 0.0;
  const int inner = 4;
  for (int r = 0; r < g * g; ++r)
    for (int c = 0; c < g * g; ++c) {
      auto dr = idx.unflatten(r), dc = idx.unflatten(c);
      if (dr[0] < inner && dr[1] < inner && dc[0] < inner && dc[1] < inner)
        worst = std::max(worst, std::abs(conj(r, c) - want(r, c)));
    }
  CHECK(worst < 1e-7);
}

TEST_CASE("apply_B marginals and moments") {
  const int dt = 24;
  auto ra = thermal_state(0.8, FockSpace::single(dt));
  auto rb = thermal_state(0.3, FockSpace::single(dt));
  auto joint = tensor(ra, rb);

  auto out1 = apply_B(joint, 1.0);
  Mat marg = partial_trace(joint, {0}).mat();
  CHECK((out1.state.mat().topLeftCorner(dt, dt) - marg).cwiseAbs().maxCoeff() <
        1e-12);

  auto vacs = tensor(vacuum_state(FockSpace::single(6)),
                     vacuum_state(FockSpace::single(6)));
  auto outv = apply_B(vacs, 0.42);
  CHECK(outv.state.mat()(0, 0).real() == doctest::Approx(1.0).epsilon(1e-12));

  for (double l : {0.25, 0.6}) {
    auto out = apply_B(joint, l);
    CHECK(out.leakage < 1e-10);
    CHECK(mean_photon_number(out.state) ==
          doctest::Approx(l * 0.8 + (1 - l) * 0.3).epsilon(1e-6));
  }
}

TEST_CASE("kraus vs dilation on matrix units (quantum-limited)") {
  const int d = 12, guard = 36;
  for (double lambda : {0.3, 0.7}) {
    auto c = kraus_attenuator_ql(lambda, d);
    auto dil = make_dilation(lambda, 0.0, d, {d, d});
    CHECK(kraus_vs_dilation(c, dil, d, d) < 1e-10);
  }
  for (double kappa : {1.1, 1.4}) {
    auto c = kraus_amplifier_ql(kappa, d, guard);
    auto dil = make_dilation(kappa, 0.0, d, {guard, guard});
    CHECK(kraus_vs_dilation(c, dil, d, d) < 1e-6);
  }
}

TEST_CASE("thermal channel reductions and closed thermal orbit") {
  // E = 0 reduces to the quantum-limited factor alone
  auto t0 = thermal_channel(ChannelKind::AttenuatorThermal, 0.55, 0.0, 10);
  auto ql = kraus_attenuator_ql(0.55, 10);
  Rng rng(12);
  auto probe = random_state(FockSpace::single(10), 10, rng);
  CHECK((apply(t0, probe).state.mat().topLeftCorner(10, 10) -
         apply(ql, probe).state.mat())
            .cwiseAbs()
            .maxCoeff() < 1e-12);

  // thermal input -> thermal output with the transferred mean
  const int d = 56;
  for (double l : {0.25, 0.6}) {
    for (double e : {0.5, 1.5}) {
      for (double ep : {0.4, 2.0}) {
        auto ch = thermal_channel(ChannelKind::AttenuatorThermal, l, e, d);
        auto in = thermal_state(ep, FockSpace::single(d));
        auto res = apply(ch, in);
        CHECK(std::abs(res.leakage) < 1e-7);
        double want_mean = l * ep + (1 - l) * e;
        int dout = ch.cutoffs.out.total_dim();
        auto want = thermal_state(want_mean, FockSpace::single(dout));
        CHECK((res.state.mat() - want.mat()).cwiseAbs().maxCoeff() < 1e-7);
      }
    }
  }
  for (double k : {1.15, 1.3}) {
    auto ch = thermal_channel(ChannelKind::AmplifierThermal, k, 1.0, d);
    auto in = thermal_state(1.2, FockSpace::single(d));
    auto res = apply(ch, in);
    CHECK(std::abs(res.leakage) < 1e-7);
    double want_mean = k * 1.2 + (k - 1.0) * 2.0;
    auto want =
        thermal_state(want_mean, FockSpace::single(ch.cutoffs.out.total_dim()));
    CHECK((res.state.mat() - want.mat()).cwiseAbs().maxCoeff() < 1e-7);
  }
}

TEST_CASE("thermal channel matches its dilation on matrix units") {
  const int d = 8;
  for (auto [kind, param] :
       {std::pair{ChannelKind::AttenuatorThermal, 0.6},
        std::pair{ChannelKind::AmplifierThermal, 1.25}}) {
    const double env = 0.7;
    auto ch = thermal_channel(kind, param, env, d, 40);
    auto dil = make_dilation(param, env, d);
    double worst = 0.0;
    for (int m = 0; m < d; ++m)
      for (int n = 0; n < d; ++n) {
        Mat via_kraus = apply_to_matrix(ch, unit(d, m, n)).topLeftCorner(d, d);
        Mat via_dil = dilation_apply(dil, unit(d, m, n), d);
        worst = std::max(worst, (via_kraus - via_dil).cwiseAbs().maxCoeff());
      }
    CHECK(worst < 1e-6);
  }
}

TEST_CASE("attenuator and amplifier semigroup laws") {
  Rng rng(8);
  const int d = 12;
  const double env = 0.8;
  auto c2 = thermal_channel(ChannelKind::AttenuatorThermal, 0.8, env, d);
  const int mid = c2.cutoffs.out.total_dim();
  auto c1 = thermal_channel(ChannelKind::AttenuatorThermal, 0.7, env, mid);
  auto c12 = thermal_channel(ChannelKind::AttenuatorThermal, 0.56, env, d);
  for (int t = 0; t < 20; ++t) {
    auto rho = random_state(FockSpace::single(d), d, rng);
    Mat lhs = apply_to_matrix(c1, apply_to_matrix(c2, rho.mat()));
    Mat rhs = apply_to_matrix(c12, rho.mat());
    int cmp = std::min<int>(lhs.rows(), rhs.rows());
    CHECK((lhs.topLeftCorner(cmp, cmp) - rhs.topLeftCorner(cmp, cmp))
              .cwiseAbs()
              .maxCoeff() < 1e-6);
  }

  auto a1 = kraus_amplifier_ql(1.1, d);
  const int amid = a1.cutoffs.out.total_dim();
  auto a2 = kraus_amplifier_ql(1.2, amid);
  auto a12 = kraus_amplifier_ql(1.32, d);
  for (int t = 0; t < 20; ++t) {
    auto rho = random_state(FockSpace::single(d), d, rng);
    Mat lhs = apply_to_matrix(a2, apply_to_matrix(a1, rho.mat()));
    Mat rhs = apply_to_matrix(a12, rho.mat());
    int cmp = std::min<int>(lhs.rows(), rhs.rows());
    CHECK((lhs.topLeftCorner(cmp, cmp) - rhs.topLeftCorner(cmp, cmp))
              .cwiseAbs()
              .maxCoeff() < 1e-6);
  }
}

TEST_CASE("dual channel pairing and closed forms") {
  Rng rng(14);
  const int d = 10;
  auto att = kraus_attenuator_ql(0.45, d);
  auto datt = dual_channel(att);
  for (int t = 0; t < 10; ++t) {
    auto a = random_psd(d, d, rng);
    auto b = random_psd(d, d, rng);
    cxd lhs = trace_product(b, apply_to_matrix(att, a));
    cxd rhs = trace_product(apply_to_matrix(datt, b), a);
    CHECK(std::abs(lhs - rhs) < 1e-9 * std::abs(lhs));
  }

  // dual of the amplifier is 1/kappa times an attenuator
  const double kappa = 1.35;
  const int g = 48;
  auto amp = kraus_amplifier_ql(kappa, d, g);
  auto damp = dual_channel(amp);
  auto att2 = kraus_attenuator_ql(1.0 / kappa, g);
  for (int t = 0; t < 5; ++t) {
    Mat y = random_psd(g, g, rng);
    Mat lhs = apply_to_matrix(damp, y);
    Mat rhs = apply_to_matrix(att2, y) / kappa;
    CHECK((lhs - rhs).topLeftCorner(d, d).cwiseAbs().maxCoeff() /
              rhs.cwiseAbs().maxCoeff() <
          1e-8);
  }

  auto id = kraus_attenuator_ql(1.0, 5);
  auto did = dual_channel(id);
  Mat y = random_psd(5, 5, rng);
  CHECK((apply_to_matrix(did, y) - y).cwiseAbs().maxCoeff() < 1e-13);
}

TEST_CASE("complementary channel") {
  const int d = 10;
  Rng rng(19);

  // pure inputs: output spectra of the channel and its complement agree
  for (auto& c : {kraus_attenuator_ql(0.35, d), kraus_amplifier_ql(1.3, d, 40)}) {
    auto comp = complementary_ql(c);
    for (int t = 0; t < 8; ++t) {
      auto psi = random_state(FockSpace::single(d), 1, rng);
      auto out_direct = apply(c, psi);
      auto out_comp = apply(comp, psi);
      auto s1 = spectrum(out_direct.state);
      auto s2 = spectrum(out_comp.state);
      std::size_t len = std::min(s1.values.size(), s2.values.size());
      for (std::size_t k = 0; k < len; ++k)
        CHECK(std::abs(s1.values[k] - s2.values[k]) < 1e-8);
    }
  }

  // complementary channels match the dilation with the system traced out
  for (auto [c, guards] :
       {std::pair{kraus_attenuator_ql(0.35, d), std::pair{d, d}},
        std::pair{kraus_amplifier_ql(1.3, d, 40), std::pair{40, 40}}}) {
    auto comp = complementary_ql(c);
    auto dil = make_dilation(c.param, 0.0, d, guards);
    dil.traced_mode = 0;
    double worst = 0.0;
    for (int m = 0; m < d; ++m)
      for (int n = 0; n < d; ++n) {
        Mat lhs = apply_to_matrix(comp, unit(d, m, n)).topLeftCorner(d, d);
        Mat rhs = dilation_unit_action(dil, m, n, d);
        worst = std::max(worst, (lhs - rhs).cwiseAbs().maxCoeff());
      }
    CHECK(worst < 1e-8);
  }

  // complement of the amplifier: transpose after amplifier after attenuator
  const double kappa = 1.3;
  auto amp = kraus_amplifier_ql(kappa, d, 44);
  auto comp = complementary_ql(amp);
  auto att = kraus_attenuator_ql(1.0 - 1.0 / kappa, d);
  auto amp2 = kraus_amplifier_ql(kappa, d, 44);
  double worst = 0.0;
  for (int m = 0; m < d; ++m)
    for (int n = 0; n < d; ++n) {
      Mat lhs = apply_to_matrix(comp, unit(d, m, n));
      Mat chain = apply_to_matrix(amp2, apply_to_matrix(att, unit(d, m, n)));
      Mat rhs = chain.transpose();
      int cmp = std::min<int>(lhs.rows(), rhs.rows());
      cmp = std::min(cmp, 2 * d);
      worst = std::max(worst, (lhs.topLeftCorner(cmp, cmp) -
                               rhs.topLeftCorner(cmp, cmp))
                                  .cwiseAbs()
                                  .maxCoeff());
    }
  CHECK(worst < 1e-6);

  // lambda = 1: nothing reaches the environment
  auto comp1 = complementary_ql(kraus_attenuator_ql(1.0, d));
  auto rho = random_state(FockSpace::single(d), d, rng);
  auto out = apply(comp1, rho).state;
  CHECK(out.mat()(0, 0).real() == doctest::Approx(1.0).epsilon(1e-12));

  CHECK_THROWS_AS(
      complementary_ql(thermal_channel(ChannelKind::AttenuatorThermal, 0.5,
                                       1.0, 6)),
      ConstructionError);
}

TEST_CASE("heat semigroup") {
  const int d = 12;
  auto n0 = heat_semigroup(0.0, d);
  Rng rng(25);
  auto rho = random_state(FockSpace::single(d), d, rng);
  CHECK((apply(n0, rho).state.mat() - rho.mat()).cwiseAbs().maxCoeff() < 1e-13);

  // semigroup law at order 15, t <= 0.2; the composition lives at one shared
  // guard level so no mass is cut between the two steps
  const int g = 2 * d;
  auto na = heat_semigroup(0.12, d, 15, {}, g, g);
  auto nb = heat_semigroup(0.08, g, 15, {}, g, g);
  auto nab = heat_semigroup(0.2, d, 15, {}, g, g);
  for (int t = 0; t < 6; ++t) {
    auto r = random_state(FockSpace::single(d), d, rng);
    auto lhs = apply(nb, apply(na, r).state).state;
    auto rhs = apply(nab, r).state;
    CHECK((lhs.mat().topLeftCorner(d, d) - rhs.mat().topLeftCorner(d, d))
              .cwiseAbs()
              .maxCoeff() < 1e-5);
  }

  // mean photon number grows by t
  GlobalConfig loose;
  loose.leakage_max = 1e-3;
  auto om = thermal_state(0.8, FockSpace::single(d), loose);
  for (double t : {0.1, 0.2}) {
    auto nt = heat_semigroup(t, d, 15);
    auto out = apply(nt, om).state;
    CHECK(mean_photon_number(out) ==
          doctest::Approx(0.8 + t + mean_photon_number(om) - 0.8)
              .epsilon(1e-4));
  }

  CHECK_THROWS_AS(heat_semigroup(-0.1, d), DomainError);
}

TEST_CASE("zero-CMI constructor") {
  Rng rng(33);
  GlobalConfig cfg;

  // single product block with trivial memory
  auto ra = random_state(FockSpace({3, 1}), 3, rng);
  auto rb = random_state(FockSpace({3, 1}), 3, rng);
  auto single = zero_cmi_state({{1.0, ra, rb}});
  CHECK(cond_mutual_information(single, {0}, {1}, {2}) <= 1e-10);

  // two blocks with distinct memory sectors
  std::vector<ZeroCmiBlock> blocks;
  blocks.push_back({0.35, random_state(FockSpace({3, 2}), 4, rng),
                    random_state(FockSpace({3, 2}), 4, rng)});
  blocks.push_back({0.65, random_state(FockSpace({3, 2}), 4, rng),
                    random_state(FockSpace({3, 2}), 4, rng)});
  auto rho = zero_cmi_state(blocks);
  CHECK(rho.space().mode_dims == std::vector<int>({3, 3, 8}));
  CHECK(cond_mutual_information(rho, {0}, {1}, {2}) <= 1e-9);

  // negative control: a generic entangled tripartite state has CMI > 0
  auto generic = random_state(FockSpace({3, 3, 4}), 6, rng);
  CHECK(cond_mutual_information(generic, {0}, {1}, {2}) > 1e-3);

  // dimension mismatch across blocks
  std::vector<ZeroCmiBlock> bad;
  bad.push_back({0.5, random_state(FockSpace({3, 2}), 3, rng),
                 random_state(FockSpace({3, 2}), 3, rng)});
  bad.push_back({0.5, random_state(FockSpace({4, 2}), 3, rng),
                 random_state(FockSpace({3, 2}), 3, rng)});
  CHECK_THROWS_AS(zero_cmi_state(bad), DomainError);
}

TEST_CASE("tensor powers act factorwise") {
  const int d = 6;
  auto att = kraus_attenuator_ql(0.5, d);
  auto att2 = tensor_power(att, 2);
  CHECK(att2.completeness_defect < 1e-12);
  Rng rng(41);
  auto ra = random_state(FockSpace::single(d), d, rng);
  auto rb = random_state(FockSpace::single(d), d, rng);
  auto joint = tensor(ra, rb);
  auto out = apply(att2, joint).state;
  auto want = tensor(apply(att, ra).state, apply(att, rb).state);
  CHECK((out.mat() - want.mat()).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_SUITE_END();
