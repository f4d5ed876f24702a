#include <cmath>

#include "doctest.h"
#include "gaussopt/channels.hpp"
#include "gaussopt/optimize.hpp"
#include "gaussopt/spectra.hpp"
#include "oracles.hpp"

using namespace gaussopt;

TEST_SUITE_BEGIN("spectra");

TEST_CASE("spectrum basics") {
  auto pure = fock_state(1, FockSpace::single(4));
  auto s = spectrum(pure);
  CHECK(s.values[0] == doctest::Approx(1.0).epsilon(1e-14));
  for (std::size_t k = 1; k < s.values.size(); ++k)
    CHECK(s.values[k] == doctest::Approx(0.0).epsilon(1e-14));

  const int d = 8;
  GlobalConfig loose;
  loose.leakage_max = 0.01;  // deliberately small cutoff
  auto om = thermal_state(1.0, FockSpace::single(d), loose);
  auto so = spectrum(om);
  double mass = 1.0 - std::pow(0.5, d);
  for (int n = 0; n < d; ++n)
    CHECK(so.values[n] ==
          doctest::Approx(std::pow(0.5, n + 1) / mass).epsilon(1e-13));
}

TEST_CASE("spectrum recovers planted eigenvalues") {
  Rng rng(17);
  const int d = 10;
  // Haar-ish eigenbasis from a QR factorization
  Mat g(d, d);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) g(i, j) = cxd(rng.normal(), rng.normal());
  Eigen::HouseholderQR<Mat> qr(g);
  Mat q = qr.householderQ();
  auto planted = random_prob(d, rng);
  Mat diag = Mat::Zero(d, d);
  for (int i = 0; i < d; ++i) diag(i, i) = planted.weights[i];
  DensityMatrix rho(FockSpace::single(d), q * diag * q.adjoint());
  auto s = spectrum(rho);
  auto sorted = planted.weights;
  std::sort(sorted.begin(), sorted.end(), std::greater<double>());
  for (int i = 0; i < d; ++i)
    CHECK(std::abs(s.values[i] - sorted[i]) < 1e-10);
}

TEST_CASE("schatten norms") {
  auto om = thermal_state(0.9, FockSpace::single(48));
  CHECK(schatten_norm(om, 1.0) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(schatten_norm(identity_operator(FockSpace::single(4)).mat, 2.0) ==
        doctest::Approx(2.0).epsilon(1e-14));
  for (double p : {1.5, 2.0, 3.0, 7.0}) {
    CHECK(schatten_norm(om, p) ==
          doctest::Approx(oracle::geometric_norm_series(0.9, p)).epsilon(1e-10));
  }
  CHECK(schatten_norm(om, std::numeric_limits<double>::infinity()) ==
        doctest::Approx(1.0 / 1.9).epsilon(1e-9));
  CHECK_THROWS_AS(schatten_norm(om, 0.5), DomainError);
}

TEST_CASE("entropies") {
  auto pure = fock_state(2, FockSpace::single(5));
  CHECK(von_neumann_entropy(pure) == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(renyi_entropy(pure, 2.0) == doctest::Approx(0.0).epsilon(1e-12));

  for (double e : {0.3, 1.0, 2.0}) {
    auto om = thermal_state(e, FockSpace::single(72));
    CHECK(von_neumann_entropy(om) == doctest::Approx(g_func(e)).epsilon(1e-8));
  }

  Rng rng(5);
  auto rho = random_state(FockSpace::single(8), 8, rng);
  CHECK(std::abs(renyi_entropy(rho, 1.001) - von_neumann_entropy(rho)) < 1e-2);
  CHECK_THROWS_AS(renyi_entropy(rho, 1.0), DomainError);
  CHECK_THROWS_AS(renyi_entropy(rho, 0.7), DomainError);
}

TEST_CASE("renyi entropy decreases in p") {
  Rng rng(23);
  for (int trial = 0; trial < 25; ++trial) {
    auto rho = random_state(FockSpace::single(7), 7, rng);
    auto s = spectrum(rho);
    double prev = std::numeric_limits<double>::infinity();
    for (double p : {1.1, 1.5, 2.0, 3.0, 6.0, 20.0}) {
      double cur = renyi_entropy(s, p);
      CHECK(cur <= prev + 1e-10);
      prev = cur;
    }
  }
}

TEST_CASE("g function and inverse") {
  CHECK(g_func(0.0) == 0.0);
  CHECK(g_func(1.0) == doctest::Approx(2.0 * std::log(2.0)).epsilon(1e-15));
  for (double e : {0.1, 1.0, 5.0})
    CHECK(g_inv(g_func(e)) == doctest::Approx(e).epsilon(1e-10));
  for (double e = 0.5; e <= 50.0; e += 4.5)
    CHECK(g_inv(g_func(e)) == doctest::Approx(e).epsilon(1e-10));
  CHECK_THROWS_AS(g_func(-1.0), DomainError);
  CHECK_THROWS_AS(g_inv(-0.1), DomainError);
}

TEST_CASE("shannon entropy and lp norms of distributions") {
  ProbVector point(std::vector<double>{0.0, 1.0, 0.0});
  CHECK(shannon_entropy(point) == 0.0);
  CHECK(lp_norm(point, 3.0) == doctest::Approx(1.0));

  ProbVector uni(std::vector<double>{0.25, 0.25, 0.25, 0.25});
  CHECK(shannon_entropy(uni) == doctest::Approx(std::log(4.0)).epsilon(1e-14));

  auto geo = geometric_dist(1.0, 80);
  CHECK(shannon_entropy(geo) ==
        doctest::Approx(oracle::geometric_entropy_series(1.0)).epsilon(1e-10));
  CHECK(shannon_entropy(geo) == doctest::Approx(g_func(1.0)).epsilon(1e-9));
}

TEST_CASE("conditional entropy") {
  auto ra = thermal_state(0.7, FockSpace::single(20));
  auto rm = thermal_state(0.4, FockSpace::single(16));
  auto joint = tensor(ra, rm);
  CHECK(conditional_entropy(joint, {1}) ==
        doctest::Approx(von_neumann_entropy(ra)).epsilon(1e-10));

  // two-mode squeezed vacuum: global purity forces S(A|M) = -S(M)
  const int d = 14;
  auto u = beam_splitter_unitary(1.3, FockSpace({d, d}));
  Vec col = u.mat.col(0);  // U |0,0>
  Mat rho2 = col * col.adjoint();
  DensityMatrix tms(FockSpace({d, d}), std::move(rho2));
  double s_m = von_neumann_entropy(partial_trace(tms, {1}));
  CHECK(s_m > 0.1);
  CHECK(conditional_entropy(tms, {1}) == doctest::Approx(-s_m).epsilon(1e-9));

  CHECK_THROWS_AS(conditional_entropy(joint, {0, 1}), DomainError);
  CHECK_THROWS_AS(conditional_entropy(joint, {2}), DomainError);
}

TEST_CASE("classical-quantum state matches averaged Shannon entropy") {
  Rng rng(31);
  const int da = 4, dm = 3;
  std::vector<DensityMatrix> members;
  auto weights = random_prob(dm, rng);
  Mat joint = Mat::Zero(da * dm, da * dm);
  double avg = 0.0;
  for (int m = 0; m < dm; ++m) {
    auto rho = random_state(FockSpace::single(da), da, rng);
    avg += weights.weights[m] * von_neumann_entropy(rho);
    for (int i = 0; i < da; ++i)
      for (int j = 0; j < da; ++j)
        joint(i * dm + m, j * dm + m) = weights.weights[m] * rho.mat()(i, j);
  }
  DensityMatrix cq(FockSpace({da, dm}), std::move(joint));
  CHECK(conditional_entropy(cq, {1}) == doctest::Approx(avg).epsilon(1e-10));
}

TEST_CASE("mutual information and CMI") {
  auto ra = thermal_state(0.5, FockSpace::single(24));
  auto rb = thermal_state(0.9, FockSpace::single(24));
  auto prod = tensor(ra, rb);
  CHECK(mutual_information(prod, {0}, {1}) == doctest::Approx(0.0).epsilon(1e-10));

  Rng rng(13);
  for (int trial = 0; trial < 100; ++trial) {
    auto rho = random_state(FockSpace({3, 3}), 5, rng);
    CHECK(mutual_information(rho, {0}, {1}) >= -1e-10);
  }
  for (int trial = 0; trial < 100; ++trial) {
    auto rho = random_state(FockSpace({2, 2, 2}), 4, rng);
    CHECK(cond_mutual_information(rho, {0}, {1}, {2}) >= -1e-10);
  }
}

TEST_CASE("data processing: discarding a subsystem lowers CMI") {
  Rng rng(37);
  for (int trial = 0; trial < 30; ++trial) {
    auto rho = random_state(FockSpace({2, 2, 2, 2}), 6, rng);
    // modes: A=0, C=1, B=2, M=3
    double lhs = cond_mutual_information(rho, {0, 1}, {2}, {3});
    auto reduced = partial_trace(rho, {0, 2, 3});
    double rhs = cond_mutual_information(reduced, {0}, {1}, {2});
    CHECK(rhs <= lhs + 1e-9);
  }
}

TEST_SUITE_END();
