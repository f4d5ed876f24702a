#include <cmath>

#include "doctest.h"
#include "gaussopt/optimize.hpp"
#include "gaussopt/thinning.hpp"
#include "oracles.hpp"

using namespace gaussopt;

TEST_SUITE_BEGIN("thinning");

TEST_CASE("thinning basics") {
  ProbVector p(std::vector<double>{0.1, 0.2, 0.3, 0.4});
  auto same = thin(p, 1.0);
  for (int i = 0; i < 4; ++i) CHECK(same.weights[i] == p.weights[i]);

  ProbVector delta1(std::vector<double>{0.0, 1.0});
  for (double l : {0.2, 0.5, 0.9}) {
    auto out = thin(delta1, l);
    CHECK(out.weights[0] == doctest::Approx(1.0 - l).epsilon(1e-15));
    CHECK(out.weights[1] == doctest::Approx(l).epsilon(1e-15));
  }

  CHECK_THROWS_AS(thin(p, 1.2), DomainError);
  CHECK_THROWS_AS(thin(p, -0.1), DomainError);
}

TEST_CASE("mass and mean transform exactly") {
  Rng rng(3);
  for (int t = 0; t < 40; ++t) {
    auto p = random_prob(20, rng);
    double l = rng.uniform();
    auto q = thin(p, l);
    CHECK(q.mass() == doctest::Approx(p.mass()).epsilon(1e-13));
    CHECK(q.mean() == doctest::Approx(l * p.mean()).epsilon(1e-12));
  }
}

TEST_CASE("geometric goes to geometric") {
  const int len = 160;
  for (double e : {0.5, 1.0, 2.0}) {
    for (double l : {0.3, 0.7}) {
      auto out = thin(geometric_dist(e, len), l);
      auto want = geometric_dist(l * e, len);
      double worst = 0.0;
      for (int n = 0; n < len / 2; ++n)
        worst = std::max(worst, std::abs(out.weights[n] - want.weights[n]));
      CHECK(worst < 1e-10);
    }
  }
}

TEST_CASE("thinning semigroup") {
  Rng rng(5);
  for (int t = 0; t < 20; ++t) {
    auto p = random_prob(24, rng);
    auto lhs = thin(thin(p, 0.6), 0.7);
    auto rhs = thin(p, 0.42);
    for (int n = 0; n < 24; ++n)
      CHECK(std::abs(lhs.weights[n] - rhs.weights[n]) < 1e-12);
  }
}

TEST_CASE("thinning equals the attenuator on Fock-diagonal states") {
  Rng rng(7);
  CHECK(check_thinning_attenuator(random_prob(40, rng), 1.0, 40) == 0.0);
  for (int t = 0; t < 10; ++t) {
    auto p = random_prob(40, rng);
    CHECK(check_thinning_attenuator(p, 0.3, 40) <= 1e-10);
  }
  CHECK(check_thinning_attenuator(geometric_dist(1.0, 40), 0.5, 40) <= 1e-10);
}

TEST_CASE("entropy inequality gap") {
  // geometric inputs meet the bound with equality
  for (double e : {0.4, 1.0}) {
    auto p = geometric_dist(e, 220);
    CHECK(std::abs(thinning_entropy_gap(p, 0.5)) < 1e-8);
  }
  // point masses: both sides vanish at S(p)=0
  ProbVector d3(std::vector<double>{0, 0, 0, 1.0});
  CHECK(thinning_entropy_gap(d3, 0.6) >= -1e-12);

  Rng rng(11);
  for (double l : {0.2, 0.5, 0.8})
    for (int t = 0; t < 60; ++t)
      CHECK(thinning_entropy_gap(random_prob(24, rng), l) >= -1e-8);
}

TEST_CASE("norm estimate: identity, achieved regime, divergence flag") {
  auto id = thinning_norm_estimate(2.0, 2.0, 1.0, 24, 8, 42);
  CHECK(id.family_value == doctest::Approx(1.0).epsilon(1e-9));

  auto rep = thinning_norm_estimate(1.0, 2.0, 0.5, 32, 30, 42);
  CHECK(rep.regime == "achieved");
  CHECK(rep.search_value <= rep.family_value + 1e-6);

  auto div = thinning_norm_estimate(2.0, 1.0, 0.5, 24, 4, 42);
  CHECK(div.regime == "divergent");
  // family ratio grows monotonically along E
  double prev = 0.0;
  for (double e : {1.0, 4.0, 16.0, 64.0, 256.0}) {
    double cur = thinning_geometric_ratio(e, 0.5, 2.0, 1.0);
    CHECK(cur > prev);
    prev = cur;
  }
}

TEST_CASE("closed geometric norms match series sums") {
  for (double e : {0.3, 1.0, 3.0})
    for (double r : {1.0, 1.5, 2.0, 5.0})
      CHECK(geometric_lp_norm(e, r) ==
            doctest::Approx(oracle::geometric_norm_series(e, r)).epsilon(1e-12));
}

TEST_SUITE_END();
