#include <cmath>

#include "doctest.h"
#include "gaussopt/fock.hpp"
#include "gaussopt/optimize.hpp"
#include "gaussopt/spectra.hpp"
#include "oracles.hpp"

using namespace gaussopt;

TEST_SUITE_BEGIN("fock");

TEST_CASE("ladder operator entries") {
  auto a2 = ladder(FockSpace::single(2));
  CHECK(a2.mat(0, 1) == cxd(1.0));
  CHECK(a2.mat(0, 0) == cxd(0.0));
  CHECK(a2.mat(1, 0) == cxd(0.0));
  CHECK(a2.mat(1, 1) == cxd(0.0));

  auto a4 = ladder(FockSpace::single(4));
  CHECK(a4.mat(2, 3).real() == doctest::Approx(std::sqrt(3.0)).epsilon(1e-15));

  // hand-multiplied: a^dag a = diag(0,1,2,3) at the cutoff
  Mat num = a4.mat.adjoint() * a4.mat;
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j)
      CHECK(std::abs(num(i, j) - (i == j ? cxd(i) : cxd(0.0))) < 1e-14);

  CHECK_THROWS_AS(ladder(FockSpace({2, 2})), ShapeError);
}

TEST_CASE("commutator holds on the retained block only") {
  const int d = 6;
  auto a = ladder(FockSpace::single(d));
  Mat comm = a.mat * a.mat.adjoint() - a.mat.adjoint() * a.mat;
  for (int n = 0; n < d - 1; ++n)
    CHECK(std::abs(comm(n, n) - cxd(1.0)) < 1e-14);
  CHECK(comm(d - 1, d - 1).real() == doctest::Approx(-(d - 1.0)));
}

TEST_CASE("fock states") {
  auto v = fock_state(0, FockSpace::single(3));
  CHECK(v.mat()(0, 0) == cxd(1.0));
  CHECK(v.mat()(1, 1) == cxd(0.0));
  auto f2 = fock_state(2, FockSpace::single(3));
  CHECK(f2.mat()(2, 2) == cxd(1.0));
  CHECK(von_neumann_entropy(f2) == doctest::Approx(0.0).epsilon(1e-12));
  CHECK_THROWS_AS(fock_state(3, FockSpace::single(3)), DomainError);
}

TEST_CASE("thermal state weights, tail failure, and mean energy") {
  auto vac = thermal_state(0.0, FockSpace::single(4));
  CHECK(vac.mat()(0, 0) == cxd(1.0));

  const int d = 64;
  double tail = -1.0;
  auto om = thermal_state(1.0, FockSpace::single(d), {}, &tail);
  CHECK(tail == doctest::Approx(std::pow(0.5, d)).epsilon(1e-10));
  double mass = 1.0 - tail;
  for (int n = 0; n < 8; ++n)
    CHECK(om.mat()(n, n).real() ==
          doctest::Approx(std::pow(0.5, n + 1) / mass).epsilon(1e-14));

  CHECK_THROWS_AS(thermal_state(1.0, FockSpace::single(3)), TruncationError);
  CHECK_THROWS_AS(thermal_state(-0.5, FockSpace::single(3)), DomainError);

  // Tr[N rho] recovers E once the tail is negligible
  const int dm = 40;
  auto om2 = thermal_state(1.0, FockSpace::single(dm));
  auto n_op = number_operator(FockSpace::single(dm));
  CHECK(expectation(n_op, om2) == doctest::Approx(1.0).epsilon(1e-6));
  CHECK(expectation(n_op, om2) ==
        doctest::Approx(oracle::geometric_mean_series(1.0, dm)).epsilon(1e-12));
}

TEST_CASE("displacement operator") {
  FockSpace s = FockSpace::single(16);
  auto id = displacement(cxd(0.0, 0.0), s);
  CHECK((id.mat - Mat::Identity(16, 16)).cwiseAbs().maxCoeff() < 1e-14);

  for (cxd z : {cxd(0.5, 0.0), cxd(0.3, -0.8), cxd(0.0, 1.0)}) {
    double defect = -1.0;
    auto d = displacement(z, s, {}, &defect);
    CHECK(defect < 1e-8);
    // overlap <0|D(z)|0> = exp(-|z|^2/2)
    CHECK(std::abs(d.mat(0, 0) - std::exp(-0.5 * std::norm(z))) < 1e-8);
    // D(z) D(-z) = I on the interior of the block, within a tolerance set by
    // the mass the projection removes from the interior columns
    auto dm = displacement(-z, s);
    Mat prod = d.mat * dm.mat;
    double col_leak = 0.0;
    for (int n = 0; n < 8; ++n)
      col_leak = std::max(col_leak, 1.0 - dm.mat.col(n).squaredNorm());
    double worst = 0.0;
    for (int i = 0; i < 8; ++i)
      for (int j = 0; j < 8; ++j)
        worst = std::max(worst,
                         std::abs(prod(i, j) - (i == j ? cxd(1.0) : cxd(0.0))));
    CHECK(worst <= 5.0 * col_leak + 1e-9);
  }
}

TEST_CASE("tensor products") {
  auto va = thermal_state(0.4, FockSpace::single(24));
  auto vb = thermal_state(0.7, FockSpace::single(20));
  auto joint = tensor(va, vb);
  CHECK(joint.space().mode_dims == std::vector<int>({24, 20}));
  CHECK(joint.mat().trace().real() == doctest::Approx(1.0).epsilon(1e-12));

  auto vac2 = tensor(vacuum_state(FockSpace::single(3)),
                     vacuum_state(FockSpace::single(3)));
  CHECK(vac2.mat()(0, 0) == cxd(1.0));
  CHECK(vac2.mat().cwiseAbs().sum() == doctest::Approx(1.0));

  // (a x I)(I x b) = a x b by direct multiplication
  auto a = ladder(FockSpace::single(4));
  auto b = ladder(FockSpace::single(3));
  Mat lhs = tensor(a, identity_operator(FockSpace::single(3))).mat *
            tensor(identity_operator(FockSpace::single(4)), b).mat;
  Mat rhs = tensor(a, b).mat;
  CHECK((lhs - rhs).cwiseAbs().maxCoeff() < 1e-14);
}

TEST_CASE("partial trace") {
  auto ra = thermal_state(0.6, FockSpace::single(16));
  auto rb = thermal_state(1.1, FockSpace::single(24));
  auto joint = tensor(ra, rb);
  auto red = partial_trace(joint, {0});
  CHECK((red.mat() - ra.mat()).cwiseAbs().maxCoeff() < 1e-12);

  // maximally correlated diagonal state, traced by hand
  Mat corr = Mat::Zero(4, 4);
  corr(0, 0) = 0.5;
  corr(3, 3) = 0.5;
  DensityMatrix rc(FockSpace({2, 2}), corr);
  auto first = partial_trace(rc, {0});
  CHECK(first.mat()(0, 0).real() == doctest::Approx(0.5));
  CHECK(first.mat()(1, 1).real() == doctest::Approx(0.5));

  CHECK_THROWS_AS(partial_trace(rc, {}), DomainError);

  // Tr[X_A rho_A] = Tr[(X_A x I) rho_AB] on random instances
  Rng rng(21);
  for (int trial = 0; trial < 20; ++trial) {
    auto rho = random_state(FockSpace({3, 4}), 6, rng);
    Mat g(3, 3);
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) g(i, j) = cxd(rng.normal(), rng.normal());
    LinearOperator x(FockSpace::single(3), Mat(0.5 * (g + g.adjoint())));
    auto lifted = tensor(x, identity_operator(FockSpace::single(4)));
    double lhs = expectation(x, partial_trace(rho, {0}));
    double rhs = expectation(lifted, rho);
    CHECK(lhs == doctest::Approx(rhs).epsilon(1e-10));
  }
}

TEST_CASE("expectation rejects non-Hermitian observables") {
  auto rho = vacuum_state(FockSpace::single(3));
  auto a = ladder(FockSpace::single(3));
  CHECK_THROWS_AS(expectation(a, rho), DomainError);
  CHECK(expectation(number_operator(FockSpace::single(3)), rho) ==
        doctest::Approx(0.0));
  auto f2 = fock_state(2, FockSpace::single(4));
  CHECK(expectation(number_operator(FockSpace::single(4)), f2) ==
        doctest::Approx(2.0));
}

TEST_CASE("embed and project are mode-aware inverses") {
  Rng rng(4);
  auto rho = random_state(FockSpace({3, 2}), 4, rng);
  FockSpace big({5, 4});
  Mat emb = embed_matrix(rho.mat(), rho.space(), big);
  CHECK(emb.trace().real() == doctest::Approx(1.0).epsilon(1e-12));
  Mat back = project_matrix(emb, big, rho.space());
  CHECK((back - rho.mat()).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("constructor invariants: hermitian, psd, unit trace") {
  for (const auto& rho :
       {thermal_state(0.8, FockSpace::single(48)),
        fock_state(3, FockSpace::single(6)),
        tensor(thermal_state(0.5, FockSpace::single(36)),
               fock_state(1, FockSpace::single(4)))}) {
    CHECK(hermiticity_defect(rho.mat()) <= 1e-10);
    CHECK(std::abs(rho.mat().trace().real() - 1.0) <= 1e-10);
    CHECK_NOTHROW(rho.validate_psd());
  }
}

TEST_SUITE_END();
