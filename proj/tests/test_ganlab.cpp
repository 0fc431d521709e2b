#include "support.hpp"

#include "tsgda/classify.hpp"
#include "tsgda/errors.hpp"
#include "tsgda/ganlab.hpp"
#include "tsgda/simulate.hpp"
#include "tsgda/timescale.hpp"

#include <doctest.h>

#include <algorithm>
#include <cmath>

using namespace tsgda;
using namespace testing;

TEST_CASE("regularized Jacobian") {
  std::mt19937_64 rng(51);
  const JacobianBlocks b = random_dse(rng, 3, 2);
  CHECK((regularized_jacobian(b, Mat::Identity(2, 2), 2.5, 0.0) - assemble_j_tau(b, 2.5)).norm() == 0.0);
  Mat expect(2, 2);
  expect << 0.0, 0.5, -1.5, 3.0 * 0.8;
  CHECK((regularized_jacobian(dirac_unregularized_blocks(), dirac_penalty_hessian(), 3.0, 0.8) - expect).norm() <
        1e-15);
  CHECK_THROWS_AS(regularized_jacobian(b, Mat::Identity(3, 3), 1.0, 1.0), InvalidArgument);
  CHECK_THROWS_AS(regularized_jacobian(b, Mat::Identity(2, 2), 1.0, -1.0), InvalidArgument);
}

TEST_CASE("realizable structure is stable for every tau and mu") {
  std::mt19937_64 rng(52);
  for (int trial = 0; trial < 20; ++trial) {
    const int n1 = 1 + trial % 3, n2 = n1 + (trial / 3) % 3;
    const JacobianBlocks b(Mat::Zero(n1, n1), random_mat(rng, n1, n2), -random_spd(rng, n2, 0.1, 2.0));
    const RealizableReport rr = realizable_check(b, Mat::Identity(n2, n2), 0.1);
    CHECK(rr.dse_by_theorem);
    for (double tau : {0.1, 1.0, 10.0})
      for (double mu : {0.1, 1.0, 10.0}) {
        const Spectrum s = eig(regularized_jacobian(b, Mat::Identity(n2, n2), tau, mu));
        for (const Complex& z : s.values) CHECK(z.real() > 0.0);
      }
  }
  // With n2 < n1 the structure checks pass but d12^T has a kernel.
  const JacobianBlocks wide(Mat::Zero(3, 3), random_mat(rng, 3, 1), -Mat::Identity(1, 1));
  CHECK(realizable_check(wide, Mat::Identity(1, 1), 1.0).dse_by_theorem);
  double smallest = INFINITY;
  for (const Complex& z : eig(regularized_jacobian(wide, Mat::Identity(1, 1), 1.0, 1.0)).values)
    smallest = std::min(smallest, std::abs(z.real()));
  CHECK(smallest < 1e-8);
}

TEST_CASE("Dirac-GAN spectrum") {
  const Spectrum s = dirac_spectrum(1.0, 1.0);
  CHECK(multiset_distance(s.values, {Complex(0.5, 0.0), Complex(0.5, 0.0)}) < 1e-12);
  const Spectrum c = dirac_spectrum(0.5, 1.0);
  CHECK(multiset_distance(c.values, {Complex(0.25, std::sqrt(0.1875)), Complex(0.25, -std::sqrt(0.1875))}) <
        1e-12);
  for (double mu : {0.1, 0.5, 1.0, 3.0})
    for (double tau : {0.1, 1.0, 4.0, 30.0}) {
      const Mat j = regularized_jacobian(dirac_unregularized_blocks(), dirac_penalty_hessian(), tau, mu);
      const std::vector<Complex> oracle = eig2(j(0, 0), j(0, 1), j(1, 0), j(1, 1));
      CHECK(multiset_distance(dirac_spectrum(mu, tau).values, oracle) < 1e-9 * (1.0 + tau * mu));
      const ZeroSumGame g = dirac_gan_game({mu});
      const Mat jg = assemble_j_tau(g.blocks(Vec::Zero(2)), tau);
      CHECK((jg - j).norm() < 1e-12);
    }
  CHECK_THROWS_AS(dirac_spectrum(-1.0, 1.0), InvalidArgument);
  CHECK_THROWS_AS(dirac_gan_game({1.0, DiracGanSpec::Variant::non_saturating}), InvalidArgument);
}

TEST_CASE("non-saturating Dirac-GAN") {
  for (double mu : {0.3, 1.0})
    for (double tau : {0.5, 2.0}) {
      const Mat sat = regularized_jacobian(dirac_unregularized_blocks(), dirac_penalty_hessian(), tau, mu);
      CHECK((dirac_nonsaturating_jacobian(mu, tau, Vec::Zero(2)) - sat).norm() < 1e-15);
    }
  CHECK(dirac_nonsaturating_field(1.0, Vec::Zero(2)).norm() == 0.0);
  // Finite-difference check of the Jacobian of the scaled field.
  const Vec x = Eigen::Vector2d(0.4, -0.7);
  const double tau = 1.7, mu = 0.6, h = 1e-6;
  Mat fd(2, 2);
  for (int k = 0; k < 2; ++k) {
    Vec e = Vec::Zero(2);
    e(k) = h;
    Vec col = (dirac_nonsaturating_field(mu, x + e) - dirac_nonsaturating_field(mu, x - e)) / (2 * h);
    col(1) *= tau;
    fd.col(k) = col;
  }
  CHECK((dirac_nonsaturating_jacobian(mu, tau, x) - fd).norm() < 1e-7);
}

TEST_CASE("covariance GAN, d = 1") {
  CovGanSpec spec;
  spec.sigma = Mat::Constant(1, 1, 4.0);
  spec.mu = 0.7;
  const ZeroSumGame g = cov_gan_game(spec);
  for (double v : {2.0, -2.0}) {
    const Vec x = Eigen::Vector2d(v, 0.0);
    CHECK(g.grad(x).norm() < 1e-14);
    const JacobianBlocks b = g.blocks(x);
    CHECK(classify_point(b).is_dse());
    for (double tau : {0.5, 3.0, 40.0}) {
      const Spectrum s = eig(assemble_j_tau(b, tau));
      CHECK(multiset_distance(s.values, cov_gan_d1_spectrum(2.0, 0.7, tau).values) < 1e-9 * (1.0 + tau));
    }
  }
  // Gradient against central differences of the cost.
  std::mt19937_64 rng(53);
  CovGanSpec s2;
  s2.d = 2;
  s2.sigma = random_spd(rng, 2, 0.5, 2.0);
  s2.mu = 1.3;
  const ZeroSumGame g2 = cov_gan_game(s2);
  for (int k = 0; k < 10; ++k) {
    const Vec x = random_mat(rng, 8, 1);
    Vec fd(8);
    for (int i = 0; i < 8; ++i) {
      Vec e = Vec::Zero(8);
      e(i) = 1e-5;
      fd(i) = (g2.cost(x + e) - g2.cost(x - e)) / 2e-5;
    }
    fd.tail(4) *= -1.0;
    CHECK((g2.grad(x) - fd).norm() < 1e-6 * (1.0 + fd.norm()));
  }
}

TEST_CASE("covariance GAN recovers the target covariance") {
  std::mt19937_64 rng(54);
  for (int d : {1, 5}) {
    CovGanSpec spec;
    spec.d = d;
    spec.sigma = random_spd(rng, d, 0.5, 2.0);
    spec.mu = 1.0;
    const ZeroSumGame g = cov_gan_game(spec);
    const int m = d * d;
    Vec x0 = Vec::Zero(2 * m);
    const Mat v0 = Mat(spec.sigma.llt().matrixL()) + 0.2 * random_mat(rng, d, d);
    x0.head(m) = vec(v0);
    const TrajectoryRecord r = run_gda(g, x0, 1e-3, 5.0, 200000);
    const Mat v = unvec(r.final_x.head(m), d, d);
    CHECK((v * v.transpose() - spec.sigma).norm() < 1e-2);
  }
}

TEST_CASE("realizable check cases") {
  const RealizableReport dirac = realizable_check(dirac_unregularized_blocks(), dirac_penalty_hessian(), 1.0);
  CHECK(dirac.d11_zero);
  CHECK(dirac.d12_rank == 1);
  CHECK(dirac.lambda_min_c == doctest::Approx(1.0));
  CHECK(dirac.dse_by_theorem);
  const RealizableReport unreg = realizable_check(dirac_unregularized_blocks(), dirac_penalty_hessian(), 0.0);
  CHECK(!unreg.c_positive);
  CHECK(!unreg.dse_by_theorem);
  const JacobianBlocks rank_deficient(Mat::Zero(2, 2), Mat::Ones(2, 2), -Mat::Identity(2, 2));
  CHECK(!realizable_check(rank_deficient, Mat::Identity(2, 2), 1.0).d12_full_rank);
  const JacobianBlocks curved(Mat::Identity(1, 1), Mat::Ones(1, 1), -Mat::Identity(1, 1));
  CHECK(!realizable_check(curved, Mat::Identity(1, 1), 1.0).d11_zero);
  CHECK_THROWS_AS(realizable_check(curved, Mat::Identity(2, 2), 1.0), InvalidArgument);
}
