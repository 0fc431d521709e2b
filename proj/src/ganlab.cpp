#include "tsgda/ganlab.hpp"

#include "tsgda/errors.hpp"
#include "tsgda/timescale.hpp"

#include <cmath>

namespace tsgda {

Mat regularized_jacobian(const JacobianBlocks& b, const Mat& reg_d22, double tau, double mu) {
  if (!(tau > 0.0)) throw InvalidArgument("regularized_jacobian: tau must be positive");
  if (!(mu >= 0.0)) throw InvalidArgument("regularized_jacobian: mu must be nonnegative");
  if (reg_d22.rows() != b.n2() || reg_d22.cols() != b.n2())
    throw InvalidArgument("regularized_jacobian: penalty Hessian has the wrong shape");
  const int n1 = b.n1(), n2 = b.n2();
  Mat j(n1 + n2, n1 + n2);
  j << b.d11, b.d12, -tau * b.d12.transpose(), tau * (-b.d22 + mu * reg_d22);
  return j;
}

Spectrum dirac_spectrum(double mu, double tau, double ell_prime0) {
  if (!(mu >= 0.0) || !(tau > 0.0)) throw InvalidArgument("dirac_spectrum: need mu >= 0 and tau > 0");
  const Complex disc = std::sqrt(Complex(tau * tau * mu * mu - 4.0 * tau * ell_prime0 * ell_prime0, 0.0));
  return Spectrum{{0.5 * (tau * mu + disc), 0.5 * (tau * mu - disc)}};
}

JacobianBlocks dirac_unregularized_blocks() {
  return JacobianBlocks(Mat::Zero(1, 1), Mat::Constant(1, 1, kEllPrime0), Mat::Zero(1, 1));
}

Mat dirac_penalty_hessian() { return Mat::Identity(1, 1); }

ZeroSumGame dirac_gan_game(const DiracGanSpec& spec) {
  if (spec.variant != DiracGanSpec::Variant::saturating)
    throw InvalidArgument("dirac_gan_game: the non-saturating variant is general-sum");
  GameParams p;
  p.mu = spec.mu;
  return builtin("dirac_gan", p);
}

namespace {

double sigmoid(double t) { return 1.0 / (1.0 + std::exp(-t)); }
double ell_d1(double t) { return sigmoid(-t); }
double ell_d2(double t) { return -sigmoid(t) * sigmoid(-t); }

}  // namespace

Vec dirac_nonsaturating_field(double mu, const Vec& x) {
  if (x.size() != 2) throw InvalidArgument("dirac_nonsaturating_field: x must be (theta, w)");
  const double t = x(0), w = x(1);
  Vec g(2);
  g << ell_d1(-t * w) * w, -ell_d1(t * w) * t + mu * w;
  return g;
}

Mat dirac_nonsaturating_jacobian(double mu, double tau, const Vec& x) {
  if (x.size() != 2) throw InvalidArgument("dirac_nonsaturating_jacobian: x must be (theta, w)");
  if (!(tau > 0.0)) throw InvalidArgument("dirac_nonsaturating_jacobian: tau must be positive");
  const double t = x(0), w = x(1);
  const double a1 = ell_d1(-t * w), a2 = ell_d2(-t * w);
  const double b1 = ell_d1(t * w), b2 = ell_d2(t * w);
  Mat j(2, 2);
  j << -a2 * w * w, a1 - a2 * t * w,
       tau * (-b1 - b2 * t * w), tau * (-b2 * t * t + mu);
  return j;
}

ZeroSumGame cov_gan_game(const CovGanSpec& spec) {
  GameParams p;
  p.d = spec.d;
  p.sigma = spec.sigma;
  p.mu = spec.mu;
  return builtin("covariance_gan", p);
}

Spectrum cov_gan_d1_spectrum(double sigma, double mu, double tau) {
  if (!(tau > 0.0)) throw InvalidArgument("cov_gan_d1_spectrum: tau must be positive");
  const Complex disc = std::sqrt(Complex(tau * tau * mu * mu - 16.0 * tau * sigma * sigma, 0.0));
  return Spectrum{{0.5 * (tau * mu + disc), 0.5 * (tau * mu - disc)}};
}

RealizableReport realizable_check(const JacobianBlocks& b, const Mat& reg_d22, double mu, double tol) {
  if (!(mu >= 0.0)) throw InvalidArgument("realizable_check: mu must be nonnegative");
  if (reg_d22.rows() != b.n2() || reg_d22.cols() != b.n2())
    throw InvalidArgument("realizable_check: penalty Hessian has the wrong shape");
  RealizableReport r;
  r.d11_norm = b.d11.norm();
  Eigen::FullPivLU<Mat> lu(b.d12);
  lu.setThreshold(tol);
  r.d12_rank = static_cast<int>(lu.rank());
  const Mat c = -b.d22 + mu * reg_d22;
  r.lambda_min_c = min_sym_eig(c);
  r.d11_zero = r.d11_norm <= tol;
  r.d12_full_rank = r.d12_rank == std::min(b.n1(), b.n2());
  r.c_positive = r.lambda_min_c > tol * scale_of(c);
  r.dse_by_theorem = r.d11_zero && r.d12_full_rank && r.c_positive;
  return r;
}

}  // namespace tsgda
