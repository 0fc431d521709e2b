#pragma once

#include "tsgda/game.hpp"

namespace tsgda {

// The loss is fixed to l(t) = -log(1 + e^{-t}), so l'(0) = 1/2 and l''(0) = -1/4.
inline constexpr double kEllPrime0 = 0.5;
inline constexpr double kEllSecond0 = -0.25;

struct DiracGanSpec {
  enum class Variant { saturating, non_saturating };
  double mu = 1.0;
  Variant variant = Variant::saturating;
  double ell_prime0 = kEllPrime0;
};

struct CovGanSpec {
  int d = 1;
  Mat sigma;  // defaults to the identity
  double mu = 1.0;
};

// [d11, d12; -tau d12^T, tau(-d22 + mu reg_d22)].
Mat regularized_jacobian(const JacobianBlocks& blocks, const Mat& reg_d22, double tau, double mu);

// {(tau mu +- sqrt(tau^2 mu^2 - 4 tau l'(0)^2)) / 2}.
Spectrum dirac_spectrum(double mu, double tau, double ell_prime0 = kEllPrime0);

// Blocks of the unregularized Dirac-GAN cost l(theta w) + l(0) at the origin,
// and the Hessian of the penalty w^2 / 2 in the discriminator variable.
JacobianBlocks dirac_unregularized_blocks();
Mat dirac_penalty_hessian();

// Regularized saturating game; identical to builtin("dirac_gan").
ZeroSumGame dirac_gan_game(const DiracGanSpec& spec);

// Non-saturating variant: player 1 minimizes -l(-theta w) + l(0) - (mu/2) w^2,
// player 2 minimizes -l(theta w) - l(0) + (mu/2) w^2. It is general-sum, so it
// is exposed as a vector field and its Jacobian rather than a ZeroSumGame.
Vec dirac_nonsaturating_field(double mu, const Vec& x);
Mat dirac_nonsaturating_jacobian(double mu, double tau, const Vec& x);

ZeroSumGame cov_gan_game(const CovGanSpec& spec);

// d = 1 closed form {(tau mu +- sqrt(tau^2 mu^2 - 16 tau sigma^2)) / 2}.
Spectrum cov_gan_d1_spectrum(double sigma, double mu, double tau);

struct RealizableReport {
  double d11_norm = 0.0;
  int d12_rank = 0;
  double lambda_min_c = 0.0;  // lambda_min(-d22 + mu reg_d22)
  bool d11_zero = false;
  bool d12_full_rank = false;
  bool c_positive = false;
  bool dse_by_theorem = false;
};

RealizableReport realizable_check(const JacobianBlocks& blocks, const Mat& reg_d22, double mu, double tol = 1e-8);

}  // namespace tsgda
