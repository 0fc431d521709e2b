#pragma once

#include "tsgda/game.hpp"

#include <cstdint>
#include <functional>
#include <limits>
#include <optional>

namespace tsgda {

struct RateReport {
  double gamma = 0.0;
  Complex lambda_m;
  double alpha = 0.0;
  double gamma1 = 0.0;
  double beta = 0.0;
  double rate_base = 0.0;
  // |1 - gamma1 lambda_m|^2 - (1 - alpha/beta); should vanish.
  double identity_residual = 0.0;
};

struct LearningRateBound {
  double gamma = 0.0;
  Complex lambda_m;
};

// gamma = min 2 Re(l) / |l|^2 over the spectrum of J_tau.
LearningRateBound learning_rate_bound(const Spectrum& spectrum);

RateReport rate_params(double gamma, Complex lambda_m, double alpha);

// Default alpha = gamma / 2.
RateReport rate_report(const Spectrum& spectrum, std::optional<double> alpha = std::nullopt);

// ceil((4 beta / alpha) log(r0 / eps)); 0 when r0 <= eps.
long long iteration_bound(double beta, double alpha, double r0, double eps);

// delta = alpha / (4 L beta) with L probed inside a ball of probe_radius.
// Returns +inf when the Jacobian is constant on the probes.
double neighborhood_estimate(const std::function<JacobianBlocks(const Vec&)>& blocks_at, const Vec& x_star,
                             double tau, double alpha, double beta, double probe_radius, int probes = 200,
                             std::uint64_t seed = 0);

// Largest |1 - gamma1 l| over the spectrum: the true one-step contraction of
// linearized tau-GDA in the eigenbasis.
double spectral_contraction(const Spectrum& spectrum, double gamma1);

}  // namespace tsgda
