#include "tsgda/converge.hpp"

#include "tsgda/errors.hpp"
#include "tsgda/timescale.hpp"

#include <cmath>
#include <random>

namespace tsgda {

LearningRateBound learning_rate_bound(const Spectrum& s) {
  if (s.size() == 0) throw InvalidArgument("learning_rate_bound: empty spectrum");
  LearningRateBound out;
  out.gamma = std::numeric_limits<double>::infinity();
  for (const auto& z : s.values) {
    if (!(z.real() > 0.0)) throw PreconditionError("learning_rate_bound: spectrum not in the open right half-plane");
    const double v = 2.0 * z.real() / std::norm(z);
    // Ties: smaller |l| first, then lexicographic (Re, Im).
    bool better = v < out.gamma;
    if (v == out.gamma) {
      const Complex& m = out.lambda_m;
      if (std::abs(z) != std::abs(m))
        better = std::abs(z) < std::abs(m);
      else
        better = z.real() < m.real() || (z.real() == m.real() && z.imag() < m.imag());
    }
    if (better) {
      out.gamma = v;
      out.lambda_m = z;
    }
  }
  return out;
}

RateReport rate_params(double gamma, Complex lambda_m, double alpha) {
  if (!(alpha > 0.0 && alpha < gamma)) throw InvalidArgument("rate_params: need 0 < alpha < gamma");
  RateReport r;
  r.gamma = gamma;
  r.lambda_m = lambda_m;
  r.alpha = alpha;
  r.gamma1 = gamma - alpha;
  r.beta = 1.0 / (2.0 * lambda_m.real() - alpha * std::norm(lambda_m));
  r.rate_base = std::sqrt(1.0 - alpha / (4.0 * r.beta));
  r.identity_residual = std::norm(1.0 - r.gamma1 * lambda_m) - (1.0 - alpha / r.beta);
  if (!(r.beta > 0.0) || !(r.rate_base > 0.0 && r.rate_base < 1.0))
    throw NumericalError("rate_params: rate constants out of range");
  return r;
}

RateReport rate_report(const Spectrum& s, std::optional<double> alpha) {
  const LearningRateBound lb = learning_rate_bound(s);
  return rate_params(lb.gamma, lb.lambda_m, alpha.value_or(0.5 * lb.gamma));
}

long long iteration_bound(double beta, double alpha, double r0, double eps) {
  if (!(eps > 0.0)) throw InvalidArgument("iteration_bound: eps must be positive");
  if (!(alpha > 0.0) || !(beta > 0.0)) throw InvalidArgument("iteration_bound: alpha and beta must be positive");
  if (r0 <= eps) return 0;
  return static_cast<long long>(std::ceil(4.0 * beta / alpha * std::log(r0 / eps)));
}

double neighborhood_estimate(const std::function<JacobianBlocks(const Vec&)>& blocks_at, const Vec& x_star,
                             double tau, double alpha, double beta, double probe_radius, int probes,
                             std::uint64_t seed) {
  if (probes < 1) throw InvalidArgument("neighborhood_estimate: probes must be >= 1");
  const int n = static_cast<int>(x_star.size());
  const Mat j0 = assemble_j_tau(blocks_at(x_star), tau);
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal;
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  // Every probe direction is also evaluated at dyadic fractions of its radius
  // down to an absolute floor, so the probe set for 2r contains the set for r.
  constexpr double floor_radius = 1e-4;
  const int levels = probe_radius > floor_radius ? static_cast<int>(std::floor(std::log2(probe_radius / floor_radius))) : 0;
  double lip = 0.0;
  for (int k = 0; k < probes; ++k) {
    Vec u(n);
    for (int i = 0; i < n; ++i) u(i) = normal(rng);
    if (u.norm() == 0.0) continue;
    u *= std::pow(unif(rng), 1.0 / n) / u.norm();
    for (int lev = 0; lev <= levels; ++lev) {
      const Vec d = std::ldexp(probe_radius, -lev) * u;
      if (d.norm() == 0.0) continue;
      const Mat dj = assemble_j_tau(blocks_at(x_star + d), tau) - j0;
      const double op = Eigen::JacobiSVD<Mat>(dj).singularValues()(0);
      lip = std::max(lip, op / d.norm());
    }
  }
  if (lip <= 1e-12 * scale_of(j0)) return std::numeric_limits<double>::infinity();
  return alpha / (4.0 * lip * beta);
}

double spectral_contraction(const Spectrum& s, double gamma1) {
  double m = 0.0;
  for (const auto& z : s.values) m = std::max(m, std::abs(1.0 - gamma1 * z));
  return m;
}

}  // namespace tsgda
