#pragma once

#include "tsgda/game.hpp"

#include <cstdint>
#include <optional>
#include <vector>

namespace tsgda {

struct StepSchedule {
  enum class Kind { constant, power };
  Kind kind = Kind::constant;
  double gamma0 = 0.0;
  double p = 1.0;

  static StepSchedule constant(double gamma1);
  // gamma_k = gamma0 / (k + 1)^p, 0 < p <= 1.
  static StepSchedule power(double gamma0, double p);
  void validate() const;
  double at(long long k) const;
};

struct NoiseModel {
  // Per-coordinate standard deviations; a single entry applies to all coordinates.
  std::vector<double> sigma;
  std::uint64_t seed = 0;

  static NoiseModel none() { return {}; }
  static NoiseModel gaussian(double s, std::uint64_t seed) { return {{s}, seed}; }
};

struct TrajectoryRecord {
  std::vector<long long> step;
  std::vector<Vec> iterates;
  std::vector<double> grad_norm;
  std::vector<double> distance;  // empty when no reference point was given
  std::vector<double> ema_betas;
  std::vector<std::vector<Vec>> ema;  // ema[b][row]
  bool converged = false;
  long long converged_step = -1;
  bool diverged = false;
  long long steps_run = 0;
  Vec final_x;
};

struct GdaOptions {
  std::vector<double> ema_betas;
  std::optional<Vec> ref;
  // Absolute stopping threshold on |g|; default 1e-8 (1 + |x_k|).
  std::optional<double> stop_tol;
  bool early_stop = true;
  long long stride = 1;
};

// x_{k+1} = x_k - gamma1 Lambda_tau g(x_k).
TrajectoryRecord run_gda(const ZeroSumGame& game, const Vec& x0, double gamma1, double tau, long long steps,
                         const GdaOptions& opts = {});

// x_{k+1} = x_k - gamma_k (Lambda_tau g(x_k) + w_{k+1}).
TrajectoryRecord run_sgda(const ZeroSumGame& game, const Vec& x0, const StepSchedule& schedule, double tau,
                          const NoiseModel& noise, long long steps, const GdaOptions& opts = {});

struct GridAxis {
  double lo = 0.0;
  double hi = 1.0;
  int n = 1;
};

// Cell centres lo + (i + 1/2)(hi - lo)/n per axis; the first axis varies slowest.
std::vector<Vec> grid_points(const std::vector<GridAxis>& axes);

struct RoaGrid {
  static constexpr int kUnresolved = -1;
  std::vector<GridAxis> axes;
  std::vector<Vec> starts;
  std::vector<int> labels;
  std::vector<long long> steps_used;

  int unresolved_count() const;
};

RoaGrid roa_scan(const ZeroSumGame& game, const std::vector<GridAxis>& axes, double tau, double gamma1,
                 long long steps, const std::vector<Vec>& equilibria, double match_tol, int threads = 0);

struct FieldSample {
  Vec x;
  Vec field;  // -Lambda_tau g(x)
  double magnitude = 0.0;
};

std::vector<FieldSample> vector_field(const ZeroSumGame& game, const std::vector<Vec>& nodes, double tau);

}  // namespace tsgda
