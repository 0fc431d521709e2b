#include "tsgda/simulate.hpp"

#include "tsgda/errors.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <random>
#include <thread>

namespace tsgda {

StepSchedule StepSchedule::constant(double gamma1) {
  StepSchedule s{Kind::constant, gamma1, 0.0};
  s.validate();
  return s;
}

StepSchedule StepSchedule::power(double gamma0, double p) {
  StepSchedule s{Kind::power, gamma0, p};
  s.validate();
  return s;
}

void StepSchedule::validate() const {
  if (!(gamma0 > 0.0)) throw InvalidArgument("StepSchedule: step size must be positive");
  if (kind == Kind::power && !(p > 0.0 && p <= 1.0)) throw InvalidArgument("StepSchedule: need 0 < p <= 1");
}

double StepSchedule::at(long long k) const {
  if (kind == Kind::constant) return gamma0;
  return gamma0 / std::pow(static_cast<double>(k + 1), p);
}

namespace {

void scale_player2(Vec& v, int n1, double tau) { v.tail(v.size() - n1) *= tau; }

// Shared loop for the deterministic and stochastic updates.
TrajectoryRecord iterate(const ZeroSumGame& game, const Vec& x0, const StepSchedule& schedule, double tau,
                         const NoiseModel& noise, long long steps, const GdaOptions& opts) {
  if (x0.size() != game.dim()) throw InvalidArgument("simulate: x0 has the wrong dimension");
  if (!(tau > 0.0)) throw InvalidArgument("simulate: tau must be positive");
  if (steps < 0) throw InvalidArgument("simulate: steps must be nonnegative");
  if (opts.stride < 1) throw InvalidArgument("simulate: stride must be >= 1");
  schedule.validate();
  for (double b : opts.ema_betas)
    if (!(b > 0.0 && b <= 1.0)) throw InvalidArgument("simulate: EMA beta must lie in (0, 1]");

  const int n = game.dim();
  Vec sig = Vec::Zero(n);
  bool noisy = false;
  if (!noise.sigma.empty()) {
    if (noise.sigma.size() != 1 && static_cast<int>(noise.sigma.size()) != n)
      throw InvalidArgument("simulate: sigma must have 1 or n entries");
    for (int i = 0; i < n; ++i) {
      sig(i) = noise.sigma.size() == 1 ? noise.sigma[0] : noise.sigma[i];
      if (!(sig(i) >= 0.0)) throw InvalidArgument("simulate: sigma must be nonnegative");
      noisy = noisy || sig(i) > 0.0;
    }
  }
  std::mt19937_64 rng(noise.seed);
  std::normal_distribution<double> normal;

  TrajectoryRecord rec;
  rec.ema_betas = opts.ema_betas;
  rec.ema.resize(opts.ema_betas.size());
  Vec x = x0;
  game.wrap(x);
  std::vector<Vec> ema(opts.ema_betas.size(), x);

  auto record = [&](long long k, double gn) {
    rec.step.push_back(k);
    rec.iterates.push_back(x);
    rec.grad_norm.push_back(gn);
    if (opts.ref) rec.distance.push_back(game.distance(x, *opts.ref));
    for (std::size_t b = 0; b < ema.size(); ++b) rec.ema[b].push_back(ema[b]);
  };

  for (long long k = 0;; ++k) {
    Vec g = game.grad(x);
    const double gn = g.norm();
    const bool finite = x.allFinite() && std::isfinite(gn);
    if (!finite) {
      rec.diverged = true;
      rec.steps_run = k;
      break;
    }
    const double stop = opts.stop_tol ? *opts.stop_tol : 1e-8 * (1.0 + x.norm());
    const bool done = opts.early_stop && gn <= stop;
    if (done || k == steps || k % opts.stride == 0) record(k, gn);
    if (done) {
      rec.converged = true;
      rec.converged_step = k;
      rec.steps_run = k;
      break;
    }
    if (k == steps) {
      rec.steps_run = k;
      break;
    }
    scale_player2(g, game.n1(), tau);
    if (noisy)
      for (int i = 0; i < n; ++i) g(i) += sig(i) * normal(rng);
    x -= schedule.at(k) * g;
    game.wrap(x);
    for (std::size_t b = 0; b < ema.size(); ++b) {
      const double beta = opts.ema_betas[b];
      ema[b] = beta * x + (1.0 - beta) * ema[b];
    }
  }
  rec.final_x = x;
  return rec;
}

}  // namespace

TrajectoryRecord run_gda(const ZeroSumGame& game, const Vec& x0, double gamma1, double tau, long long steps,
                         const GdaOptions& opts) {
  return iterate(game, x0, StepSchedule::constant(gamma1), tau, NoiseModel::none(), steps, opts);
}

TrajectoryRecord run_sgda(const ZeroSumGame& game, const Vec& x0, const StepSchedule& schedule, double tau,
                          const NoiseModel& noise, long long steps, const GdaOptions& opts) {
  return iterate(game, x0, schedule, tau, noise, steps, opts);
}

std::vector<Vec> grid_points(const std::vector<GridAxis>& axes) {
  if (axes.empty()) throw InvalidArgument("grid_points: no axes");
  for (const auto& a : axes)
    if (a.n < 1 || !(a.hi > a.lo)) throw InvalidArgument("grid_points: bad axis");
  const int d = static_cast<int>(axes.size());
  std::vector<Vec> pts;
  std::vector<int> idx(d, 0);
  while (true) {
    Vec x(d);
    for (int i = 0; i < d; ++i) x(i) = axes[i].lo + (idx[i] + 0.5) * (axes[i].hi - axes[i].lo) / axes[i].n;
    pts.push_back(x);
    int k = d - 1;
    while (k >= 0 && ++idx[k] == axes[k].n) idx[k--] = 0;
    if (k < 0) break;
  }
  return pts;
}

int RoaGrid::unresolved_count() const {
  return static_cast<int>(std::count(labels.begin(), labels.end(), kUnresolved));
}

RoaGrid roa_scan(const ZeroSumGame& game, const std::vector<GridAxis>& axes, double tau, double gamma1,
                 long long steps, const std::vector<Vec>& equilibria, double match_tol, int threads) {
  if (static_cast<int>(axes.size()) != game.dim()) throw InvalidArgument("roa_scan: one axis per coordinate");
  RoaGrid out;
  out.axes = axes;
  out.starts = grid_points(axes);
  const std::size_t cells = out.starts.size();
  out.labels.assign(cells, RoaGrid::kUnresolved);
  out.steps_used.assign(cells, 0);

  auto run_cell = [&](std::size_t c) {
    GdaOptions opts;
    opts.stride = steps + 1;
    const TrajectoryRecord r = run_gda(game, out.starts[c], gamma1, tau, steps, opts);
    out.steps_used[c] = r.steps_run;
    if (r.diverged) return;
    for (std::size_t e = 0; e < equilibria.size(); ++e) {
      if (game.distance(r.final_x, equilibria[e]) <= match_tol) {
        out.labels[c] = static_cast<int>(e);
        return;
      }
    }
  };

  int nt = threads > 0 ? threads : static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
  nt = static_cast<int>(std::min<std::size_t>(nt, cells));
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> pool;
  for (int t = 0; t < nt; ++t)
    pool.emplace_back([&] {
      for (std::size_t c = next++; c < cells; c = next++) run_cell(c);
    });
  for (auto& th : pool) th.join();
  return out;
}

std::vector<FieldSample> vector_field(const ZeroSumGame& game, const std::vector<Vec>& nodes, double tau) {
  if (nodes.empty()) throw InvalidArgument("vector_field: no nodes");
  if (!(tau > 0.0)) throw InvalidArgument("vector_field: tau must be positive");
  std::vector<FieldSample> out;
  out.reserve(nodes.size());
  for (const Vec& x : nodes) {
    Vec f = -game.grad(x);
    scale_player2(f, game.n1(), tau);
    out.push_back({x, f, f.norm()});
  }
  return out;
}

}  // namespace tsgda
