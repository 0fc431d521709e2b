// Acceptance suite: one PASS/FAIL line per criterion.
// Usage: tsgda_acceptance [criterion...]; with no arguments every criterion runs.

#include "tsgda/classify.hpp"
#include "tsgda/converge.hpp"
#include "tsgda/errors.hpp"
#include "tsgda/game.hpp"
#include "tsgda/ganlab.hpp"
#include "tsgda/simulate.hpp"
#include "tsgda/timescale.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <map>
#include <numbers>
#include <random>
#include <sstream>
#include <string>
#include <vector>

using namespace tsgda;

namespace {

constexpr double kPi = std::numbers::pi;

struct Outcome {
  bool pass = false;
  std::string detail;
};

class Timer {
 public:
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  }

 private:
  std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

std::string fmt(double x, int prec = 6) {
  std::ostringstream os;
  os.precision(prec);
  os << x;
  return os.str();
}

Mat random_mat(std::mt19937_64& rng, int r, int c) {
  std::normal_distribution<double> n;
  Mat m(r, c);
  for (int i = 0; i < r; ++i)
    for (int j = 0; j < c; ++j) m(i, j) = n(rng);
  return m;
}

// Symmetric positive definite with eigenvalues in [lo, hi].
Mat random_spd(std::mt19937_64& rng, int n, double lo, double hi) {
  std::uniform_real_distribution<double> u(lo, hi);
  Eigen::HouseholderQR<Mat> qr(random_mat(rng, n, n));
  const Mat q = qr.householderQ();
  Vec d(n);
  for (int i = 0; i < n; ++i) d(i) = u(rng);
  return q * d.asDiagonal() * q.transpose();
}

// A DSE by construction: -d22 and S1 are positive definite, d11 is left free to be indefinite.
JacobianBlocks random_dse(std::mt19937_64& rng, int n1, int n2) {
  const Mat neg_d22 = random_spd(rng, n2, 0.2, 3.0);
  const Mat d12 = random_mat(rng, n1, n2);
  const Mat s1 = random_spd(rng, n1, 0.2, 3.0);
  const Mat d11 = s1 - d12 * neg_d22.inverse() * d12.transpose();
  return JacobianBlocks(d11, d12, -neg_d22);
}

JacobianBlocks blocks_at_origin(const ZeroSumGame& g) { return g.blocks(Vec::Zero(g.dim())); }

Outcome criterion1() {
  Timer t;
  bool ok = true;
  std::string d;
  for (double v : {1.0, 4.0, 10.0}) {
    GameParams p;
    p.v = v;
    const double ts = tau_star_eig(blocks_at_origin(builtin("quad_stack", p))).tau_star;
    ok = ok && std::abs(ts - 2.0) <= 1e-6;
    d += "v=" + fmt(v) + " tau*=" + fmt(ts, 12) + "; ";
  }
  const double s = t.seconds();
  ok = ok && s < 1.0;
  return {ok, d + "time " + fmt(s, 3) + " s"};
}

Outcome criterion2() {
  Timer t;
  const ZeroSumGame g = builtin("torus");
  const CriticalSearch cs = find_critical_points(g, seed_grid(2, -kPi, kPi, 9));
  double at00 = NAN, atpp = NAN;
  for (const auto& cp : cs.points) {
    if (!classify_point(cp.blocks).is_dse()) continue;
    const double ts = tau_star_eig(cp.blocks).tau_star;
    if (g.distance(cp.x, Vec::Zero(2)) < 1e-6) at00 = ts;
    if (g.distance(cp.x, Vec::Constant(2, kPi)) < 1e-6) atpp = ts;
  }
  const double s = t.seconds();
  const bool ok = std::abs(at00 - 0.74) <= 0.01 && std::abs(atpp - 1.35) <= 0.01 && s < 5.0;
  return {ok, "tau*(0,0)=" + fmt(at00) + " tau*(pi,pi)=" + fmt(atpp) + " points=" +
                  std::to_string(cs.points.size()) + " time " + fmt(s, 3) + " s"};
}

Outcome criterion3() {
  bool ok = true;
  std::string d;
  for (double eps : {0.1, 1.0, 10.0}) {
    GameParams p;
    p.eps = eps;
    const double ts = tau_star_eig(blocks_at_origin(builtin("jin_dse", p))).tau_star;
    ok = ok && std::abs(ts - 2.0 / eps) <= 1e-6;
    d += "eps=" + fmt(eps) + " tau*=" + fmt(ts, 12) + "; ";
  }
  return {ok, d};
}

Outcome criterion4() {
  Timer t;
  std::mt19937_64 rng(20240401);
  std::uniform_int_distribution<int> dim(1, 4);
  int bad = 0, positive = 0;
  double worst_gap = 0.0;
  for (int trial = 0; trial < 100; ++trial) {
    const JacobianBlocks b = random_dse(rng, dim(rng), dim(rng));
    const double ts = tau_star_eig(b, false).tau_star;
    const auto guard = tau_star_guard(b, std::max(1e3, 100.0 * ts));
    const double gap = std::abs(ts - guard.value_or(0.0));
    worst_gap = std::max(worst_gap, gap / (1.0 + ts));
    bool ok = gap <= 1e-4 * (1.0 + ts);
    ok = ok && stability_margin(b, ts > 0 ? 1.01 * ts : 1.0) < 0.0;
    if (ts > 0) {
      ++positive;
      const Mat nj = -assemble_j_tau(b, ts);
      ok = ok && min_pair_sum(eig(nj)) <= 1e-6 * scale_of(nj);
    }
    if (!ok) ++bad;
  }
  const double s = t.seconds();
  return {bad == 0 && s < 60.0, "failures=" + std::to_string(bad) + "/100, tau*>0 in " +
                                    std::to_string(positive) + ", worst relative gap " + fmt(worst_gap, 3) +
                                    ", time " + fmt(s, 3) + " s"};
}

Outcome criterion5() {
  std::mt19937_64 rng(77);
  std::uniform_int_distribution<int> dim(1, 4);
  int violations = 0;
  for (int trial = 0; trial < 50; ++trial) {
    const int n1 = dim(rng), n2 = dim(rng);
    const JacobianBlocks b(random_spd(rng, n1, 0.1, 3.0), random_mat(rng, n1, n2),
                           -random_spd(rng, n2, 0.1, 3.0));
    for (double tau : {1e-3, 1e-1, 1.0, 10.0, 1e3})
      if (!(stability_margin(b, tau) < 0.0)) ++violations;
  }
  return {violations == 0, "violations=" + std::to_string(violations) + " of 250"};
}

Outcome criterion6() {
  GameParams p;
  p.v = 5.0;
  const JacobianBlocks b = blocks_at_origin(builtin("quad_spurious", p));
  const TauZeroCertificate c = tau_zero(b);
  bool ok = std::isfinite(c.tau_zero) && c.tau_zero >= 2.0 - 1e-6;
  const std::vector<double> probes = {1.01 * c.tau_zero, 2.0 * c.tau_zero, 10.0 * c.tau_zero};
  std::string d = "tau0=" + fmt(c.tau_zero, 10) + " margins";
  for (double tau : probes) {
    const double m = stability_margin(b, tau);
    ok = ok && m > 0.0;
    d += " " + fmt(m, 4);
  }
  // Independent sweep for the stable -> unstable switch.
  double first_unstable = NAN;
  bool stable_before = true;
  for (double tau = 1.0; tau <= 3.0 + 1e-12; tau += 1e-3) {
    const bool unstable = stability_margin(b, tau) > 0.0;
    if (unstable && std::isnan(first_unstable)) first_unstable = tau;
    if (!unstable && !std::isnan(first_unstable)) stable_before = false;
  }
  ok = ok && stable_before && std::abs(first_unstable - 2.0) <= 0.01;
  return {ok, d + "; sweep switch at " + fmt(first_unstable)};
}

Outcome criterion7() {
  GameParams p;
  p.v = 4.0;
  const JacobianBlocks b = blocks_at_origin(builtin("quad_stack", p));
  const double tau = 1e4;
  const Spectrum full = eig(assemble_j_tau(b, tau));
  const Spectrum split = asymptotic_split(b, tau);
  const std::vector<int> perm = match_eigenvalues(split.values, full.values);
  double worst = 0.0;
  for (std::size_t k = 0; k < perm.size(); ++k)
    worst = std::max(worst, std::abs(full.values[perm[k]] - split.values[k]) / std::abs(split.values[k]));
  const auto tr = real_transitions(b, tau_grid(0.1, 100.0, 2000, true));
  bool found1 = false, found2 = false;
  std::string d = "max rel err " + fmt(worst, 3) + "; transitions";
  for (const auto& r : tr) {
    d += " " + fmt(r.tau, 5);
    found1 = found1 || std::abs(r.tau - 1.87) <= 0.02;
    found2 = found2 || std::abs(r.tau - 11.66) <= 0.1;
  }
  return {worst <= 1e-2 && found1 && found2, d};
}

Outcome criterion8() {
  GameParams p;
  p.v = 4.0;
  const ZeroSumGame g = builtin("quad_stack", p);
  const double tau = 5.0;
  const JacobianBlocks b = blocks_at_origin(g);
  const Spectrum spec = eig(assemble_j_tau(b, tau));
  const RateReport r = rate_report(spec);
  const double limit = std::sqrt(1.0 - r.alpha / (4.0 * r.beta)) + 0.02;
  const double delta = neighborhood_estimate([&](const Vec& x) { return g.blocks(x); }, Vec::Zero(4), tau,
                                             r.alpha, r.beta, 1.0);
  const double radius = std::min(1.0, delta);
  std::mt19937_64 rng(8);
  const double eps = 1e-6;
  double worst_rate = 0.0;
  long long worst_excess = std::numeric_limits<long long>::min();
  bool ok = true;
  for (int s = 0; s < 10; ++s) {
    Vec x0 = random_mat(rng, 4, 1);
    x0 *= radius / x0.norm();
    GdaOptions opts;
    opts.ref = Vec::Zero(4);
    opts.early_stop = false;
    const TrajectoryRecord tr = run_gda(g, x0, r.gamma1, tau, 1100, opts);
    const double rate = std::pow(tr.distance[1100] / tr.distance[100], 1.0 / 1000.0);
    worst_rate = std::max(worst_rate, rate);
    // Iterations needed to reach eps.
    Vec x = x0;
    long long k = 0;
    while (x.norm() > eps && k < 1000000) {
      Vec gr = g.grad(x);
      gr.tail(2) *= tau;
      x -= r.gamma1 * gr;
      ++k;
    }
    const long long bound = iteration_bound(r.beta, r.alpha, x0.norm(), eps);
    worst_excess = std::max(worst_excess, k - bound);
    ok = ok && rate <= limit && k <= bound;
  }
  return {ok, "gamma1=" + fmt(r.gamma1) + " worst contraction " + fmt(worst_rate, 5) + " vs limit " +
                  fmt(limit, 5) + "; worst (iterations - bound) " + std::to_string(worst_excess) +
                  "; spectral contraction " + fmt(spectral_contraction(spec, r.gamma1), 5)};
}

Outcome criterion9() {
  Timer t;
  const ZeroSumGame g = builtin("poly_spurious");
  Vec x0(4);
  x0 << -1.5, 2.5, 2.5, 3.0;
  const CriticalSearch cs = find_critical_points(g, seed_grid(4, -5.0, 5.0, 5));
  auto nearest_dne = [&](const Vec& x) {
    double best = INFINITY;
    for (const auto& cp : cs.points)
      if (classify_point(cp.blocks).kind == PointKind::DNE) best = std::min(best, g.distance(x, cp.x));
    return best;
  };
  const TrajectoryRecord slow = run_gda(g, x0, 5e-4, 0.75, 400000);
  const TrajectoryRecord fast = run_gda(g, x0, 5e-4, 5.0, 400000);
  const double d_slow = slow.final_x.norm();
  const double d_fast0 = fast.final_x.norm();
  const double d_fast_dne = nearest_dne(fast.final_x);
  const double s = t.seconds();
  const bool ok = d_slow <= 1e-3 && d_fast_dne <= 1e-3 && d_fast0 >= 0.5 && s < 30.0;
  return {ok, "tau=0.75 |x|=" + fmt(d_slow, 3) + " (steps " + std::to_string(slow.steps_run) +
                  "); tau=5 dist to DNE " + fmt(d_fast_dne, 3) + ", |x|=" + fmt(d_fast0, 4) + " (steps " +
                  std::to_string(fast.steps_run) + "); time " + fmt(s, 3) + " s"};
}

Outcome criterion10() {
  double worst_dirac = 0.0, worst_cov = 0.0;
  bool real_iff = true, stable = true;
  for (int i = 0; i < 20; ++i)
    for (int j = 0; j < 20; ++j) {
      const double tau = std::pow(10.0, -2.0 + 4.0 * i / 19.0);
      const double mu = std::pow(10.0, -2.0 + 4.0 * j / 19.0);
      const Mat jd = regularized_jacobian(dirac_unregularized_blocks(), dirac_penalty_hessian(), tau, mu);
      const auto a = dirac_spectrum(mu, tau).sorted();
      const auto e = eig(jd).sorted();
      for (int k = 0; k < 2; ++k) worst_dirac = std::max(worst_dirac, std::abs(a[k] - e[k]));
      stable = stable && eig(jd).min_real() > 0.0;
      const double sigma = mu;
      CovGanSpec cs;
      cs.sigma = Mat::Constant(1, 1, sigma * sigma);
      cs.mu = 1.0;
      const ZeroSumGame cg = cov_gan_game(cs);
      Vec xs(2);
      xs << sigma, 0.0;
      const auto ca = cov_gan_d1_spectrum(sigma, 1.0, tau).sorted();
      const auto ce = eig(assemble_j_tau(cg.blocks(xs), tau)).sorted();
      for (int k = 0; k < 2; ++k) worst_cov = std::max(worst_cov, std::abs(ca[k] - ce[k]));
    }
  for (int j = 0; j <= 400; ++j) {
    const double mu = 0.5 + j * 0.0025;
    const auto s = eig(regularized_jacobian(dirac_unregularized_blocks(), dirac_penalty_hessian(), 1.0, mu));
    const bool is_real = std::abs(s.values[0].imag()) <= 1e-7 && std::abs(s.values[1].imag()) <= 1e-7;
    real_iff = real_iff && (is_real == (mu >= 1.0));
  }
  const bool ok = worst_dirac <= 1e-10 && worst_cov <= 1e-10 && real_iff && stable;
  return {ok, "dirac err " + fmt(worst_dirac, 3) + ", cov err " + fmt(worst_cov, 3) + ", real iff mu>=1: " +
                  (real_iff ? "yes" : "no") + ", stable on grid: " + (stable ? "yes" : "no")};
}

Outcome criterion11() {
  std::mt19937_64 rng(11);
  std::uniform_int_distribution<int> n2d(1, 2);
  int misses = 0;
  double worst = 0.0;
  for (int inst = 0; inst < 20; ++inst) {
    const int n2 = n2d(rng);
    const int n1 = 2 * n2 + 1 + inst % 2;
    const JacobianBlocks b(Mat::Zero(n1, n1), random_mat(rng, n1, n2), -random_spd(rng, n2, 0.1, 2.0));
    const Mat reg = random_spd(rng, n2, 0.1, 2.0);
    for (double tau : {0.1, 1.0, 10.0})
      for (double mu : {0.1, 1.0, 10.0}) {
        const Spectrum s = eig(regularized_jacobian(b, reg, tau, mu));
        double m = INFINITY;
        for (const auto& z : s.values) m = std::min(m, std::abs(z.real()));
        worst = std::max(worst, m);
        if (m > 1e-8) ++misses;
      }
  }
  return {misses == 0, "instances without a |Re|<=1e-8 eigenvalue: " + std::to_string(misses) +
                           "; worst min|Re| " + fmt(worst, 3)};
}

Outcome criterion12() {
  Timer t;
  Mat f = Mat::Zero(4, 4);
  f.topLeftCorner(2, 2) = Vec(Eigen::Vector2d(1.0, 0.5)).asDiagonal();
  f.bottomRightCorner(2, 2) = Vec(Eigen::Vector2d(-0.5, -1.0)).asDiagonal();
  f.topRightCorner(2, 2) = 0.2 * Mat::Identity(2, 2);
  f.bottomLeftCorner(2, 2) = 0.2 * Mat::Identity(2, 2);
  const ZeroSumGame g = quadratic_game("quad_dne", f, 2, 2);
  std::vector<double> finals;
  bool diverged = false;
  Vec x0(4);
  x0 << 1.0, -1.0, 0.5, -0.5;
  GdaOptions opts;
  opts.early_stop = false;
  opts.stride = 100000;
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const TrajectoryRecord r = run_sgda(g, x0, StepSchedule::power(0.5, 0.75), 5.0,
                                        NoiseModel::gaussian(0.1, seed), 100000, opts);
    diverged = diverged || r.diverged;
    finals.push_back(r.diverged ? INFINITY : r.final_x.norm());
  }
  std::sort(finals.begin(), finals.end());
  const double median = 0.5 * (finals[9] + finals[10]);
  const double s = t.seconds();
  return {median <= 1e-2 && !diverged && s < 60.0,
          "median final distance " + fmt(median, 3) + ", diverged: " + (diverged ? "yes" : "no") + ", time " +
              fmt(s, 3) + " s"};
}

Outcome criterion13() {
  const ZeroSumGame torus = builtin("torus");
  const CriticalSearch cs = find_critical_points(torus, seed_grid(2, -kPi, kPi, 9));
  std::vector<Vec> eq;
  for (const auto& cp : cs.points)
    if (classify_point(cp.blocks).is_dse()) eq.push_back(cp.x);
  const std::vector<GridAxis> axes = {{-kPi, kPi, 40}, {-kPi, kPi, 40}};
  std::string d = "torus unresolved:";
  bool ok = true;
  for (double tau : {1.0, 2.0, 5.0, 10.0}) {
    const RoaGrid roa = roa_scan(torus, axes, tau, 0.04, 20000, eq, 1e-4);
    const int u = roa.unresolved_count();
    d += " tau=" + fmt(tau) + ":" + std::to_string(u);
    ok = ok && (tau == 1.0 ? u >= 1 : u == 0);
  }

  const ZeroSumGame land = builtin("poly_landscape");
  const CriticalSearch lc = find_critical_points(land, seed_grid(2, -15.0, 15.0, 13));
  Vec x0(2);
  x0 << -10.0, -2.0;
  auto destination = [&](double tau) -> const CriticalPoint* {
    const TrajectoryRecord r = run_gda(land, x0, 1e-3, tau, 75000);
    for (const auto& cp : lc.points)
      if (land.distance(r.final_x, cp.x) <= 1e-3) return &cp;
    return nullptr;
  };
  const CriticalPoint* d1 = destination(1.0);
  const CriticalPoint* d2 = destination(2.0);
  auto describe = [&](const CriticalPoint* cp) {
    if (!cp) return std::string("none");
    return to_string(classify_point(cp->blocks).kind) + "(" + fmt(cp->x(0), 5) + "," + fmt(cp->x(1), 5) + ")";
  };
  const Vec dne = Eigen::Vector2d(10.57, -8.95);
  const Vec dse = Eigen::Vector2d(-11.03, -11.03);
  const bool flip = d1 && d2 && classify_point(d1->blocks).kind == PointKind::DNE &&
                    classify_point(d2->blocks).kind == PointKind::DSE_only && (d1->x - dne).norm() <= 0.01 &&
                    (d2->x - dse).norm() <= 0.01;
  ok = ok && flip;
  d += "; landscape from (-10,-2): tau=1 -> " + describe(d1) + ", tau=2 -> " + describe(d2);
  return {ok, d};
}

}  // namespace

int main(int argc, char** argv) {
  const std::map<int, std::function<Outcome()>> all = {
      {1, criterion1},  {2, criterion2},   {3, criterion3},   {4, criterion4},  {5, criterion5},
      {6, criterion6},  {7, criterion7},   {8, criterion8},   {9, criterion9},  {10, criterion10},
      {11, criterion11}, {12, criterion12}, {13, criterion13}};
  std::vector<int> which;
  for (int i = 1; i < argc; ++i) which.push_back(std::atoi(argv[i]));
  if (which.empty())
    for (const auto& [k, fn] : all) which.push_back(k);
  int failed = 0;
  for (int k : which) {
    const auto it = all.find(k);
    if (it == all.end()) {
      std::printf("criterion %d: unknown\n", k);
      return 2;
    }
    Outcome o;
    try {
      o = it->second();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    std::printf("criterion %2d: %s - %s\n", k, o.pass ? "PASS" : "FAIL", o.detail.c_str());
    std::fflush(stdout);
    if (!o.pass) ++failed;
  }
  return failed == 0 ? 0 : 1;
}
