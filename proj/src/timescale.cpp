#include "tsgda/timescale.hpp"

#include "tsgda/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace tsgda {

Mat assemble_j_tau(const JacobianBlocks& b, double tau) {
  if (!(tau > 0.0)) throw InvalidArgument("assemble_j_tau: tau must be positive");
  const int n1 = b.n1(), n2 = b.n2();
  Mat j(n1 + n2, n1 + n2);
  j << b.d11, b.d12, -tau * b.d12.transpose(), -tau * b.d22;
  return j;
}

double stability_margin(const JacobianBlocks& b, double tau) {
  return eig(-assemble_j_tau(b, tau)).max_real();
}

double min_pair_sum(const Spectrum& s) {
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < s.size(); ++i)
    for (std::size_t j = 0; j <= i; ++j) best = std::min(best, std::abs(s.values[i] + s.values[j]));
  return best;
}

GuardValue guard_map(const JacobianBlocks& b, double tau) {
  const Mat bp = boxplus(-assemble_j_tau(b, tau));
  Eigen::PartialPivLU<Mat> lu(bp);
  const Mat& u = lu.matrixLU();
  GuardValue out;
  int sign = static_cast<int>(lu.permutationP().determinant());
  double log_abs = 0.0;
  for (Eigen::Index i = 0; i < u.rows(); ++i) {
    if (u(i, i) == 0.0) {
      sign = 0;
      break;
    }
    if (u(i, i) < 0) sign = -sign;
    log_abs += std::log(std::abs(u(i, i)));
  }
  out.sign = sign;
  out.log_abs = sign == 0 ? -std::numeric_limits<double>::infinity() : log_abs;
  out.value = sign == 0 ? 0.0 : sign * std::exp(log_abs);
  return out;
}

double guard_map_nu(const JacobianBlocks& b, double tau) { return guard_map(b, tau).value; }

namespace {

// The single place where raw Hessian blocks become blocks of -J:
// A11 = -D1^2 f, A12 = -D12 f, A22 = D2^2 f.
struct NegJBlocks {
  Mat a11, a12, a22;
};

NegJBlocks neg_j_blocks(const JacobianBlocks& b) { return {-b.d11, -b.d12, b.d22}; }

void require_dse(const JacobianBlocks& b, const char* who) {
  const Classification c = classify_point(b);
  if (!c.is_dse()) {
    std::ostringstream os;
    os << who << ": point is not a differential Stackelberg equilibrium (kind=" << to_string(c.kind)
       << ", lambda_min(-d22)=" << c.neg_d22_min << ", lambda_min(S1)=" << c.s1_min << ")";
    throw PreconditionError(os.str());
  }
}

}  // namespace

Mat tau_star_q_matrix(const JacobianBlocks& b) {
  const auto [a11, a12, a22] = neg_j_blocks(b);
  const int n1 = b.n1(), n2 = b.n2();
  const Mat i1 = Mat::Identity(n1, n1);
  const Mat i2 = Mat::Identity(n2, n2);
  const Eigen::PartialPivLU<Mat> a22lu(a22);
  const Mat a22inv = a22lu.inverse();
  // Schur complement of the tau-free part of -J.
  const Mat s1 = a11 + a12 * a22inv * a12.transpose();

  const Mat h2 = duplication_matrix(n2), h2p = duplication_pinv(n2);
  const Mat h1 = duplication_matrix(n1), h1p = duplication_pinv(n1);
  const Mat bp22inv = boxplus(a22).partialPivLu().inverse();
  const Mat bps1inv = boxplus(s1).partialPivLu().inverse();

  const Mat m1 = 2.0 * kron(a12, i2) * h2 * bp22inv * h2p * kron(a12.transpose(), i2);
  const Mat m2 = kron(i1, a22inv) - 2.0 * kron(i1, a22inv * a12.transpose()) * h1 * bps1inv * h1p *
                                        kron(i1, a12 * a22inv);
  return -m2 * (kron(a11, i2) + m1);
}

TauStarCertificate tau_star_eig(const JacobianBlocks& b, bool cross_check) {
  require_dse(b, "tau_star_eig");
  const Mat q = tau_star_q_matrix(b);
  TauStarCertificate c;
  c.q_spectrum = eig(q);
  c.tau_star = largest_positive_real_eig(c.q_spectrum, scale_of(q));
  if (c.tau_star > 0.0) {
    c.stability_margin = stability_margin(b, 1.01 * c.tau_star);
    c.boundary_pair_sum = min_pair_sum(eig(-assemble_j_tau(b, c.tau_star)));
  } else {
    c.stability_margin = stability_margin(b, 1.0);
    c.boundary_pair_sum = 0.0;
  }
  if (cross_check) c.guard_root = tau_star_guard(b, std::max(1e3, 100.0 * c.tau_star));
  return c;
}

std::optional<double> tau_star_guard(const JacobianBlocks& b, double tau_max, int grid, double tol) {
  require_dse(b, "tau_star_guard");
  if (!(tau_max > 0.0)) throw InvalidArgument("tau_star_guard: tau_max must be positive");
  const double lo = tau_max * 1e-9;
  auto f = [&](double tau) { return static_cast<double>(guard_map(b, tau).sign); };
  return bracketed_root_largest(f, lo, tau_max, grid, tol, GridSpacing::log);
}

TauZeroCertificate tau_zero(const JacobianBlocks& b, double tol) {
  const Mat s = -schur_s1(b);  // S1(-J)
  const Inertia si = inertia(s, tol);
  const Inertia di = inertia(b.d22, tol);
  if (si.n_zero > 0 || di.n_zero > 0)
    throw PreconditionError("tau_zero: S1(-J) or D2^2 f is not hyperbolic");
  if (si.n_pos < 1) throw PreconditionError("tau_zero: S1(-J) has no positive eigenvalue (point is a DSE candidate)");

  const LyapunovPair l1 = inertia_lyapunov(s, tol);
  const LyapunovPair l2 = inertia_lyapunov(b.d22, tol);
  const Mat l0 = b.d22.partialPivLu().solve(b.d12.transpose());
  const Mat k = s * l0.transpose() * l2.p - l1.p * b.d12;
  const Mat g = -l2.p * l0 * b.d12;
  const Mat m = sym(k.transpose() * l1.q.llt().solve(k) - g - g.transpose());

  // lambda_max(Q2^{-1} M) through the congruence L^{-1} M L^{-T}, Q2 = L L^T.
  const Eigen::LLT<Mat> q2(l2.q);
  if (q2.info() != Eigen::Success) throw NumericalError("tau_zero: Q2 is not positive definite");
  const Mat lm = q2.matrixL().solve(m);
  const Mat c = sym(q2.matrixL().solve(lm.transpose()));

  TauZeroCertificate out;
  out.tau_zero = std::max(0.0, max_sym_eig(c));
  out.p_inertia = inertia(l1.p, tol);
  if (out.tau_zero > 0.0)
    out.verified_tau = {1.01 * out.tau_zero, 2.0 * out.tau_zero, 10.0 * out.tau_zero};
  else
    out.verified_tau = {0.01, 1.0, 100.0};
  for (double tau : out.verified_tau) {
    const double margin = stability_margin(b, tau);
    out.verified_margin.push_back(margin);
    if (!(margin > 1e-10)) throw NumericalError("tau_zero: instability not confirmed at a sampled tau");
  }
  return out;
}

std::vector<double> tau_grid(double lo, double hi, int n, bool log_spacing) {
  if (!(lo > 0.0) || !(hi > lo) || n < 2) throw InvalidArgument("tau_grid: need 0 < lo < hi and n >= 2");
  std::vector<double> t(n);
  for (int i = 0; i < n; ++i) {
    const double s = static_cast<double>(i) / (n - 1);
    t[i] = log_spacing ? lo * std::pow(hi / lo, s) : lo + s * (hi - lo);
  }
  t.back() = hi;
  return t;
}

namespace {

// Hungarian algorithm on a square cost matrix; returns row -> column.
std::vector<int> optimal_assignment(const Mat& cost) {
  const int n = static_cast<int>(cost.rows());
  const double inf = std::numeric_limits<double>::infinity();
  std::vector<double> u(n + 1, 0.0), v(n + 1, 0.0), minv(n + 1);
  std::vector<int> p(n + 1, 0), way(n + 1, 0);
  std::vector<bool> used(n + 1);
  for (int i = 1; i <= n; ++i) {
    p[0] = i;
    int j0 = 0;
    std::fill(minv.begin(), minv.end(), inf);
    std::fill(used.begin(), used.end(), false);
    do {
      used[j0] = true;
      const int i0 = p[j0];
      double delta = inf;
      int j1 = 0;
      for (int j = 1; j <= n; ++j) {
        if (used[j]) continue;
        const double cur = cost(i0 - 1, j - 1) - u[i0] - v[j];
        if (cur < minv[j]) {
          minv[j] = cur;
          way[j] = j0;
        }
        if (minv[j] < delta) {
          delta = minv[j];
          j1 = j;
        }
      }
      for (int j = 0; j <= n; ++j) {
        if (used[j]) {
          u[p[j]] += delta;
          v[j] -= delta;
        } else {
          minv[j] -= delta;
        }
      }
      j0 = j1;
    } while (p[j0] != 0);
    do {
      const int j1 = way[j0];
      p[j0] = p[j1];
      j0 = j1;
    } while (j0);
  }
  std::vector<int> row_to_col(n);
  for (int j = 1; j <= n; ++j) row_to_col[p[j] - 1] = j - 1;
  return row_to_col;
}

}  // namespace

std::vector<int> match_eigenvalues(const std::vector<Complex>& prev, const std::vector<Complex>& next) {
  const int n = static_cast<int>(prev.size());
  if (static_cast<int>(next.size()) != n) throw InvalidArgument("match_eigenvalues: size mismatch");
  Mat cost(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) cost(i, j) = std::abs(prev[i] - next[j]);

  std::vector<int> greedy(n, -1);
  std::vector<bool> taken(n, false);
  double greedy_total = 0.0;
  for (int i = 0; i < n; ++i) {
    int best = -1;
    for (int j = 0; j < n; ++j)
      if (!taken[j] && (best < 0 || cost(i, j) < cost(i, best))) best = j;
    greedy[i] = best;
    taken[best] = true;
    greedy_total += cost(i, best);
  }
  const std::vector<int> opt = optimal_assignment(cost);
  double opt_total = 0.0;
  for (int i = 0; i < n; ++i) opt_total += cost(i, opt[i]);
  return greedy_total > 2.0 * opt_total + 1e-300 ? opt : greedy;
}

SpectrumSweep spectrum_sweep(const JacobianBlocks& b, const std::vector<double>& taus) {
  if (taus.empty()) throw InvalidArgument("spectrum_sweep: empty grid");
  for (std::size_t i = 0; i < taus.size(); ++i) {
    if (!(taus[i] > 0.0)) throw InvalidArgument("spectrum_sweep: tau must be positive");
    if (i > 0 && !(taus[i] > taus[i - 1])) throw InvalidArgument("spectrum_sweep: grid must increase");
  }
  SpectrumSweep sw;
  sw.taus = taus;
  const int n = b.n1() + b.n2();
  sw.tracks.assign(n, std::vector<Complex>(taus.size()));
  std::vector<Complex> prev = eig(assemble_j_tau(b, taus[0])).sorted();
  for (int k = 0; k < n; ++k) sw.tracks[k][0] = prev[k];
  for (std::size_t i = 1; i < taus.size(); ++i) {
    const std::vector<Complex> next = eig(assemble_j_tau(b, taus[i])).values;
    const std::vector<int> perm = match_eigenvalues(prev, next);
    for (int k = 0; k < n; ++k) {
      sw.tracks[k][i] = next[perm[k]];
      prev[k] = next[perm[k]];
    }
  }
  return sw;
}

std::vector<RealTransition> real_transitions(const JacobianBlocks& b, const std::vector<double>& taus,
                                             double imag_tol, double tol) {
  auto count_real = [&](double tau) {
    int c = 0;
    for (const auto& z : eig(assemble_j_tau(b, tau)).values)
      if (std::abs(z.imag()) <= imag_tol) ++c;
    return c;
  };
  std::vector<RealTransition> out;
  int c_prev = count_real(taus.at(0));
  for (std::size_t i = 1; i < taus.size(); ++i) {
    const int c_next = count_real(taus[i]);
    if (c_next != c_prev) {
      double lo = taus[i - 1], hi = taus[i];
      while (hi - lo > tol * (1.0 + hi)) {
        const double mid = 0.5 * (lo + hi);
        if (count_real(mid) == c_prev)
          lo = mid;
        else
          hi = mid;
      }
      out.push_back({0.5 * (lo + hi), c_next > c_prev});
    }
    c_prev = c_next;
  }
  return out;
}

Spectrum asymptotic_split(const JacobianBlocks& b, double tau) {
  if (!(tau > 0.0)) throw InvalidArgument("asymptotic_split: tau must be positive");
  if (b.n2() == 0) return eig(b.d11);
  if (Eigen::FullPivLU<Mat>(b.d22).rank() < b.n2()) throw PreconditionError("asymptotic_split: singular D2^2 f");
  const Mat s1 = schur_s1(b);
  if (Eigen::FullPivLU<Mat>(s1).rank() < b.n1()) throw PreconditionError("asymptotic_split: singular S1(J)");
  Spectrum out = eig(s1);
  for (const auto& z : eig(-b.d22).values) out.values.push_back(tau * z);
  return out;
}

SlowManifold slow_manifold_gain(const JacobianBlocks& b, double eps) {
  if (!(eps >= 0.0)) throw InvalidArgument("slow_manifold_gain: eps must be nonnegative");
  const Mat a11 = -b.d11, a12 = -b.d12, a21 = b.d12.transpose(), a22 = b.d22;
  Eigen::FullPivLU<Mat> lu(a22);
  if (!lu.isInvertible()) throw PreconditionError("slow_manifold_gain: singular A22");
  const Mat l0 = lu.solve(a21);
  const Mat a0 = a11 - a12 * l0;
  SlowManifold out;
  out.l = l0 + eps * lu.solve(lu.solve(a21 * a0));
  const Mat r = a21 - a22 * out.l + eps * out.l * a11 - eps * out.l * a12 * out.l;
  out.residual = r.norm();
  return out;
}

double tau_star_game(const ZeroSumGame& game, const std::vector<CriticalPoint>& points) {
  (void)game;
  bool any = false;
  double best = 0.0;
  for (const auto& p : points) {
    if (!is_dse(p.blocks)) continue;
    any = true;
    best = std::max(best, tau_star_eig(p.blocks, false).tau_star);
  }
  if (!any) throw PreconditionError("tau_star_game: no differential Stackelberg equilibrium among the points");
  return best;
}

}  // namespace tsgda
