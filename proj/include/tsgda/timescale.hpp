#pragma once

#include "tsgda/classify.hpp"
#include "tsgda/game.hpp"

#include <optional>
#include <vector>

namespace tsgda {

// [d11, d12; -tau d12^T, -tau d22].
Mat assemble_j_tau(const JacobianBlocks& blocks, double tau);

// max Re spec(-J_tau); negative means -J_tau is Hurwitz.
double stability_margin(const JacobianBlocks& blocks, double tau);

// min over i <= j of |l_i + l_j| for the spectrum of a.
double min_pair_sum(const Spectrum& s);

struct GuardValue {
  double value = 0.0;  // det(boxplus(-J_tau)); may overflow to +-inf
  int sign = 0;
  double log_abs = 0.0;
};

GuardValue guard_map(const JacobianBlocks& blocks, double tau);
double guard_map_nu(const JacobianBlocks& blocks, double tau);

struct TauStarCertificate {
  double tau_star = 0.0;
  Spectrum q_spectrum;
  std::optional<double> guard_root;
  // max Re spec(-J_tau) at tau_star * 1.01 (at tau = 1 when tau_star = 0).
  double stability_margin = 0.0;
  // min |l_i + l_j| over spec(-J_{tau_star}); 0 when tau_star = 0.
  double boundary_pair_sum = 0.0;
};

// Matrix whose largest positive real eigenvalue is tau*.
Mat tau_star_q_matrix(const JacobianBlocks& blocks);

// Refuses (PreconditionError) unless the blocks describe a DSE.
TauStarCertificate tau_star_eig(const JacobianBlocks& blocks, bool cross_check = true);

std::optional<double> tau_star_guard(const JacobianBlocks& blocks, double tau_max, int grid = 10000,
                                     double tol = 1e-10);

struct TauZeroCertificate {
  double tau_zero = 0.0;
  Inertia p_inertia;
  std::vector<double> verified_tau;
  std::vector<double> verified_margin;  // max Re spec(-J_tau) at each verified tau
};

TauZeroCertificate tau_zero(const JacobianBlocks& blocks, double tol = kZeroRealTol);

struct SpectrumSweep {
  std::vector<double> taus;
  // tracks[k][i] is eigenvalue k at taus[i].
  std::vector<std::vector<Complex>> tracks;
};

std::vector<double> tau_grid(double lo, double hi, int n, bool log_spacing);

SpectrumSweep spectrum_sweep(const JacobianBlocks& blocks, const std::vector<double>& taus);

// Permutation perm with next[perm[k]] matched to prev[k]; greedy nearest
// neighbour unless it costs more than twice the optimal assignment.
std::vector<int> match_eigenvalues(const std::vector<Complex>& prev, const std::vector<Complex>& next);

struct RealTransition {
  double tau = 0.0;
  bool to_real = true;  // complex -> real when increasing tau
};

// tau values where the number of eigenvalues with |Im| <= imag_tol changes,
// located on the sweep grid and refined by bisection.
std::vector<RealTransition> real_transitions(const JacobianBlocks& blocks, const std::vector<double>& taus,
                                             double imag_tol = 1e-3, double tol = 1e-8);

// {eig(S1(J))} U {tau * eig(-D2^2 f)}.
Spectrum asymptotic_split(const JacobianBlocks& blocks, double tau);

struct SlowManifold {
  Mat l;
  double residual = 0.0;
};

SlowManifold slow_manifold_gain(const JacobianBlocks& blocks, double eps);

// Max of tau_star_eig over the DSE points.
double tau_star_game(const ZeroSumGame& game, const std::vector<CriticalPoint>& points);

}  // namespace tsgda
