#pragma once

#include "tsgda/game.hpp"

#include <cstdint>
#include <string>

namespace tsgda {

enum class PointKind { DNE, DSE_only, Spurious, Degenerate };

std::string to_string(PointKind k);

struct Classification {
  PointKind kind = PointKind::Degenerate;
  // Smallest/largest eigenvalues of the symmetric blocks and of S1(J).
  double d11_min = 0.0, d11_max = 0.0;
  double neg_d22_min = 0.0, neg_d22_max = 0.0;
  // S1(J) is real symmetric; NaN when d22 is singular.
  double s1_min = 0.0, s1_max = 0.0;
  double d22_min_sv = 0.0;
  double s1_min_sv = 0.0;

  bool is_dse() const { return kind == PointKind::DNE || kind == PointKind::DSE_only; }
};

inline constexpr double kDefiniteTol = 1e-8;

// S1(J) = d11 - d12 d22^{-1} d12^T for J assembled at tau = 1.
Mat schur_s1(const JacobianBlocks& b);

Classification classify_point(const JacobianBlocks& blocks, double tol = kDefiniteTol);

bool is_dne(const JacobianBlocks& blocks, double tol = kDefiniteTol);
bool is_dse(const JacobianBlocks& blocks, double tol = kDefiniteTol);

struct QnrCloud {
  std::vector<Complex> points;
  int sample_count = 0;
};

QnrCloud qnr_sample(const JacobianBlocks& blocks, double tau, int samples, std::uint64_t seed);

bool gan_dimension_check(int n1, int n2);

}  // namespace tsgda
