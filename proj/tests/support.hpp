#pragma once

#include "tsgda/game.hpp"

#include <algorithm>
#include <complex>
#include <random>
#include <vector>

namespace testing {

using tsgda::Complex;
using tsgda::Mat;
using tsgda::Vec;

inline Mat random_mat(std::mt19937_64& rng, int r, int c) {
  std::normal_distribution<double> n;
  Mat m(r, c);
  for (int i = 0; i < r; ++i)
    for (int j = 0; j < c; ++j) m(i, j) = n(rng);
  return m;
}

inline Mat random_spd(std::mt19937_64& rng, int n, double lo, double hi) {
  std::uniform_real_distribution<double> u(lo, hi);
  Eigen::HouseholderQR<Mat> qr(random_mat(rng, n, n));
  const Mat q = qr.householderQ();
  Vec d(n);
  for (int i = 0; i < n; ++i) d(i) = u(rng);
  return q * d.asDiagonal() * q.transpose();
}

inline tsgda::JacobianBlocks random_dse(std::mt19937_64& rng, int n1, int n2) {
  const Mat neg_d22 = random_spd(rng, n2, 0.2, 3.0);
  const Mat d12 = random_mat(rng, n1, n2);
  const Mat s1 = random_spd(rng, n1, 0.2, 3.0);
  return tsgda::JacobianBlocks(s1 - d12 * neg_d22.inverse() * d12.transpose(), d12, -neg_d22);
}

inline tsgda::JacobianBlocks random_dne(std::mt19937_64& rng, int n1, int n2) {
  return tsgda::JacobianBlocks(random_spd(rng, n1, 0.1, 3.0), random_mat(rng, n1, n2),
                               -random_spd(rng, n2, 0.1, 3.0));
}

// Largest distance in an optimal matching between two small multisets.
inline double multiset_distance(std::vector<Complex> a, std::vector<Complex> b) {
  if (a.size() != b.size()) return INFINITY;
  std::vector<int> perm(b.size());
  for (std::size_t i = 0; i < perm.size(); ++i) perm[i] = static_cast<int>(i);
  double best = INFINITY;
  if (a.size() <= 8) {
    do {
      double worst = 0.0;
      for (std::size_t i = 0; i < a.size(); ++i) worst = std::max(worst, std::abs(a[i] - b[perm[i]]));
      best = std::min(best, worst);
    } while (std::next_permutation(perm.begin(), perm.end()));
    return best;
  }
  // Greedy fallback for larger sets.
  double worst = 0.0;
  for (const auto& z : a) {
    auto it = std::min_element(b.begin(), b.end(),
                               [&](const Complex& p, const Complex& q) { return std::abs(p - z) < std::abs(q - z); });
    worst = std::max(worst, std::abs(*it - z));
    b.erase(it);
  }
  return worst;
}

// Brute-force eigenvalues of a 2x2 real matrix.
inline std::vector<Complex> eig2(double a, double b, double c, double d) {
  const Complex tr = a + d, det = a * d - b * c;
  const Complex disc = std::sqrt(tr * tr - 4.0 * det);
  return {(tr + disc) / 2.0, (tr - disc) / 2.0};
}

}  // namespace testing
