#include "tsgda/classify.hpp"

#include "tsgda/errors.hpp"

#include <cmath>
#include <limits>
#include <random>

namespace tsgda {

std::string to_string(PointKind k) {
  switch (k) {
    case PointKind::DNE: return "DNE";
    case PointKind::DSE_only: return "DSE_only";
    case PointKind::Spurious: return "Spurious";
    case PointKind::Degenerate: return "Degenerate";
  }
  return "Degenerate";
}

Mat schur_s1(const JacobianBlocks& b) {
  return b.d11 - b.d12 * b.d22.partialPivLu().solve(b.d12.transpose());
}

namespace {

double min_sv(const Mat& a) {
  Eigen::JacobiSVD<Mat> svd(a);
  return svd.singularValues().minCoeff();
}

}  // namespace

Classification classify_point(const JacobianBlocks& b, double tol) {
  Classification c;
  const Mat neg_d22 = -b.d22;
  c.d11_min = min_sym_eig(b.d11);
  c.d11_max = max_sym_eig(b.d11);
  c.neg_d22_min = min_sym_eig(neg_d22);
  c.neg_d22_max = max_sym_eig(neg_d22);
  c.d22_min_sv = min_sv(b.d22);

  const double tol11 = tol * scale_of(b.d11);
  const double tol22 = tol * scale_of(b.d22);
  const bool d22_singular = c.d22_min_sv <= tol22;

  Mat s1;
  double tol_s1 = 0.0;
  if (!d22_singular) {
    s1 = sym(schur_s1(b));
    c.s1_min = min_sym_eig(s1);
    c.s1_max = max_sym_eig(s1);
    c.s1_min_sv = min_sv(s1);
    tol_s1 = tol * scale_of(s1);
  } else {
    c.s1_min = c.s1_max = c.s1_min_sv = std::numeric_limits<double>::quiet_NaN();
  }

  const bool p2_ok = c.neg_d22_min > tol22;
  if (c.d11_min > tol11 && p2_ok)
    c.kind = PointKind::DNE;
  else if (p2_ok && !d22_singular && c.s1_min > tol_s1)
    c.kind = PointKind::DSE_only;
  else if (d22_singular || c.s1_min_sv <= tol_s1)
    c.kind = PointKind::Degenerate;
  else
    c.kind = PointKind::Spurious;
  return c;
}

bool is_dne(const JacobianBlocks& b, double tol) { return classify_point(b, tol).kind == PointKind::DNE; }

bool is_dse(const JacobianBlocks& b, double tol) { return classify_point(b, tol).is_dse(); }

QnrCloud qnr_sample(const JacobianBlocks& b, double tau, int samples, std::uint64_t seed) {
  if (samples < 1) throw InvalidArgument("qnr_sample: samples must be >= 1");
  if (!(tau > 0.0)) throw InvalidArgument("qnr_sample: tau must be positive");
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal;
  auto unit = [&](int n) {
    Vec u(n);
    do {
      for (int i = 0; i < n; ++i) u(i) = normal(rng);
    } while (u.norm() == 0.0);
    return Vec(u / u.norm());
  };

  QnrCloud cloud;
  cloud.sample_count = samples;
  cloud.points.reserve(2 * samples);
  for (int s = 0; s < samples; ++s) {
    const Vec v = unit(b.n1());
    const Vec w = unit(b.n2());
    const double a11 = v.dot(b.d11 * v);
    const double a12 = v.dot(b.d12 * w);
    const double a21 = -tau * a12;
    const double a22 = -tau * w.dot(b.d22 * w);
    const double tr = a11 + a22;
    const double det = a11 * a22 - a12 * a21;
    const Complex disc = std::sqrt(Complex(tr * tr - 4.0 * det, 0.0));
    cloud.points.push_back(0.5 * (tr + disc));
    cloud.points.push_back(0.5 * (tr - disc));
  }
  return cloud;
}

bool gan_dimension_check(int n1, int n2) { return 2 * n2 >= n1; }

}  // namespace tsgda
