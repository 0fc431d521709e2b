#include "tsgda/matlib.hpp"

#include "tsgda/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace tsgda {

namespace {

void require_square(const Mat& a, const char* who) {
  if (a.rows() != a.cols()) throw InvalidArgument(std::string(who) + ": matrix is not square");
}

void require_finite(const Mat& a, const char* who) {
  if (!a.allFinite()) throw InvalidArgument(std::string(who) + ": non-finite entries");
}

bool less_complex(const Complex& a, const Complex& b) {
  if (a.real() != b.real()) return a.real() < b.real();
  return a.imag() < b.imag();
}

}  // namespace

double Spectrum::max_real() const {
  double m = -std::numeric_limits<double>::infinity();
  for (const auto& z : values) m = std::max(m, z.real());
  return m;
}

double Spectrum::min_real() const {
  double m = std::numeric_limits<double>::infinity();
  for (const auto& z : values) m = std::min(m, z.real());
  return m;
}

std::vector<Complex> Spectrum::sorted() const {
  auto out = values;
  std::sort(out.begin(), out.end(), less_complex);
  return out;
}

double scale_of(const Mat& a) { return 1.0 + a.norm(); }

Vec vec(const Mat& x) {
  Vec v(x.size());
  for (Eigen::Index i = 0; i < x.rows(); ++i)
    for (Eigen::Index j = 0; j < x.cols(); ++j) v(i * x.cols() + j) = x(i, j);
  return v;
}

Mat unvec(const Vec& v, int rows, int cols) {
  if (v.size() != static_cast<Eigen::Index>(rows) * cols)
    throw InvalidArgument("unvec: length does not match shape");
  Mat x(rows, cols);
  for (int i = 0; i < rows; ++i)
    for (int j = 0; j < cols; ++j) x(i, j) = v(i * cols + j);
  return x;
}

Vec vech(const Mat& x) {
  require_square(x, "vech");
  const int n = static_cast<int>(x.rows());
  Vec v(n * (n + 1) / 2);
  int k = 0;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j <= i; ++j) v(k++) = x(i, j);
  return v;
}

Mat kron(const Mat& a, const Mat& b) {
  Mat out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j)
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

Mat kron_sum(const Mat& a, const Mat& b) {
  require_square(a, "kron_sum");
  require_square(b, "kron_sum");
  const Mat ia = Mat::Identity(a.rows(), a.rows());
  const Mat ib = Mat::Identity(b.rows(), b.rows());
  return kron(a, ib) + kron(ia, b);
}

Mat duplication_matrix(int n) {
  if (n < 1) throw InvalidArgument("duplication_matrix: n must be >= 1");
  Mat h = Mat::Zero(n * n, n * (n + 1) / 2);
  int k = 0;
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j <= i; ++j) {
      h(i * n + j, k) = 1.0;
      h(j * n + i, k) = 1.0;
      ++k;
    }
  }
  return h;
}

Mat duplication_pinv(int n) {
  // H^T H is diagonal: 1 on diagonal entries of X, 2 on off-diagonal ones.
  const Mat h = duplication_matrix(n);
  Mat ht = h.transpose();
  for (Eigen::Index k = 0; k < ht.rows(); ++k) ht.row(k) /= ht.row(k).sum();
  return ht;
}

Mat boxplus(const Mat& a) {
  require_square(a, "boxplus");
  const int n = static_cast<int>(a.rows());
  if (n == 0) return Mat(0, 0);
  // Column (p, q) is vech(A X + X A^T) for X = E_pq + E_qp (or E_pp), which
  // equals H^+ (A (+) A) H without forming the n^2 x n^2 Kronecker sum.
  const int m = n * (n + 1) / 2;
  auto idx = [](int i, int j) { return i * (i + 1) / 2 + j; };
  Mat out = Mat::Zero(m, m);
  for (int p = 0; p < n; ++p) {
    for (int q = 0; q <= p; ++q) {
      const int col = idx(p, q);
      // Y = A(:,p) e_q^T + A(:,q) e_p^T + transposes, or A(:,p) e_p^T + e_p A(:,p)^T when p = q.
      auto add = [&](int i, int j, double v) {
        if (i >= j) out(idx(i, j), col) += v;
      };
      for (int i = 0; i < n; ++i) {
        add(i, q, a(i, p));
        add(q, i, a(i, p));
        if (p != q) {
          add(i, p, a(i, q));
          add(p, i, a(i, q));
        }
      }
    }
  }
  return out;
}

Spectrum eig(const Mat& a) {
  require_square(a, "eig");
  require_finite(a, "eig");
  Spectrum s;
  if (a.rows() == 0) return s;
  Eigen::EigenSolver<Mat> es(a, false);
  if (es.info() != Eigen::Success) throw NumericalError("eig: eigenvalue iteration did not converge");
  const auto& ev = es.eigenvalues();
  s.values.assign(ev.data(), ev.data() + ev.size());

  // Enforce exact conjugate pairs for a real input.
  const double tol = kPairTol * scale_of(a);
  std::vector<bool> used(s.values.size(), false);
  for (std::size_t i = 0; i < s.values.size(); ++i) {
    if (used[i] || s.values[i].imag() <= tol) continue;
    std::size_t best = s.values.size();
    double best_d = std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < s.values.size(); ++j) {
      if (j == i || used[j] || s.values[j].imag() >= -tol) continue;
      const double d = std::abs(s.values[j] - std::conj(s.values[i]));
      if (d < best_d) {
        best_d = d;
        best = j;
      }
    }
    if (best == s.values.size()) throw NumericalError("eig: unpaired complex eigenvalue");
    const Complex m = 0.5 * (s.values[i] + std::conj(s.values[best]));
    s.values[i] = m;
    s.values[best] = std::conj(m);
    used[i] = used[best] = true;
  }
  for (std::size_t i = 0; i < s.values.size(); ++i)
    if (!used[i] && std::abs(s.values[i].imag()) <= tol) s.values[i] = s.values[i].real();
  return s;
}

Mat schur_complement_first(const Mat& j, int n1, int n2) {
  require_square(j, "schur_complement_first");
  if (j.rows() != n1 + n2) throw InvalidArgument("schur_complement_first: block sizes do not add up");
  if (n2 == 0) return j;
  const Mat j22 = j.bottomRightCorner(n2, n2);
  Eigen::JacobiSVD<Mat> svd(j22);
  const double smin = svd.singularValues().minCoeff();
  if (smin <= 1e-12 * scale_of(j22)) throw PreconditionError("schur_complement_first: singular J22 block (degenerate point)");
  return j.topLeftCorner(n1, n1) -
         j.topRightCorner(n1, n2) * j22.partialPivLu().solve(j.bottomLeftCorner(n2, n1));
}

Inertia inertia(const Spectrum& s, double scale, double tol) {
  Inertia r;
  for (const auto& z : s.values) {
    if (std::abs(z.real()) <= tol * scale)
      ++r.n_zero;
    else if (z.real() > 0)
      ++r.n_pos;
    else
      ++r.n_neg;
  }
  return r;
}

Inertia inertia(const Mat& a, double tol) { return inertia(eig(a), scale_of(a), tol); }

Mat solve_lyapunov(const Mat& a, const Mat& q) {
  require_square(a, "solve_lyapunov");
  const int n = static_cast<int>(a.rows());
  if (q.rows() != n || q.cols() != n) throw InvalidArgument("solve_lyapunov: shape mismatch");
  if (n == 0) return Mat(0, 0);
  Eigen::FullPivLU<Mat> lu(kron_sum(a, a));
  if (!lu.isInvertible()) throw NumericalError("solve_lyapunov: singular Lyapunov operator");
  return unvec(lu.solve(vec(q)), n, n);
}

namespace {

// Matrix sign function by the scaled Newton iteration Z <- (cZ + (cZ)^{-1}) / 2.
Mat matrix_sign(const Mat& a) {
  const int n = static_cast<int>(a.rows());
  Mat z = a;
  bool scaling = true;
  for (int it = 0; it < 100; ++it) {
    Eigen::PartialPivLU<Mat> lu(z);
    const Mat zi = lu.inverse();
    if (!zi.allFinite()) throw NumericalError("matrix_sign: singular iterate");
    double c = 1.0;
    if (scaling) {
      double logdet = 0.0;
      const Mat& u = lu.matrixLU();
      for (int i = 0; i < n; ++i) logdet += std::log(std::abs(u(i, i)));
      c = std::exp(-logdet / n);
    }
    const Mat next = 0.5 * (c * z + zi / c);
    const double change = (next - z).norm() / next.norm();
    z = next;
    if (change < 1e-2) scaling = false;
    if (change < 1e-14) return z;
  }
  if (((z * z) - Mat::Identity(n, n)).norm() > 1e-8 * n)
    throw NumericalError("matrix_sign: Newton iteration did not converge");
  return z;
}

Mat range_basis(const Mat& proj, int k) {
  const int n = static_cast<int>(proj.rows());
  Eigen::ColPivHouseholderQR<Mat> qr(proj);
  const Mat q = qr.householderQ() * Mat::Identity(n, k);
  return q;
}

}  // namespace

LyapunovPair inertia_lyapunov(const Mat& a, double tol) {
  require_square(a, "inertia_lyapunov");
  require_finite(a, "inertia_lyapunov");
  const int n = static_cast<int>(a.rows());
  const double sc = scale_of(a);
  const Inertia in = inertia(eig(a), sc, tol);
  if (in.n_zero > 0) throw PreconditionError("inertia_lyapunov: eigenvalue on the imaginary axis");
  if (n == 0) return {Mat(0, 0), Mat(0, 0)};

  // Split R^n into the anti-stable and stable invariant subspaces.
  const int k = in.n_pos;
  const Mat s = matrix_sign(a);
  const Mat id = Mat::Identity(n, n);
  Mat v(n, n);
  if (k > 0) v.leftCols(k) = range_basis(0.5 * (id + s), k);
  if (k < n) v.rightCols(n - k) = range_basis(0.5 * (id - s), n - k);
  const Eigen::PartialPivLU<Mat> vlu(v);
  const Mat b = vlu.solve(a * v);

  // B+ X + X B+^T = I has X > 0; B- Y + Y B-^T = I has Y < 0.
  Mat blk = Mat::Zero(n, n);
  if (k > 0) blk.topLeftCorner(k, k) = sym(solve_lyapunov(b.topLeftCorner(k, k), Mat::Identity(k, k)));
  if (k < n)
    blk.bottomRightCorner(n - k, n - k) =
        sym(solve_lyapunov(b.bottomRightCorner(n - k, n - k), Mat::Identity(n - k, n - k)));

  LyapunovPair out;
  out.p = sym(v * blk * v.transpose());
  out.q = sym(v * v.transpose());

  const double resid = (a * out.p + out.p * a.transpose() - out.q).norm();
  if (resid > 1e-8 * sc * (1.0 + out.p.norm()))
    throw NumericalError("inertia_lyapunov: residual check failed");
  if (min_sym_eig(out.q) <= 0.0) throw NumericalError("inertia_lyapunov: Q is not positive definite");
  const Inertia pin = inertia(eig(out.p), scale_of(out.p), tol);
  if (!(pin == in)) throw NumericalError("inertia_lyapunov: inertia of P does not match A");
  return out;
}

double largest_positive_real_eig(const Spectrum& s, double scale, double tol) {
  double best = 0.0;
  for (const auto& z : s.values)
    if (std::abs(z.imag()) <= tol * scale && z.real() > tol * scale) best = std::max(best, z.real());
  return best;
}

double largest_positive_real_eig(const Mat& a, double tol) {
  return largest_positive_real_eig(eig(a), scale_of(a), tol);
}

std::optional<double> bracketed_root_largest(const std::function<double(double)>& f, double lo,
                                             double hi, int grid, double tol, GridSpacing spacing) {
  if (!(lo < hi) || grid < 2) throw InvalidArgument("bracketed_root_largest: need lo < hi and grid >= 2");
  if (spacing == GridSpacing::log && lo <= 0.0)
    throw InvalidArgument("bracketed_root_largest: log spacing needs lo > 0");

  auto point = [&](int i) {
    const double t = static_cast<double>(i) / (grid - 1);
    if (i == grid - 1) return hi;
    if (spacing == GridSpacing::log) return lo * std::pow(hi / lo, t);
    return lo + t * (hi - lo);
  };
  auto sgn = [](double y) { return (y > 0) - (y < 0); };

  double t_hi = point(grid - 1);
  double f_hi = f(t_hi);
  if (f_hi == 0.0) return t_hi;
  for (int i = grid - 2; i >= 0; --i) {
    const double t_lo = point(i);
    const double f_lo = f(t_lo);
    if (std::isfinite(f_lo) && std::isfinite(f_hi)) {
      if (f_lo == 0.0) return t_lo;
      if (sgn(f_lo) != sgn(f_hi)) {
        double a = t_lo, b = t_hi;
        const int sa = sgn(f_lo);
        for (int it = 0; it < 200 && b - a > tol; ++it) {
          const double m = 0.5 * (a + b);
          const double fm = f(m);
          if (fm == 0.0) return m;
          if (sgn(fm) == sa)
            a = m;
          else
            b = m;
        }
        return 0.5 * (a + b);
      }
    }
    t_hi = t_lo;
    f_hi = f_lo;
  }
  return std::nullopt;
}

Mat sym(const Mat& a) { return 0.5 * (a + a.transpose()); }

double min_sym_eig(const Mat& a) {
  if (a.rows() == 0) return std::numeric_limits<double>::infinity();
  Eigen::SelfAdjointEigenSolver<Mat> es(sym(a), Eigen::EigenvaluesOnly);
  return es.eigenvalues().minCoeff();
}

double max_sym_eig(const Mat& a) {
  if (a.rows() == 0) return -std::numeric_limits<double>::infinity();
  Eigen::SelfAdjointEigenSolver<Mat> es(sym(a), Eigen::EigenvaluesOnly);
  return es.eigenvalues().maxCoeff();
}

}  // namespace tsgda
