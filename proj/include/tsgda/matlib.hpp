#pragma once

#include <Eigen/Dense>

#include <complex>
#include <functional>
#include <optional>
#include <vector>

namespace tsgda {

using Mat = Eigen::MatrixXd;
using Vec = Eigen::VectorXd;
using Complex = std::complex<double>;

// Tolerance bands, all relative to scale(A) = 1 + ||A||_F.
inline constexpr double kZeroRealTol = 1e-9;
inline constexpr double kRealImagTol = 1e-7;
inline constexpr double kPairTol = 1e-10;

struct Spectrum {
  std::vector<Complex> values;

  std::size_t size() const { return values.size(); }
  double max_real() const;
  double min_real() const;
  // Sorted by (Re, Im); useful for multiset comparisons.
  std::vector<Complex> sorted() const;
};

struct Inertia {
  int n_pos = 0;
  int n_neg = 0;
  int n_zero = 0;

  bool operator==(const Inertia&) const = default;
};

struct LyapunovPair {
  Mat p;
  Mat q;
};

double scale_of(const Mat& a);

// vec stacks rows (row-major). vech stacks the lower triangle row by row:
// (0,0), (1,0), (1,1), (2,0), (2,1), (2,2), ...
Vec vec(const Mat& x);
Mat unvec(const Vec& v, int rows, int cols);
Vec vech(const Mat& x);

Mat kron(const Mat& a, const Mat& b);
Mat kron_sum(const Mat& a, const Mat& b);
Mat duplication_matrix(int n);
Mat duplication_pinv(int n);
Mat boxplus(const Mat& a);

Spectrum eig(const Mat& a);

// J11 - J12 * J22^{-1} * J21 for the leading n1 x n1 block.
Mat schur_complement_first(const Mat& j, int n1, int n2);

Inertia inertia(const Mat& a, double tol = kZeroRealTol);
Inertia inertia(const Spectrum& s, double scale, double tol = kZeroRealTol);

// Solves A X + X A^T = Q through the Kronecker form.
Mat solve_lyapunov(const Mat& a, const Mat& q);

// Returns P symmetric, Q symmetric positive definite with A P + P A^T = Q and
// inertia(P) = inertia(A). A must have no eigenvalue near the imaginary axis.
LyapunovPair inertia_lyapunov(const Mat& a, double tol = kZeroRealTol);

double largest_positive_real_eig(const Mat& a, double tol = kRealImagTol);
double largest_positive_real_eig(const Spectrum& s, double scale, double tol = kRealImagTol);

enum class GridSpacing { linear, log };

// Largest sign-change bracketed root of f on [lo, hi], refined by bisection.
std::optional<double> bracketed_root_largest(const std::function<double(double)>& f, double lo,
                                             double hi, int grid, double tol,
                                             GridSpacing spacing = GridSpacing::linear);

// Symmetric part.
Mat sym(const Mat& a);
double min_sym_eig(const Mat& a);
double max_sym_eig(const Mat& a);

}  // namespace tsgda
