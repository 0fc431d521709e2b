#pragma once

#include "tsgda/matlib.hpp"

#include <functional>
#include <string>
#include <vector>

namespace tsgda {

// Raw Hessian blocks of f: d11 = D1^2 f, d12 = D12 f, d22 = D2^2 f.
struct JacobianBlocks {
  Mat d11;
  Mat d12;
  Mat d22;

  JacobianBlocks() = default;
  // Symmetrizes d11 and d22.
  JacobianBlocks(Mat d11_, Mat d12_, Mat d22_);

  int n1() const { return static_cast<int>(d11.rows()); }
  int n2() const { return static_cast<int>(d22.rows()); }
  double scale() const;
};

class ZeroSumGame {
 public:
  using CostFn = std::function<double(const Vec&)>;
  using GradFn = std::function<Vec(const Vec&)>;
  using BlocksFn = std::function<JacobianBlocks(const Vec&)>;

  ZeroSumGame(std::string name, int n1, int n2, CostFn cost, GradFn grad = {}, BlocksFn blocks = {});

  const std::string& name() const { return name_; }
  int n1() const { return n1_; }
  int n2() const { return n2_; }
  int dim() const { return n1_ + n2_; }

  double cost(const Vec& x) const;
  bool has_analytic_grad() const { return static_cast<bool>(grad_); }
  bool has_analytic_blocks() const { return static_cast<bool>(blocks_); }

  // g(x) = (D1 f, -D2 f).
  Vec grad(const Vec& x) const;
  JacobianBlocks blocks(const Vec& x) const;
  Vec fd_grad(const Vec& x) const;
  JacobianBlocks fd_blocks(const Vec& x) const;

  double fd_step_grad = 1e-5;
  double fd_step_hess = 1e-4;

  // Torus games live on [-pi, pi)^n; other games ignore these.
  void set_periodic(bool p) { periodic_ = p; }
  bool periodic() const { return periodic_; }
  void wrap(Vec& x) const;
  // a - b, wrapped onto [-pi, pi) per coordinate for periodic games.
  Vec displacement(const Vec& a, const Vec& b) const;
  double distance(const Vec& a, const Vec& b) const { return displacement(a, b).norm(); }

 private:
  std::string name_;
  int n1_;
  int n2_;
  CostFn cost_;
  GradFn grad_;
  BlocksFn blocks_;
  bool periodic_ = false;
};

Vec grad(const ZeroSumGame& game, const Vec& x);
JacobianBlocks jacobian_blocks(const ZeroSumGame& game, const Vec& x);

struct CriticalPoint {
  Vec x;
  double gnorm = 0.0;
  JacobianBlocks blocks;
};

struct CriticalSearch {
  std::vector<CriticalPoint> points;
  int dropped = 0;
};

// Damped Newton on g from every seed; converged roots are deduplicated.
CriticalSearch find_critical_points(const ZeroSumGame& game, const std::vector<Vec>& seeds,
                                    double tol = 1e-9, int max_iter = 100);

// Evenly spaced seeds on a box, per coordinate [lo, hi] with `per_axis` points.
std::vector<Vec> seed_grid(int dim, double lo, double hi, int per_axis);

struct GameParams {
  double v = 1.0;
  double eps = 1.0;
  double mu = 1.0;
  int d = 1;
  Mat sigma;  // covariance target; defaults to identity of order d
};

// f = 1/2 x^T F x with F symmetric of order n1 + n2.
ZeroSumGame quadratic_game(const std::string& name, const Mat& f, int n1, int n2);

// Ids: quad_stack, quad_spurious, poly_spurious, poly_landscape, poly_landscape_printed,
// torus, jin_dse, jin_spurious, dirac_gan, covariance_gan.
ZeroSumGame builtin(const std::string& name, const GameParams& params = {});
std::vector<std::string> builtin_names();

}  // namespace tsgda
