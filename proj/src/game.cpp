#include "tsgda/game.hpp"

#include "tsgda/errors.hpp"

#include <cmath>
#include <numbers>

namespace tsgda {

JacobianBlocks::JacobianBlocks(Mat d11_, Mat d12_, Mat d22_)
    : d11(sym(d11_)), d12(std::move(d12_)), d22(sym(d22_)) {
  if (d12.rows() != d11.rows() || d12.cols() != d22.rows())
    throw InvalidArgument("JacobianBlocks: inconsistent block shapes");
}

double JacobianBlocks::scale() const {
  return 1.0 + std::sqrt(d11.squaredNorm() + 2.0 * d12.squaredNorm() + d22.squaredNorm());
}

ZeroSumGame::ZeroSumGame(std::string name, int n1, int n2, CostFn cost, GradFn grad, BlocksFn blocks)
    : name_(std::move(name)), n1_(n1), n2_(n2), cost_(std::move(cost)), grad_(std::move(grad)),
      blocks_(std::move(blocks)) {
  if (n1_ < 1 || n2_ < 1) throw InvalidArgument("ZeroSumGame: both players need dimension >= 1");
  if (!cost_) throw InvalidArgument("ZeroSumGame: cost evaluator is required");
}

double ZeroSumGame::cost(const Vec& x) const {
  if (x.size() != dim()) throw InvalidArgument("cost: wrong point dimension");
  return cost_(x);
}

Vec ZeroSumGame::grad(const Vec& x) const {
  if (x.size() != dim()) throw InvalidArgument("grad: wrong point dimension");
  if (!x.allFinite()) throw InvalidArgument("grad: non-finite point");
  return grad_ ? grad_(x) : fd_grad(x);
}

JacobianBlocks ZeroSumGame::blocks(const Vec& x) const {
  if (x.size() != dim()) throw InvalidArgument("blocks: wrong point dimension");
  if (!x.allFinite()) throw InvalidArgument("blocks: non-finite point");
  return blocks_ ? blocks_(x) : fd_blocks(x);
}

Vec ZeroSumGame::fd_grad(const Vec& x) const {
  Vec g(dim());
  Vec y = x;
  for (int i = 0; i < dim(); ++i) {
    const double h = fd_step_grad * (1.0 + std::abs(x(i)));
    y(i) = x(i) + h;
    const double fp = cost_(y);
    y(i) = x(i) - h;
    const double fm = cost_(y);
    y(i) = x(i);
    if (!std::isfinite(fp) || !std::isfinite(fm)) throw NumericalError("fd_grad: non-finite cost in stencil");
    g(i) = (fp - fm) / (2.0 * h);
  }
  g.tail(n2_) *= -1.0;
  return g;
}

JacobianBlocks ZeroSumGame::fd_blocks(const Vec& x) const {
  const int n = dim();
  Mat hess(n, n);
  Vec h(n);
  for (int i = 0; i < n; ++i) h(i) = fd_step_hess * (1.0 + std::abs(x(i)));
  const double f0 = cost_(x);
  Vec y = x;
  auto eval = [&](const Vec& z) {
    const double v = cost_(z);
    if (!std::isfinite(v)) throw NumericalError("fd_blocks: non-finite cost in stencil");
    return v;
  };
  for (int i = 0; i < n; ++i) {
    y(i) = x(i) + h(i);
    const double fp = eval(y);
    y(i) = x(i) - h(i);
    const double fm = eval(y);
    y(i) = x(i);
    hess(i, i) = (fp - 2.0 * f0 + fm) / (h(i) * h(i));
    for (int j = 0; j < i; ++j) {
      y(i) = x(i) + h(i);
      y(j) = x(j) + h(j);
      const double fpp = eval(y);
      y(j) = x(j) - h(j);
      const double fpm = eval(y);
      y(i) = x(i) - h(i);
      const double fmm = eval(y);
      y(j) = x(j) + h(j);
      const double fmp = eval(y);
      y(i) = x(i);
      y(j) = x(j);
      hess(i, j) = hess(j, i) = (fpp - fpm - fmp + fmm) / (4.0 * h(i) * h(j));
    }
  }
  return JacobianBlocks(hess.topLeftCorner(n1_, n1_), hess.topRightCorner(n1_, n2_),
                        hess.bottomRightCorner(n2_, n2_));
}

void ZeroSumGame::wrap(Vec& x) const {
  if (!periodic_) return;
  constexpr double pi = std::numbers::pi;
  for (int i = 0; i < x.size(); ++i) {
    double r = std::fmod(x(i) + pi, 2.0 * pi);
    if (r < 0) r += 2.0 * pi;
    x(i) = r - pi;
  }
}

Vec ZeroSumGame::displacement(const Vec& a, const Vec& b) const {
  Vec d = a - b;
  wrap(d);
  return d;
}

Vec grad(const ZeroSumGame& game, const Vec& x) { return game.grad(x); }

JacobianBlocks jacobian_blocks(const ZeroSumGame& game, const Vec& x) { return game.blocks(x); }

namespace {

Mat game_jacobian(const JacobianBlocks& b) {
  const int n1 = b.n1(), n2 = b.n2();
  Mat j(n1 + n2, n1 + n2);
  j << b.d11, b.d12, -b.d12.transpose(), -b.d22;
  return j;
}

}  // namespace

CriticalSearch find_critical_points(const ZeroSumGame& game, const std::vector<Vec>& seeds,
                                    double tol, int max_iter) {
  CriticalSearch out;
  for (const Vec& seed : seeds) {
    if (seed.size() != game.dim() || !seed.allFinite())
      throw InvalidArgument("find_critical_points: bad seed");
    Vec x = seed;
    game.wrap(x);
    Vec g = game.grad(x);
    double gn = g.norm();
    bool ok = gn <= tol;
    for (int it = 0; it < max_iter && !ok; ++it) {
      const Mat j = game_jacobian(game.blocks(x));
      Eigen::FullPivLU<Mat> lu(j);
      Vec step;
      if (lu.isInvertible() && lu.rcond() > 1e-14) {
        step = -lu.solve(g);
      } else {
        // Gradient flow on |g|^2 / 2.
        step = -0.1 * j.transpose() * g / (1.0 + j.squaredNorm());
      }
      double t = 1.0;
      bool accepted = false;
      for (int k = 0; k <= 30; ++k, t *= 0.5) {
        Vec trial = x + t * step;
        game.wrap(trial);
        if (!trial.allFinite()) continue;
        const Vec gt = game.grad(trial);
        if (gt.allFinite() && gt.norm() < gn) {
          x = trial;
          g = gt;
          gn = gt.norm();
          accepted = true;
          break;
        }
      }
      if (!accepted) break;
      ok = gn <= tol;
    }
    if (!ok) {
      ++out.dropped;
      continue;
    }
    bool dup = false;
    for (const auto& p : out.points)
      if (game.distance(p.x, x) <= 1e-6 * (1.0 + x.norm())) dup = true;
    if (!dup) out.points.push_back({x, gn, game.blocks(x)});
  }
  return out;
}

std::vector<Vec> seed_grid(int dim, double lo, double hi, int per_axis) {
  if (dim < 1 || per_axis < 1) throw InvalidArgument("seed_grid: bad shape");
  std::vector<Vec> seeds;
  std::vector<int> idx(dim, 0);
  while (true) {
    Vec x(dim);
    for (int i = 0; i < dim; ++i)
      x(i) = per_axis == 1 ? 0.5 * (lo + hi) : lo + (hi - lo) * idx[i] / (per_axis - 1);
    seeds.push_back(x);
    int k = 0;
    while (k < dim && ++idx[k] == per_axis) idx[k++] = 0;
    if (k == dim) break;
  }
  return seeds;
}

ZeroSumGame quadratic_game(const std::string& name, const Mat& f, int n1, int n2) {
  if (f.rows() != n1 + n2 || f.cols() != n1 + n2) throw InvalidArgument("quadratic_game: shape mismatch");
  const Mat fs = sym(f);
  const JacobianBlocks blocks(fs.topLeftCorner(n1, n1), fs.topRightCorner(n1, n2),
                              fs.bottomRightCorner(n2, n2));
  return ZeroSumGame(
      name, n1, n2, [fs](const Vec& x) { return 0.5 * x.dot(fs * x); },
      [fs, n2](const Vec& x) {
        Vec g = fs * x;
        g.tail(n2) *= -1.0;
        return g;
      },
      [blocks](const Vec&) { return blocks; });
}

namespace {

void require_positive(double v, const char* what) {
  if (!(v > 0.0) || !std::isfinite(v)) throw InvalidArgument(std::string(what) + " must be positive");
}

ZeroSumGame make_quad_stack(double v) {
  require_positive(v, "v");
  Mat f(4, 4);
  f << -v, 0, -v, 0,
       0, v / 2, 0, v / 2,
       -v, 0, -v / 2, 0,
       0, v / 2, 0, -v;
  return quadratic_game("quad_stack", f, 2, 2);
}

ZeroSumGame make_quad_spurious(double v) {
  require_positive(v, "v");
  Mat f(4, 4);
  f << v / 2, 0, v / 2, 0,
       0, -v / 4, 0, v / 2,
       v / 2, 0, v / 4, 0,
       0, v / 2, 0, -v / 2;
  return quadratic_game("quad_spurious", f, 2, 2);
}

// Coordinates (x11, x12, x21, x22) = (a, b, c, d).
ZeroSumGame make_poly_spurious() {
  struct Parts {
    double q, p, s;
    Eigen::Vector4d dq, dp, ds;
  };
  auto parts = [](const Vec& x) {
    const double a = x(0), b = x(1), c = x(2), d = x(3);
    Parts r;
    r.q = a * a + 2 * a * c + 0.5 * c * c - 0.5 * b * b + 2 * b * d - d * d;
    r.p = (a - 1) * (a - 1);
    r.s = (a - 1) * (a - 1) + (b - 1) * (b - 1) - (c - 1) * (c - 1) - (d - 1) * (d - 1);
    r.dq << 2 * a + 2 * c, -b + 2 * d, 2 * a + c, 2 * b - 2 * d;
    r.dp << 2 * (a - 1), 0, 0, 0;
    r.ds << 2 * (a - 1), 2 * (b - 1), -2 * (c - 1), -2 * (d - 1);
    return r;
  };
  auto cost = [parts](const Vec& x) {
    const Parts r = parts(x);
    return 1.25 * r.q * r.p + x(0) * x(0) * r.s;
  };
  auto grad = [parts](const Vec& x) {
    const Parts r = parts(x);
    const double a = x(0);
    Eigen::Vector4d df = 1.25 * (r.p * r.dq + r.q * r.dp) + a * a * r.ds;
    df(0) += 2 * a * r.s;
    Vec g = df;
    g.tail(2) *= -1.0;
    return g;
  };
  auto blocks = [parts](const Vec& x) {
    const Parts r = parts(x);
    const double a = x(0);
    Eigen::Matrix4d hq;
    hq << 2, 0, 2, 0,
          0, -1, 0, 2,
          2, 0, 1, 0,
          0, 2, 0, -2;
    Eigen::Matrix4d hp = Eigen::Matrix4d::Zero();
    hp(0, 0) = 2;
    const Eigen::Matrix4d hs = Eigen::Vector4d(2, 2, -2, -2).asDiagonal();
    const Eigen::Vector4d e1(1, 0, 0, 0);
    Eigen::Matrix4d h = 1.25 * (r.p * hq + r.q * hp + r.dp * r.dq.transpose() + r.dq * r.dp.transpose()) +
                        a * a * hs + 2 * a * (e1 * r.ds.transpose() + r.ds * e1.transpose());
    h(0, 0) += 2 * r.s;
    return JacobianBlocks(h.topLeftCorner(2, 2), h.topRightCorner(2, 2), h.bottomRightCorner(2, 2));
  };
  return ZeroSumGame("poly_spurious", 2, 2, cost, grad, blocks);
}

// f = -E h with E = exp(-0.01 |x|^2) and h = (x1 + 0.3 x2^2)^2 + (x2 + 0.3 x1^2)^2.
// The printed form h = (0.3 x1 + x2^2)^2 + (0.3 x2 + x1^2)^2 is kept as a separate id.
ZeroSumGame make_poly_landscape(bool printed) {
  struct Parts {
    double e, h;
    Eigen::Vector2d de, dh;
    Eigen::Matrix2d he, hh;
  };
  const double c = printed ? 0.3 : 1.0;
  const double k = printed ? 1.0 : 0.3;
  auto parts = [c, k](const Vec& x) {
    const double x1 = x(0), x2 = x(1);
    Parts r;
    r.e = std::exp(-0.01 * (x1 * x1 + x2 * x2));
    const Eigen::Vector2d dr(0.02 * x1, 0.02 * x2);
    r.de = -r.e * dr;
    r.he = r.e * (dr * dr.transpose() - 0.02 * Eigen::Matrix2d::Identity());
    const double a = c * x1 + k * x2 * x2;
    const double b = c * x2 + k * x1 * x1;
    const Eigen::Vector2d da(c, 2 * k * x2), db(2 * k * x1, c);
    Eigen::Matrix2d ha = Eigen::Matrix2d::Zero(), hb = Eigen::Matrix2d::Zero();
    ha(1, 1) = 2 * k;
    hb(0, 0) = 2 * k;
    r.h = a * a + b * b;
    r.dh = 2 * a * da + 2 * b * db;
    r.hh = 2 * (da * da.transpose() + a * ha + db * db.transpose() + b * hb);
    return r;
  };
  auto cost = [parts](const Vec& x) {
    const Parts r = parts(x);
    return -r.e * r.h;
  };
  auto grad = [parts](const Vec& x) {
    const Parts r = parts(x);
    const Eigen::Vector2d df = -(r.h * r.de + r.e * r.dh);
    return Vec(Eigen::Vector2d(df(0), -df(1)));
  };
  auto blocks = [parts](const Vec& x) {
    const Parts r = parts(x);
    const Eigen::Matrix2d h =
        -(r.h * r.he + r.de * r.dh.transpose() + r.dh * r.de.transpose() + r.e * r.hh);
    return JacobianBlocks(Mat::Constant(1, 1, h(0, 0)), Mat::Constant(1, 1, h(0, 1)),
                          Mat::Constant(1, 1, h(1, 1)));
  };
  return ZeroSumGame(printed ? "poly_landscape_printed" : "poly_landscape", 1, 1, cost, grad, blocks);
}

ZeroSumGame make_torus() {
  auto cost = [](const Vec& x) {
    return -0.15 * std::cos(x(0)) + std::cos(x(0) - x(1)) + 0.15 * std::cos(x(1));
  };
  auto grad = [](const Vec& x) {
    const double s = std::sin(x(0) - x(1));
    Vec g(2);
    g << 0.15 * std::sin(x(0)) - s, -(s - 0.15 * std::sin(x(1)));
    return g;
  };
  auto blocks = [](const Vec& x) {
    const double c = std::cos(x(0) - x(1));
    return JacobianBlocks(Mat::Constant(1, 1, 0.15 * std::cos(x(0)) - c), Mat::Constant(1, 1, c),
                          Mat::Constant(1, 1, -c - 0.15 * std::cos(x(1))));
  };
  ZeroSumGame g("torus", 1, 1, cost, grad, blocks);
  g.set_periodic(true);
  return g;
}

ZeroSumGame make_jin_dse(double eps) {
  require_positive(eps, "eps");
  const double r = std::sqrt(eps);
  Mat f(2, 2);
  f << -2, 2 * r,
       2 * r, -eps;
  return quadratic_game("jin_dse", f, 1, 1);
}

ZeroSumGame make_jin_spurious(double eps) {
  require_positive(eps, "eps");
  const double r = std::sqrt(eps);
  Mat f(4, 4);
  f << 2, 0, 2 * r, 0,
       0, -1, 0, 2 * r,
       2 * r, 0, eps, 0,
       0, 2 * r, 0, -2 * eps;
  return quadratic_game("jin_spurious", f, 2, 2);
}

// Logistic loss l(t) = -log(1 + e^{-t}).
double ell(double t) { return -std::log1p(std::exp(-t)); }
double sigmoid(double t) { return 1.0 / (1.0 + std::exp(-t)); }
double ell_d1(double t) { return sigmoid(-t); }
double ell_d2(double t) { return -sigmoid(t) * sigmoid(-t); }

// f = l(theta w) + l(0) - (mu/2) w^2.
ZeroSumGame make_dirac_gan(double mu) {
  if (!(mu >= 0.0)) throw InvalidArgument("mu must be nonnegative");
  auto cost = [mu](const Vec& x) { return ell(x(0) * x(1)) + ell(0.0) - 0.5 * mu * x(1) * x(1); };
  auto grad = [mu](const Vec& x) {
    const double t = x(0), w = x(1);
    const double l1 = ell_d1(t * w);
    Vec g(2);
    g << l1 * w, -(l1 * t - mu * w);
    return g;
  };
  auto blocks = [mu](const Vec& x) {
    const double t = x(0), w = x(1);
    const double l1 = ell_d1(t * w), l2 = ell_d2(t * w);
    return JacobianBlocks(Mat::Constant(1, 1, l2 * w * w), Mat::Constant(1, 1, l2 * t * w + l1),
                          Mat::Constant(1, 1, l2 * t * t - mu));
  };
  return ZeroSumGame("dirac_gan", 1, 1, cost, grad, blocks);
}

// Variables (vec V, vec W), both d x d row-major.
// f = <W, Sigma - V V^T> - (mu/2) |W|_F^2.
ZeroSumGame make_covariance_gan(int d, const Mat& sigma_in, double mu) {
  if (d < 1) throw InvalidArgument("d must be >= 1");
  require_positive(mu, "mu");
  const Mat sigma = sigma_in.size() == 0 ? Mat(Mat::Identity(d, d)) : sigma_in;
  if (sigma.rows() != d || sigma.cols() != d) throw InvalidArgument("sigma must be d x d");
  if ((sigma - sigma.transpose()).norm() > 1e-12 * scale_of(sigma) || min_sym_eig(sigma) <= 0.0)
    throw InvalidArgument("sigma must be symmetric positive definite");
  const int m = d * d;
  auto split = [d, m](const Vec& x) {
    return std::pair<Mat, Mat>(unvec(x.head(m), d, d), unvec(x.tail(m), d, d));
  };
  auto cost = [=](const Vec& x) {
    const auto [v, w] = split(x);
    return (w.array() * (sigma - v * v.transpose()).array()).sum() - 0.5 * mu * w.squaredNorm();
  };
  auto grad = [=](const Vec& x) {
    const auto [v, w] = split(x);
    Vec g(2 * m);
    g.head(m) = vec(-(w + w.transpose()) * v);
    g.tail(m) = vec(-(sigma - v * v.transpose()) + mu * w);
    return g;
  };
  auto blocks = [=](const Vec& x) {
    const auto [v, w] = split(x);
    const Mat d11 = -kron(w + w.transpose(), Mat::Identity(d, d));
    Mat d12 = Mat::Zero(m, m);
    for (int a = 0; a < d; ++a)
      for (int b = 0; b < d; ++b)
        for (int c = 0; c < d; ++c)
          for (int e = 0; e < d; ++e) {
            double val = 0.0;
            if (a == c) val -= v(e, b);
            if (a == e) val -= v(c, b);
            d12(a * d + b, c * d + e) = val;
          }
    return JacobianBlocks(d11, d12, -mu * Mat::Identity(m, m));
  };
  return ZeroSumGame("covariance_gan", m, m, cost, grad, blocks);
}

}  // namespace

ZeroSumGame builtin(const std::string& name, const GameParams& p) {
  if (name == "quad_stack") return make_quad_stack(p.v);
  if (name == "quad_spurious") return make_quad_spurious(p.v);
  if (name == "poly_spurious") return make_poly_spurious();
  if (name == "poly_landscape") return make_poly_landscape(false);
  if (name == "poly_landscape_printed") return make_poly_landscape(true);
  if (name == "torus") return make_torus();
  if (name == "jin_dse") return make_jin_dse(p.eps);
  if (name == "jin_spurious") return make_jin_spurious(p.eps);
  if (name == "dirac_gan") return make_dirac_gan(p.mu);
  if (name == "covariance_gan") return make_covariance_gan(p.d, p.sigma, p.mu);
  throw InvalidArgument("unknown game: " + name);
}

std::vector<std::string> builtin_names() {
  return {"quad_stack", "quad_spurious", "poly_spurious", "poly_landscape", "poly_landscape_printed",
          "torus",      "jin_dse",       "jin_spurious",  "dirac_gan",      "covariance_gan"};
}

}  // namespace tsgda
