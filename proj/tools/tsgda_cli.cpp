#include "tsgda/classify.hpp"
#include "tsgda/converge.hpp"
#include "tsgda/errors.hpp"
#include "tsgda/ganlab.hpp"
#include "tsgda/report.hpp"
#include "tsgda/simulate.hpp"
#include "tsgda/timescale.hpp"

#include <CLI11.hpp>

#include <cmath>
#include <iostream>
#include <numbers>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

using namespace tsgda;

namespace {

struct RunConfig {
  std::string command;
  std::string game = "quad_stack";
  double v = 1.0;
  double eps = 1.0;
  double mu = 1.0;
  std::optional<double> sigma;
  int d = 1;
  double tau = 1.0;
  std::string tau_grid = "0.01:100:400:log";
  double gamma1 = 5e-4;
  std::optional<double> alpha;
  std::string x0;
  std::string point;
  std::string ref;
  std::string grid;
  std::string box;
  std::uint64_t seed = 0;
  long long steps = 200000;
  std::vector<double> ema;
  std::string out;
  std::string format;
  double tol = kDefiniteTol;
  int threads = 0;
};

constexpr int kUsage = 2;
constexpr int kPrecondition = 3;
constexpr int kNumerical = 4;

std::vector<double> parse_list(const std::string& s, const std::string& what) {
  std::vector<double> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t used = 0;
      out.push_back(std::stod(item, &used));
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw InvalidArgument(what + ": cannot parse '" + item + "'");
    }
  }
  if (out.empty()) throw InvalidArgument(what + ": empty list");
  return out;
}

Vec parse_vec(const std::string& s, int dim, const std::string& what) {
  const std::vector<double> vals = parse_list(s, what);
  if (static_cast<int>(vals.size()) != dim)
    throw InvalidArgument(what + ": expected " + std::to_string(dim) + " entries");
  return Eigen::Map<const Vec>(vals.data(), dim);
}

// lo:hi:n[:log]
std::vector<double> parse_tau_grid(const std::string& s) {
  std::vector<std::string> parts;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ':')) parts.push_back(item);
  if (parts.size() < 3 || parts.size() > 4 || (parts.size() == 4 && parts[3] != "log" && parts[3] != "lin"))
    throw InvalidArgument("--tau-grid must be lo:hi:n[:log]");
  try {
    return tau_grid(std::stod(parts[0]), std::stod(parts[1]), std::stoi(parts[2]),
                    parts.size() == 4 && parts[3] == "log");
  } catch (const std::logic_error&) {
    throw InvalidArgument("--tau-grid: cannot parse '" + s + "'");
  }
}

// lo:hi:n applied to every coordinate.
std::vector<GridAxis> parse_grid(const std::string& s, int dim) {
  const std::vector<double> v = [&] {
    std::string t = s;
    for (char& c : t)
      if (c == ':') c = ',';
    return parse_list(t, "--grid");
  }();
  if (v.size() != 3 || v[2] < 1 || v[2] != std::floor(v[2])) throw InvalidArgument("--grid must be lo:hi:n");
  return std::vector<GridAxis>(dim, GridAxis{v[0], v[1], static_cast<int>(v[2])});
}

GameParams game_params(const RunConfig& c) {
  GameParams p;
  p.v = c.v;
  p.eps = c.eps;
  p.mu = c.mu;
  p.d = c.d;
  if (c.sigma) {
    if (!(*c.sigma > 0.0)) throw InvalidArgument("--sigma must be positive");
    p.sigma = (*c.sigma) * (*c.sigma) * Mat::Identity(c.d, c.d);
  }
  return p;
}

std::vector<Vec> default_seeds(const ZeroSumGame& g, const RunConfig& c) {
  const int n = g.dim();
  if (!c.box.empty()) {
    const std::vector<GridAxis> axes = parse_grid(c.box, 1);
    return seed_grid(n, axes[0].lo, axes[0].hi, axes[0].n);
  }
  if (g.name() == "torus") return seed_grid(2, -std::numbers::pi, std::numbers::pi, 9);
  if (g.name() == "poly_landscape" || g.name() == "poly_landscape_printed") return seed_grid(2, -15.0, 15.0, 13);
  if (g.name() == "poly_spurious") {
    std::vector<Vec> seeds;
    for (double a : {-6.0, -3.0, 0.0, 3.0})
      for (double b : {-1.0, 0.0, 1.0})
        for (double e : {-100.0, -50.0, 0.0, 50.0})
          for (double f : {-1.0, 0.0, 1.0}) seeds.push_back(Eigen::Vector4d(a, b, e, f));
    return seeds;
  }
  if (n <= 2) return seed_grid(n, -3.0, 3.0, 9);
  if (n <= 4) return seed_grid(n, -3.0, 3.0, 5);
  if (n <= 8) return seed_grid(n, -2.0, 2.0, 3);
  std::mt19937_64 rng(c.seed);
  std::normal_distribution<double> normal;
  std::vector<Vec> seeds(200, Vec(n));
  for (Vec& s : seeds)
    for (int i = 0; i < n; ++i) s(i) = normal(rng);
  return seeds;
}

json point_json(const CriticalPoint& cp, double tol) {
  return json{{"x", vec_to_json(cp.x)}, {"gnorm", real_to_json(cp.gnorm)},
              {"classification", classify_point(cp.blocks, tol)}};
}

// Points named by --point, or every critical point found from the seeds.
std::vector<CriticalPoint> target_points(const ZeroSumGame& g, const RunConfig& c) {
  if (!c.point.empty()) {
    const Vec x = parse_vec(c.point, g.dim(), "--point");
    return {CriticalPoint{x, grad(g, x).norm(), jacobian_blocks(g, x)}};
  }
  return find_critical_points(g, default_seeds(g, c)).points;
}

std::string output_format(const RunConfig& c, const std::string& fallback) {
  const std::string f = c.format.empty() ? fallback : c.format;
  if (f != "json" && f != "csv") throw InvalidArgument("--format must be json or csv");
  return f;
}

void emit(const RunConfig& c, const std::string& text) {
  if (c.out.empty())
    std::cout << text;
  else
    write_atomic(c.out, text);
}

void emit_json(const RunConfig& c, const json& j) { emit(c, j.dump(2) + "\n"); }

void require_json(const RunConfig& c) {
  if (output_format(c, "json") != "json") throw InvalidArgument(c.command + " only writes JSON");
}

int cmd_classify(const RunConfig& c) {
  require_json(c);
  const ZeroSumGame g = builtin(c.game, game_params(c));
  const CriticalSearch cs = find_critical_points(g, default_seeds(g, c));
  json pts = json::array();
  for (const auto& cp : cs.points) pts.push_back(point_json(cp, c.tol));
  emit_json(c, {{"command", "classify"}, {"game", c.game}, {"points", pts}, {"dropped_seeds", cs.dropped}});
  return 0;
}

int cmd_tau_star(const RunConfig& c) {
  require_json(c);
  const ZeroSumGame g = builtin(c.game, game_params(c));
  const std::vector<CriticalPoint> pts = target_points(g, c);
  json certs = json::array();
  double best = 0.0;
  for (const auto& cp : pts) {
    if (c.point.empty() && !classify_point(cp.blocks, c.tol).is_dse()) continue;
    const TauStarCertificate cert = tau_star_eig(cp.blocks);
    best = std::max(best, cert.tau_star);
    certs.push_back({{"x", vec_to_json(cp.x)}, {"certificate", cert}});
  }
  if (certs.empty()) throw PreconditionError("tau-star: no differential Stackelberg equilibrium found");
  emit_json(c, {{"command", "tau-star"}, {"game", c.game}, {"tau_star", real_to_json(best)}, {"points", certs}});
  return 0;
}

int cmd_tau_zero(const RunConfig& c) {
  require_json(c);
  const ZeroSumGame g = builtin(c.game, game_params(c));
  const std::vector<CriticalPoint> pts = target_points(g, c);
  json certs = json::array();
  for (const auto& cp : pts) {
    if (c.point.empty() && classify_point(cp.blocks, c.tol).kind != PointKind::Spurious) continue;
    certs.push_back({{"x", vec_to_json(cp.x)}, {"certificate", tau_zero(cp.blocks)}});
  }
  if (certs.empty()) throw PreconditionError("tau-zero: no non-equilibrium critical point found");
  json out{{"command", "tau-zero"}, {"game", c.game}, {"points", certs}};
  if (certs.size() == 1) out["tau_zero"] = certs[0]["certificate"]["tau_zero"];
  emit_json(c, out);
  return 0;
}

int cmd_sweep(const RunConfig& c) {
  const ZeroSumGame g = builtin(c.game, game_params(c));
  const Vec x = c.point.empty() ? Vec(Vec::Zero(g.dim())) : parse_vec(c.point, g.dim(), "--point");
  const JacobianBlocks b = jacobian_blocks(g, x);
  const std::vector<double> taus = parse_tau_grid(c.tau_grid);
  const SpectrumSweep sw = spectrum_sweep(b, taus);
  if (output_format(c, "csv") == "csv") {
    emit(c, csv_sweep(sw));
    return 0;
  }
  json tracks = json::array();
  for (const auto& tr : sw.tracks) tracks.push_back(Spectrum{tr});
  json trans = json::array();
  for (const auto& t : real_transitions(b, taus)) trans.push_back({{"tau", t.tau}, {"to_real", t.to_real}});
  emit_json(c, {{"command", "sweep"}, {"game", c.game}, {"x", vec_to_json(x)}, {"taus", sw.taus},
                {"tracks", tracks}, {"real_transitions", trans}});
  return 0;
}

int cmd_simulate(const RunConfig& c) {
  const ZeroSumGame g = builtin(c.game, game_params(c));
  if (c.x0.empty()) throw InvalidArgument("simulate needs --x0");
  const Vec x0 = parse_vec(c.x0, g.dim(), "--x0");
  GdaOptions opts;
  opts.ema_betas = c.ema;
  opts.stride = 1;
  if (!c.ref.empty()) opts.ref = parse_vec(c.ref, g.dim(), "--ref");
  TrajectoryRecord rec;
  const bool noisy = c.sigma.has_value();
  if (noisy) {
    if (!(*c.sigma >= 0.0)) throw InvalidArgument("--sigma must be nonnegative");
    rec = run_sgda(g, x0, StepSchedule::constant(c.gamma1), c.tau, NoiseModel::gaussian(*c.sigma, c.seed), c.steps,
                   opts);
  } else {
    rec = run_gda(g, x0, c.gamma1, c.tau, c.steps, opts);
  }
  // Without --ref, measure against the critical point Newton reaches from the final iterate.
  std::optional<Vec> ref = opts.ref;
  if (!ref && !rec.diverged) {
    const CriticalSearch cs = find_critical_points(g, {rec.final_x});
    if (!cs.points.empty()) ref = cs.points[0].x;
    if (ref)
      for (const Vec& x : rec.iterates) rec.distance.push_back(g.distance(x, *ref));
  }
  if (output_format(c, "csv") == "csv") {
    emit(c, csv_trajectory(rec));
    return rec.diverged ? kNumerical : 0;
  }
  json out{{"command", "simulate"},
           {"game", c.game},
           {"tau", c.tau},
           {"gamma1", c.gamma1},
           {"steps_run", rec.steps_run},
           {"converged", rec.converged},
           {"diverged", rec.diverged},
           {"final_x", vec_to_json(rec.final_x)}};
  if (ref) {
    out["ref"] = vec_to_json(*ref);
    out["final_distance"] = real_to_json(rec.distance.back());
    const JacobianBlocks b = jacobian_blocks(g, *ref);
    const Spectrum s = eig(assemble_j_tau(b, c.tau));
    if (s.min_real() > 0.0) out["rate"] = rate_report(s, c.alpha);
  }
  emit_json(c, out);
  return rec.diverged ? kNumerical : 0;
}

int cmd_roa(const RunConfig& c) {
  const ZeroSumGame g = builtin(c.game, game_params(c));
  if (c.grid.empty()) throw InvalidArgument("roa needs --grid lo:hi:n");
  std::vector<Vec> eq;
  for (const auto& cp : find_critical_points(g, default_seeds(g, c)).points)
    if (classify_point(cp.blocks, c.tol).is_dse()) eq.push_back(cp.x);
  const RoaGrid roa = roa_scan(g, parse_grid(c.grid, g.dim()), c.tau, c.gamma1, c.steps, eq, 1e-4, c.threads);
  if (output_format(c, "csv") == "csv") {
    emit(c, csv_roa(roa));
    return 0;
  }
  json eqs = json::array();
  for (const Vec& x : eq) eqs.push_back(vec_to_json(x));
  emit_json(c, {{"command", "roa"}, {"game", c.game}, {"tau", c.tau}, {"equilibria", eqs},
                {"labels", roa.labels}, {"unresolved", roa.unresolved_count()}});
  return 0;
}

int cmd_field(const RunConfig& c) {
  const ZeroSumGame g = builtin(c.game, game_params(c));
  if (c.grid.empty()) throw InvalidArgument("field needs --grid lo:hi:n");
  const auto samples = vector_field(g, grid_points(parse_grid(c.grid, g.dim())), c.tau);
  if (output_format(c, "csv") != "csv") throw InvalidArgument("field only writes CSV");
  emit(c, csv_field(samples));
  return 0;
}

json gan_at(const JacobianBlocks& reg_blocks, const Mat& penalty, double mu, double tau, double tol) {
  // The builtin blocks already carry the penalty; strip it for the structural check.
  const JacobianBlocks unreg(reg_blocks.d11, reg_blocks.d12, reg_blocks.d22 + mu * penalty);
  const Spectrum s = eig(regularized_jacobian(unreg, penalty, tau, mu));
  json j{{"tau", tau},
         {"spectrum", s},
         {"stable", s.min_real() > 0.0},
         {"realizable", realizable_check(unreg, penalty, mu, tol)},
         {"dimension_check", gan_dimension_check(unreg.n1(), unreg.n2())}};
  if (s.min_real() > 0.0) j["learning_rate_bound"] = learning_rate_bound(s).gamma;
  return j;
}

int cmd_gan(const RunConfig& c) {
  require_json(c);
  const std::vector<double> taus = c.tau_grid.empty() ? std::vector<double>{c.tau} : parse_tau_grid(c.tau_grid);
  json rows = json::array();
  if (c.game == "dirac_gan") {
    const ZeroSumGame g = dirac_gan_game({c.mu});
    const JacobianBlocks b = g.blocks(Vec::Zero(2));
    for (double tau : taus) {
      json row = gan_at(b, dirac_penalty_hessian(), c.mu, tau, c.tol);
      row["closed_form"] = dirac_spectrum(c.mu, tau);
      rows.push_back(row);
    }
    emit_json(c, {{"command", "gan"}, {"game", c.game}, {"mu", c.mu}, {"x", vec_to_json(Vec::Zero(2))},
                  {"rows", rows}});
    return 0;
  }
  if (c.game == "covariance_gan") {
    const GameParams p = game_params(c);
    CovGanSpec spec{c.d, p.sigma, c.mu};
    const ZeroSumGame g = cov_gan_game(spec);
    const Mat sigma = p.sigma.size() == 0 ? Mat(Mat::Identity(c.d, c.d)) : p.sigma;
    const int m = c.d * c.d;
    Vec x = Vec::Zero(2 * m);
    x.head(m) = vec(Mat(sigma.llt().matrixL()));
    const JacobianBlocks b = g.blocks(x);
    for (double tau : taus) {
      json row = gan_at(b, Mat::Identity(m, m), c.mu, tau, c.tol);
      if (c.d == 1) row["closed_form"] = cov_gan_d1_spectrum(std::sqrt(sigma(0, 0)), c.mu, tau);
      rows.push_back(row);
    }
    emit_json(c, {{"command", "gan"}, {"game", c.game}, {"mu", c.mu}, {"d", c.d}, {"x", vec_to_json(x)},
                  {"rows", rows}});
    return 0;
  }
  throw InvalidArgument("gan needs --game dirac_gan or covariance_gan");
}

int fail(const RunConfig& c, int code, const std::string& kind, const std::string& reason) {
  const json j{{"error", kind}, {"reason", reason}, {"exit_code", code}, {"command", c.command}};
  std::cout << j.dump() << "\n";
  std::cerr << "tsgda: " << reason << "\n";
  return code;
}

}  // namespace

int main(int argc, char** argv) {
  RunConfig c;
  CLI::App app{"Timescale-separated gradient descent-ascent toolkit"};
  app.require_subcommand(1);
  app.fallthrough();

  std::string names;
  for (const auto& n : builtin_names()) names += (names.empty() ? "" : ", ") + n;
  app.add_option("--game", c.game, "Builtin game id: " + names);
  app.add_option("--v", c.v, "Parameter v of the quadratic examples");
  app.add_option("--eps", c.eps, "Parameter eps of the scaling-law games");
  app.add_option("--mu", c.mu, "Regularization weight");
  app.add_option("--sigma", c.sigma, "Covariance GAN target scale (Sigma = sigma^2 I) or SGDA noise level");
  app.add_option("--d", c.d, "Covariance GAN dimension");
  app.add_option("--tau", c.tau, "Timescale ratio");
  app.add_option("--tau-grid", c.tau_grid, "lo:hi:n[:log]");
  app.add_option("--gamma1", c.gamma1, "Player-1 learning rate");
  app.add_option("--alpha", c.alpha, "Rate-bound margin alpha");
  app.add_option("--x0", c.x0, "Initial point, comma separated");
  app.add_option("--point", c.point, "Evaluation point, comma separated");
  app.add_option("--ref", c.ref, "Reference point for the distance column");
  app.add_option("--grid", c.grid, "Per-axis grid lo:hi:n for roa and field");
  app.add_option("--box", c.box, "Seed box lo:hi:n for the critical-point search");
  app.add_option("--seed", c.seed, "Random seed");
  app.add_option("--steps", c.steps, "Iteration count");
  app.add_option("--ema", c.ema, "EMA weights in (0, 1]")->delimiter(',');
  app.add_option("--out", c.out, "Output file (written atomically); stdout when absent");
  app.add_option("--format", c.format, "json or csv");
  app.add_option("--tol", c.tol, "Definiteness tolerance");
  app.add_option("--threads", c.threads, "Worker threads for roa (0 = hardware)");

  struct Cmd {
    const char* name;
    const char* help;
    int (*run)(const RunConfig&);
  };
  const std::vector<Cmd> cmds = {
      {"classify", "Find and classify critical points", cmd_classify},
      {"tau-star", "Timescale threshold tau* at DSE points", cmd_tau_star},
      {"tau-zero", "Instability threshold at non-equilibrium points", cmd_tau_zero},
      {"sweep", "Eigenvalue loci of J_tau over a tau grid", cmd_sweep},
      {"simulate", "Run tau-GDA or SGDA", cmd_simulate},
      {"roa", "Region-of-attraction scan", cmd_roa},
      {"field", "Vector field samples on a grid", cmd_field},
      {"gan", "Dirac-GAN and covariance GAN spectra", cmd_gan},
  };
  std::vector<CLI::App*> subs;
  for (const auto& cmd : cmds) subs.push_back(app.add_subcommand(cmd.name, cmd.help));

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    return fail(c, kUsage, "usage", e.what());
  }

  bool tau_grid_given = app.count("--tau-grid") > 0;
  for (std::size_t i = 0; i < cmds.size(); ++i) {
    if (!subs[i]->parsed()) continue;
    c.command = cmds[i].name;
    if (c.command == "gan" && !tau_grid_given) c.tau_grid.clear();
    try {
      return cmds[i].run(c);
    } catch (const InvalidArgument& e) {
      return fail(c, kUsage, "usage", e.what());
    } catch (const PreconditionError& e) {
      return fail(c, kPrecondition, "precondition", e.what());
    } catch (const NumericalError& e) {
      return fail(c, kNumerical, "numerical", e.what());
    } catch (const std::exception& e) {
      return fail(c, kNumerical, "numerical", e.what());
    }
  }
  return fail(c, kUsage, "usage", "no subcommand");
}
