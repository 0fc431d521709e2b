#include "tsgda/report.hpp"

#include "tsgda/errors.hpp"

#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

namespace tsgda {

json real_to_json(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  return x;
}

double real_from_json(const json& j) {
  if (j.is_string()) {
    const auto s = j.get<std::string>();
    if (s == "inf") return std::numeric_limits<double>::infinity();
    if (s == "-inf") return -std::numeric_limits<double>::infinity();
    if (s == "nan") return std::numeric_limits<double>::quiet_NaN();
    throw InvalidArgument("real_from_json: unexpected string " + s);
  }
  return j.get<double>();
}

json complex_to_json(const Complex& z) { return json::array({real_to_json(z.real()), real_to_json(z.imag())}); }

Complex complex_from_json(const json& j) {
  if (!j.is_array() || j.size() != 2) throw InvalidArgument("complex must be [re, im]");
  return Complex(real_from_json(j[0]), real_from_json(j[1]));
}

void to_json(json& j, const Spectrum& s) {
  j = json::array();
  for (const auto& z : s.values) j.push_back(complex_to_json(z));
}

void from_json(const json& j, Spectrum& s) {
  s.values.clear();
  for (const auto& z : j) s.values.push_back(complex_from_json(z));
}

void to_json(json& j, const Inertia& in) {
  j = json{{"n_pos", in.n_pos}, {"n_neg", in.n_neg}, {"n_zero", in.n_zero}};
}

void from_json(const json& j, Inertia& in) {
  in.n_pos = j.at("n_pos").get<int>();
  in.n_neg = j.at("n_neg").get<int>();
  in.n_zero = j.at("n_zero").get<int>();
}

PointKind kind_from_string(const std::string& s) {
  if (s == "DNE") return PointKind::DNE;
  if (s == "DSE_only") return PointKind::DSE_only;
  if (s == "Spurious") return PointKind::Spurious;
  if (s == "Degenerate") return PointKind::Degenerate;
  throw InvalidArgument("unknown classification kind: " + s);
}

void to_json(json& j, const Classification& c) {
  j = json{{"kind", to_string(c.kind)},
           {"d11_min", real_to_json(c.d11_min)},
           {"d11_max", real_to_json(c.d11_max)},
           {"neg_d22_min", real_to_json(c.neg_d22_min)},
           {"neg_d22_max", real_to_json(c.neg_d22_max)},
           {"s1_min", real_to_json(c.s1_min)},
           {"s1_max", real_to_json(c.s1_max)},
           {"d22_min_sv", real_to_json(c.d22_min_sv)},
           {"s1_min_sv", real_to_json(c.s1_min_sv)}};
}

void from_json(const json& j, Classification& c) {
  c.kind = kind_from_string(j.at("kind").get<std::string>());
  c.d11_min = real_from_json(j.at("d11_min"));
  c.d11_max = real_from_json(j.at("d11_max"));
  c.neg_d22_min = real_from_json(j.at("neg_d22_min"));
  c.neg_d22_max = real_from_json(j.at("neg_d22_max"));
  c.s1_min = real_from_json(j.at("s1_min"));
  c.s1_max = real_from_json(j.at("s1_max"));
  c.d22_min_sv = real_from_json(j.at("d22_min_sv"));
  c.s1_min_sv = real_from_json(j.at("s1_min_sv"));
}

void to_json(json& j, const TauStarCertificate& c) {
  j = json{{"schema", "tsgda.tau_star.v1"},
           {"tau_star", real_to_json(c.tau_star)},
           {"q_spectrum", c.q_spectrum},
           {"guard_root", c.guard_root ? real_to_json(*c.guard_root) : json(nullptr)},
           {"stability_margin", real_to_json(c.stability_margin)},
           {"boundary_pair_sum", real_to_json(c.boundary_pair_sum)}};
}

void from_json(const json& j, TauStarCertificate& c) {
  c.tau_star = real_from_json(j.at("tau_star"));
  c.q_spectrum = j.at("q_spectrum").get<Spectrum>();
  const json& g = j.at("guard_root");
  c.guard_root = g.is_null() ? std::nullopt : std::optional<double>(real_from_json(g));
  c.stability_margin = real_from_json(j.at("stability_margin"));
  c.boundary_pair_sum = real_from_json(j.at("boundary_pair_sum"));
}

void to_json(json& j, const TauZeroCertificate& c) {
  j = json{{"schema", "tsgda.tau_zero.v1"},
           {"tau_zero", real_to_json(c.tau_zero)},
           {"p_inertia", c.p_inertia},
           {"verified_tau", c.verified_tau},
           {"verified_margin", c.verified_margin}};
}

void from_json(const json& j, TauZeroCertificate& c) {
  c.tau_zero = real_from_json(j.at("tau_zero"));
  c.p_inertia = j.at("p_inertia").get<Inertia>();
  c.verified_tau = j.at("verified_tau").get<std::vector<double>>();
  c.verified_margin = j.at("verified_margin").get<std::vector<double>>();
}

void to_json(json& j, const RateReport& r) {
  j = json{{"schema", "tsgda.rate.v1"},
           {"gamma", real_to_json(r.gamma)},
           {"lambda_m", complex_to_json(r.lambda_m)},
           {"alpha", real_to_json(r.alpha)},
           {"gamma1", real_to_json(r.gamma1)},
           {"beta", real_to_json(r.beta)},
           {"rate_base", real_to_json(r.rate_base)},
           {"identity_residual", real_to_json(r.identity_residual)}};
}

void from_json(const json& j, RateReport& r) {
  r.gamma = real_from_json(j.at("gamma"));
  r.lambda_m = complex_from_json(j.at("lambda_m"));
  r.alpha = real_from_json(j.at("alpha"));
  r.gamma1 = real_from_json(j.at("gamma1"));
  r.beta = real_from_json(j.at("beta"));
  r.rate_base = real_from_json(j.at("rate_base"));
  r.identity_residual = real_from_json(j.at("identity_residual"));
}

void to_json(json& j, const RealizableReport& r) {
  j = json{{"schema", "tsgda.realizable.v1"},
           {"d11_norm", real_to_json(r.d11_norm)},
           {"d12_rank", r.d12_rank},
           {"lambda_min_c", real_to_json(r.lambda_min_c)},
           {"d11_zero", r.d11_zero},
           {"d12_full_rank", r.d12_full_rank},
           {"c_positive", r.c_positive},
           {"dse_by_theorem", r.dse_by_theorem}};
}

void from_json(const json& j, RealizableReport& r) {
  r.d11_norm = real_from_json(j.at("d11_norm"));
  r.d12_rank = j.at("d12_rank").get<int>();
  r.lambda_min_c = real_from_json(j.at("lambda_min_c"));
  r.d11_zero = j.at("d11_zero").get<bool>();
  r.d12_full_rank = j.at("d12_full_rank").get<bool>();
  r.c_positive = j.at("c_positive").get<bool>();
  r.dse_by_theorem = j.at("dse_by_theorem").get<bool>();
}

json vec_to_json(const Vec& v) {
  json a = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(real_to_json(v(i)));
  return a;
}

Vec vec_from_json(const json& j) {
  Vec v(static_cast<Eigen::Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i) v(static_cast<Eigen::Index>(i)) = real_from_json(j[i]);
  return v;
}

json mat_to_json(const Mat& m) {
  json rows = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) rows.push_back(vec_to_json(m.row(i).transpose()));
  return rows;
}

Mat mat_from_json(const json& j) {
  const auto r = static_cast<Eigen::Index>(j.size());
  const auto c = r == 0 ? 0 : static_cast<Eigen::Index>(j[0].size());
  Mat m(r, c);
  for (Eigen::Index i = 0; i < r; ++i) {
    if (static_cast<Eigen::Index>(j[i].size()) != c) throw InvalidArgument("matrix rows differ in length");
    m.row(i) = vec_from_json(j[i]).transpose();
  }
  return m;
}

void to_json(json& j, const JacobianBlocks& b) {
  j = json{{"d11", mat_to_json(b.d11)}, {"d12", mat_to_json(b.d12)}, {"d22", mat_to_json(b.d22)}};
}

void from_json(const json& j, JacobianBlocks& b) {
  b = JacobianBlocks(mat_from_json(j.at("d11")), mat_from_json(j.at("d12")), mat_from_json(j.at("d22")));
}

namespace {

std::string fmt(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  std::ostringstream os;
  os.precision(17);
  os << x;
  return os.str();
}

std::string join(const std::vector<std::string>& fields) {
  std::string out;
  for (std::size_t i = 0; i < fields.size(); ++i) {
    if (i) out += ',';
    const std::string& f = fields[i];
    if (f.find_first_of(",\"\r\n") != std::string::npos) {
      out += '"';
      for (char ch : f) {
        if (ch == '"') out += '"';
        out += ch;
      }
      out += '"';
    } else {
      out += f;
    }
  }
  return out + "\r\n";
}

}  // namespace

std::string csv_trajectory(const TrajectoryRecord& rec) {
  const int n = rec.iterates.empty() ? 0 : static_cast<int>(rec.iterates[0].size());
  std::vector<std::string> head{kTrajectorySchema, "step"};
  for (int i = 0; i < n; ++i) head.push_back("x" + std::to_string(i));
  head.push_back("grad_norm");
  const bool has_dist = !rec.distance.empty();
  if (has_dist) head.push_back("distance");
  for (std::size_t b = 0; b < rec.ema_betas.size(); ++b)
    for (int i = 0; i < n; ++i) head.push_back("ema" + std::to_string(b) + "_x" + std::to_string(i));
  std::string out = join(head);
  for (std::size_t r = 0; r < rec.iterates.size(); ++r) {
    std::vector<std::string> row{std::to_string(r), std::to_string(rec.step[r])};
    for (int i = 0; i < n; ++i) row.push_back(fmt(rec.iterates[r](i)));
    row.push_back(fmt(rec.grad_norm[r]));
    if (has_dist) row.push_back(fmt(rec.distance[r]));
    for (std::size_t b = 0; b < rec.ema_betas.size(); ++b)
      for (int i = 0; i < n; ++i) row.push_back(fmt(rec.ema[b][r](i)));
    out += join(row);
  }
  return out;
}

std::string csv_sweep(const SpectrumSweep& sw) {
  std::vector<std::string> head{kSweepSchema, "tau"};
  for (std::size_t k = 0; k < sw.tracks.size(); ++k) {
    head.push_back("lambda" + std::to_string(k) + "_re");
    head.push_back("lambda" + std::to_string(k) + "_im");
  }
  std::string out = join(head);
  for (std::size_t i = 0; i < sw.taus.size(); ++i) {
    std::vector<std::string> row{std::to_string(i), fmt(sw.taus[i])};
    for (const auto& tr : sw.tracks) {
      row.push_back(fmt(tr[i].real()));
      row.push_back(fmt(tr[i].imag()));
    }
    out += join(row);
  }
  return out;
}

std::string csv_roa(const RoaGrid& roa) {
  const int n = roa.starts.empty() ? 0 : static_cast<int>(roa.starts[0].size());
  std::vector<std::string> head{kRoaSchema};
  for (int i = 0; i < n; ++i) head.push_back("x" + std::to_string(i));
  head.push_back("label");
  head.push_back("steps_used");
  std::string out = join(head);
  for (std::size_t c = 0; c < roa.starts.size(); ++c) {
    std::vector<std::string> row{std::to_string(c)};
    for (int i = 0; i < n; ++i) row.push_back(fmt(roa.starts[c](i)));
    row.push_back(std::to_string(roa.labels[c]));
    row.push_back(std::to_string(roa.steps_used[c]));
    out += join(row);
  }
  return out;
}

std::string csv_field(const std::vector<FieldSample>& field) {
  const int n = field.empty() ? 0 : static_cast<int>(field[0].x.size());
  std::vector<std::string> head{kFieldSchema};
  for (int i = 0; i < n; ++i) head.push_back("x" + std::to_string(i));
  for (int i = 0; i < n; ++i) head.push_back("f" + std::to_string(i));
  head.push_back("magnitude");
  std::string out = join(head);
  for (std::size_t r = 0; r < field.size(); ++r) {
    std::vector<std::string> row{std::to_string(r)};
    for (int i = 0; i < n; ++i) row.push_back(fmt(field[r].x(i)));
    for (int i = 0; i < n; ++i) row.push_back(fmt(field[r].field(i)));
    row.push_back(fmt(field[r].magnitude));
    out += join(row);
  }
  return out;
}

std::vector<std::vector<std::string>> parse_csv(const std::string& text) {
  std::vector<std::vector<std::string>> rows;
  std::vector<std::string> row;
  std::string field;
  bool quoted = false;
  bool any = false;
  for (std::size_t i = 0; i < text.size(); ++i) {
    const char ch = text[i];
    any = true;
    if (quoted) {
      if (ch == '"') {
        if (i + 1 < text.size() && text[i + 1] == '"') {
          field += '"';
          ++i;
        } else {
          quoted = false;
        }
      } else {
        field += ch;
      }
    } else if (ch == '"') {
      quoted = true;
    } else if (ch == ',') {
      row.push_back(field);
      field.clear();
    } else if (ch == '\r' || ch == '\n') {
      if (ch == '\r' && i + 1 < text.size() && text[i + 1] == '\n') ++i;
      row.push_back(field);
      field.clear();
      rows.push_back(row);
      row.clear();
      any = false;
    } else {
      field += ch;
    }
  }
  if (any) {
    row.push_back(field);
    rows.push_back(row);
  }
  return rows;
}

void write_atomic(const std::filesystem::path& path, const std::string& contents) {
  const std::filesystem::path dir = path.has_parent_path() ? path.parent_path() : std::filesystem::path(".");
  const std::filesystem::path tmp = dir / ("." + path.filename().string() + ".tmp");
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot open " + tmp.string() + " for writing");
    out << contents;
    out.flush();
    if (!out) throw std::runtime_error("failed writing " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

}  // namespace tsgda
