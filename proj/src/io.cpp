#include "pii/io.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <istream>
#include <ostream>
#include <sstream>

#include "pii/errors.hpp"

namespace pii {

std::vector<Sample> sample_trajectory(const Trajectory& t, double spacing, double min_pole_dist) {
  if (!(spacing > 0)) throw ParameterError("sample spacing must be positive");
  std::vector<Sample> out;
  long n = static_cast<long>(std::floor((t.hi() - t.lo()) / spacing + 1e-9));
  for (long i = 0; i <= n; ++i) {
    double x = std::min(t.lo() + i * spacing, t.hi());
    if (t.pole_distance(x) < min_pole_dist) continue;
    State s = t.eval(x);
    out.push_back({x, s.u, s.du, f_value(s)});
  }
  return out;
}

void write_csv(std::ostream& os, const std::vector<Sample>& s) {
  os << "x,u,u_prime,f\n";
  char buf[128];
  for (const auto& r : s) {
    std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g,%.17g\n", r.x, r.u, r.du, r.f);
    os << buf;
  }
}

std::vector<Sample> read_csv(std::istream& is) {
  std::string line;
  if (!std::getline(is, line) || line != "x,u,u_prime,f") throw ParameterError("csv: missing header x,u,u_prime,f");
  std::vector<Sample> out;
  int ln = 1;
  while (std::getline(is, line)) {
    ++ln;
    if (line.empty()) continue;
    Sample s{};
    char tail = 0;
    if (std::sscanf(line.c_str(), "%lf,%lf,%lf,%lf%c", &s.x, &s.u, &s.du, &s.f, &tail) != 4)
      throw ParameterError("csv: malformed line " + std::to_string(ln));
    out.push_back(s);
  }
  return out;
}

std::vector<Pole> census_from_samples(const std::vector<Sample>& s, double alpha) {
  std::vector<Pole> out;
  const double big = 5.0;
  for (std::size_t i = 0; i + 1 < s.size(); ++i) {
    const Sample& a = s[i];
    const Sample& b = s[i + 1];
    if ((a.u > 0) == (b.u > 0)) continue;
    // through a pole u jumps against the sign of u' on both sides; a smooth zero goes with it
    int eps = b.u > 0 ? 1 : -1;
    if (!(a.du * eps < 0 && b.du * eps < 0)) continue;
    // two samples on the side closer to the pole
    std::optional<LaurentFit> fit;
    auto try_fit = [&](const Sample& p, const Sample& q) {
      if (std::abs(p.u) < big || std::abs(q.u) < big) return;
      try {
        LaurentFit f = laurent_fit({p.x, p.u, p.du}, {q.x, q.u, q.du}, alpha);
        if (f.le.residue == eps && f.le.p > a.x && f.le.p < b.x && (!fit || f.fit_err < fit->fit_err)) fit = f;
      } catch (const std::exception&) {
      }
    };
    if (i > 0) try_fit(s[i - 1], a);
    if (i + 2 < s.size()) try_fit(b, s[i + 2]);
    if (fit) {
      out.push_back({fit->le.p, eps, fit->le.c3, fit->fit_err});
    } else {
      // 1/u is smooth through the pole; linear root
      double wa = 1 / a.u, wb = 1 / b.u;
      double p = a.x + (b.x - a.x) * wa / (wa - wb);
      out.push_back({p, eps, 0.0, INFINITY});
    }
  }
  return out;
}

Json pole_json(const Pole& p) {
  Json j;
  j["x"] = p.x;
  j["residue"] = p.residue;
  j["c3"] = p.c3;
  j["fit_err"] = p.fit_err;
  return j;
}

namespace {

template <class T>
void put(Json& j, const char* key, const std::optional<T>& v) {
  if (v) j[key] = *v;
}

void put_verdict(Json& j, const char* key, const std::optional<Verdict>& v) {
  if (v) j[key] = to_string(*v);
}

Json chain_json(const std::vector<ChainPoint>& c) {
  Json a = Json::array();
  for (const auto& p : c) a.push_back(Json::array({p.alpha, p.p}));
  return a;
}

}  // namespace

Json report_json(const TheoremReport& r) {
  Json j;
  j["schema_version"] = kSchemaVersion;
  j["source"] = r.source;
  j["alpha"] = r.params.alpha;
  j["family"] = to_string(r.params.family);
  j["airy_coeff"] = r.params.airy_coeff;
  j["n_expected"] = r.n_expected;
  j["n_found"] = r.n_found;
  j["census_complete"] = r.census_complete;
  put_verdict(j, "count", r.count);
  put(j, "residue_pattern_ok", r.residue_pattern_ok);
  put(j, "interlacing_ok", r.interlacing_ok);
  if (!r.smallest_pole_chain.empty()) j["smallest_pole_chain"] = chain_json(r.smallest_pole_chain);
  put_verdict(j, "smallest_monotone", r.smallest_monotone);
  if (!r.largest_pole_chain.empty()) j["largest_pole_chain"] = chain_json(r.largest_pole_chain);
  put_verdict(j, "largest_monotone", r.largest_monotone);
  put(j, "mapping_ok", r.mapping_ok);
  put(j, "regularized_ok", r.regularized_ok);
  if (r.mapping_ok) j["mapping_max_err"] = r.mapping_max_err;
  put(j, "ode_residual_max", r.ode_residual_max);
  put(j, "f_identity_max", r.f_identity_max);
  put(j, "f_zero_slope_err", r.f_zero_slope_err);
  put(j, "laurent_coeff_max_err", r.laurent_coeff_max_err);
  put(j, "laurent_f_err", r.laurent_f_err);
  put(j, "amplitude_err", r.amplitude_err);
  put(j, "phase_err", r.phase_err);
  put(j, "cross_err", r.cross_err);
  j["conclusive"] = r.conclusive();
  j["passed"] = r.passed();
  if (!r.notes.empty()) j["notes"] = r.notes;
  return j;
}

Json solve_json(const SolveRecord& r) {
  Json j;
  j["schema_version"] = kSchemaVersion;
  j["alpha"] = r.params.alpha;
  j["family"] = to_string(r.params.family);
  if (r.k)
    j["k"] = *r.k;
  else
    j["k"] = nullptr;
  j["airy_coeff"] = r.params.airy_coeff;
  j["window"] = Json::array({r.window.lo, r.window.hi});
  if (r.traj) j["achieved"] = Json::array({r.traj->lo(), r.traj->hi()});
  Json poles = Json::array();
  for (const auto& p : r.poles) poles.push_back(pole_json(p));
  j["poles"] = poles;
  j["checks"] = r.checks;
  if (r.traj) {
    Quality q = measure_quality(*r.traj);
    j["quality"] = {{"ode_residual", q.ode_residual}, {"f_identity", q.f_identity}};
  }
  return j;
}

std::vector<Pole> poles_from_json(const Json& j) {
  std::vector<Pole> out;
  for (const auto& p : j.at("poles"))
    out.push_back({p.at("x").get<double>(), p.at("residue").get<int>(), p.at("c3").get<double>(),
                   p.at("fit_err").get<double>()});
  return out;
}

namespace {

double parse_number(const std::string& s, const std::string& what) {
  std::size_t pos = 0;
  double v;
  try {
    v = std::stod(s, &pos);
  } catch (const std::exception&) {
    throw ParameterError(what + ": not a number: '" + s + "'");
  }
  while (pos < s.size() && std::isspace(static_cast<unsigned char>(s[pos]))) ++pos;
  if (pos != s.size() || !std::isfinite(v)) throw ParameterError(what + ": not a number: '" + s + "'");
  return v;
}

std::vector<std::string> split(const std::string& s, char c) {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream is(s);
  while (std::getline(is, cur, c)) out.push_back(cur);
  if (!s.empty() && s.back() == c) out.push_back("");
  return out;
}

std::string trim(const std::string& s) {
  auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

}  // namespace

Window parse_window(const std::string& s) {
  auto p = split(s, ':');
  if (p.size() != 2) throw ParameterError("window: expected a:b, got '" + s + "'");
  Window w{parse_number(p[0], "window"), parse_number(p[1], "window")};
  if (!(w.lo < w.hi)) throw ParameterError("window: need a < b in '" + s + "'");
  return w;
}

std::vector<double> parse_grid(const std::string& s) {
  std::vector<double> out;
  if (s.find(':') != std::string::npos) {
    auto p = split(s, ':');
    if (p.size() != 3) throw ParameterError("grid: expected a:b:step, got '" + s + "'");
    double a = parse_number(p[0], "grid"), b = parse_number(p[1], "grid"), h = parse_number(p[2], "grid");
    if (!(h > 0) || b < a) throw ParameterError("grid: need a <= b and step > 0 in '" + s + "'");
    long n = static_cast<long>(std::floor((b - a) / h + 1e-9));
    if (n > 100000) throw ParameterError("grid: too many points");
    for (long i = 0; i <= n; ++i) out.push_back(std::round((a + i * h) * 1e12) / 1e12);
  } else {
    for (const auto& t : split(s, ',')) out.push_back(parse_number(trim(t), "grid"));
  }
  if (out.empty()) throw ParameterError("grid: empty");
  return out;
}

std::map<std::string, std::string> read_config(std::istream& is) {
  std::map<std::string, std::string> out;
  std::string line;
  int ln = 0;
  while (std::getline(is, line)) {
    ++ln;
    auto h = line.find('#');
    if (h != std::string::npos) line = line.substr(0, h);
    line = trim(line);
    if (line.empty()) continue;
    auto eq = line.find('=');
    if (eq == std::string::npos) throw ParameterError("config line " + std::to_string(ln) + ": expected key = value");
    std::string k = trim(line.substr(0, eq)), v = trim(line.substr(eq + 1));
    if (k.empty()) throw ParameterError("config line " + std::to_string(ln) + ": empty key");
    out[k] = v;
  }
  return out;
}

}  // namespace pii
