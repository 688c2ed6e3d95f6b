// pii-lab: build Painleve II solutions, census their poles, run the theorem checks.
#include <CLI11.hpp>

#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <ctime>
#include <fstream>
#include <iostream>
#include <mutex>
#include <numbers>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "pii/errors.hpp"
#include "pii/io.hpp"
#include "pii/rational.hpp"
#include "pii/verify.hpp"

using namespace pii;

namespace {

constexpr const char* kVersion = "0.1.0";

enum Exit { kOk = 0, kVerifyFailed = 1, kNumeric = 2, kUsage = 3 };

struct Tolerances {
  double rel_tol, abs_tol, handoff_radius, u_switch, max_step;
  Tolerances() {
    SolveOptions o;
    rel_tol = o.integ.rel_tol;
    abs_tol = o.integ.abs_tol;
    handoff_radius = o.integ.handoff_radius;
    u_switch = o.integ.u_switch;
    max_step = o.integ.max_step;
  }
  void add(CLI::App* c) {
    c->add_option("--rel-tol", rel_tol, "integrator relative tolerance")->capture_default_str();
    c->add_option("--abs-tol", abs_tol, "integrator absolute tolerance")->capture_default_str();
    c->add_option("--handoff-radius", handoff_radius, "Laurent handoff radius")->capture_default_str();
    c->add_option("--u-switch", u_switch, "largest |u| tolerated without a handoff")->capture_default_str();
    c->add_option("--max-step", max_step, "largest step")->capture_default_str();
  }
  SolveOptions options() const {
    SolveOptions o;
    o.integ.rel_tol = rel_tol;
    o.integ.abs_tol = abs_tol;
    o.integ.handoff_radius = handoff_radius;
    o.integ.u_switch = u_switch;
    o.integ.max_step = max_step;
    return o;
  }
};

int default_jobs() {
  if (const char* e = std::getenv("PII_LAB_JOBS")) {
    int j = std::atoi(e);
    if (j > 0) return j;
  }
  return 1;
}

// Runs f(i) for i in [0, n) on up to jobs threads. Results are written by index, so order is fixed.
template <class F>
void parallel_for(std::size_t n, int jobs, F f) {
  std::atomic<std::size_t> next{0};
  auto work = [&] {
    for (std::size_t i; (i = next++) < n;) f(i);
  };
  std::vector<std::thread> pool;
  for (int t = 1; t < jobs && static_cast<std::size_t>(t) < n; ++t) pool.emplace_back(work);
  work();
  for (auto& t : pool) t.join();
}

void write_file(const std::string& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw ParameterError("cannot write " + path);
  f << text;
}

std::string utc_now() {
  std::time_t t = std::time(nullptr);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&t));
  return buf;
}

struct Manifest {
  std::string path;
  Json j;
  std::chrono::steady_clock::time_point start = std::chrono::steady_clock::now();
  void write(int code) {
    if (path.empty()) return;
    j["exit_code"] = code;
    j["wall_seconds"] = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    write_file(path, j.dump(2) + "\n");
  }
};

bool is_hm(Family f) { return f == Family::pHM || f == Family::sHM || f == Family::qHM; }

Window default_window(Family f) { return is_hm(f) ? Window{-12, 10} : Window{-40, 8}; }

// ---- solve ----

struct SolveArgs {
  double alpha = 0;
  std::string family;
  std::optional<double> k;
  int sigma = 0;
  std::string window;
  double spacing = 0.01;
  std::string out;
  bool allow_incomplete = false;
  Tolerances tol;
};

int cmd_solve(const SolveArgs& a, Manifest& man) {
  Family fam = parse_family(a.family);
  Window w = a.window.empty() ? default_window(fam) : parse_window(a.window);
  SolveOptions opt = a.tol.options();
  opt.strict_census = !a.allow_incomplete;
  Trajectory traj;
  std::vector<Pole> poles;
  Json checks = Json::object();
  PiiParams params;
  switch (fam) {
    case Family::AS: {
      if (!a.k) throw ParameterError("--k is required for as");
      params = PiiParams::make(a.alpha, fam, a.k);
      traj = solve_AS(a.alpha, *a.k, w, opt);
      if (auto f = check_connection_fit(traj, connection_constants(*a.k, a.alpha))) {
        checks["amplitude_err"] = f->amplitude_err;
        checks["phase_err"] = f->phase_err;
      }
      break;
    }
    case Family::pHM:
    case Family::sHM: {
      int sigma = a.sigma;
      if (sigma == 0) {
        if (a.alpha == 0.0 && fam == Family::pHM) throw ParameterError("--sigma is required for phm at alpha = 0");
        sigma = fam == Family::pHM ? (a.alpha > 0 ? 1 : -1) : (a.alpha > 0 ? -1 : 1);
      }
      params = PiiParams::make(a.alpha, fam, std::nullopt, sigma);
      HMResult hm = solve_HM(a.alpha, sigma, w, opt);
      traj = hm.traj;
      checks["k_star"] = hm.k_star;
      checks["k_formula"] = params.airy_coeff;
      checks["depth"] = hm.depth;
      break;
    }
    case Family::qAS:
    case Family::qHM: {
      QuasiSolution q = build_quasi(a.alpha, fam, fam == Family::qAS ? a.k : std::nullopt, w, opt);
      if (fam == Family::qHM && a.k) throw ParameterError("qhm takes no --k");
      params = q.params;
      traj = q.traj;
      poles = q.poles;
      TheoremReport r = check_count_and_pattern(q);
      LaurentCheck l = check_laurent_coeffs(q);
      r.laurent_coeff_max_err = l.max_coeff_err;
      r.laurent_f_err = l.f_err;
      checks = report_json(r);
      checks["construction"] = to_string(q.construction);
      if (q.k_shot) checks["k_shot"] = *q.k_shot;
      break;
    }
    case Family::raw: throw ParameterError("family raw is not constructible from the command line");
  }
  if (fam == Family::AS || is_hm(fam)) poles = pole_census(traj);
  std::ostringstream csv;
  write_csv(csv, sample_trajectory(traj, a.spacing));
  write_file(a.out + ".csv", csv.str());
  SolveRecord rec{params, a.k, w, &traj, poles, checks};
  write_file(a.out + ".json", solve_json(rec).dump(2) + "\n");
  man.j["outputs"] = {a.out + ".csv", a.out + ".json"};
  std::cerr << "solve: " << poles.size() << " poles on [" << traj.lo() << ", " << traj.hi() << "]\n";
  return kOk;
}

// ---- verify ----

struct VerifyArgs {
  std::string grid;
  std::string family = "qas";
  std::optional<double> k;
  std::string window;
  std::string oracle;
  int chain_steps = 0;
  std::string out;
  Tolerances tol;
};

TheoremReport verify_point(double alpha, Family fam, std::optional<double> k, Window w, const SolveOptions& opt) {
  SolveOptions o = opt;
  o.strict_census = false;
  QuasiSolution q;
  try {
    q = build_quasi(alpha, fam, k, w, o);
  } catch (const ParameterError&) {
    throw;
  } catch (const std::exception& e) {
    TheoremReport r;
    r.params = PiiParams::make(alpha, fam, k);
    r.count = Verdict::inconclusive;
    r.notes.push_back(std::string("construction failed: ") + e.what());
    return r;
  }
  TheoremReport r = check_count_and_pattern(q);
  LaurentCheck l = check_laurent_coeffs(q);
  r.laurent_coeff_max_err = l.max_coeff_err;
  r.laurent_f_err = l.f_err;
  // tail fit over the deepest part of the window; the phase carries an O(alpha^2 (-x)^{-3/2}) correction
  double lo = q.traj.lo();
  if (fam == Family::qAS && lo <= -25)
    if (auto f = check_connection_fit(q.traj, connection_constants(*k, alpha), lo, std::min(lo + 30, -25.0))) {
      r.amplitude_err = f->amplitude_err;
      r.phase_err = f->phase_err;
    }
  return r;
}

int cmd_verify(const VerifyArgs& a, int jobs, Manifest& man) {
  std::vector<TheoremReport> reports;
  if (!a.oracle.empty()) {
    Window r = parse_window(a.oracle);
    int lo = static_cast<int>(r.lo), hi = static_cast<int>(r.hi);
    if (lo != r.lo || hi != r.hi || lo < 1 || hi > 8) throw ParameterError("--oracle expects n ranges inside 1:8");
    for (int n = lo; n <= hi; ++n) reports.push_back(oracle_report(n));
    if (hi >= 3) reports.push_back(oracle_chain_report(hi));
  } else {
    if (a.grid.empty()) throw ParameterError("--grid or --oracle is required");
    Family fam = parse_family(a.family);
    if (fam != Family::qAS && fam != Family::qHM) throw ParameterError("verify: family must be qas or qhm");
    if (fam == Family::qAS && !a.k) throw ParameterError("--k is required for qas");
    if (fam == Family::qHM && a.k) throw ParameterError("qhm takes no --k");
    std::vector<double> grid = parse_grid(a.grid);
    Window w = a.window.empty() ? (fam == Family::qAS ? Window{-160, 8} : default_window(fam)) : parse_window(a.window);
    for (double x : grid) PiiParams::make(x, fam, a.k);  // reject bad points before any work
    SolveOptions opt = a.tol.options();
    std::vector<TheoremReport> out(grid.size());
    parallel_for(grid.size(), jobs, [&](std::size_t i) { out[i] = verify_point(grid[i], fam, a.k, w, opt); });
    reports = std::move(out);
    if (a.chain_steps > 0)
      reports.push_back(check_chain_dynamics(fam, a.k, grid.front(), a.chain_steps, w, opt));
  }
  Json arr = Json::array();
  bool ok = true;
  int conclusive = 0;
  for (const auto& r : reports) {
    arr.push_back(report_json(r));
    ok = ok && r.passed();
    conclusive += r.conclusive();
  }
  write_file(a.out, arr.dump(2) + "\n");
  man.j["outputs"] = {a.out};
  std::cerr << "verify: " << reports.size() << " reports, " << conclusive << " conclusive, "
            << (ok ? "all passed" : "FAILURES") << "\n";
  return ok ? kOk : kVerifyFailed;
}

// ---- sweep ----

struct SweepArgs {
  std::string range;
  std::string family = "qas";
  std::optional<double> k;
  std::string window;
  std::string out;
  Tolerances tol;
};

int cmd_sweep(const SweepArgs& a, int jobs, Manifest& man) {
  Family fam = parse_family(a.family);
  if (fam != Family::qAS && fam != Family::qHM) throw ParameterError("sweep: family must be qas or qhm");
  if (fam == Family::qAS && !a.k) throw ParameterError("--k is required for qas");
  std::vector<double> grid;
  for (double x : parse_grid(a.range)) {
    if (std::abs(std::abs(x - std::floor(x)) - 0.5) < 1e-12) {
      std::cerr << "sweep: skipping half-integer alpha = " << x << "\n";
      continue;
    }
    if (fam == Family::qAS && std::abs(*a.k) >= std::abs(std::cos(std::numbers::pi * x))) {
      std::cerr << "sweep: skipping alpha = " << x << " (|k| >= |cos(pi alpha)|)\n";
      continue;
    }
    grid.push_back(x);
  }
  if (grid.empty()) throw ParameterError("sweep: empty effective range");
  Window w = a.window.empty() ? default_window(fam) : parse_window(a.window);
  SolveOptions opt = a.tol.options();
  opt.strict_census = false;
  std::vector<std::vector<Pole>> poles(grid.size());
  std::vector<std::string> err(grid.size());
  parallel_for(grid.size(), jobs, [&](std::size_t i) {
    double x = grid[i];
    try {
      if (std::abs(x) < 0.5) {
        // base interval: AS or HM, pole-free
        if (fam == Family::qAS)
          poles[i] = pole_census(solve_AS(x, *a.k, w, opt));
        else
          poles[i] = pole_census(solve_HM(x, -1, w, opt).traj);
      } else {
        poles[i] = build_quasi(x, fam, fam == Family::qAS ? a.k : std::nullopt, w, opt).poles;
      }
    } catch (const std::exception& e) {
      err[i] = e.what();
    }
  });
  std::ostringstream csv;
  csv << "alpha,pole_index,pole_x,residue\n";
  char buf[160];
  bool failed = false;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    if (!err[i].empty()) {
      std::cerr << "sweep: alpha = " << grid[i] << " failed: " << err[i] << "\n";
      failed = true;
      continue;
    }
    if (poles[i].empty()) {
      std::snprintf(buf, sizeof buf, "%.17g,,,\n", grid[i]);
      csv << buf;
    }
    for (std::size_t j = 0; j < poles[i].size(); ++j) {
      std::snprintf(buf, sizeof buf, "%.17g,%zu,%.17g,%d\n", grid[i], j + 1, poles[i][j].x, poles[i][j].residue);
      csv << buf;
    }
  }
  write_file(a.out, csv.str());
  man.j["outputs"] = {a.out};
  return failed ? kNumeric : kOk;
}

// ---- oracle ----

int cmd_oracle(int n_max, const std::string& out, Manifest& man) {
  if (n_max < 1 || n_max > 8) throw ParameterError("--n-max must be in 1..8");
  auto q = yv_polys(n_max);
  Json j;
  j["schema_version"] = kSchemaVersion;
  Json polys = Json::array();
  for (int n = 0; n <= n_max; ++n) {
    Json c = Json::array();
    for (const auto& b : q[n].coeffs) c.push_back(b.str());
    polys.push_back({{"n", n}, {"degree", q[n].degree()}, {"coeffs", c}});
  }
  j["polynomials"] = polys;
  Json tables = Json::array();
  for (int n = 1; n <= n_max; ++n) {
    Json p = Json::array();
    for (const auto& pole : rational_poles(n)) p.push_back(pole_json(pole));
    tables.push_back({{"alpha", n}, {"poles", p}});
  }
  j["pole_tables"] = tables;
  write_file(out, j.dump(2) + "\n");
  man.j["outputs"] = {out};
  return kOk;
}

// Flat key = value config: entries become --key=value unless the key is already on the command line.
std::vector<std::string> expand_config(std::vector<std::string> args) {
  std::string path;
  for (std::size_t i = 1; i < args.size(); ++i) {
    if (args[i] == "--config" && i + 1 < args.size()) {
      path = args[i + 1];
      args.erase(args.begin() + i, args.begin() + i + 2);
      break;
    }
    if (args[i].rfind("--config=", 0) == 0) {
      path = args[i].substr(9);
      args.erase(args.begin() + i);
      break;
    }
  }
  if (path.empty()) return args;
  std::ifstream f(path);
  if (!f) throw ParameterError("cannot read config " + path);
  auto cfg = read_config(f);
  // insert after the subcommand name
  std::size_t sub = 0;
  for (std::size_t i = 1; i < args.size(); ++i)
    if (args[i] == "solve" || args[i] == "verify" || args[i] == "sweep" || args[i] == "oracle") {
      sub = i;
      break;
    }
  if (sub == 0) throw ParameterError("--config needs a subcommand");
  std::vector<std::string> extra;
  for (const auto& [k, v] : cfg) {
    std::string flag = "--" + k;
    bool given = false;
    for (const auto& a : args) given = given || a == flag || a.rfind(flag + "=", 0) == 0;
    if (!given) extra.push_back(flag + "=" + v);
  }
  args.insert(args.begin() + sub + 1, extra.begin(), extra.end());
  return args;
}

}  // namespace

int main(int argc, char** argv) {
  std::vector<std::string> args(argv, argv + argc);
  try {
    args = expand_config(args);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsage;
  }

  CLI::App app{"Painleve II laboratory"};
  app.require_subcommand(1);
  app.fallthrough();
  app.set_version_flag("--version", kVersion);
  int jobs = default_jobs();
  app.add_option("--jobs", jobs, "parallel workers (default: PII_LAB_JOBS or 1)")->check(CLI::PositiveNumber);
  std::string manifest;
  app.add_option("--manifest", manifest, "run metadata file (default: <output>.manifest.json)");

  SolveArgs sa;
  auto* solve = app.add_subcommand("solve", "build one solution and write samples and poles");
  solve->add_option("--alpha", sa.alpha)->required();
  solve->add_option("--family", sa.family, "as, qas, phm, shm, qhm")->required();
  solve->add_option("--k", sa.k, "Airy coefficient (as, qas)");
  solve->add_option("--sigma", sa.sigma, "HM branch sign");
  solve->add_option("--window", sa.window, "a:b");
  solve->add_option("--spacing", sa.spacing, "sample spacing")->capture_default_str();
  solve->add_option("--out", sa.out, "output prefix: <out>.csv, <out>.json")->required();
  solve->add_flag("--allow-incomplete", sa.allow_incomplete, "keep going when the census cannot be completed");
  sa.tol.add(solve);

  VerifyArgs va;
  auto* verify = app.add_subcommand("verify", "run the theorem checks over a grid");
  verify->add_option("--grid", va.grid, "alphas: a:b:step or a,b,c");
  verify->add_option("--family", va.family)->capture_default_str();
  verify->add_option("--k", va.k);
  verify->add_option("--window", va.window, "a:b");
  verify->add_option("--oracle", va.oracle, "exact reports for n in a:b");
  verify->add_option("--chain-steps", va.chain_steps, "also check chain dynamics from the first grid point");
  verify->add_option("--out", va.out, "JSON array of reports")->required();
  va.tol.add(verify);

  SweepArgs wa;
  auto* sweep = app.add_subcommand("sweep", "pole locations against alpha");
  sweep->add_option("--range", wa.range, "a:b:step")->required();
  sweep->add_option("--family", wa.family)->capture_default_str();
  sweep->add_option("--k", wa.k);
  sweep->add_option("--window", wa.window, "a:b");
  sweep->add_option("--out", wa.out, "CSV alpha,pole_index,pole_x,residue")->required();
  wa.tol.add(sweep);

  int n_max = 5;
  std::string oracle_out;
  auto* oracle = app.add_subcommand("oracle", "Yablonskii-Vorob'ev polynomials and rational pole tables");
  oracle->add_option("--n-max", n_max)->capture_default_str();
  oracle->add_option("--out", oracle_out)->required();

  std::vector<const char*> cargs;
  for (const auto& a : args) cargs.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(cargs.size()), cargs.data());
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? kOk : kUsage;
  }

  Manifest man;
  std::string primary = solve->parsed() ? sa.out : verify->parsed() ? va.out : sweep->parsed() ? wa.out : oracle_out;
  man.path = manifest.empty() ? primary + ".manifest.json" : manifest;
  man.j["tool"] = "pii-lab";
  man.j["version"] = kVersion;
  man.j["started_utc"] = utc_now();
  man.j["jobs"] = jobs;
  man.j["argv"] = std::vector<std::string>(args.begin() + 1, args.end());

  int code = kOk;
  try {
    if (solve->parsed()) code = cmd_solve(sa, man);
    if (verify->parsed()) code = cmd_verify(va, jobs, man);
    if (sweep->parsed()) code = cmd_sweep(wa, jobs, man);
    if (oracle->parsed()) code = cmd_oracle(n_max, oracle_out, man);
  } catch (const ParameterError& e) {
    std::cerr << "error: " << e.what() << "\n";
    code = kUsage;
  } catch (const DomainError& e) {
    std::cerr << "error: " << e.what() << "\n";
    code = kUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    code = kNumeric;
  }
  try {
    man.write(code);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
  }
  return code;
}
