#pragma once
#include <optional>
#include <string>
#include <vector>

#include "pii/asymptotics.hpp"
#include "pii/backlund.hpp"
#include "pii/core.hpp"
#include "pii/integrator.hpp"

namespace pii {

// Base solution on (-1/2, 1/2] plus the number of Backlund steps up to |alpha|.
struct ChainPlan {
  double base_alpha;
  int steps;
  Family base_family;     // AS, pHM or sHM
  double base_airy_coeff;
  int base_sigma;         // HM bases only
  std::vector<double> stage_coeffs;  // airy coefficient at each stage, base first
  bool negate;            // target alpha < 0: built at |alpha| and negated
};

ChainPlan resolve_family(double alpha, Family family, std::optional<double> k = {});

struct SolveOptions {
  IntegratorOptions integ;
  double seed_L = 8.0;        // AS and qAS seeds
  double hm_seed_L = 6.0;     // separatrix seeds; closer in keeps more of the Airy coefficient
  double bracket_width = 1e-13;
  double depth_tol = 1e-7;    // separatrix runs are trusted until bracketing runs differ by this
  double probe_lo = -8.0;     // first probe depth for the bisection verdict
  double cross_tol = 1e-4;
  bool direct = true;
  bool chain = true;
  bool strict_census = true;  // incomplete census throws WindowError
  double census_lo = -10.0;   // quasi solutions are built down to at least here to complete the census
  SolveOptions() {
    integ.rel_tol = 1e-13;
    integ.abs_tol = 1e-15;
  }
};

Trajectory solve_AS(double alpha, double k, Window w, const SolveOptions& opt = {});

struct HMResult {
  Trajectory traj;
  double k_star;
  double bracket_lo, bracket_hi;
  double depth;  // leftmost x at which the bracketing runs still agree
  int iterations;
};

HMResult solve_HM(double alpha, int sigma, Window w, const SolveOptions& opt = {});

enum class Construction { direct, chain, both };
std::string to_string(Construction c);

struct QuasiSolution {
  PiiParams params;
  Trajectory traj;            // direct when available
  std::vector<Pole> poles;    // full census, which may reach left of the requested window
  Construction construction;
  std::optional<double> cross_err;
  std::optional<Trajectory> other;  // chain trajectory when both completed
  Window achieved;
  bool census_complete;
  std::optional<double> k_shot;  // qHM: separatrix coefficient found by shooting at alpha
  std::string note;
};

QuasiSolution build_quasi(double alpha, Family family, std::optional<double> k, Window w,
                          const SolveOptions& opt = {});

std::vector<Pole> pole_census(const Trajectory& t);

// max |u_a - u_b| on the common window, skipping points within `exclude` of a pole of either.
double max_difference(const Trajectory& a, const Trajectory& b, double exclude = 0.1, double step = 0.01);

}  // namespace pii
