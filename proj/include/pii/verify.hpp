#pragma once
#include <optional>
#include <string>
#include <vector>

#include "pii/solutions.hpp"

namespace pii {

enum class Verdict { pass, fail, inconclusive };
std::string to_string(Verdict v);

struct ChainPoint {
  double alpha;
  double p;
};

struct LaurentCheck {
  double max_coeff_err;         // c1 and c2 against -eps p/6 and (alpha - eps)/4
  std::optional<double> f_err;  // |(x-p)^2 f - 4| at residue +1 poles
};

struct ConnectionFit {
  double amplitude_err;
  double phase_err;
  int extrema;
};

// Absent optionals: the check did not run.
struct TheoremReport {
  PiiParams params;
  std::string source = "solver";  // solver or oracle
  int n_expected = 0;
  int n_found = 0;
  bool census_complete = false;
  std::optional<Verdict> count;
  std::optional<bool> residue_pattern_ok;  // smallest +1, largest by parity of n
  std::optional<bool> interlacing_ok;      // consecutive residues alternate
  std::vector<ChainPoint> smallest_pole_chain;
  std::optional<Verdict> smallest_monotone;
  std::vector<ChainPoint> largest_pole_chain;
  std::optional<Verdict> largest_monotone;
  std::optional<bool> mapping_ok;      // +1 poles reappear with residue -1
  std::optional<bool> regularized_ok;  // -1 poles become regular points
  double mapping_max_err = 0.0;
  std::optional<double> ode_residual_max;
  std::optional<double> f_identity_max;
  std::optional<double> f_zero_slope_err;
  std::optional<double> laurent_coeff_max_err;
  std::optional<double> laurent_f_err;
  std::optional<double> amplitude_err;
  std::optional<double> phase_err;
  std::optional<double> cross_err;
  std::vector<std::string> notes;

  bool conclusive() const;
  bool passed() const;  // no conclusive check failed
};

struct VerifyTolerances {
  double residual = 1e-6;
  double f_zero_slope = 1e-6;
  double laurent_coeff = 1e-5;
  double laurent_f = 1e-3;
  double mapping = 1e-6;
  double regular_bound = 10.0;
  double amplitude = 3e-2;
  double phase = 5e-2;
  double cross = 1e-4;
};

// Pole count, smallest/largest residue, alternation, residuals, f-zero slopes.
TheoremReport check_count_and_pattern(const QuasiSolution& qs);

// Builds alpha0, alpha0 + 1, ..., alpha0 + steps with k flipping sign per step.
TheoremReport check_chain_dynamics(Family family, std::optional<double> k, double alpha0, int steps, Window w,
                                   const SolveOptions& opt = {}, const VerifyTolerances& tol = {});
// Same checks on an already built chain.
TheoremReport check_chain_dynamics(const std::vector<QuasiSolution>& chain, const VerifyTolerances& tol = {});

// Extrema of u - alpha/x on [x_lo, x_hi] against d (-x)^{-1/4} cos(theta). Needs at least 5.
std::optional<ConnectionFit> check_connection_fit(const Trajectory& t, const ConnectionData& cd, double x_lo = -40,
                                                  double x_hi = -25);

// Fits c1, c2 at each pole from dense output just outside the Laurent handoff.
LaurentCheck check_laurent_coeffs(const QuasiSolution& qs);
LaurentCheck check_laurent_coeffs(const Trajectory& t);

// Exact counterparts from the rational solutions.
TheoremReport oracle_report(int n);
TheoremReport oracle_chain_report(int n_max);

}  // namespace pii
