#pragma once
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace pii {

enum class Family { AS, qAS, pHM, sHM, qHM, raw };

std::string to_string(Family f);
Family parse_family(std::string_view s);  // case-insensitive; throws ParameterError

// alpha, family, Airy coefficient of the x -> +inf seed, HM branch sign.
struct PiiParams {
  double alpha = 0.0;
  Family family = Family::raw;
  double airy_coeff = 0.0;
  int sigma = 0;

  // Validates the combination and fills airy_coeff for the HM families.
  static PiiParams make(double alpha, Family family, std::optional<double> k = {}, int sigma = 0);
};

struct State {
  double x, u, du;
};

struct Window {
  double lo, hi;
};

struct Seed {
  double x, u, du;
  double trunc_err;
};

// u = residue/(x-p) + c1 (x-p) + c2 (x-p)^2 + c3 (x-p)^3 + ...
struct LaurentExpansion {
  double p;
  int residue;
  double alpha;
  double c3;
};

struct Pole {
  double x;
  int residue;
  double c3;
  double fit_err;
};

struct LaurentValue {
  double u, du;
};

struct LaurentFit {
  LaurentExpansion le;
  double fit_err;
};

constexpr int kLaurentFullOrder = 32;

// u'' from the equation.
double pii_rhs(double x, double u, double alpha);
double f_value(const State& s);

// Coefficients c_{-1} .. c_order, index shifted by one.
std::vector<double> laurent_coeffs(const LaurentExpansion& le, int order);

// Truncated at (x-p)^order; order 3 is the classical four-term form.
LaurentValue laurent_eval(const LaurentExpansion& le, double x, int order = 3);

// Fits p and c3 to two states on the same side of a pole, using the full series.
LaurentFit laurent_fit(const State& a, const State& b, double alpha);

struct Node {
  double x, u, du;
};

// Ascending nodes, smooth between consecutive entries.
struct Segment {
  std::vector<Node> nodes;
  double lo() const { return nodes.front().x; }
  double hi() const { return nodes.back().x; }
};

struct Quality {
  double ode_residual = 0.0;
  double f_identity = 0.0;
};

// Segments and pole gaps alternate: poles[i] sits between segments[i] and segments[i+1].
class Trajectory {
 public:
  PiiParams params;
  std::vector<Segment> segments;
  std::vector<Pole> poles;
  bool truncated = false;  // integration stopped before the requested end
  std::optional<Pole> terminal_pole;  // pole at which a truncated run stopped
  Quality quality;

  double alpha() const { return params.alpha; }
  double lo() const { return segments.front().lo(); }
  double hi() const { return segments.back().hi(); }
  bool empty() const { return segments.empty(); }

  // Dense output. Inside a pole gap the full Laurent series is used.
  State eval(double x) const;
  double eval_d2(double x) const;

  // Distance from x to the nearest pole (infinity when there are none).
  double pole_distance(double x) const;
  const Pole* nearest_pole(double x) const;

  // Keeps [a, b]; poles outside are dropped.
  Trajectory restricted(double a, double b) const;
};

// Septic Hermite interpolation from value, first, second, third derivative at both ends.
// Returns u, u', u'' at x.
struct Jet {
  double u, du, d2u;
};
Jet hermite7(const Node& a, const Node& b, double alpha, double x);

// Residual sampled at interval midpoints, excluding |x - p| < exclude.
double ode_residual(const Trajectory& t, double exclude = 0.05);
double f_identity_residual(const Trajectory& t, double exclude = 0.05);
Quality measure_quality(const Trajectory& t);

}  // namespace pii
