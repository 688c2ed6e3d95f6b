#pragma once
#include <optional>
#include <vector>

#include "pii/core.hpp"
#include "pii/integrator.hpp"

namespace pii {

// u -> -u + (2 alpha + 1)/f, taking a solution at alpha to one at alpha + 1.
// u' of the image follows from f' = -2uf + 2 alpha + 1.
State backlund_state(const State& s, double alpha);

struct PoleMapRecord {
  Pole source;
  std::optional<Pole> image;  // empty: the image is regular there
};

// Residue +1 poles persist with residue -1; residue -1 poles become regular points.
std::vector<PoleMapRecord> map_pole_records(const std::vector<Pole>& poles);
std::vector<Pole> map_poles(const std::vector<Pole>& poles);

struct BacklundOptions {
  double zero_radius = 2.0;   // resampling neighbourhood of a zero of f
  double inner_radius = 0.08; // closest image node to a newborn pole
  double ratio = 0.95;        // geometric node spacing near a newborn pole
  double spacing = 0.08;      // image node spacing relative to the distance to the nearest image pole
  IntegratorOptions fill;     // bridges the image across regularized points
  BacklundOptions() {
    fill.rel_tol = 1e-13;
    fill.abs_tol = 1e-15;
  }
};

// Image trajectory at alpha + 1 on the same window.
Trajectory backlund_trajectory(const Trajectory& t, const BacklundOptions& opt = {});

// u(x; -alpha) = -u(x; alpha).
Trajectory negate_alpha(const Trajectory& t);

}  // namespace pii
