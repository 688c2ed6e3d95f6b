#pragma once
#include <functional>
#include <vector>

#include "pii/core.hpp"

namespace pii {

struct IntegratorOptions {
  double rel_tol = 1e-10;
  double abs_tol = 1e-12;
  double u_switch = 1e3;        // hard ceiling: |u| beyond this without a handoff is a failure
  double handoff_radius = 0.1;  // Laurent handoff once |u| >= 1/handoff_radius
  double max_step = 0.5;
  int max_poles = -1;           // stop after this many poles (0: at the first); negative: no limit
  long max_steps = 5'000'000;
};

// Called after each accepted step; returning true stops the integration.
using StopPredicate = std::function<bool(const State&)>;

// Integrates from the seed towards x_end, passing through poles. Nodes come back ascending.
Trajectory integrate_line(const State& seed, double alpha, double x_end, const IntegratorOptions& opt = {},
                          const StopPredicate& stop = {});

struct FZero {
  double x0;
  double slope;  // f' at x0 from the identity f' = -2uf + 2alpha + 1
};

// Zeros of f = 2u^2 - 2u' + x on the smooth segments, bisected on the dense output.
// More than one zero on a segment throws InconsistencyError.
std::vector<FZero> find_f_zeros(const Trajectory& t);

}  // namespace pii
