#pragma once

#include <array>
#include <optional>

#include "nvw/core.hpp"
#include "nvw/solver.hpp"
#include "nvw/transforms.hpp"

namespace nvw {

// Subtracts T from the t component of every node value.
SolutionGrid time_shift(SolutionGrid grid, double T);

struct Resolution {
  int N = 200;
  std::size_t n_samples = 400;
  std::optional<std::array<double, 2>> s_range;  // chosen automatically when empty
  double margin = 1.0;
};

// s-range wide enough that the level set t = T covers every point the
// solution can reach by time |T|.
std::array<double, 2> auto_s_range(const PhysicalState& state, const SpeedLaw& law, double T,
                                   double margin);

// One solve that can be sampled at several times.
struct Evolution {
  SpeedLaw law;
  PhysicalState initial;
  PlaneData psi0;
  CurveData theta0;
  SolutionGrid grid;
};

Evolution prepare_evolution(const PhysicalState& state, const SpeedLaw& law,
                            const Resolution& res, double T_max);

struct Snapshot {
  double T = 0.0;
  PhysicalState state;
  double energy = 0.0;
  std::optional<IsotimeCurve> isotime;  // empty at T = 0, which is read off the initial curve
};

// M o D o E o t_T applied to the solved grid; at T = 0 this is M o D applied
// to the initial curve.
Snapshot take_snapshot(const Evolution& evo, double T);

PhysicalState semigroup_step(const PhysicalState& state, double T, const SpeedLaw& law,
                             const Resolution& res);

}  // namespace nvw
