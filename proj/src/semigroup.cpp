#include "nvw/semigroup.hpp"

#include <cmath>

#include "nvw/csv.hpp"

namespace nvw {

SolutionGrid time_shift(SolutionGrid grid, double T) {
  for (FiveVector& z : grid.zh) z.t -= T;
  for (FiveVector& z : grid.zv) z.t -= T;
  return grid;
}

std::array<double, 2> auto_s_range(const PhysicalState& state, const SpeedLaw& law, double T,
                                   double margin) {
  state.validate();
  // The level set t = T meets the grid edges at s_min + c|T| and
  // x(s_max) - c|T|, so the padding is twice the distance travelled. On the
  // initial curve x(s) >= s - E/2, which bounds how far s_max must reach.
  const double reach = 2.0 * law.max_speed() * std::abs(T);
  return {state.grid.front() - reach - margin,
          state.grid.back() + 0.5 * state.total_energy() + reach + margin};
}

Evolution prepare_evolution(const PhysicalState& state, const SpeedLaw& law,
                            const Resolution& res, double T_max) {
  Evolution evo;
  evo.law = law;
  evo.initial = state;
  evo.psi0 = map_L(state, law, LOptions{res.n_samples});
  evo.theta0 = map_C(evo.psi0, law);
  const auto range = res.s_range ? *res.s_range : auto_s_range(state, law, T_max, res.margin);
  evo.grid = solve_grid(init_staircase(evo.theta0, law, res.N, range[0], range[1]));
  return evo;
}

Snapshot take_snapshot(const Evolution& evo, double T) {
  Snapshot snap;
  snap.T = T;
  if (T == 0.0) {
    snap.state = map_M(map_D(evo.theta0), evo.law);
    snap.energy = snap.state.total_energy();
    return snap;
  }
  IsotimeCurve iso = extract_isotime(evo.grid, T);
  const double reach = evo.law.max_speed() * std::abs(T);
  const double need_lo = evo.initial.grid.front() - reach;
  const double need_hi = evo.initial.grid.back() + reach;
  if (iso.path.front().z.x > need_lo || iso.path.back().z.x < need_hi) {
    fail(ErrorCode::DomainTooSmall,
         "level set t = " + format_double(T) + " covers x in [" +
             format_double(iso.path.front().z.x) + ", " + format_double(iso.path.back().z.x) +
             "] but [" + format_double(need_lo) + ", " + format_double(need_hi) +
             "] is required");
  }
  const CurveData theta = isotime_to_curve(evo.grid, iso);
  PushforwardTolerances tol;
  tol.pool_negative = true;
  snap.state = map_M(map_D(theta, iso.max_t_gap + 1e-12), evo.law, tol);
  snap.energy = iso.mu_energy + iso.nu_energy;
  snap.isotime = std::move(iso);
  return snap;
}

PhysicalState semigroup_step(const PhysicalState& state, double T, const SpeedLaw& law,
                             const Resolution& res) {
  const Evolution evo = prepare_evolution(state, law, res, std::abs(T));
  return take_snapshot(evo, T).state;
}

}  // namespace nvw
