#pragma once

#include <span>

#include "nvw/core.hpp"
#include "nvw/transforms.hpp"

namespace nvw {

// u(t, x) for the constant-speed wave equation from (u0, R0, S0) on a grid,
// with u0 piecewise linear and R0, S0 read as step functions.
double dalembert(std::span<const double> grid, std::span<const double> u0,
                 std::span<const double> R0, std::span<const double> S0, double c0, double t,
                 double x);

// Regions of the (X, Y) plane for the concentrated example u0 = 1,
// mu0 = delta_0, nu0 = 2 delta_0. With x1 flat on [0, 1] and x2 flat on
// [0, 2] the bands are X < 0, 0 <= X <= 1, X > 1 and Y < 0, 0 <= Y <= 2,
// Y > 2; the regions below are the band products lying at t >= 0 plus the
// two crossings of the early part of the curve:
//   A: 0 <= X <= 1, 0 <= Y <= 2    B: X <= 0, Y <= 0
//   C: 0 <= X <= 1, Y <= 0         D: X >= 1, Y <= 0
//   E: X >= 1, 0 <= Y <= 2         F: X >= 1, Y >= 2
// Shared boundaries go to the first matching region in this order.
enum class BoxRegion { A, B, C, D, E, F };

BoxRegion classify_box_region(double X, double Y);

// Closed-form (t, x, U, J, K) of the constant-speed solution in a region.
FiveVector linear_region_eval(double X, double Y, double c0);

// Same solution evaluated anywhere from the separable formulas
// t = (x1 - x2)/(2c), x = (x1 + x2)/2, J = J1 + J2, K = K1 + K2.
FiveVector linear_box_solution(double X, double Y, double c0);

// mu(t)(B) = mu0(B + c t) for direction +1 and nu(t)(B) = nu0(B - c t) for -1.
RadonMeasure linear_measure_transport(const RadonMeasure& m0, double c0, double t,
                                      int direction);

// u = 1 on [-half_width, half_width], R = S = 0, mu = delta_0, nu = 2 delta_0.
PhysicalState box_example_state(double half_width = 1.0);

// Exact plane data of the example on labels reaching the window [lo, hi].
PlaneData box_example_plane(const SpeedLaw& law, double lo = -1.0, double hi = 1.0);

// Exact initial curve of the example sampled on the given s values (the
// breakpoints 0, 1 and 3/2 are always included).
CurveData box_example_theta(const SpeedLaw& law, std::span<const double> s_samples);

// Initial curve for absolutely continuous data, built from the implicit
// relation 2x(s) + 1/4 int_{-inf}^{x(s)} (R0^2 + S0^2) = 2s.
CurveData smooth_case_initialdata(const PhysicalState& state, const SpeedLaw& law,
                                  std::span<const double> s_samples);

}  // namespace nvw
