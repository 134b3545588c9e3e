#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "nvw/core.hpp"

namespace nvw {

// One half of a plane datum: functions of a single label variable (X for the
// first half, Y for the second). x, U, J, K are node values and piecewise
// linear; V is a per-cell value on [grid[k], grid[k+1]]. Outside the grid x
// continues with slope 1, U, J, K stay constant and V vanishes.
struct PlaneSide {
  std::vector<double> grid;
  std::vector<double> x;
  std::vector<double> U;
  std::vector<double> J;
  std::vector<double> K;
  std::vector<double> V;

  std::size_t size() const { return grid.size(); }

  double x_at(double X) const;
  double U_at(double X) const;
  double J_at(double X) const;
  double K_at(double X) const;
  double V_at(double X) const;  // value of the cell containing X (right-continuous)

  // min{X : x(X) >= xi} and max{X : x(X) <= xi}.
  double level_lo(double xi) const;
  double level_hi(double xi) const;

  void validate() const;
};

struct PlaneData {
  PlaneSide first;   // psi_1 in X
  PlaneSide second;  // psi_2 in Y
};

// Piecewise-constant five-vector function of one variable with constant
// far-field values on both sides.
struct CellFunction {
  std::vector<double> edges;
  std::vector<FiveVector> values;  // values[k] on [edges[k], edges[k+1])
  FiveVector left;
  FiveVector right;

  FiveVector at(double X) const;
  FiveVector integral(double a, double b) const;
  // Mean over [a, b]; zero vector when b <= a.
  FiveVector average(double a, double b) const;
};

// Curve (X(s), Y(s)) with X + Y = 2s, the values Z(s) along it and the slope
// functions V(X), W(Y). Between samples everything is linear in s; beyond the
// end samples X, Y and x grow with slope 1 and t, U, J, K stay constant.
struct CurveData {
  std::vector<double> s;
  std::vector<double> X;
  std::vector<double> Y;
  std::vector<FiveVector> Z;
  CellFunction V;
  CellFunction W;

  std::size_t size() const { return s.size(); }
  double X_at(double sv) const;
  double Y_at(double sv) const;
  FiveVector Z_at(double sv) const;

  void validate() const;
};

// Pair of strictly increasing piecewise-linear maps acting on X and Y.
struct Relabeling {
  MonotoneFunction f = MonotoneFunction::identity();
  MonotoneFunction g = MonotoneFunction::identity();
  double slope_bound = 1e6;  // slopes must lie in [1/slope_bound, slope_bound]
};

struct LOptions {
  std::size_t n_samples = 400;
};

PlaneData map_L(const PhysicalState& state, const SpeedLaw& law, LOptions options = {});
CurveData map_C(const PlaneData& psi, const SpeedLaw& law);
PlaneData map_D(const CurveData& theta, double t_tolerance = 1e-9);
PhysicalState map_M(const PlaneData& psi, const SpeedLaw& law,
                    PushforwardTolerances tol = {});
PlaneData relabel(const PlaneData& psi, const Relabeling& phi);
PlaneData project_Pi(const PlaneData& psi);

struct PlaneResiduals {
  double min_x_slope = 0.0;    // min over cells of x1', x2'
  double min_J_slope = 0.0;    // min over cells of J1', J2'
  double min_xJ_slope = 0.0;   // min over cells of (x + J)'
  double max_xJ_slope = 0.0;
  double energy_relation = 0.0;  // max |x' J' - (c V)^2|
  double J_at_left = 0.0;        // max |J(-inf)|
};

PlaneResiduals plane_residuals(const PlaneData& psi, const SpeedLaw& law);

struct CurveResiduals {
  double sum_rule = 0.0;         // max |X + Y - 2s|
  double min_slope = 0.0;        // min of V2, W2, V4, W4
  double linear_relations = 0.0; // max of |V2 - cV1|, |W2 + cW1|, |V4 - cV5|, |W4 + cW5|
  double energy_relation = 0.0;  // max |2 V4 V2 - (c V3)^2| and the W analogue
  double compatibility = 0.0;    // max |dZ - (V dX + W dY)| between samples
  double max_abs_t = 0.0;
};

CurveResiduals curve_residuals(const CurveData& theta, const SpeedLaw& law);

// Largest deviation between two plane data over the union of their knots.
double plane_distance(const PlaneData& a, const PlaneData& b);

void to_json(nlohmann::json& j, const PlaneSide& side);
void from_json(const nlohmann::json& j, PlaneSide& side);
void to_json(nlohmann::json& j, const PlaneData& psi);
void from_json(const nlohmann::json& j, PlaneData& psi);
void to_json(nlohmann::json& j, const CellFunction& f);
void from_json(const nlohmann::json& j, CellFunction& f);
void to_json(nlohmann::json& j, const CurveData& theta);
void from_json(const nlohmann::json& j, CurveData& theta);

}  // namespace nvw
