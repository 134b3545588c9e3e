#pragma once

#include <cstddef>
#include <iosfwd>
#include <vector>

#include "nvw/core.hpp"
#include "nvw/transforms.hpp"

namespace nvw {

// F(Z)(V, W), the symmetric bilinear right-hand side of Z_XY = F(Z)(Z_X, Z_Y).
FiveVector f_rhs(const FiveVector& Zmid, const FiveVector& V, const FiveVector& W,
                 const SpeedLaw& law);

// Discrete solution on the rectangle [X_0, X_N] x [Y_0, Y_N]. Storage is
// (N+1) x (N+1), row-major in i. V(i, j) is the slope on the horizontal edge
// [X_{i-1}, X_i] at height Y_j (i >= 1); W(i, j) is the slope on the vertical
// edge [Y_j, Y_{j+1}] at X_i (j <= N-1). zh and zv are the node values
// carried along horizontal and vertical segments.
struct SolutionGrid {
  int N = 0;
  SpeedLaw law;
  std::vector<double> s;
  std::vector<double> X;
  std::vector<double> Y;
  std::vector<FiveVector> zh;
  std::vector<FiveVector> zv;
  std::vector<FiveVector> v;
  std::vector<FiveVector> w;
  bool filled = false;
  double guard = 1e8;

  std::size_t idx(int i, int j) const {
    return static_cast<std::size_t>(i) * static_cast<std::size_t>(N + 1) +
           static_cast<std::size_t>(j);
  }
  FiveVector& Zh(int i, int j) { return zh[idx(i, j)]; }
  FiveVector& Zv(int i, int j) { return zv[idx(i, j)]; }
  FiveVector& V(int i, int j) { return v[idx(i, j)]; }
  FiveVector& W(int i, int j) { return w[idx(i, j)]; }
  const FiveVector& Zh(int i, int j) const { return zh[idx(i, j)]; }
  const FiveVector& Zv(int i, int j) const { return zv[idx(i, j)]; }
  const FiveVector& V(int i, int j) const { return v[idx(i, j)]; }
  const FiveVector& W(int i, int j) const { return w[idx(i, j)]; }

  // Node value: the mean of the two segment values, or zv on the column i = 0.
  FiveVector node(int i, int j) const;
  double h() const { return (s.back() - s.front()) / N; }
};

SolutionGrid init_staircase(const CurveData& theta, const SpeedLaw& law, int N, double s_min,
                            double s_max);
SolutionGrid solve_grid(SolutionGrid grid);

struct InvariantDiagnostics {
  double x_t_X = 0.0;  // max |x_X - c t_X| over horizontal edges
  double x_t_Y = 0.0;  // max |x_Y + c t_Y| over vertical edges
  double J_K_X = 0.0;  // max |J_X - c K_X|
  double J_K_Y = 0.0;  // max |J_Y + c K_Y|
  double energy_X = 0.0;  // max |2 J_X x_X - (c U_X)^2|
  double energy_Y = 0.0;  // max |2 J_Y x_Y - (c U_Y)^2|
  double min_x_X = 0.0;
  double min_x_Y = 0.0;
  double min_J_X = 0.0;
  double min_J_Y = 0.0;
  double min_xJ_X = 0.0;  // min of x_X + J_X
  double min_xJ_Y = 0.0;
  double max_J_excess = 0.0;  // max J at nodes minus the largest J on the initial staircase
  double min_J = 0.0;         // min J at nodes
  double zh_zv = 0.0;         // max |Zh - Zv| at nodes with i >= 1

  double max_equality() const;
  double min_positivity() const;
};

InvariantDiagnostics invariant_residuals(const SolutionGrid& grid);

struct StaircaseNode {
  int i = 0;
  int j = 0;
  FiveVector z;
};

struct IsotimeCurve {
  double T = 0.0;
  std::vector<int> rows;  // k for which i(k) exists
  std::vector<int> cols;  // i(k)
  std::vector<StaircaseNode> path;  // up/right staircase through the (i(k), k)
  double mu_energy = 0.0;  // sum of J_X dX over horizontal edges of the path
  double nu_energy = 0.0;  // sum of J_Y dY over vertical edges of the path
  double max_t_gap = 0.0;  // max |t - T| over path nodes
};

IsotimeCurve extract_isotime(const SolutionGrid& grid, double T);

// The path as a curve in the plane with t shifted by -T (an element of G_0
// up to the grid resolution).
CurveData isotime_to_curve(const SolutionGrid& grid, const IsotimeCurve& iso);

// Writes the i, j, X, Y, t, x, U, J, K table.
void write_grid_csv(std::ostream& out, const SolutionGrid& grid);

}  // namespace nvw
