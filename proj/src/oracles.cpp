#include "nvw/oracles.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

namespace nvw {

namespace {

double lerp_on(std::span<const double> grid, std::span<const double> f, double x) {
  if (x <= grid.front()) return f.front();
  if (x >= grid.back()) return f.back();
  auto it = std::upper_bound(grid.begin(), grid.end(), x);
  const auto k = static_cast<std::size_t>(it - grid.begin()) - 1;
  const double w = (x - grid[k]) / (grid[k + 1] - grid[k]);
  return f[k] + w * (f[k + 1] - f[k]);
}

// Integral of the step function f (f[k] on [grid[k], grid[k+1])) from a to b, a <= b.
double step_integral(std::span<const double> grid, std::span<const double> f, double a,
                     double b) {
  double acc = 0.0;
  for (std::size_t k = 0; k + 1 < grid.size(); ++k) {
    const double lo = std::max(a, grid[k]);
    const double hi = std::min(b, grid[k + 1]);
    if (hi > lo) acc += f[k] * (hi - lo);
  }
  return acc;
}

}  // namespace

double dalembert(std::span<const double> grid, std::span<const double> u0,
                 std::span<const double> R0, std::span<const double> S0, double c0, double t,
                 double x) {
  if (grid.size() < 2 || u0.size() != grid.size() || R0.size() != grid.size() ||
      S0.size() != grid.size()) {
    fail(ErrorCode::InvalidArgument, "dalembert samples must match the grid");
  }
  if (!(c0 > 0.0)) fail(ErrorCode::InvalidArgument, "c0 must be positive");
  const double a = x - c0 * t;
  const double b = x + c0 * t;
  const double lo = std::min(a, b);
  const double hi = std::max(a, b);
  if (lo < grid.front() || hi > grid.back()) {
    fail(ErrorCode::OutOfWindow, "domain of dependence leaves the sampled window");
  }
  std::vector<double> sum(grid.size());
  for (std::size_t k = 0; k < grid.size(); ++k) sum[k] = R0[k] + S0[k];
  double integral = step_integral(grid, sum, lo, hi);
  if (b < a) integral = -integral;
  return 0.5 * (lerp_on(grid, u0, a) + lerp_on(grid, u0, b)) + integral / (4.0 * c0);
}

BoxRegion classify_box_region(double X, double Y) {
  const bool xl = X <= 0.0;
  const bool xm = X >= 0.0 && X <= 1.0;
  const bool xr = X >= 1.0;
  const bool yl = Y <= 0.0;
  const bool ym = Y >= 0.0 && Y <= 2.0;
  const bool yr = Y >= 2.0;
  if (xm && ym) return BoxRegion::A;
  if (xl && yl) return BoxRegion::B;
  if (xm && yl) return BoxRegion::C;
  if (xr && yl) return BoxRegion::D;
  if (xr && ym) return BoxRegion::E;
  if (xr && yr) return BoxRegion::F;
  fail(ErrorCode::UnclassifiedPoint, "point lies outside the tabulated regions");
}

FiveVector linear_region_eval(double X, double Y, double c) {
  switch (classify_box_region(X, Y)) {
    case BoxRegion::A: return {0.0, 0.0, 1.0, X + Y, (X - Y) / c};
    case BoxRegion::B: return {(X - Y) / (2.0 * c), (X + Y) / 2.0, 1.0, 0.0, 0.0};
    case BoxRegion::C: return {-Y / (2.0 * c), Y / 2.0, 1.0, X, X / c};
    case BoxRegion::D: return {(X - Y - 1.0) / (2.0 * c), (X + Y - 1.0) / 2.0, 1.0, 1.0, 1.0 / c};
    case BoxRegion::E: return {(X - 1.0) / (2.0 * c), (X - 1.0) / 2.0, 1.0, 1.0 + Y, (1.0 - Y) / c};
    case BoxRegion::F: return {(X - Y + 1.0) / (2.0 * c), (X + Y - 3.0) / 2.0, 1.0, 3.0, -1.0 / c};
  }
  fail(ErrorCode::UnclassifiedPoint, "unreachable region");
}

FiveVector linear_box_solution(double X, double Y, double c) {
  const double x1 = X < 0.0 ? X : (X <= 1.0 ? 0.0 : X - 1.0);
  const double x2 = Y < 0.0 ? Y : (Y <= 2.0 ? 0.0 : Y - 2.0);
  const double J1 = std::clamp(X, 0.0, 1.0);
  const double J2 = std::clamp(Y, 0.0, 2.0);
  return {(x1 - x2) / (2.0 * c), 0.5 * (x1 + x2), 1.0, J1 + J2, (J1 - J2) / c};
}

RadonMeasure linear_measure_transport(const RadonMeasure& m0, double c0, double t,
                                      int direction) {
  if (direction != 1 && direction != -1) {
    fail(ErrorCode::InvalidArgument, "direction must be +1 or -1");
  }
  return m0.translated(-static_cast<double>(direction) * c0 * t);
}

PhysicalState box_example_state(double half_width) {
  if (!(half_width > 0.0)) fail(ErrorCode::InvalidArgument, "half width must be positive");
  return make_state({-half_width, 0.0, half_width}, {1.0, 1.0, 1.0}, {0.0, 0.0, 0.0},
                    {0.0, 0.0, 0.0}, {Atom{0.0, 1.0}}, {Atom{0.0, 2.0}}, 1.0);
}

PlaneData box_example_plane(const SpeedLaw& law, double lo, double hi) {
  const double c = law.c(1.0);
  auto side = [&](double mass, double sign) {
    PlaneSide p;
    p.grid = {lo, 0.0, mass, hi + mass};
    p.x = {lo, 0.0, 0.0, hi};
    p.U = {1.0, 1.0, 1.0, 1.0};
    p.J = {0.0, 0.0, mass, mass};
    p.K = {0.0, 0.0, sign * mass / c, sign * mass / c};
    p.V = {0.0, 0.0, 0.0};
    return p;
  };
  return {side(1.0, 1.0), side(2.0, -1.0)};
}

CurveData box_example_theta(const SpeedLaw& law, std::span<const double> s_samples) {
  const double c = law.c(1.0);
  std::vector<double> s(s_samples.begin(), s_samples.end());
  s.insert(s.end(), {0.0, 1.0, 1.5});
  std::sort(s.begin(), s.end());
  s.erase(std::unique(s.begin(), s.end()), s.end());

  CurveData theta;
  for (double sv : s) {
    double X = 0.0;
    double x = 0.0;
    double J = 0.0;
    double K = 0.0;
    if (sv < 0.0) {
      X = sv;
      x = sv;
    } else if (sv < 1.0) {
      X = 0.0;
      J = 2.0 * sv;
      K = -2.0 * sv / c;
    } else if (sv < 1.5) {
      X = 2.0 * sv - 2.0;
      J = 2.0 * sv;
      K = 2.0 * (sv - 2.0) / c;
    } else {
      X = sv - 0.5;
      x = sv - 1.5;
      J = 3.0;
      K = -1.0 / c;
    }
    theta.s.push_back(sv);
    theta.X.push_back(X);
    theta.Y.push_back(2.0 * sv - X);
    theta.Z.push_back({0.0, x, 1.0, J, K});
  }
  const FiveVector vfar{0.5 / c, 0.5, 0.0, 0.0, 0.0};
  const FiveVector wfar{-0.5 / c, 0.5, 0.0, 0.0, 0.0};
  theta.V.edges = {0.0, 1.0};
  theta.V.values = {FiveVector{0.0, 0.0, 0.0, 1.0, 1.0 / c}};
  theta.V.left = theta.V.right = vfar;
  theta.W.edges = {0.0, 2.0};
  theta.W.values = {FiveVector{0.0, 0.0, 0.0, 1.0, -1.0 / c}};
  theta.W.left = theta.W.right = wfar;
  return theta;
}

CurveData smooth_case_initialdata(const PhysicalState& state, const SpeedLaw& law,
                                  std::span<const double> s_samples) {
  state.validate();
  if (state.mu.has_atoms() || state.nu.has_atoms()) {
    fail(ErrorCode::AtomPresent, "smooth-case formulas need absolutely continuous energy");
  }
  const std::vector<double>& g = state.grid;
  const std::size_t n = g.size();
  std::vector<double> R2(n, 0.0);
  std::vector<double> S2(n, 0.0);
  for (std::size_t k = 0; k + 1 < n; ++k) {
    R2[k] = 0.25 * state.R[k] * state.R[k];
    S2[k] = 0.25 * state.S[k] * state.S[k];
  }
  // Composite Simpson rule for the integral of 1/c(u0) over [a, b] inside one cell.
  auto inv_c_integral = [&](double a, double b) {
    constexpr int panels = 64;
    const double hh = (b - a) / panels;
    double acc = 0.0;
    for (int p = 0; p <= panels; ++p) {
      const double y = p == panels ? b : a + hh * p;
      const double wgt = (p == 0 || p == panels) ? 1.0 : (p % 2 == 1 ? 4.0 : 2.0);
      acc += wgt / law.c(state.u_at(y));
    }
    return acc * hh / 3.0;
  };
  // Cumulative energies at the nodes. A and B are linear in between; the K
  // potential is integrated up to the exact point.
  std::vector<double> A(n, 0.0);
  std::vector<double> B(n, 0.0);
  std::vector<double> Kn(n, 0.0);
  for (std::size_t k = 0; k + 1 < n; ++k) {
    const double dx = g[k + 1] - g[k];
    A[k + 1] = A[k] + R2[k] * dx;
    B[k + 1] = B[k] + S2[k] * dx;
    Kn[k + 1] = Kn[k] + (R2[k] - S2[k]) * inv_c_integral(g[k], g[k + 1]);
  }
  auto cum = [&](const std::vector<double>& F, double x) {
    if (x <= g.front()) return F.front();
    if (x >= g.back()) return F.back();
    auto it = std::upper_bound(g.begin(), g.end(), x);
    const auto k = static_cast<std::size_t>(it - g.begin()) - 1;
    const double w = (x - g[k]) / (g[k + 1] - g[k]);
    return F[k] + w * (F[k + 1] - F[k]);
  };
  auto phi = [&](double x) { return 2.0 * x + cum(A, x) + cum(B, x); };
  auto K_at = [&](double x) {
    if (x <= g.front()) return Kn.front();
    if (x >= g.back()) return Kn.back();
    auto it = std::upper_bound(g.begin(), g.end(), x);
    const auto k = static_cast<std::size_t>(it - g.begin()) - 1;
    return Kn[k] + (R2[k] - S2[k]) * inv_c_integral(g[k], x);
  };

  CurveData theta;
  std::vector<double> s(s_samples.begin(), s_samples.end());
  std::sort(s.begin(), s.end());
  s.erase(std::unique(s.begin(), s.end()), s.end());
  const double total = A.back() + B.back();
  for (double sv : s) {
    // Bracket: phi(x) = 2x below the window and 2x + total above it.
    double lo = std::min(sv - total, g.front()) - 1.0;
    double hi = std::max(sv, g.back()) + 1.0;
    for (int it = 0; it < 200 && hi - lo > 0.0; ++it) {
      const double mid = 0.5 * (lo + hi);
      if (mid <= lo || mid >= hi) break;
      if (phi(mid) < 2.0 * sv) {
        lo = mid;
      } else {
        hi = mid;
      }
    }
    const double x = hi;
    const double X = x + cum(A, x);
    theta.s.push_back(sv);
    theta.X.push_back(X);
    theta.Y.push_back(2.0 * sv - X);
    theta.Z.push_back({0.0, x, state.u_at(x), cum(A, x) + cum(B, x), K_at(x)});
  }

  auto slopes = [&](bool forward) {
    CellFunction f;
    const std::vector<double>& F = forward ? A : B;
    const double sign = forward ? 1.0 : -1.0;
    for (std::size_t k = 0; k < n; ++k) f.edges.push_back(g[k] + F[k]);
    for (std::size_t k = 0; k + 1 < n; ++k) {
      const double r = forward ? state.R[k] : state.S[k];
      const double c = law.c(0.5 * (state.u[k] + state.u[k + 1]));
      const double q = 4.0 + r * r;
      f.values.push_back({sign * 2.0 / (c * q), 2.0 / q, sign * 2.0 * r / (c * q), r * r / q,
                          sign * r * r / (c * q)});
    }
    f.left = {sign * 0.5 / law.c(state.u.front()), 0.5, 0.0, 0.0, 0.0};
    f.right = {sign * 0.5 / law.c(state.u.back()), 0.5, 0.0, 0.0, 0.0};
    return f;
  };
  theta.V = slopes(true);
  theta.W = slopes(false);
  return theta;
}

}  // namespace nvw
