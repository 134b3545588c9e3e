#include "nvw/transforms.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace nvw {

namespace {

// Index k with grid[k] <= X < grid[k+1]; requires grid.front() <= X < grid.back().
std::size_t cell_index(const std::vector<double>& grid, double X) {
  auto it = std::upper_bound(grid.begin(), grid.end(), X);
  return static_cast<std::size_t>(it - grid.begin()) - 1;
}

// Linear interpolation with an extension of the given slope on both ends.
double interp(const std::vector<double>& grid, const std::vector<double>& v, double X,
              double ext_slope) {
  if (X <= grid.front()) return v.front() - ext_slope * (grid.front() - X);
  if (X >= grid.back()) return v.back() + ext_slope * (X - grid.back());
  auto it = std::lower_bound(grid.begin(), grid.end(), X);
  const auto k = static_cast<std::size_t>(it - grid.begin());
  if (grid[k] == X) return v[k];
  const double w = (X - grid[k - 1]) / (grid[k] - grid[k - 1]);
  return v[k - 1] + w * (v[k] - v[k - 1]);
}

void check_finite(const std::vector<double>& v, const char* what) {
  for (double x : v) {
    if (!std::isfinite(x)) fail(ErrorCode::NonFiniteValue, what);
  }
}

FiveVector far_slope(const SpeedLaw& law, double U, double sign) {
  return {sign * 0.5 / law.c(U), 0.5, 0.0, 0.0, 0.0};
}

// Value of U at the first label whose position reaches x.
double U_at_position(const PlaneSide& side, double x) {
  auto it = std::lower_bound(side.x.begin(), side.x.end(), x);
  const auto k = static_cast<std::size_t>(it - side.x.begin());
  if (k == side.size()) return side.U.back();
  if (side.x[k] == x || k == 0) return side.U[k];
  const double w = (x - side.x[k - 1]) / (side.x[k] - side.x[k - 1]);
  return side.U[k - 1] + w * (side.U[k] - side.U[k - 1]);
}

// R (or -S) recovered from a side on the position cell around x.
double riemann_at_position(const PlaneSide& side, const SpeedLaw& law, double x,
                           double plateau_tol) {
  if (x <= side.x.front() || x >= side.x.back()) return 0.0;
  const std::size_t k = cell_index(side.x, x);
  const double dX = side.grid[k + 1] - side.grid[k];
  const double dx = side.x[k + 1] - side.x[k];
  if (!(dx > plateau_tol * dX)) return 0.0;
  const double Ubar = 0.5 * (side.U[k] + side.U[k + 1]);
  return 2.0 * law.c(Ubar) * side.V[k] * dX / dx;
}

}  // namespace

double PlaneSide::x_at(double X) const { return interp(grid, x, X, 1.0); }
double PlaneSide::U_at(double X) const { return interp(grid, U, X, 0.0); }
double PlaneSide::J_at(double X) const { return interp(grid, J, X, 0.0); }
double PlaneSide::K_at(double X) const { return interp(grid, K, X, 0.0); }

double PlaneSide::V_at(double X) const {
  if (X < grid.front() || X >= grid.back()) return 0.0;
  return V[cell_index(grid, X)];
}

double PlaneSide::level_lo(double xi) const {
  if (xi <= x.front()) return grid.front() - (x.front() - xi);
  if (xi > x.back()) return grid.back() + (xi - x.back());
  auto it = std::lower_bound(x.begin(), x.end(), xi);
  const auto k = static_cast<std::size_t>(it - x.begin());
  if (x[k] == xi) return grid[k];
  const double X = grid[k - 1] + (xi - x[k - 1]) * (grid[k] - grid[k - 1]) / (x[k] - x[k - 1]);
  return std::clamp(X, grid[k - 1], grid[k]);
}

double PlaneSide::level_hi(double xi) const {
  if (xi >= x.back()) return grid.back() + (xi - x.back());
  if (xi < x.front()) return grid.front() - (x.front() - xi);
  auto it = std::upper_bound(x.begin(), x.end(), xi);
  const auto k = static_cast<std::size_t>(it - x.begin()) - 1;
  if (x[k] == xi) return grid[k];
  const double X = grid[k] + (xi - x[k]) * (grid[k + 1] - grid[k]) / (x[k + 1] - x[k]);
  return std::clamp(X, grid[k], grid[k + 1]);
}

void PlaneSide::validate() const {
  const std::size_t n = grid.size();
  if (n < 2) fail(ErrorCode::EmptyGrid, "plane data needs at least two knots per side");
  if (x.size() != n || U.size() != n || J.size() != n || K.size() != n || V.size() + 1 != n) {
    fail(ErrorCode::InvalidArgument, "plane data component sizes disagree");
  }
  check_finite(grid, "plane grid");
  check_finite(x, "plane x");
  check_finite(U, "plane U");
  check_finite(J, "plane J");
  check_finite(K, "plane K");
  check_finite(V, "plane V");
  for (std::size_t k = 1; k < n; ++k) {
    if (!(grid[k] > grid[k - 1])) fail(ErrorCode::InvalidArgument, "plane grid not increasing");
    if (x[k] < x[k - 1]) fail(ErrorCode::InvalidArgument, "plane x must be nondecreasing");
  }
}

FiveVector CellFunction::at(double X) const {
  if (edges.empty() || X < edges.front()) return left;
  if (X >= edges.back()) return right;
  return values[cell_index(edges, X)];
}

FiveVector CellFunction::integral(double a, double b) const {
  FiveVector acc;
  if (!(b > a)) return acc;
  if (edges.empty()) return left * (b - a);
  double pos = a;
  if (pos < edges.front()) {
    const double end = std::min(b, edges.front());
    acc += left * (end - pos);
    pos = end;
  }
  if (pos < b && pos < edges.back()) {
    std::size_t k = cell_index(edges, pos);
    while (pos < b && k < values.size()) {
      const double end = std::min(b, edges[k + 1]);
      acc += values[k] * (end - pos);
      pos = end;
      ++k;
    }
  }
  if (pos < b) acc += right * (b - pos);
  return acc;
}

FiveVector CellFunction::average(double a, double b) const {
  if (!(b > a)) return {};
  if (!edges.empty() && a >= edges.front() && b <= edges.back()) {
    const std::size_t k = cell_index(edges, a);
    if (b <= edges[k + 1]) return values[k];
  }
  return integral(a, b) * (1.0 / (b - a));
}

double CurveData::X_at(double sv) const { return interp(s, X, sv, 1.0); }
double CurveData::Y_at(double sv) const { return interp(s, Y, sv, 1.0); }

FiveVector CurveData::Z_at(double sv) const {
  if (sv <= s.front()) {
    FiveVector z = Z.front();
    z.x -= s.front() - sv;
    return z;
  }
  if (sv >= s.back()) {
    FiveVector z = Z.back();
    z.x += sv - s.back();
    return z;
  }
  auto it = std::lower_bound(s.begin(), s.end(), sv);
  const auto k = static_cast<std::size_t>(it - s.begin());
  if (s[k] == sv) return Z[k];
  const double w = (sv - s[k - 1]) / (s[k] - s[k - 1]);
  return Z[k - 1] + (Z[k] - Z[k - 1]) * w;
}

void CurveData::validate() const {
  const std::size_t n = s.size();
  if (n < 2) fail(ErrorCode::EmptyGrid, "curve needs at least two samples");
  if (X.size() != n || Y.size() != n || Z.size() != n) {
    fail(ErrorCode::InvalidArgument, "curve component sizes disagree");
  }
  for (std::size_t k = 0; k < n; ++k) {
    if (!std::isfinite(s[k]) || !std::isfinite(X[k]) || !std::isfinite(Y[k]) ||
        !std::isfinite(Z[k].max_abs())) {
      fail(ErrorCode::NonFiniteValue, "curve sample");
    }
    if (k > 0 && (!(s[k] > s[k - 1]) || X[k] < X[k - 1] || Y[k] < Y[k - 1])) {
      fail(ErrorCode::InvalidArgument, "curve samples must be monotone");
    }
  }
  if (V.values.size() + 1 != std::max<std::size_t>(V.edges.size(), 1) ||
      W.values.size() + 1 != std::max<std::size_t>(W.edges.size(), 1)) {
    fail(ErrorCode::InvalidArgument, "slope function sizes disagree");
  }
}

PlaneData map_L(const PhysicalState& state, const SpeedLaw& law, LOptions options) {
  state.validate();
  if (options.n_samples < 2) fail(ErrorCode::EmptyGrid, "map_L needs at least two samples");

  auto build = [&](const RadonMeasure& m, bool forward) {
    const GeneralizedInverse inv(m, state.grid);
    const auto& ev = inv.events();
    const auto& gl = inv.level_left();
    const auto& gr = inv.level_right();
    struct Knot {
      double X;
      double x;
      bool exact;
    };
    std::vector<Knot> knots;
    for (std::size_t k = 0; k < ev.size(); ++k) {
      knots.push_back({gl[k], ev[k], true});
      if (gr[k] > gl[k]) knots.push_back({gr[k], ev[k], true});
    }
    const double lo = state.grid.front();
    const double hi = gr.back();
    const std::size_t n = options.n_samples;
    const double spacing = (hi - lo) / static_cast<double>(n - 1);
    for (std::size_t i = 0; i < n; ++i) {
      const double X = (lo * static_cast<double>(n - 1 - i) + hi * static_cast<double>(i)) /
                       static_cast<double>(n - 1);
      knots.push_back({X, inv(X), false});
    }
    std::sort(knots.begin(), knots.end(), [](const Knot& a, const Knot& b) {
      return a.X < b.X || (a.X == b.X && a.exact && !b.exact);
    });
    // Drop uniform samples that crowd an exact knot.
    const double crowd = 1e-7 * spacing;
    std::vector<Knot> kept;
    for (std::size_t k = 0; k < knots.size(); ++k) {
      const Knot& q = knots[k];
      if (!kept.empty() && q.X <= kept.back().X) continue;
      if (!q.exact) {
        const bool near_prev = !kept.empty() && kept.back().exact && q.X - kept.back().X < crowd;
        bool near_next = false;
        for (std::size_t m2 = k + 1; m2 < knots.size() && knots[m2].X - q.X < crowd; ++m2) {
          near_next = near_next || knots[m2].exact;
        }
        if (near_prev || near_next) continue;
      } else if (!kept.empty() && !kept.back().exact && q.X - kept.back().X < crowd) {
        kept.pop_back();
      }
      kept.push_back(q);
    }

    PlaneSide side;
    const std::size_t nk = kept.size();
    side.grid.resize(nk);
    side.x.resize(nk);
    side.U.resize(nk);
    side.J.resize(nk);
    side.K.resize(nk);
    side.V.resize(nk - 1);
    for (std::size_t k = 0; k < nk; ++k) {
      side.grid[k] = kept[k].X;
      side.x[k] = kept[k].x;
      side.U[k] = state.u_at(kept[k].x);
      side.J[k] = kept[k].X - kept[k].x;
    }
    const double sign = forward ? 1.0 : -1.0;
    side.K[0] = 0.0;
    for (std::size_t k = 0; k + 1 < nk; ++k) {
      const double dX = side.grid[k + 1] - side.grid[k];
      const double dx = side.x[k + 1] - side.x[k];
      double v = 0.0;
      if (dx > 0.0) {
        const double mid = 0.5 * (side.x[k] + side.x[k + 1]);
        const double f = forward ? state.R_at(mid) : state.S_at(mid);
        const double Ubar = 0.5 * (side.U[k] + side.U[k + 1]);
        v = sign * f / (2.0 * law.c(Ubar)) * (dx / dX);
      }
      side.V[k] = v;
      const double dJ = side.J[k + 1] - side.J[k];
      side.K[k + 1] =
          side.K[k] + sign * dJ * 0.5 * (1.0 / law.c(side.U[k]) + 1.0 / law.c(side.U[k + 1]));
    }
    return side;
  };

  PlaneData psi;
  psi.first = build(state.mu, true);
  psi.second = build(state.nu, false);
  return psi;
}

CurveData map_C(const PlaneData& psi, const SpeedLaw& law) {
  const PlaneSide& a = psi.first;
  const PlaneSide& b = psi.second;
  a.validate();
  b.validate();

  struct Pt {
    double X;
    double Y;
  };
  std::vector<Pt> pts;
  pts.reserve(2 * (a.size() + b.size()));
  for (std::size_t k = 0; k < a.size(); ++k) {
    const double xi = a.x[k];
    const bool leftmost = k == 0 || a.x[k - 1] < xi;
    if (leftmost) pts.push_back({a.grid[k], b.level_lo(xi)});
    pts.push_back({a.grid[k], b.level_hi(xi)});
  }
  for (std::size_t k = 0; k < b.size(); ++k) {
    const double eta = b.x[k];
    const bool topmost = k + 1 == b.size() || b.x[k + 1] > eta;
    pts.push_back({a.level_lo(eta), b.grid[k]});
    if (topmost) pts.push_back({a.level_hi(eta), b.grid[k]});
  }
  std::sort(pts.begin(), pts.end(), [](const Pt& p, const Pt& q) {
    const double sp = p.X + p.Y;
    const double sq = q.X + q.Y;
    return sp < sq || (sp == sq && p.X < q.X);
  });

  CurveData theta;
  for (const Pt& p0 : pts) {
    Pt p = p0;
    if (!theta.X.empty()) {
      p.X = std::max(p.X, theta.X.back());
      p.Y = std::max(p.Y, theta.Y.back());
    }
    const double sv = 0.5 * (p.X + p.Y);
    if (!theta.s.empty() && !(sv > theta.s.back())) continue;
    theta.s.push_back(sv);
    theta.X.push_back(p.X);
    theta.Y.push_back(p.Y);
    FiveVector z;
    z.t = 0.0;
    z.x = a.x_at(p.X);
    z.U = a.U_at(p.X);
    z.J = a.J_at(p.X) + b.J_at(p.Y);
    z.K = a.K_at(p.X) + b.K_at(p.Y);
    theta.Z.push_back(z);
  }

  auto slopes = [&](const PlaneSide& side, double sign) {
    CellFunction f;
    f.edges = side.grid;
    f.values.resize(side.size() - 1);
    for (std::size_t k = 0; k + 1 < side.size(); ++k) {
      const double dX = side.grid[k + 1] - side.grid[k];
      const double xp = (side.x[k + 1] - side.x[k]) / dX;
      const double Ubar = 0.5 * (side.U[k] + side.U[k + 1]);
      f.values[k] = {sign * xp / (2.0 * law.c(Ubar)), 0.5 * xp, side.V[k],
                     (side.J[k + 1] - side.J[k]) / dX, (side.K[k + 1] - side.K[k]) / dX};
    }
    f.left = far_slope(law, side.U.front(), sign);
    f.right = far_slope(law, side.U.back(), sign);
    return f;
  };
  theta.V = slopes(a, 1.0);
  theta.W = slopes(b, -1.0);
  return theta;
}

PlaneData map_D(const CurveData& theta, double t_tolerance) {
  theta.validate();
  for (const FiveVector& z : theta.Z) {
    if (std::abs(z.t) > t_tolerance) fail(ErrorCode::NotTimeZero, "curve does not lie at t = 0");
  }

  auto build = [&](const std::vector<double>& lab, const CellFunction& slope) {
    struct Sample {
      double L;
      FiveVector z;
    };
    // A label repeated along the curve (a staircase that is not exactly at
    // t = 0) has an arrival point and a departure point. Blend them by the
    // energy of the adjacent label cells so a cell carrying concentrated
    // energy keeps the position of its own end.
    std::vector<Sample> samples;
    std::size_t k = 0;
    while (k < lab.size()) {
      std::size_t last = k;
      while (last + 1 < lab.size() && lab[last + 1] == lab[k]) ++last;
      FiveVector z = theta.Z[k];
      if (last != k) {
        const double m_in = k > 0 ? std::abs(slope.integral(lab[k - 1], lab[k]).J) : 0.0;
        const double m_out =
            last + 1 < lab.size() ? std::abs(slope.integral(lab[k], lab[last + 1]).J) : 0.0;
        const double w = m_in + m_out > 0.0 ? m_out / (m_in + m_out) : 0.5;
        z = theta.Z[k] * (1.0 - w) + theta.Z[last] * w;
      }
      samples.push_back({lab[k], z});
      k = last + 1;
    }
    // Insert slope-function edges lying strictly inside a curve segment.
    std::vector<Sample> extra;
    for (double e : slope.edges) {
      if (!(e > lab.front() && e < lab.back())) continue;
      auto it = std::lower_bound(lab.begin(), lab.end(), e);
      const auto j = static_cast<std::size_t>(it - lab.begin());
      if (lab[j] == e) continue;
      const double w = (e - lab[j - 1]) / (lab[j] - lab[j - 1]);
      extra.push_back({e, theta.Z[j - 1] + (theta.Z[j] - theta.Z[j - 1]) * w});
    }
    if (!extra.empty()) {
      std::vector<Sample> merged;
      merged.reserve(samples.size() + extra.size());
      std::merge(samples.begin(), samples.end(), extra.begin(), extra.end(),
                 std::back_inserter(merged),
                 [](const Sample& p, const Sample& q) { return p.L < q.L; });
      samples = std::move(merged);
    }
    PlaneSide side;
    const std::size_t n = samples.size();
    if (n < 2) fail(ErrorCode::EmptyGrid, "curve spans a single label value");
    side.grid.resize(n);
    side.x.resize(n);
    side.U.resize(n);
    side.J.resize(n);
    side.K.resize(n);
    side.V.resize(n - 1);
    double xmax = -std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < n; ++k) {
      side.grid[k] = samples[k].L;
      xmax = std::max(xmax, samples[k].z.x);
      side.x[k] = xmax;
      side.U[k] = samples[k].z.U;
    }
    side.J[0] = 0.0;
    side.K[0] = 0.0;
    for (std::size_t k = 0; k + 1 < n; ++k) {
      const FiveVector in = slope.integral(side.grid[k], side.grid[k + 1]);
      side.J[k + 1] = side.J[k] + in.J;
      side.K[k + 1] = side.K[k] + in.K;
      side.V[k] = slope.average(side.grid[k], side.grid[k + 1]).U;
    }
    return side;
  };

  PlaneData psi;
  psi.first = build(theta.X, theta.V);
  psi.second = build(theta.Y, theta.W);
  return psi;
}

PhysicalState map_M(const PlaneData& psi, const SpeedLaw& law, PushforwardTolerances tol) {
  const PlaneSide& a = psi.first;
  const PlaneSide& b = psi.second;
  a.validate();
  b.validate();

  std::vector<double> xs = a.x;
  xs.insert(xs.end(), b.x.begin(), b.x.end());
  std::sort(xs.begin(), xs.end());
  xs.erase(std::unique(xs.begin(), xs.end()), xs.end());
  if (xs.size() < 2) xs.push_back(xs.back() + 1.0);

  PhysicalState st;
  st.grid = xs;
  const std::size_t n = xs.size();
  st.u.resize(n);
  st.R.assign(n, 0.0);
  st.S.assign(n, 0.0);
  for (std::size_t k = 0; k < n; ++k) st.u[k] = U_at_position(a, xs[k]);
  for (std::size_t k = 0; k + 1 < n; ++k) {
    const double mid = 0.5 * (xs[k] + xs[k + 1]);
    st.R[k] = riemann_at_position(a, law, mid, tol.plateau_tol);
    st.S[k] = -riemann_at_position(b, law, mid, tol.plateau_tol);
  }
  st.u_infinity = a.U.front();

  auto measure = [&](const PlaneSide& side) {
    std::vector<double> dm(side.size() - 1);
    double total = 0.0;
    for (std::size_t k = 0; k + 1 < side.size(); ++k) {
      dm[k] = side.J[k + 1] - side.J[k];
      total += std::abs(dm[k]);
    }
    if (tol.pool_negative) return pushforward_masses(side.grid, dm, side.x, tol);
    const double floor = -1e-9 * std::max(1.0, total);
    for (double& m : dm) {
      if (m < floor) fail(ErrorCode::NegativeWeight, "energy potential decreases");
      m = std::max(m, 0.0);
    }
    return pushforward_masses(side.grid, dm, side.x, tol);
  };
  st.mu = measure(a);
  st.nu = measure(b);
  return st;
}

namespace {

PlaneSide relabel_side(const PlaneSide& side, const MonotoneFunction& f, double bound) {
  if (f.extension() != MonotoneFunction::Extension::UnitSlope) {
    fail(ErrorCode::InvalidRelabeling, "relabeling must differ from the identity by a bounded map");
  }
  const auto& fi = f.inputs();
  const auto& fo = f.outputs();
  for (std::size_t k = 1; k < fi.size(); ++k) {
    const double dx = fi[k] - fi[k - 1];
    const double slope = (fo[k] - fo[k - 1]) / dx;
    if (!(dx > 0.0) || !(slope >= 1.0 / bound) || !(slope <= bound)) {
      fail(ErrorCode::InvalidRelabeling, "relabeling slope outside admissible bounds");
    }
  }
  const MonotoneFunction finv = f.inverse();
  std::vector<double> knots = fi;
  for (double X : side.grid) knots.push_back(finv(X));
  std::sort(knots.begin(), knots.end());
  knots.erase(std::unique(knots.begin(), knots.end()), knots.end());

  PlaneSide out;
  const std::size_t n = knots.size();
  out.grid = knots;
  out.x.resize(n);
  out.U.resize(n);
  out.J.resize(n);
  out.K.resize(n);
  out.V.resize(n - 1);
  std::vector<double> fx(n);
  for (std::size_t k = 0; k < n; ++k) {
    fx[k] = f(knots[k]);
    out.x[k] = side.x_at(fx[k]);
    out.U[k] = side.U_at(fx[k]);
    out.J[k] = side.J_at(fx[k]);
    out.K[k] = side.K_at(fx[k]);
  }
  for (std::size_t k = 0; k + 1 < n; ++k) {
    const double df = fx[k + 1] - fx[k];
    out.V[k] = side.V_at(0.5 * (fx[k] + fx[k + 1])) * (df / (knots[k + 1] - knots[k]));
  }
  return out;
}

PlaneSide project_side(const PlaneSide& side) {
  PlaneSide out = side;
  for (std::size_t k = 0; k < side.size(); ++k) out.grid[k] = side.x[k] + side.J[k];
  for (std::size_t k = 0; k + 1 < side.size(); ++k) {
    const double dnew = out.grid[k + 1] - out.grid[k];
    if (!(dnew > 0.0)) fail(ErrorCode::InvalidArgument, "x + J must be strictly increasing");
    out.V[k] = side.V[k] * ((side.grid[k + 1] - side.grid[k]) / dnew);
  }
  return out;
}

}  // namespace

PlaneData relabel(const PlaneData& psi, const Relabeling& phi) {
  psi.first.validate();
  psi.second.validate();
  return {relabel_side(psi.first, phi.f, phi.slope_bound),
          relabel_side(psi.second, phi.g, phi.slope_bound)};
}

PlaneData project_Pi(const PlaneData& psi) {
  psi.first.validate();
  psi.second.validate();
  return {project_side(psi.first), project_side(psi.second)};
}

PlaneResiduals plane_residuals(const PlaneData& psi, const SpeedLaw& law) {
  PlaneResiduals r;
  r.min_x_slope = r.min_J_slope = r.min_xJ_slope = std::numeric_limits<double>::infinity();
  r.max_xJ_slope = -std::numeric_limits<double>::infinity();
  for (const PlaneSide* side : {&psi.first, &psi.second}) {
    r.J_at_left = std::max(r.J_at_left, std::abs(side->J.front()));
    for (std::size_t k = 0; k + 1 < side->size(); ++k) {
      const double dX = side->grid[k + 1] - side->grid[k];
      const double xp = (side->x[k + 1] - side->x[k]) / dX;
      const double Jp = (side->J[k + 1] - side->J[k]) / dX;
      const double c = law.c(0.5 * (side->U[k] + side->U[k + 1]));
      r.min_x_slope = std::min(r.min_x_slope, xp);
      r.min_J_slope = std::min(r.min_J_slope, Jp);
      r.min_xJ_slope = std::min(r.min_xJ_slope, xp + Jp);
      r.max_xJ_slope = std::max(r.max_xJ_slope, xp + Jp);
      const double cv = c * side->V[k];
      r.energy_relation = std::max(r.energy_relation, std::abs(xp * Jp - cv * cv));
    }
  }
  return r;
}

namespace {

// Z at the first curve parameter where X(s) reaches the given label.
FiveVector curve_at_label(const CurveData& theta, const std::vector<double>& lab, double L) {
  if (L <= lab.front()) return theta.Z.front();
  if (L >= lab.back()) return theta.Z.back();
  auto it = std::lower_bound(lab.begin(), lab.end(), L);
  const auto j = static_cast<std::size_t>(it - lab.begin());
  if (lab[j] == L) return theta.Z[j];
  const double w = (L - lab[j - 1]) / (lab[j] - lab[j - 1]);
  return theta.Z[j - 1] + (theta.Z[j] - theta.Z[j - 1]) * w;
}

}  // namespace

CurveResiduals curve_residuals(const CurveData& theta, const SpeedLaw& law) {
  CurveResiduals r;
  r.min_slope = std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < theta.size(); ++k) {
    r.sum_rule = std::max(r.sum_rule, std::abs(theta.X[k] + theta.Y[k] - 2.0 * theta.s[k]));
    r.max_abs_t = std::max(r.max_abs_t, std::abs(theta.Z[k].t));
  }
  auto scan = [&](const CellFunction& f, const std::vector<double>& lab, double sign) {
    for (std::size_t k = 0; k < f.values.size(); ++k) {
      const FiveVector& v = f.values[k];
      const double mid = 0.5 * (f.edges[k] + f.edges[k + 1]);
      const double c = law.c(curve_at_label(theta, lab, mid).U);
      r.min_slope = std::min({r.min_slope, v.x, v.J});
      r.linear_relations = std::max({r.linear_relations, std::abs(v.x - sign * c * v.t),
                                     std::abs(v.J - sign * c * v.K)});
      const double cu = c * v.U;
      r.energy_relation = std::max(r.energy_relation, std::abs(2.0 * v.J * v.x - cu * cu));
    }
  };
  scan(theta.V, theta.X, 1.0);
  scan(theta.W, theta.Y, -1.0);
  for (std::size_t k = 0; k + 1 < theta.size(); ++k) {
    const FiveVector dz = theta.Z[k + 1] - theta.Z[k];
    const FiveVector pred = theta.V.integral(theta.X[k], theta.X[k + 1]) +
                            theta.W.integral(theta.Y[k], theta.Y[k + 1]);
    r.compatibility = std::max(r.compatibility, (dz - pred).max_abs());
  }
  return r;
}

double plane_distance(const PlaneData& a, const PlaneData& b) {
  auto side_distance = [](const PlaneSide& p, const PlaneSide& q) {
    std::vector<double> knots = p.grid;
    knots.insert(knots.end(), q.grid.begin(), q.grid.end());
    std::sort(knots.begin(), knots.end());
    knots.erase(std::unique(knots.begin(), knots.end()), knots.end());
    double d = 0.0;
    for (double X : knots) {
      d = std::max({d, std::abs(p.x_at(X) - q.x_at(X)), std::abs(p.U_at(X) - q.U_at(X)),
                    std::abs(p.J_at(X) - q.J_at(X)), std::abs(p.K_at(X) - q.K_at(X))});
    }
    // Knots from the two grids can differ by a few ulps; the sliver between
    // them carries no information about V.
    for (std::size_t k = 0; k + 1 < knots.size(); ++k) {
      const double width_floor = 1e-12 * std::max(1.0, std::abs(knots[k]));
      if (knots[k + 1] - knots[k] <= width_floor) continue;
      const double mid = 0.5 * (knots[k] + knots[k + 1]);
      d = std::max(d, std::abs(p.V_at(mid) - q.V_at(mid)));
    }
    return d;
  };
  return std::max(side_distance(a.first, b.first), side_distance(a.second, b.second));
}

void to_json(nlohmann::json& j, const PlaneSide& side) {
  j = {{"grid", side.grid}, {"x", side.x}, {"U", side.U},
       {"V", side.V},       {"J", side.J}, {"K", side.K}};
}

void from_json(const nlohmann::json& j, PlaneSide& side) {
  side.grid = j.at("grid").get<std::vector<double>>();
  side.x = j.at("x").get<std::vector<double>>();
  side.U = j.at("U").get<std::vector<double>>();
  side.V = j.at("V").get<std::vector<double>>();
  side.J = j.at("J").get<std::vector<double>>();
  side.K = j.at("K").get<std::vector<double>>();
  side.validate();
}

void to_json(nlohmann::json& j, const PlaneData& psi) {
  j = {{"psi1", psi.first}, {"psi2", psi.second}};
}

void from_json(const nlohmann::json& j, PlaneData& psi) {
  psi.first = j.at("psi1").get<PlaneSide>();
  psi.second = j.at("psi2").get<PlaneSide>();
}

void to_json(nlohmann::json& j, const CellFunction& f) {
  j = {{"edges", f.edges}, {"values", f.values}, {"left", f.left}, {"right", f.right}};
}

void from_json(const nlohmann::json& j, CellFunction& f) {
  f.edges = j.at("edges").get<std::vector<double>>();
  f.values = j.at("values").get<std::vector<FiveVector>>();
  f.left = j.at("left").get<FiveVector>();
  f.right = j.at("right").get<FiveVector>();
}

void to_json(nlohmann::json& j, const CurveData& theta) {
  std::vector<double> t;
  std::vector<double> x;
  std::vector<double> U;
  std::vector<double> J;
  std::vector<double> K;
  for (const FiveVector& z : theta.Z) {
    t.push_back(z.t);
    x.push_back(z.x);
    U.push_back(z.U);
    J.push_back(z.J);
    K.push_back(z.K);
  }
  j = {{"s", theta.s}, {"X", theta.X}, {"Y", theta.Y}, {"t", t},          {"x", x},
       {"U", U},       {"J", J},       {"K", K},       {"V", theta.V}, {"W", theta.W}};
}

void from_json(const nlohmann::json& j, CurveData& theta) {
  theta.s = j.at("s").get<std::vector<double>>();
  theta.X = j.at("X").get<std::vector<double>>();
  theta.Y = j.at("Y").get<std::vector<double>>();
  const auto t = j.at("t").get<std::vector<double>>();
  const auto x = j.at("x").get<std::vector<double>>();
  const auto U = j.at("U").get<std::vector<double>>();
  const auto J = j.at("J").get<std::vector<double>>();
  const auto K = j.at("K").get<std::vector<double>>();
  if (t.size() != theta.s.size() || x.size() != t.size() || U.size() != t.size() ||
      J.size() != t.size() || K.size() != t.size()) {
    fail(ErrorCode::InvalidArgument, "curve component sizes disagree");
  }
  theta.Z.resize(t.size());
  for (std::size_t k = 0; k < t.size(); ++k) theta.Z[k] = {t[k], x[k], U[k], J[k], K[k]};
  theta.V = j.at("V").get<CellFunction>();
  theta.W = j.at("W").get<CellFunction>();
  theta.validate();
}

}  // namespace nvw
