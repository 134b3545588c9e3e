#include "nvw/solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>
#include <string>

#include "nvw/csv.hpp"

namespace nvw {

FiveVector f_rhs(const FiveVector& Zmid, const FiveVector& V, const FiveVector& W,
                 const SpeedLaw& law) {
  const SpeedValue sv = law.eval(Zmid.U);
  if (sv.c_prime == 0.0) return {};
  const double a = sv.c_prime / (2.0 * sv.c);
  const double b = sv.c_prime / (2.0 * sv.c * sv.c * sv.c);
  FiveVector F;
  F.t = -a * (V.U * W.t + W.U * V.t);
  F.x = a * (W.U * V.x + V.U * W.x);
  F.U = b * (W.x * V.J + W.J * V.x) - a * (W.U * V.U);
  F.J = a * (V.J * W.U + W.J * V.U);
  F.K = -a * (V.K * W.U + W.K * V.U);
  return F;
}

FiveVector SolutionGrid::node(int i, int j) const {
  if (i == 0) return Zv(0, j);
  return (Zh(i, j) + Zv(i, j)) * 0.5;
}

SolutionGrid init_staircase(const CurveData& theta, const SpeedLaw& law, int N, double s_min,
                            double s_max) {
  if (N < 2) fail(ErrorCode::GridTooSmall, "grid needs N >= 2");
  if (!(s_max > s_min)) fail(ErrorCode::BadRange, "s_max must exceed s_min");
  theta.validate();

  SolutionGrid g;
  g.N = N;
  g.law = law;
  const std::size_t n1 = static_cast<std::size_t>(N) + 1;
  g.s.resize(n1);
  g.X.resize(n1);
  g.Y.resize(n1);
  g.zh.assign(n1 * n1, FiveVector{});
  g.zv.assign(n1 * n1, FiveVector{});
  g.v.assign(n1 * n1, FiveVector{});
  g.w.assign(n1 * n1, FiveVector{});

  for (int i = 0; i <= N; ++i) {
    const double si = (s_min * (N - i) + s_max * i) / N;
    g.s[i] = si;
    g.X[i] = theta.X_at(si);
    g.Y[i] = theta.Y_at(si);
    if (i > 0) {
      g.X[i] = std::max(g.X[i], g.X[i - 1]);
      g.Y[i] = std::max(g.Y[i], g.Y[i - 1]);
    }
    const FiveVector z = theta.Z_at(si);
    g.Zh(i, i) = z;
    g.Zv(i, i) = z;
  }
  for (int i = 1; i <= N; ++i) g.V(i, i) = theta.V.average(g.X[i - 1], g.X[i]);
  for (int i = 0; i < N; ++i) g.W(i, i) = theta.W.average(g.Y[i], g.Y[i + 1]);
  return g;
}

namespace {

void guard(const FiveVector& v, double bound) {
  for (std::size_t k = 0; k < FiveVector::size; ++k) {
    if (!(std::abs(v[k]) <= bound)) {
      fail(ErrorCode::NonFiniteValue, "solution left the guard range " + format_double(bound));
    }
  }
}

}  // namespace

SolutionGrid solve_grid(SolutionGrid g) {
  const int N = g.N;
  const SpeedLaw& law = g.law;
  const double bound = g.guard;
  for (int n = 0; n < N; ++n) {
    const double dX = g.X[n + 1] - g.X[n];
    // Vertical strip [X_n, X_{n+1}], from the diagonal downwards.
    for (int j = n + 1; j >= 1; --j) {
      const double dY = g.Y[j] - g.Y[j - 1];
      const FiveVector zh = g.Zh(n + 1, j);
      const FiveVector zv = g.Zv(n, j - 1);
      const FiveVector Vc = g.V(n + 1, j);
      const FiveVector Wc = g.W(n, j - 1);
      const FiveVector F = f_rhs((zh + zv) * 0.5, Vc, Wc, law);
      g.Zh(n + 1, j - 1) = zh - Wc * dY;
      g.V(n + 1, j - 1) = Vc - F * dY;
      g.Zv(n + 1, j - 1) = zv + Vc * dX;
      g.W(n + 1, j - 1) = Wc + F * dX;
      guard(g.Zh(n + 1, j - 1), bound);
      guard(g.Zv(n + 1, j - 1), bound);
      guard(g.V(n + 1, j - 1), bound);
      guard(g.W(n + 1, j - 1), bound);
    }
    // Horizontal strip [Y_n, Y_{n+1}], from the diagonal leftwards.
    const double dYn = g.Y[n + 1] - g.Y[n];
    const bool top = n + 1 == N;
    for (int i = n + 1; i >= 1; --i) {
      const double dXi = g.X[i] - g.X[i - 1];
      if (i >= 2) {
        const FiveVector Vb = g.V(i - 1, n);
        const FiveVector Wb = g.W(i - 1, n);
        const FiveVector Fb = f_rhs((g.Zh(i - 1, n) + g.Zv(i - 1, n)) * 0.5, Vb, Wb, law);
        g.Zh(i - 1, n + 1) = g.Zh(i - 1, n) + Wb * dYn;
        g.V(i - 1, n + 1) = Vb + Fb * dYn;
        guard(g.Zh(i - 1, n + 1), bound);
        guard(g.V(i - 1, n + 1), bound);
      }
      const FiveVector Vr = g.V(i, n + 1);
      g.Zv(i - 1, n + 1) = g.Zv(i, n + 1) - Vr * dXi;
      guard(g.Zv(i - 1, n + 1), bound);
      if (!top) {
        const FiveVector Wr = g.W(i, n + 1);
        const FiveVector Fr = f_rhs((g.Zh(i, n + 1) + g.Zv(i, n + 1)) * 0.5, Vr, Wr, law);
        g.W(i - 1, n + 1) = Wr - Fr * dXi;
        guard(g.W(i - 1, n + 1), bound);
      }
    }
  }
  g.filled = true;
  return g;
}

double InvariantDiagnostics::max_equality() const {
  return std::max({x_t_X, x_t_Y, J_K_X, J_K_Y, energy_X, energy_Y});
}

double InvariantDiagnostics::min_positivity() const {
  return std::min({min_x_X, min_x_Y, min_J_X, min_J_Y, min_xJ_X, min_xJ_Y});
}

InvariantDiagnostics invariant_residuals(const SolutionGrid& g) {
  if (!g.filled) fail(ErrorCode::InvalidArgument, "grid has not been solved");
  const int N = g.N;
  InvariantDiagnostics d;
  constexpr double inf = std::numeric_limits<double>::infinity();
  d.min_x_X = d.min_x_Y = d.min_J_X = d.min_J_Y = d.min_xJ_X = d.min_xJ_Y = inf;
  d.min_J = inf;

  std::vector<FiveVector> nodes(g.zh.size());
  for (int i = 0; i <= N; ++i) {
    for (int j = 0; j <= N; ++j) nodes[g.idx(i, j)] = g.node(i, j);
  }
  double e0 = 0.0;
  for (int i = 0; i <= N; ++i) e0 = std::max(e0, nodes[g.idx(i, i)].J);
  double jmax = -inf;
  for (int i = 0; i <= N; ++i) {
    for (int j = 0; j <= N; ++j) {
      const FiveVector& z = nodes[g.idx(i, j)];
      jmax = std::max(jmax, z.J);
      d.min_J = std::min(d.min_J, z.J);
      if (i >= 1) d.zh_zv = std::max(d.zh_zv, (g.Zh(i, j) - g.Zv(i, j)).max_abs());
    }
  }
  d.max_J_excess = jmax - e0;

  for (int i = 1; i <= N; ++i) {
    for (int j = 0; j <= N; ++j) {
      const FiveVector& v = g.V(i, j);
      // Zh(i, j) approximates Z on the same horizontal segment as V(i, j).
      const double c = g.law.c(g.Zh(i, j).U);
      d.x_t_X = std::max(d.x_t_X, std::abs(v.x - c * v.t));
      d.J_K_X = std::max(d.J_K_X, std::abs(v.J - c * v.K));
      const double cu = c * v.U;
      d.energy_X = std::max(d.energy_X, std::abs(2.0 * v.J * v.x - cu * cu));
      d.min_x_X = std::min(d.min_x_X, v.x);
      d.min_J_X = std::min(d.min_J_X, v.J);
      d.min_xJ_X = std::min(d.min_xJ_X, v.x + v.J);
    }
  }
  for (int i = 0; i <= N; ++i) {
    for (int j = 0; j < N; ++j) {
      const FiveVector& w = g.W(i, j);
      const double c = g.law.c(g.Zv(i, j).U);
      d.x_t_Y = std::max(d.x_t_Y, std::abs(w.x + c * w.t));
      d.J_K_Y = std::max(d.J_K_Y, std::abs(w.J + c * w.K));
      const double cu = c * w.U;
      d.energy_Y = std::max(d.energy_Y, std::abs(2.0 * w.J * w.x - cu * cu));
      d.min_x_Y = std::min(d.min_x_Y, w.x);
      d.min_J_Y = std::min(d.min_J_Y, w.J);
      d.min_xJ_Y = std::min(d.min_xJ_Y, w.x + w.J);
    }
  }
  return d;
}

IsotimeCurve extract_isotime(const SolutionGrid& g, double T) {
  if (!g.filled) fail(ErrorCode::InvalidArgument, "grid has not been solved");
  const int N = g.N;
  const double tmin = g.node(0, N).t;
  const double tmax = g.node(N, 0).t;
  if (!(T > tmin && T < tmax)) {
    fail(ErrorCode::TimeOutOfRange, "time " + format_double(T) + " outside the grid range (" +
                                        format_double(tmin) + ", " + format_double(tmax) + ")");
  }
  // Nodes lying on the level set itself (up to rounding) belong to the curve.
  const double tie = 1e-12 * std::max(1.0, std::abs(T));
  std::vector<int> ik(static_cast<std::size_t>(N) + 1, -1);
  for (int k = 0; k <= N; ++k) {
    int i = N;
    while (i >= 0 && !(g.node(i, k).t <= T + tie)) --i;
    ik[k] = i;
  }

  IsotimeCurve iso;
  iso.T = T;
  int k0 = 0;
  while (k0 <= N && ik[k0] < 0) ++k0;
  for (int k = k0; k <= N; ++k) {
    if (ik[k] < 0) continue;
    iso.rows.push_back(k);
    iso.cols.push_back(ik[k]);
  }

  auto push = [&](int i, int j) { iso.path.push_back({i, j, g.node(i, j)}); };
  auto horizontal = [&](int from, int to, int row) {
    for (int i = from + 1; i <= to; ++i) {
      iso.mu_energy += g.V(i, row).J * (g.X[i] - g.X[i - 1]);
      push(i, row);
    }
  };
  int col = ik[k0];
  if (k0 > 0) {
    push(0, k0);
    horizontal(0, col, k0);
  } else {
    push(col, 0);
  }
  for (int k = k0; k < N && col < N; ++k) {
    iso.nu_energy += g.W(col, k).J * (g.Y[k + 1] - g.Y[k]);
    push(col, k + 1);
    const int next = std::max(col, ik[k + 1]);
    horizontal(col, next, k + 1);
    col = next;
  }
  for (const StaircaseNode& p : iso.path) {
    iso.max_t_gap = std::max(iso.max_t_gap, std::abs(p.z.t - T));
  }
  return iso;
}

CurveData isotime_to_curve(const SolutionGrid& g, const IsotimeCurve& iso) {
  CurveData theta;
  auto far = [&](double U, double sign) {
    return FiveVector{sign * 0.5 / g.law.c(U), 0.5, 0.0, 0.0, 0.0};
  };
  const StaircaseNode* prev = nullptr;
  for (const StaircaseNode& p : iso.path) {
    const double X = g.X[p.i];
    const double Y = g.Y[p.j];
    if (prev != nullptr) {
      if (p.i != prev->i) {
        const double a = g.X[prev->i];
        if (X > a) {
          if (theta.V.edges.empty()) theta.V.edges.push_back(a);
          theta.V.edges.push_back(X);
          theta.V.values.push_back(g.V(p.i, p.j));
        }
      } else {
        const double b = g.Y[prev->j];
        if (Y > b) {
          if (theta.W.edges.empty()) theta.W.edges.push_back(b);
          theta.W.edges.push_back(Y);
          theta.W.values.push_back(g.W(p.i, prev->j));
        }
      }
    }
    prev = &p;
    const double sv = 0.5 * (X + Y);
    if (!theta.s.empty() && !(sv > theta.s.back())) continue;
    theta.s.push_back(sv);
    theta.X.push_back(X);
    theta.Y.push_back(Y);
    FiveVector z = p.z;
    z.t -= iso.T;
    theta.Z.push_back(z);
  }
  if (theta.s.size() < 2) fail(ErrorCode::DomainTooSmall, "isotime curve is degenerate");
  if (theta.V.edges.empty()) theta.V.edges.push_back(theta.X.front());
  if (theta.W.edges.empty()) theta.W.edges.push_back(theta.Y.front());
  theta.V.left = far(theta.Z.front().U, 1.0);
  theta.V.right = far(theta.Z.back().U, 1.0);
  theta.W.left = far(theta.Z.front().U, -1.0);
  theta.W.right = far(theta.Z.back().U, -1.0);
  return theta;
}

void write_grid_csv(std::ostream& out, const SolutionGrid& g) {
  out << "i,j,X,Y,t,x,U,J,K\n";
  for (int i = 0; i <= g.N; ++i) {
    for (int j = 0; j <= g.N; ++j) {
      const FiveVector z = g.node(i, j);
      write_csv_row(out, {static_cast<double>(i), static_cast<double>(j), g.X[i], g.Y[j], z.t,
                          z.x, z.U, z.J, z.K});
    }
  }
}

}  // namespace nvw
