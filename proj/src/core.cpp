#include "nvw/core.hpp"

#include <algorithm>
#include <cmath>

namespace nvw {

SpeedLaw SpeedLaw::constant(double c0) {
  if (!(c0 > 0.0) || !std::isfinite(c0)) fail(ErrorCode::InvalidArgument, "c0 must be positive");
  SpeedLaw law;
  law.kind_ = SpeedKind::Constant;
  law.c0_ = c0;
  return law;
}

SpeedLaw SpeedLaw::liquid_crystal(double alpha, double beta) {
  if (!(alpha > 0.0) || !(beta > 0.0) || !std::isfinite(alpha) || !std::isfinite(beta)) {
    fail(ErrorCode::InvalidArgument, "alpha and beta must be positive");
  }
  SpeedLaw law;
  law.kind_ = SpeedKind::LiquidCrystal;
  law.alpha_ = alpha;
  law.beta_ = beta;
  return law;
}

double SpeedLaw::kappa() const {
  if (kind_ == SpeedKind::Constant) return std::max(c0_, 1.0 / c0_);
  const double a = std::sqrt(alpha_);
  const double b = std::sqrt(beta_);
  return std::max({a, b, 1.0 / a, 1.0 / b});
}

double SpeedLaw::max_speed() const {
  if (kind_ == SpeedKind::Constant) return c0_;
  return std::sqrt(std::max(alpha_, beta_));
}

SpeedValue SpeedLaw::eval(double u) const {
  if (kind_ == SpeedKind::Constant) return {c0_, 0.0};
  const double cs = std::cos(u);
  const double sn = std::sin(u);
  const double c = std::sqrt(beta_ * cs * cs + alpha_ * sn * sn);
  return {c, (alpha_ - beta_) * sn * cs / c};
}

SpeedValue c_eval(const SpeedLaw& law, double u) { return law.eval(u); }

double& FiveVector::operator[](std::size_t k) {
  switch (k) {
    case 0: return t;
    case 1: return x;
    case 2: return U;
    case 3: return J;
    default: return K;
  }
}

double FiveVector::operator[](std::size_t k) const {
  return const_cast<FiveVector&>(*this)[k];
}

FiveVector& FiveVector::operator+=(const FiveVector& o) {
  t += o.t;
  x += o.x;
  U += o.U;
  J += o.J;
  K += o.K;
  return *this;
}

FiveVector& FiveVector::operator-=(const FiveVector& o) {
  t -= o.t;
  x -= o.x;
  U -= o.U;
  J -= o.J;
  K -= o.K;
  return *this;
}

FiveVector& FiveVector::operator*=(double a) {
  t *= a;
  x *= a;
  U *= a;
  J *= a;
  K *= a;
  return *this;
}

double FiveVector::max_abs() const {
  return std::max({std::abs(t), std::abs(x), std::abs(U), std::abs(J), std::abs(K)});
}

FiveVector operator+(FiveVector a, const FiveVector& b) { return a += b; }
FiveVector operator-(FiveVector a, const FiveVector& b) { return a -= b; }
FiveVector operator*(FiveVector a, double s) { return a *= s; }
FiveVector operator*(double s, FiveVector a) { return a *= s; }

RSData rs_from_velocity(std::span<const double> grid, std::span<const double> u0,
                        std::span<const double> u1, const SpeedLaw& law) {
  const std::size_t n = grid.size();
  if (n < 3) fail(ErrorCode::GridTooSmall, "rs_from_velocity needs at least 3 nodes");
  if (u0.size() != n || u1.size() != n) {
    fail(ErrorCode::InvalidArgument, "u0, u1 and grid sizes differ");
  }
  RSData out;
  out.R.resize(n);
  out.S.resize(n);
  for (std::size_t k = 0; k < n; ++k) {
    double d = 0.0;
    if (k == 0) {
      d = (u0[1] - u0[0]) / (grid[1] - grid[0]);
    } else if (k + 1 == n) {
      d = (u0[k] - u0[k - 1]) / (grid[k] - grid[k - 1]);
    } else {
      d = (u0[k + 1] - u0[k - 1]) / (grid[k + 1] - grid[k - 1]);
    }
    const double cu = law.c(u0[k]) * d;
    out.R[k] = u1[k] + cu;
    out.S[k] = u1[k] - cu;
  }
  return out;
}

namespace {

std::size_t cell_of(const std::vector<double>& grid, double x) {
  auto it = std::upper_bound(grid.begin(), grid.end(), x);
  return static_cast<std::size_t>(it - grid.begin()) - 1;
}

}  // namespace

double PhysicalState::u_at(double x) const {
  if (grid.empty() || x < grid.front() || x > grid.back()) return u_infinity;
  if (x == grid.back()) return u.back();
  const std::size_t k = cell_of(grid, x);
  const double w = (x - grid[k]) / (grid[k + 1] - grid[k]);
  return u[k] + w * (u[k + 1] - u[k]);
}

double PhysicalState::R_at(double x) const {
  if (grid.empty() || x < grid.front() || x >= grid.back()) return 0.0;
  return R[cell_of(grid, x)];
}

double PhysicalState::S_at(double x) const {
  if (grid.empty() || x < grid.front() || x >= grid.back()) return 0.0;
  return S[cell_of(grid, x)];
}

void PhysicalState::validate() const {
  if (grid.size() < 2) fail(ErrorCode::EmptyGrid, "state grid needs at least 2 nodes");
  if (u.size() != grid.size() || R.size() != grid.size() || S.size() != grid.size()) {
    fail(ErrorCode::InvalidArgument, "state sample sizes differ from grid");
  }
  for (std::size_t k = 0; k < grid.size(); ++k) {
    if (!std::isfinite(grid[k]) || !std::isfinite(u[k]) || !std::isfinite(R[k]) ||
        !std::isfinite(S[k])) {
      fail(ErrorCode::NonFiniteValue, "state sample");
    }
    if (k > 0 && !(grid[k] > grid[k - 1])) {
      fail(ErrorCode::InvalidArgument, "state grid must be strictly increasing");
    }
  }
  for (const RadonMeasure* m : {&mu, &nu}) {
    if (m->empty()) continue;
    auto [lo, hi] = m->support();
    if (m->total_mass() > 0.0 && (lo < grid.front() || hi > grid.back())) {
      fail(ErrorCode::UnsupportedMeasure, "energy measure extends beyond the grid window");
    }
  }
}

RadonMeasure quarter_square_measure(std::span<const double> grid, std::span<const double> f) {
  if (grid.size() < 2) return {};
  std::vector<double> d(grid.size() - 1);
  bool any = false;
  for (std::size_t k = 0; k + 1 < grid.size(); ++k) {
    d[k] = 0.25 * f[k] * f[k];
    any = any || d[k] > 0.0;
  }
  if (!any) return {};
  return RadonMeasure(std::vector<double>(grid.begin(), grid.end()), std::move(d));
}

PhysicalState make_state(std::vector<double> grid, std::vector<double> u, std::vector<double> R,
                         std::vector<double> S, std::vector<Atom> mu_atoms,
                         std::vector<Atom> nu_atoms, double u_infinity) {
  PhysicalState s;
  s.grid = std::move(grid);
  s.u = std::move(u);
  s.R = std::move(R);
  s.S = std::move(S);
  s.u_infinity = u_infinity;
  if (s.R.size() != s.grid.size() || s.S.size() != s.grid.size()) {
    fail(ErrorCode::InvalidArgument, "R and S must be sampled on the grid");
  }
  const RadonMeasure mu_ac = quarter_square_measure(s.grid, s.R);
  const RadonMeasure nu_ac = quarter_square_measure(s.grid, s.S);
  s.mu = RadonMeasure(mu_ac.breakpoints(), mu_ac.densities(), std::move(mu_atoms));
  s.nu = RadonMeasure(nu_ac.breakpoints(), nu_ac.densities(), std::move(nu_atoms));
  s.validate();
  return s;
}

StateResiduals state_residuals(const PhysicalState& state, const SpeedLaw& law) {
  StateResiduals r;
  for (std::size_t k = 0; k + 1 < state.grid.size(); ++k) {
    const double a = state.grid[k];
    const double b = state.grid[k + 1];
    const double mid = 0.5 * (a + b);
    r.mu_ac = std::max(r.mu_ac, std::abs(state.mu.density_at(mid) - 0.25 * state.R[k] * state.R[k]));
    r.nu_ac = std::max(r.nu_ac, std::abs(state.nu.density_at(mid) - 0.25 * state.S[k] * state.S[k]));
    const double ux = (state.u[k + 1] - state.u[k]) / (b - a);
    const double c = law.c(0.5 * (state.u[k] + state.u[k + 1]));
    r.u_x = std::max(r.u_x, std::abs(ux - (state.R[k] - state.S[k]) / (2.0 * c)));
  }
  return r;
}

void to_json(nlohmann::json& j, const SpeedLaw& law) {
  if (law.is_constant()) {
    j = {{"kind", "constant"}, {"c0", law.c0()}};
  } else {
    j = {{"kind", "liquid_crystal"}, {"alpha", law.alpha()}, {"beta", law.beta()}};
  }
}

void from_json(const nlohmann::json& j, SpeedLaw& law) {
  const std::string kind = j.at("kind").get<std::string>();
  if (kind == "constant") {
    law = SpeedLaw::constant(j.value("c0", 1.0));
  } else if (kind == "liquid_crystal") {
    law = SpeedLaw::liquid_crystal(j.at("alpha").get<double>(), j.at("beta").get<double>());
  } else {
    fail(ErrorCode::ConfigError, "unknown speed law kind '" + kind + "'");
  }
}

void to_json(nlohmann::json& j, const FiveVector& v) { j = {v.t, v.x, v.U, v.J, v.K}; }

void from_json(const nlohmann::json& j, FiveVector& v) {
  v = {j.at(0).get<double>(), j.at(1).get<double>(), j.at(2).get<double>(),
       j.at(3).get<double>(), j.at(4).get<double>()};
}

void to_json(nlohmann::json& j, const PhysicalState& s) {
  j = {{"grid", s.grid}, {"u", s.u},   {"R", s.R},
       {"S", s.S},       {"mu", s.mu}, {"nu", s.nu},
       {"u_infinity", s.u_infinity}};
}

void from_json(const nlohmann::json& j, PhysicalState& s) {
  s.grid = j.at("grid").get<std::vector<double>>();
  s.u = j.at("u").get<std::vector<double>>();
  s.R = j.at("R").get<std::vector<double>>();
  s.S = j.at("S").get<std::vector<double>>();
  s.mu = j.at("mu").get<RadonMeasure>();
  s.nu = j.at("nu").get<RadonMeasure>();
  s.u_infinity = j.value("u_infinity", 0.0);
  s.validate();
}

}  // namespace nvw
