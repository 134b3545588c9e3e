#pragma once

#include <array>
#include <cstddef>
#include <span>
#include <vector>

#include "nvw/error.hpp"
#include "nvw/measures.hpp"

namespace nvw {

enum class SpeedKind { Constant, LiquidCrystal };

struct SpeedValue {
  double c = 0.0;
  double c_prime = 0.0;
};

// Wave speed c(u): either a constant c0 or c(u)^2 = beta cos^2 u + alpha sin^2 u.
class SpeedLaw {
 public:
  static SpeedLaw constant(double c0);
  static SpeedLaw liquid_crystal(double alpha, double beta);

  SpeedKind kind() const { return kind_; }
  bool is_constant() const { return kind_ == SpeedKind::Constant; }
  double c0() const { return c0_; }
  double alpha() const { return alpha_; }
  double beta() const { return beta_; }

  // Two-sided bound kappa^-1 <= c(u) <= kappa.
  double kappa() const;
  // sup_u c(u); the actual propagation speed bound.
  double max_speed() const;

  SpeedValue eval(double u) const;
  double c(double u) const { return eval(u).c; }

 private:
  SpeedKind kind_ = SpeedKind::Constant;
  double c0_ = 1.0;
  double alpha_ = 1.0;
  double beta_ = 1.0;
};

SpeedValue c_eval(const SpeedLaw& law, double u);

// Component order is (t, x, U, J, K) everywhere.
struct FiveVector {
  double t = 0.0;
  double x = 0.0;
  double U = 0.0;
  double J = 0.0;
  double K = 0.0;

  static constexpr std::size_t size = 5;

  double& operator[](std::size_t k);
  double operator[](std::size_t k) const;

  FiveVector& operator+=(const FiveVector& o);
  FiveVector& operator-=(const FiveVector& o);
  FiveVector& operator*=(double a);

  double max_abs() const;
  bool operator==(const FiveVector&) const = default;
};

FiveVector operator+(FiveVector a, const FiveVector& b);
FiveVector operator-(FiveVector a, const FiveVector& b);
FiveVector operator*(FiveVector a, double s);
FiveVector operator*(double s, FiveVector a);

struct RSData {
  std::vector<double> R;
  std::vector<double> S;
};

// R = u1 + c(u0) u0_x and S = u1 - c(u0) u0_x with centered differences
// (one-sided at the two ends).
RSData rs_from_velocity(std::span<const double> grid, std::span<const double> u0,
                        std::span<const double> u1, const SpeedLaw& law);

// Physical data on a grid. u is piecewise linear between nodes; R and S are
// step functions, R[k] holding on [grid[k], grid[k+1]). Outside the grid
// window u equals u_infinity and R = S = 0.
struct PhysicalState {
  std::vector<double> grid;
  std::vector<double> u;
  std::vector<double> R;
  std::vector<double> S;
  RadonMeasure mu;
  RadonMeasure nu;
  double u_infinity = 0.0;

  double u_at(double x) const;
  double R_at(double x) const;
  double S_at(double x) const;
  double total_energy() const { return mu.total_mass() + nu.total_mass(); }

  // Structural checks; throws on violation.
  void validate() const;
};

// Builds a state whose absolutely continuous energies are 1/4 R^2 dx and
// 1/4 S^2 dx on the grid cells, plus the given atoms.
PhysicalState make_state(std::vector<double> grid, std::vector<double> u, std::vector<double> R,
                         std::vector<double> S, std::vector<Atom> mu_atoms = {},
                         std::vector<Atom> nu_atoms = {}, double u_infinity = 0.0);

// Density of 1/4 f^2 on the grid cells, f read as a step function.
RadonMeasure quarter_square_measure(std::span<const double> grid, std::span<const double> f);

struct StateResiduals {
  double mu_ac = 0.0;  // max |density(mu) - R^2/4| over cells
  double nu_ac = 0.0;
  double u_x = 0.0;    // max |u_x - (R - S)/(2c)| over cells
};

StateResiduals state_residuals(const PhysicalState& state, const SpeedLaw& law);

void to_json(nlohmann::json& j, const SpeedLaw& law);
void from_json(const nlohmann::json& j, SpeedLaw& law);
void to_json(nlohmann::json& j, const FiveVector& v);
void from_json(const nlohmann::json& j, FiveVector& v);
void to_json(nlohmann::json& j, const PhysicalState& s);
void from_json(const nlohmann::json& j, PhysicalState& s);

}  // namespace nvw
