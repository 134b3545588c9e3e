#pragma once

#include <span>
#include <utility>
#include <vector>

#include <json.hpp>

namespace nvw {

struct Atom {
  double position = 0.0;
  double mass = 0.0;
};

// Finite positive measure on the line: a piecewise-constant density between
// consecutive breakpoints plus finitely many point masses.
class RadonMeasure {
 public:
  RadonMeasure() = default;

  // Atoms may be given in any order; coincident atoms are merged and
  // zero-mass atoms dropped.
  RadonMeasure(std::vector<double> breakpoints, std::vector<double> densities,
               std::vector<Atom> atoms = {});

  static RadonMeasure dirac(double position, double mass = 1.0);

  const std::vector<double>& breakpoints() const { return breakpoints_; }
  const std::vector<double>& densities() const { return densities_; }
  const std::vector<Atom>& atoms() const { return atoms_; }

  bool empty() const { return breakpoints_.empty() && atoms_.empty(); }
  bool has_atoms() const { return !atoms_.empty(); }

  double ac_mass() const { return ac_prefix_.empty() ? 0.0 : ac_prefix_.back(); }
  double atom_mass() const { return atom_prefix_.empty() ? 0.0 : atom_prefix_.back(); }
  double total_mass() const { return ac_mass() + atom_mass(); }

  // Density value on [b_k, b_{k+1}); zero outside the breakpoint range.
  double density_at(double x) const;
  // Mass of an atom sitting exactly at x, or zero.
  double atom_at(double x) const;

  // mu((-inf, x)), the open interval: an atom at x is excluded.
  double cumulative(double x) const;
  // mu((-inf, x]).
  double cumulative_closed(double x) const;

  // Smallest closed interval carrying all the mass; {0, 0} for the zero measure.
  std::pair<double, double> support() const;

  RadonMeasure translated(double shift) const;

 private:
  std::vector<double> breakpoints_;
  std::vector<double> densities_;
  std::vector<Atom> atoms_;
  std::vector<double> ac_prefix_;    // mass of the density up to breakpoint k
  std::vector<double> atom_prefix_;  // mass of atoms 0..k-1
};

double cumulative(const RadonMeasure& m, double x);

// x1(X) = sup{x : x' + mu(-inf, x') < X for all x' < x}. Built once per
// measure; "anchors" are extra positions at which the inverse must be exact
// (grid nodes of a physical state, for instance).
class GeneralizedInverse {
 public:
  explicit GeneralizedInverse(const RadonMeasure& m, std::span<const double> anchors = {});

  double operator()(double X) const;

  // Event positions (breakpoints, atoms and anchors) in increasing order,
  // with the values of G(x) = x + mu(-inf, x) just left and right of each.
  const std::vector<double>& events() const { return events_; }
  const std::vector<double>& level_left() const { return left_; }
  const std::vector<double>& level_right() const { return right_; }

 private:
  std::vector<double> events_;
  std::vector<double> left_;
  std::vector<double> right_;
  std::vector<double> slope_;  // 1 + density on (p_k, p_{k+1})
};

double generalized_inverse(const RadonMeasure& m, double X);

struct PushforwardTolerances {
  double plateau_tol = 1e-10;  // relative to the cell width in s
  double atom_tol = 1e-12;     // relative to the total mass
  // Numerical plane data may carry small negative cell masses. When set, they
  // are pooled with neighbouring cells instead of being rejected.
  bool pool_negative = false;
};

// Replaces each maximal run of cells whose running sum is negative by a block
// whose total is spread over the block's positive masses. The total and the
// masses outside such blocks are unchanged. Throws NegativeWeight if the total
// itself is negative beyond rounding.
void pool_negative_masses(std::vector<double>& masses);

// Image of the measure w(s) ds under s -> x(s). `s` and `positions` are node
// samples; `weights` are per-cell densities (size s.size() - 1).
RadonMeasure pushforward(std::span<const double> s, std::span<const double> weights,
                         std::span<const double> positions, PushforwardTolerances tol = {});

// Same as pushforward but with the mass of every cell given directly.
RadonMeasure pushforward_masses(std::span<const double> s, std::span<const double> masses,
                                std::span<const double> positions,
                                PushforwardTolerances tol = {});

// Sampled nondecreasing function, linear between samples. A repeated input
// encodes a jump: the first sample is the left limit, the second the right
// value, and evaluation at the jump returns the left limit.
class MonotoneFunction {
 public:
  enum class Extension { Constant, UnitSlope };

  MonotoneFunction() = default;
  MonotoneFunction(std::vector<double> inputs, std::vector<double> outputs,
                   Extension extension = Extension::Constant);

  static MonotoneFunction identity();

  double operator()(double x) const;
  double right_value(double x) const;

  double lo() const { return inputs_.front(); }
  double hi() const { return inputs_.back(); }
  const std::vector<double>& inputs() const { return inputs_; }
  const std::vector<double>& outputs() const { return outputs_; }
  Extension extension() const { return extension_; }

  bool strictly_increasing() const;
  // Inverse of a strictly increasing, jump-free function.
  MonotoneFunction inverse() const;

 private:
  std::vector<double> inputs_;
  std::vector<double> outputs_;
  Extension extension_ = Extension::Constant;
};

// (a o b)(x) = a(b(x)) for strictly increasing, jump-free functions.
MonotoneFunction compose(const MonotoneFunction& a, const MonotoneFunction& b);

// x -> mu((-inf, x)) restricted to [lo, hi], with atoms as jumps.
MonotoneFunction cumulative_function(const RadonMeasure& m, double lo, double hi);

double sup_distance(const MonotoneFunction& a, const MonotoneFunction& b);

// Sup distance between the cumulatives of two measures, allowing positions to
// differ by 1e-12 times the coordinate scale so that an atom moved by
// rounding is not counted as a full-mass discrepancy.
double measure_distance(const RadonMeasure& a, const RadonMeasure& b);

void to_json(nlohmann::json& j, const RadonMeasure& m);
void from_json(const nlohmann::json& j, RadonMeasure& m);

}  // namespace nvw
