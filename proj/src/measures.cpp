#include "nvw/measures.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "nvw/error.hpp"

namespace nvw {

namespace {

bool finite(double v) { return std::isfinite(v); }

}  // namespace

RadonMeasure::RadonMeasure(std::vector<double> breakpoints, std::vector<double> densities,
                           std::vector<Atom> atoms)
    : breakpoints_(std::move(breakpoints)), densities_(std::move(densities)) {
  if (breakpoints_.empty() != densities_.empty() ||
      (!breakpoints_.empty() && breakpoints_.size() != densities_.size() + 1)) {
    fail(ErrorCode::InvalidArgument, "measure needs one density per breakpoint cell");
  }
  for (std::size_t k = 0; k < breakpoints_.size(); ++k) {
    if (!finite(breakpoints_[k])) fail(ErrorCode::NonFiniteValue, "measure breakpoint");
    if (k > 0 && !(breakpoints_[k] > breakpoints_[k - 1])) {
      fail(ErrorCode::InvalidArgument, "measure breakpoints must be strictly increasing");
    }
  }
  for (double d : densities_) {
    if (!finite(d)) fail(ErrorCode::NonFiniteValue, "measure density");
    if (d < 0.0) fail(ErrorCode::NegativeWeight, "negative density");
  }
  std::sort(atoms.begin(), atoms.end(),
            [](const Atom& a, const Atom& b) { return a.position < b.position; });
  for (const Atom& a : atoms) {
    if (!finite(a.position) || !finite(a.mass)) fail(ErrorCode::NonFiniteValue, "atom");
    if (a.mass < 0.0) fail(ErrorCode::NegativeWeight, "negative atom mass");
    if (a.mass == 0.0) continue;
    if (!atoms_.empty() && atoms_.back().position == a.position) {
      atoms_.back().mass += a.mass;
    } else {
      atoms_.push_back(a);
    }
  }

  ac_prefix_.assign(breakpoints_.size(), 0.0);
  for (std::size_t k = 0; k + 1 < breakpoints_.size(); ++k) {
    ac_prefix_[k + 1] = ac_prefix_[k] + densities_[k] * (breakpoints_[k + 1] - breakpoints_[k]);
  }
  atom_prefix_.assign(atoms_.size() + 1, 0.0);
  for (std::size_t k = 0; k < atoms_.size(); ++k) {
    atom_prefix_[k + 1] = atom_prefix_[k] + atoms_[k].mass;
  }
}

RadonMeasure RadonMeasure::dirac(double position, double mass) {
  return RadonMeasure({}, {}, {Atom{position, mass}});
}

double RadonMeasure::density_at(double x) const {
  if (breakpoints_.empty() || x < breakpoints_.front() || x >= breakpoints_.back()) return 0.0;
  auto it = std::upper_bound(breakpoints_.begin(), breakpoints_.end(), x);
  return densities_[static_cast<std::size_t>(it - breakpoints_.begin()) - 1];
}

double RadonMeasure::atom_at(double x) const {
  auto it = std::lower_bound(atoms_.begin(), atoms_.end(), x,
                             [](const Atom& a, double v) { return a.position < v; });
  return (it != atoms_.end() && it->position == x) ? it->mass : 0.0;
}

double RadonMeasure::cumulative(double x) const {
  double ac = 0.0;
  if (!breakpoints_.empty() && x > breakpoints_.front()) {
    if (x >= breakpoints_.back()) {
      ac = ac_prefix_.back();
    } else {
      auto it = std::upper_bound(breakpoints_.begin(), breakpoints_.end(), x);
      const auto k = static_cast<std::size_t>(it - breakpoints_.begin()) - 1;
      ac = ac_prefix_[k] + densities_[k] * (x - breakpoints_[k]);
    }
  }
  auto it = std::lower_bound(atoms_.begin(), atoms_.end(), x,
                             [](const Atom& a, double v) { return a.position < v; });
  return ac + atom_prefix_[static_cast<std::size_t>(it - atoms_.begin())];
}

double RadonMeasure::cumulative_closed(double x) const { return cumulative(x) + atom_at(x); }

std::pair<double, double> RadonMeasure::support() const {
  double lo = std::numeric_limits<double>::infinity();
  double hi = -lo;
  for (std::size_t k = 0; k < densities_.size(); ++k) {
    if (densities_[k] > 0.0) {
      lo = std::min(lo, breakpoints_[k]);
      hi = std::max(hi, breakpoints_[k + 1]);
    }
  }
  for (const Atom& a : atoms_) {
    lo = std::min(lo, a.position);
    hi = std::max(hi, a.position);
  }
  if (lo > hi) return {0.0, 0.0};
  return {lo, hi};
}

RadonMeasure RadonMeasure::translated(double shift) const {
  std::vector<double> b = breakpoints_;
  for (double& v : b) v += shift;
  std::vector<Atom> a = atoms_;
  for (Atom& v : a) v.position += shift;
  return RadonMeasure(std::move(b), densities_, std::move(a));
}

double cumulative(const RadonMeasure& m, double x) { return m.cumulative(x); }

GeneralizedInverse::GeneralizedInverse(const RadonMeasure& m, std::span<const double> anchors) {
  events_ = m.breakpoints();
  for (const Atom& a : m.atoms()) events_.push_back(a.position);
  events_.insert(events_.end(), anchors.begin(), anchors.end());
  std::sort(events_.begin(), events_.end());
  events_.erase(std::unique(events_.begin(), events_.end()), events_.end());

  left_.resize(events_.size());
  right_.resize(events_.size());
  slope_.resize(events_.size());
  for (std::size_t k = 0; k < events_.size(); ++k) {
    left_[k] = events_[k] + m.cumulative(events_[k]);
    right_[k] = left_[k] + m.atom_at(events_[k]);
    slope_[k] = 1.0 + m.density_at(events_[k]);
  }
}

double GeneralizedInverse::operator()(double X) const {
  if (events_.empty()) return X;
  if (X <= left_.front()) {
    if (X == left_.front()) return events_.front();
    return events_.front() - (left_.front() - X);
  }
  // Last event whose left level lies strictly below X.
  auto it = std::lower_bound(left_.begin(), left_.end(), X);
  const auto k = static_cast<std::size_t>(it - left_.begin()) - 1;
  if (X <= right_[k]) return events_[k];
  if (k + 1 < events_.size()) {
    if (X == left_[k + 1]) return events_[k + 1];
    const double x = events_[k] + (X - right_[k]) / slope_[k];
    return std::min(x, events_[k + 1]);
  }
  return events_[k] + (X - right_[k]);
}

double generalized_inverse(const RadonMeasure& m, double X) { return GeneralizedInverse(m)(X); }

RadonMeasure pushforward(std::span<const double> s, std::span<const double> weights,
                         std::span<const double> positions, PushforwardTolerances tol) {
  if (weights.size() + 1 != s.size()) {
    fail(ErrorCode::InvalidArgument, "pushforward needs one weight per s-cell");
  }
  std::vector<double> masses(weights.size());
  for (std::size_t k = 0; k < weights.size(); ++k) {
    if (weights[k] < 0.0) fail(ErrorCode::NegativeWeight, "pushforward weight");
    masses[k] = weights[k] * (s[k + 1] - s[k]);
  }
  return pushforward_masses(s, masses, positions, tol);
}

void pool_negative_masses(std::vector<double>& masses) {
  struct Block {
    std::size_t begin;
    std::size_t end;
    double sum;
  };
  std::vector<Block> blocks;
  double scale = 0.0;
  for (std::size_t k = 0; k < masses.size(); ++k) {
    scale += std::abs(masses[k]);
    blocks.push_back({k, k + 1, masses[k]});
    while (blocks.size() > 1 && blocks.back().sum < 0.0) {
      const Block top = blocks.back();
      blocks.pop_back();
      blocks.back().end = top.end;
      blocks.back().sum += top.sum;
    }
  }
  // A negative block can only survive at the front; absorb it forwards.
  while (blocks.size() > 1 && blocks.front().sum < 0.0) {
    blocks[1].begin = blocks[0].begin;
    blocks[1].sum += blocks[0].sum;
    blocks.erase(blocks.begin());
  }
  if (!blocks.empty() && blocks.front().sum < -1e-12 * std::max(1.0, scale)) {
    fail(ErrorCode::NegativeWeight, "total mass is negative");
  }
  for (const Block& b : blocks) {
    if (b.end - b.begin == 1) {
      masses[b.begin] = std::max(masses[b.begin], 0.0);
      continue;
    }
    double positive = 0.0;
    for (std::size_t k = b.begin; k < b.end; ++k) positive += std::max(masses[k], 0.0);
    const double sum = std::max(b.sum, 0.0);
    for (std::size_t k = b.begin; k < b.end; ++k) {
      masses[k] = positive > 0.0 ? sum * std::max(masses[k], 0.0) / positive : 0.0;
    }
  }
}

RadonMeasure pushforward_masses(std::span<const double> s, std::span<const double> masses,
                                std::span<const double> positions, PushforwardTolerances tol) {
  if (s.size() != positions.size() || masses.size() + 1 != s.size()) {
    fail(ErrorCode::InvalidArgument, "pushforward sample sizes disagree");
  }
  std::vector<double> pooled;
  if (tol.pool_negative) {
    pooled.assign(masses.begin(), masses.end());
    pool_negative_masses(pooled);
    masses = pooled;
  }
  double total = 0.0;
  for (double m : masses) {
    if (!finite(m)) fail(ErrorCode::NonFiniteValue, "pushforward mass");
    if (m < 0.0) fail(ErrorCode::NegativeWeight, "pushforward mass");
    total += m;
  }
  for (std::size_t k = 0; k + 1 < positions.size(); ++k) {
    if (positions[k + 1] < positions[k]) {
      fail(ErrorCode::InvalidArgument, "pushforward positions must be nondecreasing");
    }
  }

  std::vector<double> breakpoints;
  std::vector<double> densities;
  std::vector<Atom> atoms;
  auto extend_to = [&](double x) {
    if (breakpoints.empty()) {
      breakpoints.push_back(x);
    } else if (x > breakpoints.back()) {
      densities.push_back(0.0);
      breakpoints.push_back(x);
    }
  };
  auto add_density = [&](double a, double b, double mass) {
    extend_to(a);
    const double lo = breakpoints.back();
    if (b <= lo) {
      atoms.push_back({lo, mass});
      return;
    }
    densities.push_back(mass / (b - lo));
    breakpoints.push_back(b);
  };

  const std::size_t n = masses.size();
  std::size_t k = 0;
  while (k < n) {
    const double ds = s[k + 1] - s[k];
    const double dx = positions[k + 1] - positions[k];
    if (dx > tol.plateau_tol * ds) {
      if (masses[k] > 0.0) {
        add_density(positions[k], positions[k + 1], masses[k]);
      }
      ++k;
      continue;
    }
    // Maximal run of plateau cells.
    std::size_t e = k;
    double mass = 0.0;
    while (e < n && positions[e + 1] - positions[e] <= tol.plateau_tol * (s[e + 1] - s[e])) {
      mass += masses[e];
      ++e;
    }
    const double a = positions[k];
    const double b = positions[e];
    if (mass > tol.atom_tol * total || (mass > 0.0 && b == a)) {
      atoms.push_back({a, mass});
    } else if (mass > 0.0) {
      add_density(a, b, mass);
    }
    k = e;
  }
  // Trim trailing zero-density pieces so the support is tight.
  while (!densities.empty() && densities.back() == 0.0) {
    densities.pop_back();
    breakpoints.pop_back();
  }
  if (densities.empty()) breakpoints.clear();
  return RadonMeasure(std::move(breakpoints), std::move(densities), std::move(atoms));
}

MonotoneFunction::MonotoneFunction(std::vector<double> inputs, std::vector<double> outputs,
                                   Extension extension)
    : inputs_(std::move(inputs)), outputs_(std::move(outputs)), extension_(extension) {
  if (inputs_.empty() || inputs_.size() != outputs_.size()) {
    fail(ErrorCode::EmptyGrid, "monotone function needs matching, nonempty samples");
  }
  for (std::size_t k = 0; k < inputs_.size(); ++k) {
    if (!finite(inputs_[k]) || !finite(outputs_[k])) {
      fail(ErrorCode::NonFiniteValue, "monotone function sample");
    }
    if (k > 0) {
      if (inputs_[k] < inputs_[k - 1] || outputs_[k] < outputs_[k - 1]) {
        fail(ErrorCode::InvalidArgument, "monotone function samples must be nondecreasing");
      }
      if (k > 1 && inputs_[k] == inputs_[k - 1] && inputs_[k - 1] == inputs_[k - 2]) {
        fail(ErrorCode::InvalidArgument, "at most two samples per input");
      }
    }
  }
}

MonotoneFunction MonotoneFunction::identity() {
  return MonotoneFunction({0.0, 1.0}, {0.0, 1.0}, Extension::UnitSlope);
}

double MonotoneFunction::operator()(double x) const {
  if (x <= inputs_.front()) {
    const double d = extension_ == Extension::UnitSlope ? x - inputs_.front() : 0.0;
    return outputs_.front() + d;
  }
  if (x > inputs_.back()) {
    const double d = extension_ == Extension::UnitSlope ? x - inputs_.back() : 0.0;
    return outputs_.back() + d;
  }
  // First sample with input >= x; at a jump this is the left limit.
  auto it = std::lower_bound(inputs_.begin(), inputs_.end(), x);
  const auto k = static_cast<std::size_t>(it - inputs_.begin());
  if (inputs_[k] == x) return outputs_[k];
  const double w = (x - inputs_[k - 1]) / (inputs_[k] - inputs_[k - 1]);
  return outputs_[k - 1] + w * (outputs_[k] - outputs_[k - 1]);
}

double MonotoneFunction::right_value(double x) const {
  auto it = std::upper_bound(inputs_.begin(), inputs_.end(), x);
  if (it != inputs_.begin() && *(it - 1) == x) {
    return outputs_[static_cast<std::size_t>(it - inputs_.begin()) - 1];
  }
  return (*this)(x);
}

bool MonotoneFunction::strictly_increasing() const {
  for (std::size_t k = 1; k < inputs_.size(); ++k) {
    if (!(inputs_[k] > inputs_[k - 1]) || !(outputs_[k] > outputs_[k - 1])) return false;
  }
  return true;
}

MonotoneFunction MonotoneFunction::inverse() const {
  if (!strictly_increasing()) {
    fail(ErrorCode::InvalidArgument, "only strictly increasing functions can be inverted");
  }
  return MonotoneFunction(outputs_, inputs_, extension_);
}

MonotoneFunction compose(const MonotoneFunction& a, const MonotoneFunction& b) {
  if (!a.strictly_increasing() || !b.strictly_increasing()) {
    fail(ErrorCode::InvalidArgument, "composition requires strictly increasing functions");
  }
  const MonotoneFunction b_inv = b.inverse();
  std::vector<double> knots = b.inputs();
  for (double y : a.inputs()) knots.push_back(b_inv(y));
  std::sort(knots.begin(), knots.end());
  knots.erase(std::unique(knots.begin(), knots.end()), knots.end());
  std::vector<double> values;
  values.reserve(knots.size());
  for (double x : knots) values.push_back(a(b(x)));
  const auto ext = (a.extension() == MonotoneFunction::Extension::UnitSlope &&
                    b.extension() == MonotoneFunction::Extension::UnitSlope)
                       ? MonotoneFunction::Extension::UnitSlope
                       : MonotoneFunction::Extension::Constant;
  // Rounding can create coincident images of distinct knots; keep the first.
  std::vector<double> ki;
  std::vector<double> vi;
  for (std::size_t k = 0; k < knots.size(); ++k) {
    if (!ki.empty() && (knots[k] <= ki.back() || values[k] <= vi.back())) continue;
    ki.push_back(knots[k]);
    vi.push_back(values[k]);
  }
  return MonotoneFunction(std::move(ki), std::move(vi), ext);
}

MonotoneFunction cumulative_function(const RadonMeasure& m, double lo, double hi) {
  if (!(hi > lo)) fail(ErrorCode::BadRange, "cumulative window must be nonempty");
  std::vector<double> knots{lo, hi};
  for (double b : m.breakpoints()) {
    if (b > lo && b < hi) knots.push_back(b);
  }
  for (const Atom& a : m.atoms()) {
    if (a.position > lo && a.position < hi) knots.push_back(a.position);
  }
  std::sort(knots.begin(), knots.end());
  knots.erase(std::unique(knots.begin(), knots.end()), knots.end());
  std::vector<double> in;
  std::vector<double> out;
  for (double x : knots) {
    const double left = m.cumulative(x);
    in.push_back(x);
    out.push_back(left);
    const double jump = m.atom_at(x);
    if (jump > 0.0 && x > lo && x < hi) {
      in.push_back(x);
      out.push_back(left + jump);
    }
  }
  return MonotoneFunction(std::move(in), std::move(out));
}

double sup_distance(const MonotoneFunction& a, const MonotoneFunction& b) {
  const double lo = std::max(a.lo(), b.lo());
  const double hi = std::min(a.hi(), b.hi());
  if (lo > hi) fail(ErrorCode::DisjointDomains, "monotone functions do not overlap");
  std::vector<double> xs{lo, hi};
  for (double x : a.inputs()) {
    if (x > lo && x < hi) xs.push_back(x);
  }
  for (double x : b.inputs()) {
    if (x > lo && x < hi) xs.push_back(x);
  }
  double d = 0.0;
  for (double x : xs) {
    d = std::max(d, std::abs(a(x) - b(x)));
    d = std::max(d, std::abs(a.right_value(x) - b.right_value(x)));
  }
  return d;
}

double measure_distance(const RadonMeasure& a, const RadonMeasure& b) {
  auto [alo, ahi] = a.support();
  auto [blo, bhi] = b.support();
  const double scale = std::max({1.0, std::abs(alo), std::abs(ahi), std::abs(blo), std::abs(bhi)});
  const double slack = 1e-12 * scale;
  // sup over x of m((-inf, x]) - n((-inf, x + slack]). Both sides are
  // piecewise linear between the knots of m and the knots of n shifted by
  // -slack, so the supremum is reached at those points or as a left limit.
  auto one_sided = [slack](const RadonMeasure& m, const RadonMeasure& n) {
    std::vector<double> xs = m.breakpoints();
    for (const Atom& at : m.atoms()) xs.push_back(at.position);
    for (double q : n.breakpoints()) xs.push_back(q - slack);
    for (const Atom& at : n.atoms()) xs.push_back(at.position - slack);
    double d = 0.0;
    for (double x : xs) {
      d = std::max(d, m.cumulative_closed(x) - n.cumulative_closed(x + slack));
      d = std::max(d, m.cumulative(x) - n.cumulative(x + slack));
    }
    return d;
  };
  return std::max(one_sided(a, b), one_sided(b, a));
}

void to_json(nlohmann::json& j, const RadonMeasure& m) {
  nlohmann::json atoms = nlohmann::json::array();
  for (const Atom& a : m.atoms()) atoms.push_back({a.position, a.mass});
  j = nlohmann::json{{"breakpoints", m.breakpoints()}, {"densities", m.densities()},
                     {"atoms", atoms}};
}

void from_json(const nlohmann::json& j, RadonMeasure& m) {
  std::vector<Atom> atoms;
  for (const auto& a : j.at("atoms")) {
    atoms.push_back({a.at(0).get<double>(), a.at(1).get<double>()});
  }
  m = RadonMeasure(j.at("breakpoints").get<std::vector<double>>(),
                   j.at("densities").get<std::vector<double>>(), std::move(atoms));
}

}  // namespace nvw
