#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <vector>

#include "nvw/error.hpp"
#include "nvw/oracles.hpp"
#include "nvw/semigroup.hpp"

using namespace nvw;
using doctest::Approx;

namespace {

const SpeedLaw kLC = SpeedLaw::liquid_crystal(0.2, 0.1);

Evolution box_evolution(const SpeedLaw& law, int N, std::array<double, 2> range) {
  Resolution r;
  r.N = N;
  r.s_range = range;
  return prepare_evolution(box_example_state(), law, r, 3.0);
}

}  // namespace

TEST_CASE("automatic s-range") {
  auto st = box_example_state();
  // Window [-1, 1], total energy 3, fastest speed sqrt(0.2).
  const double reach = 2.0 * std::sqrt(0.2) * 2.0;
  auto r = auto_s_range(st, kLC, 2.0, 1.0);
  CHECK(r[0] == Approx(-1.0 - reach - 1.0));
  CHECK(r[1] == Approx(1.0 + 1.5 + reach + 1.0));
  auto rneg = auto_s_range(st, kLC, -2.0, 1.0);
  CHECK(rneg == r);
  auto r0 = auto_s_range(st, kLC, 0.0, 0.0);
  CHECK(r0[0] == Approx(-1.0));
  CHECK(r0[1] == Approx(2.5));
}

TEST_CASE("time shift moves only t") {
  auto evo = box_evolution(kLC, 50, {-5.0, 7.5});
  auto shifted = time_shift(evo.grid, 1.25);
  for (int i = 0; i <= evo.grid.N; i += 7) {
    for (int j = 0; j <= evo.grid.N; j += 5) {
      auto a = evo.grid.node(i, j);
      auto b = shifted.node(i, j);
      CHECK(b.t == Approx(a.t - 1.25));
      CHECK(b.x == a.x);
      CHECK(b.J == a.J);
    }
  }
}

TEST_CASE("snapshot at T = 0 returns the initial data") {
  auto evo = box_evolution(kLC, 50, {-5.0, 7.5});
  auto snap = take_snapshot(evo, 0.0);
  CHECK_FALSE(snap.isotime.has_value());
  CHECK(snap.energy == Approx(3.0));
  CHECK(snap.state.mu.atom_at(0.0) == Approx(1.0));
  CHECK(snap.state.nu.atom_at(0.0) == Approx(2.0));
  for (double x = -1.0; x <= 1.0; x += 0.125) CHECK(snap.state.u_at(x) == Approx(1.0));
}

TEST_CASE("snapshots conserve the total energy") {
  auto evo = box_evolution(kLC, 100, {-5.0, 7.5});
  for (double T : {-3.0, -1.0, 1.0, 2.5, 3.0}) {
    CAPTURE(T);
    auto snap = take_snapshot(evo, T);
    REQUIRE(snap.isotime.has_value());
    CHECK(snap.energy == Approx(3.0).epsilon(1e-12));
    CHECK(snap.state.total_energy() == Approx(3.0).epsilon(1e-9));
    snap.state.validate();
  }
}

TEST_CASE("constant speed atoms travel along characteristics") {
  auto law = SpeedLaw::constant(1.0);
  Resolution r;
  r.N = 100;
  r.s_range = std::array<double, 2>{-5.0, 7.5};
  auto st = semigroup_step(box_example_state(), 1.0, law, r);
  // mu moves left and nu moves right at unit speed; u stays 1.
  REQUIRE(st.mu.atoms().size() == 1);
  REQUIRE(st.nu.atoms().size() == 1);
  CHECK(st.mu.atoms()[0].position == Approx(-1.0));
  CHECK(st.mu.atoms()[0].mass == Approx(1.0));
  CHECK(st.nu.atoms()[0].position == Approx(1.0));
  CHECK(st.nu.atoms()[0].mass == Approx(2.0));
  CHECK(st.mu.ac_mass() == Approx(0.0).epsilon(1e-12));
  for (double x = -2.0; x <= 2.0; x += 0.25) CHECK(st.u_at(x) == Approx(1.0));
}

TEST_CASE("times beyond the solved region are rejected") {
  auto evo = box_evolution(kLC, 50, {-5.0, 7.5});
  try {
    take_snapshot(evo, 100.0);
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::TimeOutOfRange);
  }
}

TEST_CASE("an s-range that misses part of the reachable set is rejected") {
  Resolution r;
  r.N = 100;
  r.s_range = std::array<double, 2>{-1.5, 5.0};
  auto evo = prepare_evolution(box_example_state(), kLC, r, 1.0);
  CHECK_NOTHROW(take_snapshot(evo, 0.5));
  try {
    take_snapshot(evo, 1.0);
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::DomainTooSmall);
  }
}
