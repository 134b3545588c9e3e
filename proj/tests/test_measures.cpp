#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>
#include <vector>

#include "nvw/error.hpp"
#include "nvw/measures.hpp"

using namespace nvw;
using doctest::Approx;

TEST_CASE("radon measure masses and cumulatives") {
  RadonMeasure m({0.0, 1.0, 3.0}, {2.0, 0.5}, {{0.5, 1.0}, {-1.0, 0.25}});
  CHECK(m.ac_mass() == Approx(3.0));
  CHECK(m.atom_mass() == Approx(1.25));
  CHECK(m.total_mass() == Approx(4.25));
  CHECK(m.density_at(0.5) == 2.0);
  CHECK(m.density_at(2.0) == 0.5);
  CHECK(m.density_at(3.5) == 0.0);
  CHECK(m.atom_at(0.5) == 1.0);
  CHECK(m.atom_at(0.4) == 0.0);

  // Open versus closed at an atom.
  CHECK(m.cumulative(-1.0) == Approx(0.0));
  CHECK(m.cumulative_closed(-1.0) == Approx(0.25));
  CHECK(m.cumulative(0.5) == Approx(0.25 + 1.0));
  CHECK(m.cumulative_closed(0.5) == Approx(0.25 + 1.0 + 1.0));
  CHECK(m.cumulative(10.0) == Approx(4.25));
  CHECK(cumulative(m, 2.0) == Approx(0.25 + 2.0 + 1.0 + 0.5));

  auto [lo, hi] = m.support();
  CHECK(lo == -1.0);
  CHECK(hi == 3.0);
}

TEST_CASE("coincident atoms merge and zero atoms drop") {
  RadonMeasure m({}, {}, {{1.0, 0.5}, {1.0, 0.25}, {2.0, 0.0}});
  REQUIRE(m.atoms().size() == 1);
  CHECK(m.atoms()[0].mass == Approx(0.75));
  CHECK(RadonMeasure().empty());
  CHECK(RadonMeasure().support() == std::pair<double, double>{0.0, 0.0});
}

TEST_CASE("invalid measures are rejected") {
  CHECK_THROWS_AS(RadonMeasure({0.0, 1.0}, {-1.0}), Error);
  CHECK_THROWS_AS(RadonMeasure({}, {}, {{0.0, -1.0}}), Error);
  CHECK_THROWS_AS(RadonMeasure({1.0, 0.0}, {1.0}), Error);
}

TEST_CASE("translation shifts everything") {
  RadonMeasure m({0.0, 1.0}, {1.0}, {{0.5, 2.0}});
  auto t = m.translated(2.0);
  CHECK(t.breakpoints()[0] == 2.0);
  CHECK(t.atoms()[0].position == 2.5);
  CHECK(t.cumulative(3.0) == Approx(m.cumulative(1.0)));
}

TEST_CASE("generalized inverse of x + mu(-inf, x)") {
  SUBCASE("no mass gives the identity") {
    RadonMeasure zero;
    for (double X : {-3.0, 0.0, 1.7}) CHECK(generalized_inverse(zero, X) == Approx(X));
  }
  SUBCASE("a dirac makes a plateau") {
    auto d = RadonMeasure::dirac(0.0, 1.0);
    CHECK(generalized_inverse(d, -0.5) == Approx(-0.5));
    CHECK(generalized_inverse(d, 0.0) == Approx(0.0));
    CHECK(generalized_inverse(d, 0.5) == Approx(0.0));
    CHECK(generalized_inverse(d, 1.0) == Approx(0.0));
    CHECK(generalized_inverse(d, 2.0) == Approx(1.0));
  }
  SUBCASE("a density slows the inverse") {
    RadonMeasure m({0.0, 1.0}, {3.0});
    // G(x) = 4x on [0, 1], so G^{-1}(2) = 1/2.
    CHECK(generalized_inverse(m, 2.0) == Approx(0.5));
    CHECK(generalized_inverse(m, 5.0) == Approx(2.0));
  }
  SUBCASE("inverse property against the forward map") {
    RadonMeasure m({-1.0, 0.0, 2.0}, {0.5, 1.5}, {{0.3, 0.7}, {1.2, 0.1}});
    GeneralizedInverse inv(m);
    for (double x = -2.0; x <= 3.0; x += 0.0625) {
      if (m.atom_at(x) > 0) continue;
      double G = x + m.cumulative(x);
      CHECK(inv(G) == Approx(x).epsilon(1e-12));
    }
  }
}

TEST_CASE("pool_negative_masses") {
  SUBCASE("nonnegative input is unchanged") {
    std::vector<double> m{0.1, 0.0, 0.3};
    auto copy = m;
    pool_negative_masses(m);
    CHECK(m == copy);
  }
  SUBCASE("a negative cell is absorbed by its left neighbour") {
    std::vector<double> m{1.0, 0.5, -0.2, 0.4};
    pool_negative_masses(m);
    for (double v : m) CHECK(v >= 0.0);
    CHECK(m[0] == 1.0);
    CHECK(m[3] == 0.4);
    CHECK(m[1] + m[2] == Approx(0.3));
  }
  SUBCASE("a negative front is absorbed forward") {
    std::vector<double> m{-0.1, 0.3, 0.5};
    pool_negative_masses(m);
    for (double v : m) CHECK(v >= 0.0);
    CHECK(m[0] + m[1] + m[2] == Approx(0.7));
  }
  SUBCASE("random sequences keep their total") {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> u(-0.2, 1.0);
    for (int trial = 0; trial < 50; ++trial) {
      std::vector<double> m(20);
      double total = 0.0;
      for (auto& v : m) total += (v = u(rng));
      if (total < 0) continue;
      pool_negative_masses(m);
      double after = 0.0;
      for (double v : m) {
        CHECK(v >= 0.0);
        after += v;
      }
      CHECK(after == Approx(total).epsilon(1e-12));
    }
  }
  SUBCASE("a negative total is an error") {
    std::vector<double> m{0.1, -0.5};
    CHECK_THROWS_AS(pool_negative_masses(m), Error);
  }
}

TEST_CASE("pushforward of densities and plateaus") {
  SUBCASE("identity map keeps the density") {
    std::vector<double> s{0.0, 1.0, 2.0};
    std::vector<double> w{1.0, 3.0};
    auto m = pushforward(s, w, s);
    CHECK(m.total_mass() == Approx(4.0));
    CHECK(m.density_at(0.5) == Approx(1.0));
    CHECK(m.density_at(1.5) == Approx(3.0));
    CHECK_FALSE(m.has_atoms());
  }
  SUBCASE("a stretched map divides the density") {
    std::vector<double> s{0.0, 1.0};
    std::vector<double> x{0.0, 4.0};
    std::vector<double> w{2.0};
    auto m = pushforward(s, w, x);
    CHECK(m.density_at(1.0) == Approx(0.5));
    CHECK(m.total_mass() == Approx(2.0));
  }
  SUBCASE("a flat piece becomes an atom") {
    std::vector<double> s{0.0, 1.0, 2.0, 3.0};
    std::vector<double> x{0.0, 1.0, 1.0, 2.0};
    std::vector<double> masses{0.0, 0.75, 0.0};
    auto m = pushforward_masses(s, masses, x);
    REQUIRE(m.atoms().size() == 1);
    CHECK(m.atoms()[0].position == Approx(1.0));
    CHECK(m.atoms()[0].mass == Approx(0.75));
    CHECK(m.ac_mass() == Approx(0.0).epsilon(1e-14));
  }
  SUBCASE("negative masses need pooling") {
    std::vector<double> s{0.0, 1.0, 2.0};
    std::vector<double> x{0.0, 1.0, 2.0};
    std::vector<double> masses{0.5, -1e-6};
    CHECK_THROWS_AS(pushforward_masses(s, masses, x), Error);
    PushforwardTolerances tol;
    tol.pool_negative = true;
    auto m = pushforward_masses(s, masses, x, tol);
    CHECK(m.total_mass() == Approx(0.5 - 1e-6));
  }
}

TEST_CASE("monotone functions") {
  MonotoneFunction f({0.0, 1.0, 1.0, 2.0}, {0.0, 1.0, 3.0, 4.0});
  CHECK(f(0.5) == Approx(0.5));
  CHECK(f(1.0) == Approx(1.0));  // left limit at the jump
  CHECK(f.right_value(1.0) == Approx(3.0));
  CHECK(f(1.5) == Approx(3.5));
  CHECK(f(-1.0) == Approx(0.0));  // constant extension
  CHECK(f(5.0) == Approx(4.0));
  CHECK_FALSE(f.strictly_increasing());

  MonotoneFunction g({0.0, 1.0}, {0.0, 2.0}, MonotoneFunction::Extension::UnitSlope);
  CHECK(g(-1.0) == Approx(-1.0));
  CHECK(g(2.0) == Approx(3.0));
  REQUIRE(g.strictly_increasing());
  auto gi = g.inverse();
  for (double x : {-2.0, 0.3, 0.9, 4.0}) CHECK(gi(g(x)) == Approx(x));
  auto id = compose(gi, g);
  for (double x : {-2.0, 0.3, 0.9, 4.0}) CHECK(id(x) == Approx(x));
  CHECK(MonotoneFunction::identity()(3.25) == 3.25);
}

TEST_CASE("cumulative functions and distances") {
  auto d0 = RadonMeasure::dirac(0.0, 1.0);
  auto d1 = RadonMeasure::dirac(0.1, 1.0);
  CHECK(measure_distance(d0, d0) == 0.0);
  CHECK(measure_distance(d0, d1) == Approx(1.0));
  auto F = cumulative_function(d0, -1.0, 1.0);
  CHECK(F(-0.5) == Approx(0.0));
  CHECK(F(0.0) == Approx(0.0));
  CHECK(F.right_value(0.0) == Approx(1.0));
  CHECK(F(0.5) == Approx(1.0));

  RadonMeasure a({0.0, 1.0}, {1.0});
  RadonMeasure b({0.0, 1.0}, {1.5});
  CHECK(measure_distance(a, b) == Approx(0.5));
  CHECK(sup_distance(cumulative_function(a, -1, 2), cumulative_function(b, -1, 2)) ==
        Approx(0.5));
}

TEST_CASE("measure json round trip") {
  RadonMeasure m({-1.0, 0.0, 2.0}, {0.5, 1.5}, {{0.3, 0.7}});
  nlohmann::json j = m;
  auto back = j.get<RadonMeasure>();
  CHECK(back.breakpoints() == m.breakpoints());
  CHECK(back.densities() == m.densities());
  REQUIRE(back.atoms().size() == 1);
  CHECK(back.atoms()[0].position == 0.3);
  CHECK(back.atoms()[0].mass == 0.7);
  CHECK(measure_distance(back, m) == 0.0);
}

TEST_CASE("measure distance tolerates rounding-level shifts only") {
  auto d0 = RadonMeasure::dirac(0.0, 2.0);
  CHECK(measure_distance(d0, RadonMeasure::dirac(-6.9e-18, 2.0)) == 0.0);
  CHECK(measure_distance(d0, RadonMeasure::dirac(1e-6, 2.0)) == Approx(2.0));
  CHECK(measure_distance(d0, RadonMeasure::dirac(0.0, 1.5)) == Approx(0.5));
  RadonMeasure spread({0.0, 1.0}, {2.0});
  CHECK(measure_distance(d0, spread) == Approx(2.0));
  CHECK(measure_distance(spread, spread.translated(0.25)) == Approx(0.5));
}
