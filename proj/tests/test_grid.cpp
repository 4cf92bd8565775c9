#include <catch2/catch_amalgamated.hpp>

#include "pdspec/grid.hpp"

using namespace pdspec;
using Catch::Approx;

TEST_CASE("layout construction") {
  const DomainLayout layout = build_layout(2.0, 0.2, 0.0);
  CHECK(layout.omega_left == Approx(-1.0).epsilon(1e-15));
  CHECK(layout.omega_right == Approx(1.0).epsilon(1e-15));
  CHECK(layout.left_edge() == Approx(-1.2).epsilon(1e-15));
  CHECK(layout.span() == Approx(2.4).epsilon(1e-15));

  CHECK(build_layout(1.0, 0.5).span() == Approx(2.0).epsilon(1e-15));

  CHECK_THROWS_AS(build_layout(2.0, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(build_layout(-2.0, 0.2), std::invalid_argument);
  CHECK_THROWS_AS(build_layout(2.0, -0.1), std::invalid_argument);
}

TEST_CASE("grid construction") {
  const DomainLayout layout = build_layout(2.0, 0.2);
  const PeriodicGrid g = build_grid(layout, 512);
  CHECK(g.dx == Approx(0.0046875).epsilon(1e-15));
  CHECK(g.x(0) == layout.left_edge());
  CHECK(g.dx * g.n == Approx(g.span).epsilon(1e-15));

  const PeriodicGrid tau = make_grid(0.0, 2.0 * M_PI, 64);
  CHECK(tau.dx == Approx(2.0 * M_PI / 64).epsilon(1e-15));

  CHECK_THROWS_AS(build_grid(layout, 7), std::invalid_argument);
}

TEST_CASE("grid periodic indexing and half-open right end") {
  const PeriodicGrid g = make_grid(-1.2, 2.4, 64);
  for (int i : {0, 5, 63}) {
    CHECK(g.x(i + 64) == g.x(i));
    CHECK(g.x(i - 64) == g.x(i));
  }
  CHECK(g.wrap(-1) == 63);
  for (int i = 0; i < g.n; ++i) CHECK(g.x(i) < g.x0 + g.span);
}

TEST_CASE("mask and region tags") {
  const DomainLayout layout = build_layout(2.0, 0.2);
  const PeriodicGrid g = build_grid(layout, 512);
  const MaskField mask = build_mask(layout, g);

  // Brute-force oracle: count nodes strictly outside [-1, 1].
  int outside = 0, g1 = 0, g2 = 0;
  for (int i = 0; i < g.n; ++i) {
    const double x = g.x(i);
    if (x < -1.0) ++g1;
    if (x > 1.0) ++g2;
    if (x < -1.0 || x > 1.0) ++outside;
  }
  CHECK(mask.gamma_count == outside);
  CHECK(mask.gamma_count == 85);  // 43 in Gamma1, 42 in Gamma2
  CHECK(g1 == 43);
  CHECK(g2 == 42);
  CHECK(std::abs(mask.gamma_count - 2.0 * layout.delta / g.dx) <= 2.0);

  int chi_sum_omega = 0;
  for (int i = 0; i < g.n; ++i) {
    CHECK((mask.chi[i] == 0.0 || mask.chi[i] == 1.0));
    const bool gamma = mask.region[i] != Region::Omega;
    CHECK(mask.chi[i] == (gamma ? 1.0 : 0.0));
    if (mask.in_omega(i)) chi_sum_omega += static_cast<int>(mask.chi[i]);
    // region matches coordinates
    const double x = g.x(i);
    if (mask.region[i] == Region::Gamma1) CHECK(x < layout.omega_left);
    if (mask.region[i] == Region::Gamma2) CHECK(x > layout.omega_right);
  }
  CHECK(chi_sum_omega == 0);
}

TEST_CASE("nodes on the boundary belong to Omega") {
  // dx divides the layout so nodes land exactly on the boundary points.
  const DomainLayout layout = build_layout(2.0, 0.25);
  const PeriodicGrid g = build_grid(layout, 1000);  // dx = 0.0025
  const MaskField mask = build_mask(layout, g);
  const int i_left = 100;   // x = -1.25 + 0.25 = -1.0
  const int i_right = 900;  // x = +1.0
  CHECK(g.x(i_left) == Approx(-1.0).margin(1e-12));
  CHECK(mask.region[i_left] == Region::Omega);
  CHECK(g.x(i_right) == Approx(1.0).margin(1e-12));
  CHECK(mask.region[i_right] == Region::Omega);
  CHECK(mask.region[i_left - 1] == Region::Gamma1);
  CHECK(mask.region[i_right + 1] == Region::Gamma2);
}
