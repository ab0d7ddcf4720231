#include <doctest.h>

#include <cmath>
#include <numbers>

#include "slpos/errors.hpp"
#include "slpos/estimators.hpp"
#include "slpos/rng.hpp"

using namespace slpos;

namespace {

constexpr double kPi = std::numbers::pi;

std::vector<RangeObservation> exact_ranges(const Position& truth,
                                           const std::vector<Position>& anchors) {
  std::vector<RangeObservation> ranges;
  for (const Position& anchor : anchors) {
    ranges.push_back({anchor, distance(truth, anchor)});
  }
  return ranges;
}

TdoaSet exact_tdoa(const Position& truth, const std::vector<AnchorSite>& sites) {
  TdoaSet set;
  set.ref_anchor_id = sites.front().id;
  const double d_ref = distance(truth, sites.front().position);
  for (std::size_t i = 1; i < sites.size(); ++i) {
    set.diffs.push_back(
        {sites[i].id, distance(truth, sites[i].position) - d_ref});
  }
  return set;
}

Position rotate2d(const Position& p, double theta) {
  return {p.x * std::cos(theta) - p.y * std::sin(theta),
          p.x * std::sin(theta) + p.y * std::cos(theta), p.z};
}

}  // namespace

TEST_CASE("range multilateration recovers an exact fix") {
  const Position truth{50, 50, 0};
  const std::vector<Position> anchors{{0, 0, 0}, {100, 10, 0}, {20, 120, 0}};
  const auto estimate = solve_range_multilateration(exact_ranges(truth, anchors));
  CHECK(estimate.converged);
  CHECK(horizontal_distance(estimate.position, truth) < 1e-6);
  CHECK(estimate.method == EstimatorMethod::RttMultilat);
  CHECK_FALSE(estimate.ambiguous);
}

TEST_CASE("two-circle fixes settle on the init-nearest intersection") {
  const std::vector<Position> anchors{{0, 0, 0}, {100, 0, 0}};
  // intersections at (50, 50) and (50, -50)
  const std::vector<RangeObservation> ranges =
      exact_ranges({50, 50, 0}, anchors);

  SolverSettings settings;
  settings.init = InitStrategy::Provided;
  settings.init_position = {40, 20, 0};
  auto estimate = solve_range_multilateration(ranges, settings);
  CHECK(estimate.ambiguous);
  CHECK(horizontal_distance(estimate.position, {50, 50, 0}) < 1e-5);

  settings.init_position = {40, -20, 0};
  estimate = solve_range_multilateration(ranges, settings);
  CHECK(estimate.ambiguous);
  CHECK(horizontal_distance(estimate.position, {50, -50, 0}) < 1e-5);
}

TEST_CASE("common range bias mostly cancels with symmetric anchors") {
  const std::vector<Position> anchors{
      {100, 0, 0}, {-100, 0, 0}, {0, 100, 0}, {0, -100, 0}};
  std::vector<RangeObservation> ranges = exact_ranges({0, 0, 0}, anchors);
  for (auto& obs : ranges) obs.range_m += 1.0;

  const auto estimate = solve_range_multilateration(ranges);
  CHECK(horizontal_distance(estimate.position, {0, 0, 0}) < 1.0);
  // frozen regression: symmetry keeps the minimizer at the center
  CHECK(estimate.position.x == doctest::Approx(0.0).epsilon(1e-9));
  CHECK(estimate.position.y == doctest::Approx(0.0).epsilon(1e-9));

  // cross-check against the exhaustive oracle on the same cost
  RangeProblem problem;
  problem.observations = ranges;
  const auto oracle = brute_force(range_cost(problem),
                                  {{-5, -5, 0}, {5, 5, 0}}, 0.05);
  CHECK(horizontal_distance(estimate.position, oracle.position) <= 0.1);
}

TEST_CASE("tdoa: zero diffs with anchors on a circle land at the center") {
  std::vector<AnchorSite> sites;
  for (int i = 0; i < 4; ++i) {
    const double angle = 2.0 * kPi * i / 4.0 + 0.4;
    sites.push_back({i + 1, {100 * std::cos(angle), 100 * std::sin(angle), 0}});
  }
  const TdoaSet set = exact_tdoa({0, 0, 0}, sites);
  const auto estimate = solve_tdoa(set, sites);
  CHECK(estimate.converged);
  CHECK(horizontal_distance(estimate.position, {0, 0, 0}) < 1e-6);
  CHECK(estimate.method == EstimatorMethod::Tdoa);
}

TEST_CASE("tdoa: noiseless diffs recover the target") {
  RngStream rng(31);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<AnchorSite> sites;
    for (int i = 0; i < 4; ++i) {
      sites.push_back({i, {rng.uniform(-100, 100), rng.uniform(-100, 100), 0}});
    }
    const Position truth{rng.uniform(-40, 40), rng.uniform(-40, 40), 0};
    const auto estimate = solve_tdoa(exact_tdoa(truth, sites), sites);
    if (!estimate.converged) continue;  // rare degenerate random geometry
    CHECK(horizontal_distance(estimate.position, truth) < 1e-5);
  }
}

TEST_CASE("tdoa with anchor sync bias agrees with the brute-force oracle") {
  const std::vector<AnchorSite> sites{
      {1, {120, 0, 0}}, {2, {0, 110, 0}}, {3, {-100, -10, 0}}, {4, {10, -90, 0}}};
  const Position truth{12, -7, 0};
  TdoaSet set = exact_tdoa(truth, sites);
  // anchor offsets {0, +50 ns, -50 ns, +20 ns} relative to the reference
  const double c = 299792458.0;
  set.diffs[0].diff_m += -c * 50e-9;
  set.diffs[1].diff_m += +c * 50e-9;
  set.diffs[2].diff_m += -c * 20e-9;

  const auto iterative = solve_tdoa(set, sites);
  const auto oracle =
      brute_force(tdoa_cost(make_tdoa_problem(set, sites)),
                  {{truth.x - 30, truth.y - 30, 0}, {truth.x + 30, truth.y + 30, 0}},
                  0.05);
  CHECK(distance(iterative.position, oracle.position) <= 0.1);
  const double cost_iter = tdoa_cost(make_tdoa_problem(set, sites))(iterative.position);
  const double cost_grid = tdoa_cost(make_tdoa_problem(set, sites))(oracle.position);
  CHECK(cost_iter <= cost_grid + 1e-6);
}

TEST_CASE("analytic jacobians match central finite differences") {
  RngStream rng(32);
  const double h = 1e-6;
  int checked = 0;
  for (int trial = 0; trial < 100; ++trial) {
    // evaluation point kept away from the anchors so the finite-difference
    // truncation stays below the tolerance, with small residuals (the regime
    // the solver iterates in) so the FD subtraction does not lose precision
    Position x;
    std::vector<Position> anchors;
    do {
      anchors.clear();
      x = {rng.uniform(-150, 150), rng.uniform(-150, 150), 0};
      for (int i = 0; i < 5; ++i) {
        anchors.push_back({rng.uniform(-200, 200), rng.uniform(-200, 200), 0});
      }
    } while ([&] {
      for (const Position& anchor : anchors) {
        if (distance(x, anchor) < 5.0) return true;
      }
      return false;
    }());

    RangeProblem range_problem;
    std::vector<AnchorSite> sites;
    for (int i = 0; i < 5; ++i) {
      range_problem.observations.push_back(
          {anchors[i], distance(x, anchors[i]) + rng.uniform(-2, 2)});
      sites.push_back({i, anchors[i]});
    }
    TdoaProblem tdoa_problem;
    tdoa_problem.ref_anchor = sites[0].position;
    for (int i = 1; i < 5; ++i) {
      tdoa_problem.diffs.emplace_back(
          sites[i].position, distance(x, anchors[i]) - distance(x, anchors[0]) +
                                 rng.uniform(-2, 2));
    }

    auto check_problem = [&](const auto& problem) {
      const int n = problem.residual_count();
      std::vector<double> r(n), jac(n * 2);
      problem.eval(x, Dimensionality::TwoD, r.data(), jac.data());
      for (int axis = 0; axis < 2; ++axis) {
        Position plus = x, minus = x;
        (axis == 0 ? plus.x : plus.y) += h;
        (axis == 0 ? minus.x : minus.y) -= h;
        std::vector<double> rp(n), rm(n);
        problem.eval(plus, Dimensionality::TwoD, rp.data(), nullptr);
        problem.eval(minus, Dimensionality::TwoD, rm.data(), nullptr);
        for (int i = 0; i < n; ++i) {
          const double fd = (rp[i] - rm[i]) / (2.0 * h);
          const double an = jac[i * 2 + axis];
          const double scale = std::max({std::abs(fd), std::abs(an), 1e-3});
          REQUIRE(std::abs(fd - an) / scale <= 1e-5);
          ++checked;
        }
      }
    };
    check_problem(range_problem);
    check_problem(tdoa_problem);
  }
  CHECK(checked > 0);
}

TEST_CASE("accepted damped steps never increase the cost") {
  RngStream rng(33);
  for (int trial = 0; trial < 30; ++trial) {
    std::vector<Position> anchors;
    for (int i = 0; i < 5; ++i) {
      anchors.push_back({rng.uniform(-100, 100), rng.uniform(-100, 100), 0});
    }
    const Position truth{rng.uniform(-50, 50), rng.uniform(-50, 50), 0};
    auto ranges = exact_ranges(truth, anchors);
    for (auto& obs : ranges) obs.range_m += rng.normal(0.0, 3.0);

    std::vector<double> history;
    SolverSettings settings;
    settings.cost_history = &history;
    try {
      solve_range_multilateration(ranges, settings);
    } catch (const GeometryError&) {
      continue;
    }
    REQUIRE(history.size() >= 1);
    for (std::size_t i = 1; i < history.size(); ++i) {
      REQUIRE(history[i] <= history[i - 1] + 1e-12);
    }
  }
}

TEST_CASE("estimates are equivariant under rigid motions") {
  RngStream rng(34);
  for (int trial = 0; trial < 25; ++trial) {
    std::vector<Position> anchors;
    for (int i = 0; i < 4; ++i) {
      anchors.push_back({rng.uniform(-100, 100), rng.uniform(-100, 100), 0});
    }
    const Position truth{rng.uniform(-50, 50), rng.uniform(-50, 50), 0};
    auto ranges = exact_ranges(truth, anchors);
    for (auto& obs : ranges) obs.range_m += rng.normal(0.0, 0.5);

    // tight step tolerance: both solves must settle into the machine-level
    // minimum for the rigid-motion comparison to be meaningful
    SolverSettings settings;
    settings.step_tolerance_m = 1e-12;

    PositionEstimate base;
    try {
      base = solve_range_multilateration(ranges, settings);
    } catch (const GeometryError&) {
      continue;
    }
    if (!base.converged) continue;

    const double theta = rng.uniform(0.0, 2 * kPi);
    const Position shift{rng.uniform(-500, 500), rng.uniform(-500, 500), 0};
    std::vector<RangeObservation> moved = ranges;
    for (auto& obs : moved) obs.anchor = rotate2d(obs.anchor, theta) + shift;
    const auto transformed = solve_range_multilateration(moved, settings);

    const Position expected = rotate2d(base.position, theta) + shift;
    CHECK(distance(transformed.position, expected) < 1e-9);
  }
}

TEST_CASE("aoa triangulation closed forms") {
  SUBCASE("textbook 45/135 crossing") {
    const std::vector<BearingObservation> bearings{
        {{0, 0, 0}, kPi / 4.0, kPi / 2.0, 0.01},
        {{100, 0, 0}, 3.0 * kPi / 4.0, kPi / 2.0, 0.01}};
    const auto estimate = solve_aoa_triangulation(bearings);
    CHECK(estimate.position.x == doctest::Approx(50.0).epsilon(1e-9));
    CHECK(estimate.position.y == doctest::Approx(50.0).epsilon(1e-9));
    CHECK(estimate.converged);
    CHECK(estimate.iterations == 0);
  }
  SUBCASE("three consistent bearings recover the point exactly") {
    const Position truth{30, 70, 0};
    std::vector<BearingObservation> bearings;
    for (const Position& obs : {Position{0, 0, 0}, Position{100, 0, 0},
                                Position{50, 150, 0}}) {
      bearings.push_back(
          {obs, std::atan2(truth.y - obs.y, truth.x - obs.x), kPi / 2.0, 0.02});
    }
    const auto estimate = solve_aoa_triangulation(bearings);
    CHECK(horizontal_distance(estimate.position, truth) < 1e-9);
  }
  SUBCASE("near-parallel bearings are a geometry error") {
    const std::vector<BearingObservation> bearings{
        {{0, 0, 0}, kPi / 4.0, kPi / 2.0, 0.01},
        {{0.5, 0, 0}, kPi / 4.0 + 1e-5, kPi / 2.0, 0.01}};
    CHECK_THROWS_AS(solve_aoa_triangulation(bearings), GeometryError);
  }
  SUBCASE("a single bearing is not enough") {
    const std::vector<BearingObservation> bearings{
        {{0, 0, 0}, kPi / 4.0, kPi / 2.0, 0.01}};
    CHECK_THROWS_AS(solve_aoa_triangulation(bearings), GeometryError);
  }
}

TEST_CASE("hybrid fix is a polar-to-cartesian at the anchor") {
  Node anchor;
  anchor.id = 1;
  anchor.position = {0, 0, 0};

  RttMeasurement range;
  range.est_range_m = 100.0;
  AoaMeasurement bearing;
  bearing.azimuth_rad = kPi / 6.0;  // 30 degrees
  bearing.zenith_rad = kPi / 2.0;

  auto estimate = solve_hybrid_rtt_aoa(range, bearing, anchor);
  CHECK(estimate.position.x == doctest::Approx(86.6025403784).epsilon(1e-9));
  CHECK(estimate.position.y == doctest::Approx(50.0).epsilon(1e-9));
  CHECK(estimate.position.z == doctest::Approx(0.0).epsilon(1e-9));
  CHECK(estimate.converged);
  CHECK(estimate.iterations == 0);

  range.est_range_m = 0.0;
  estimate = solve_hybrid_rtt_aoa(range, bearing, anchor);
  CHECK(distance(estimate.position, anchor.position) == 0.0);

  range.est_range_m = 42.0;
  bearing.azimuth_rad = 0.0;
  estimate = solve_hybrid_rtt_aoa(range, bearing, anchor);
  CHECK(estimate.position.x == doctest::Approx(42.0).epsilon(1e-12));
  CHECK(estimate.position.y == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("brute force grid search") {
  SUBCASE("quadratic bowl") {
    const auto cost = [](const Position& p) {
      return (p.x - 10) * (p.x - 10) + (p.y - 10) * (p.y - 10);
    };
    const auto estimate =
        brute_force(cost, {{-50, -50, 0}, {50, 50, 0}}, 0.1);
    CHECK(std::abs(estimate.position.x - 10.0) <= 0.05);
    CHECK(std::abs(estimate.position.y - 10.0) <= 0.05);
    CHECK(estimate.method == EstimatorMethod::BruteForce);
  }
  SUBCASE("degenerate axis collapses the search") {
    const auto cost = [](const Position& p) {
      return (p.x - 3) * (p.x - 3) + p.z * p.z;
    };
    const auto estimate = brute_force(cost, {{-10, 2, 0}, {10, 2, 0}}, 0.01);
    CHECK(std::abs(estimate.position.x - 3.0) <= 0.005);
    CHECK(estimate.position.y == 2.0);
  }
  SUBCASE("oversized grids are rejected") {
    const auto cost = [](const Position&) { return 0.0; };
    CHECK_THROWS_AS(
        brute_force(cost, {{0, 0, 0}, {100000, 100000, 0}}, 0.01),
        ConfigurationError);
  }
}

TEST_CASE("every solver is exact on clean inputs across random drops") {
  RngStream rng(35);
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<Position> anchors;
    std::vector<AnchorSite> sites;
    for (int i = 0; i < 4; ++i) {
      // anchors on a ring with jitter: well-conditioned geometry
      const double angle = 2.0 * kPi * i / 4.0 + rng.uniform(-0.4, 0.4);
      const double radius = rng.uniform(60, 140);
      const Position p{radius * std::cos(angle), radius * std::sin(angle), 0};
      anchors.push_back(p);
      sites.push_back({i, p});
    }
    const Position truth{rng.uniform(-30, 30), rng.uniform(-30, 30), 0};

    const auto multilat = solve_range_multilateration(exact_ranges(truth, anchors));
    REQUIRE(multilat.converged);
    REQUIRE(horizontal_distance(multilat.position, truth) <= 1e-6);

    const auto tdoa = solve_tdoa(exact_tdoa(truth, sites), sites);
    REQUIRE(tdoa.converged);
    REQUIRE(horizontal_distance(tdoa.position, truth) <= 1e-6);

    std::vector<BearingObservation> bearings;
    for (const Position& obs : anchors) {
      bearings.push_back(
          {obs, std::atan2(truth.y - obs.y, truth.x - obs.x), kPi / 2.0, 0.01});
    }
    const auto aoa = solve_aoa_triangulation(bearings);
    REQUIRE(horizontal_distance(aoa.position, truth) <= 1e-6);
  }
}
