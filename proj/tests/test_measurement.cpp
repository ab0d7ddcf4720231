#include <doctest.h>

#include <cmath>
#include <numbers>

#include "slpos/errors.hpp"
#include "slpos/measurement.hpp"

using namespace slpos;

namespace {

constexpr double kPi = std::numbers::pi;

Node node_at(NodeId id, double x, double y, double offset_s = 0.0,
             double drift_ppm = 0.0) {
  Node n;
  n.id = id;
  n.position = {x, y, 0.0};
  n.clock = {offset_s, drift_ppm};
  return n;
}

LinkState los_link(double snr_db = 20.0) { return {true, snr_db, 0.0}; }

Measurer quiet_measurer(double bandwidth_hz = 100e6) {
  RadioConfig radio;
  radio.bandwidth_hz = bandwidth_hz;
  return Measurer(radio, /*noise_enabled=*/false);
}

}  // namespace

TEST_CASE("toa noise floor: closed form and scalings") {
  // direct evaluation of 1 / (2*sqrt(2)*pi*(B/sqrt(12))*sqrt(snr))
  const double expected =
      1.0 / (2.0 * std::sqrt(2.0) * kPi * (100e6 / std::sqrt(12.0)) * 10.0);
  CHECK(toa_std_s(100e6, 100.0) == doctest::Approx(expected).epsilon(1e-12));
  CHECK(toa_std_s(100e6, 100.0) == doctest::Approx(3.8985e-10).epsilon(1e-4));
  // range-domain floor at 100 MHz / 20 dB
  CHECK(kSpeedOfLight * toa_std_s(100e6, 100.0) ==
        doctest::Approx(0.116877).epsilon(1e-4));

  CHECK(toa_std_s(40e6, 50.0) ==
        doctest::Approx(2.0 * toa_std_s(80e6, 50.0)).epsilon(1e-12));
  CHECK(toa_std_s(40e6, 200.0) ==
        doctest::Approx(0.5 * toa_std_s(40e6, 50.0)).epsilon(1e-12));

  double prev = toa_std_s(10e6, 10.0);
  for (double b = 20e6; b <= 640e6; b *= 2.0) {
    const double v = toa_std_s(b, 10.0);
    CHECK(v < prev);
    prev = v;
  }
  prev = toa_std_s(10e6, 1.0);
  for (double snr = 2.0; snr <= 1024.0; snr *= 2.0) {
    const double v = toa_std_s(10e6, snr);
    CHECK(v < prev);
    prev = v;
  }
}

TEST_CASE("toa measurement closed forms") {
  const Measurer m = quiet_measurer();
  RngStream rng(1);

  SUBCASE("one light-microsecond") {
    const auto toa = m.measure_toa(node_at(0, 0, 0), node_at(1, 299.792458, 0),
                                   los_link(), rng);
    CHECK(toa.toa_s == doctest::Approx(1e-6).epsilon(1e-12));
  }
  SUBCASE("receiver offset adds directly") {
    const auto toa = m.measure_toa(node_at(0, 0, 0),
                                   node_at(1, 150, 0, 100e-9), los_link(), rng);
    CHECK(toa.toa_s ==
          doctest::Approx(150.0 / kSpeedOfLight + 1e-7).epsilon(1e-12));
  }
  SUBCASE("transmitter offset subtracts") {
    const auto toa = m.measure_toa(node_at(0, 0, 0, 40e-9), node_at(1, 150, 0),
                                   los_link(), rng);
    CHECK(toa.toa_s ==
          doctest::Approx(150.0 / kSpeedOfLight - 4e-8).epsilon(1e-12));
  }
  SUBCASE("NLoS bias is one-sided and additive") {
    const LinkState link{false, 20.0, 50e-9};
    const auto toa =
        m.measure_toa(node_at(0, 0, 0), node_at(1, 150, 0), link, rng);
    CHECK(toa.toa_s ==
          doctest::Approx(150.0 / kSpeedOfLight + 5e-8).epsilon(1e-12));
    CHECK_FALSE(toa.los);
  }
}

TEST_CASE("single-sided rtt recovers the range with ideal clocks") {
  const Measurer m = quiet_measurer();
  RngStream rng(2);
  const auto rtt = m.rtt_single(node_at(0, 0, 0), node_at(1, 150, 0), 1e-3,
                                los_link(), rng);
  CHECK(rtt.est_range_m == doctest::Approx(150.0).epsilon(1e-12));
  CHECK(rtt.kind == RttKind::SingleSided);
  REQUIRE(rtt.reply_times_s.size() == 1);
}

TEST_CASE("single-sided rtt drift bias matches the closed form") {
  const Measurer m = quiet_measurer();
  RngStream rng(3);
  // +-10 ppm opposing drifts, 1 ms reply: bias c * 5e-4 * 2e-5 ~ 3.0 m
  const auto rtt =
      m.rtt_single(node_at(0, 0, 0, 0, +10.0), node_at(1, 150, 0, 0, -10.0),
                   1e-3, los_link(), rng);
  const double predicted = kSpeedOfLight * (1e-3 / 2.0) * 20.0 * 1e-6;
  CHECK(predicted == doctest::Approx(2.99792458).epsilon(1e-12));
  CHECK(std::abs((rtt.est_range_m - 150.0) - predicted) < 0.01);
  CHECK(rtt.est_range_m == doctest::Approx(153.0).epsilon(1e-4));
}

TEST_CASE("equal drifts leave only the sub-mm time-of-flight term") {
  const Measurer m = quiet_measurer();
  RngStream rng(4);
  const auto rtt =
      m.rtt_single(node_at(0, 0, 0, 0, +10.0), node_at(1, 150, 0, 0, +10.0),
                   1e-3, los_link(), rng);
  const double residual = std::abs(rtt.est_range_m - 150.0);
  CHECK(residual <= kSpeedOfLight * 2.0 * (150.0 / kSpeedOfLight) * 1e-5);
  CHECK(residual < 1e-2);
}

TEST_CASE("double-sided rtt is exact with clean inputs, any reply times") {
  const Measurer m = quiet_measurer();
  RngStream rng(5);
  for (const auto& [t1, t2] : std::initializer_list<std::pair<double, double>>{
           {1e-3, 1e-3}, {1e-3, 3e-3}, {1e-4, 9e-3}}) {
    const auto rtt = m.rtt_double(node_at(0, 0, 0), node_at(1, 150, 0), t1, t2,
                                  los_link(), rng);
    CHECK(std::abs(rtt.est_range_m - 150.0) < 1e-9);
    REQUIRE(rtt.reply_times_s.size() == 2);
  }
}

TEST_CASE("double-sided rtt equals the product formula evaluated directly") {
  const Measurer m = quiet_measurer();
  RngStream rng(6);
  const Node a = node_at(0, 0, 0, 0, +7.0);
  const Node b = node_at(1, 150, 0, 0, -3.0);
  const double t1 = 1e-3, t2 = 1e-3;
  const double tof = 150.0 / kSpeedOfLight;

  const double tr1 = local_duration(2 * tof + t1, a.clock);
  const double td1 = local_duration(t1, b.clock);
  const double tr2 = local_duration(2 * tof + t2, b.clock);
  const double td2 = local_duration(t2, a.clock);
  const double expected =
      kSpeedOfLight * (tr1 * tr2 - td1 * td2) / (tr1 + tr2 + td1 + td2);

  const auto rtt = m.rtt_double(a, b, t1, t2, los_link(), rng);
  CHECK(rtt.est_range_m == doctest::Approx(expected).epsilon(1e-12));
}

TEST_CASE("drift grid: single-sided matches closed form, double-sided 100x better") {
  const Measurer m = quiet_measurer();
  RngStream rng(7);
  const double d = 150.0;
  for (double delta_ppm : {1.0, 5.0, 10.0, 20.0, -1.0, -5.0, -10.0, -20.0}) {
    for (double t_reply : {1e-4, 1e-3, 1e-2}) {
      const Node a = node_at(0, 0, 0, 0, +delta_ppm / 2.0);
      const Node b = node_at(1, d, 0, 0, -delta_ppm / 2.0);

      const auto ss = m.rtt_single(a, b, t_reply, los_link(), rng);
      const double ss_bias = ss.est_range_m - d;
      const double predicted =
          kSpeedOfLight * (t_reply / 2.0) * delta_ppm * 1e-6;
      CHECK(std::abs(ss_bias - predicted) < 0.01 * std::abs(predicted));

      const auto ds = m.rtt_double(a, b, t_reply, t_reply, los_link(), rng);
      const double ds_bias = ds.est_range_m - d;
      CHECK(std::abs(ds_bias) < std::abs(ss_bias) / 100.0);
    }
  }
}

TEST_CASE("tdoa differences cancel the target clock but not anchor clocks") {
  const Measurer m = quiet_measurer();

  SUBCASE("equidistant anchors, perfect clocks: all diffs zero") {
    RngStream rng(8);
    const std::vector<Node> anchors{node_at(1, 100, 0), node_at(2, 0, 100),
                                    node_at(3, -100, 0)};
    const std::vector<LinkState> links(3, los_link());
    const auto set = m.tdoa_set(node_at(0, 0, 0), anchors, links, rng);
    CHECK(set.ref_anchor_id == 1);
    REQUIRE(set.diffs.size() == 2);
    for (const auto& diff : set.diffs) {
      CHECK(diff.diff_m == doctest::Approx(0.0).epsilon(1e-12));
    }
  }

  SUBCASE("target offset cancels in the differencing") {
    RngStream r1(9), r2(9);
    const std::vector<Node> anchors{node_at(1, 80, 10), node_at(2, -30, 90),
                                    node_at(3, 10, -70)};
    const std::vector<LinkState> links(3, los_link());
    const auto plain = m.tdoa_set(node_at(0, 5, 5, 0.0), anchors, links, r1);
    const auto offset = m.tdoa_set(node_at(0, 5, 5, 1e-3), anchors, links, r2);
    for (std::size_t i = 0; i < plain.diffs.size(); ++i) {
      // cancellation is algebraic; float rounding of the large common term
      // limits the comparison to ~1e-9 relative
      CHECK(plain.diffs[i].diff_m ==
            doctest::Approx(offset.diffs[i].diff_m).epsilon(1e-9));
    }
  }

  SUBCASE("anchor offsets bias the diffs by exactly c times the offset") {
    RngStream rng(10);
    const std::vector<Node> anchors{node_at(1, 100, 0, 0.0),
                                    node_at(2, 0, 100, +50e-9),
                                    node_at(3, -100, 0, -50e-9)};
    const std::vector<LinkState> links(3, los_link());
    const auto set = m.tdoa_set(node_at(0, 0, 0), anchors, links, rng);
    // diff_i = (d_i - d_ref) + c*(off_ref - off_i); equidistant geometry
    CHECK(set.diffs[0].diff_m ==
          doctest::Approx(-kSpeedOfLight * 50e-9).epsilon(1e-9));
    CHECK(set.diffs[1].diff_m ==
          doctest::Approx(+kSpeedOfLight * 50e-9).epsilon(1e-9));
    CHECK(std::abs(set.diffs[0].diff_m) ==
          doctest::Approx(14.9896229).epsilon(1e-6));
  }

  SUBCASE("a common shift of every clock leaves diffs unchanged") {
    RngStream r1(11), r2(11);
    std::vector<Node> anchors{node_at(1, 80, 10, 3e-9), node_at(2, -30, 90, -2e-9),
                              node_at(3, 10, -70, 7e-9)};
    const std::vector<LinkState> links(3, los_link());
    const auto base = m.tdoa_set(node_at(0, 5, 5, 1e-9), anchors, links, r1);
    for (Node& anchor : anchors) anchor.clock.offset_s += 4e-6;
    const auto shifted = m.tdoa_set(node_at(0, 5, 5, 1e-9 + 4e-6), anchors, links, r2);
    for (std::size_t i = 0; i < base.diffs.size(); ++i) {
      CHECK(base.diffs[i].diff_m ==
            doctest::Approx(shifted.diffs[i].diff_m).epsilon(1e-12));
    }
  }

  SUBCASE("fewer than 3 anchors is a configuration error") {
    RngStream rng(12);
    const std::vector<Node> anchors{node_at(1, 100, 0), node_at(2, 0, 100)};
    const std::vector<LinkState> links(2, los_link());
    CHECK_THROWS_AS(m.tdoa_set(node_at(0, 0, 0), anchors, links, rng),
                    ConfigurationError);
  }
}

TEST_CASE("aoa conventions: east is azimuth zero, coplanar zenith is pi/2") {
  const Measurer m = quiet_measurer();
  RngStream rng(13);
  const auto aoa =
      m.measure_aoa(node_at(0, 0, 0), node_at(1, 100, 0), los_link(), rng);
  CHECK(aoa.azimuth_rad == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(aoa.zenith_rad == doctest::Approx(kPi / 2.0).epsilon(1e-12));
  CHECK_FALSE(aoa.low_quality);
}

TEST_CASE("doubling the array from 4 to 8 antennas shrinks sigma by sqrt(8.4)") {
  RadioConfig four, eight;
  four.n_antennas = 4;
  eight.n_antennas = 8;
  const double s4 = aoa_std_rad(four, 100.0, 0.0);
  const double s8 = aoa_std_rad(eight, 100.0, 0.0);
  CHECK(s4 / s8 ==
        doctest::Approx(std::sqrt(8.0 * 63.0 / (4.0 * 15.0))).epsilon(1e-12));
  CHECK(s4 / s8 == doctest::Approx(2.898275).epsilon(1e-5));
}

TEST_CASE("aoa noise floor is monotone in snr and antenna count") {
  RadioConfig radio;
  radio.n_antennas = 4;
  double prev = aoa_std_rad(radio, 1.0, 0.0);
  for (double snr = 2.0; snr <= 1024.0; snr *= 2.0) {
    const double v = aoa_std_rad(radio, snr, 0.0);
    CHECK(v <= prev);
    prev = v;
  }
  prev = 10.0;
  for (int n = 2; n <= 64; n *= 2) {
    radio.n_antennas = n;
    const double v = aoa_std_rad(radio, 100.0, 0.0);
    CHECK(v < prev);
    prev = v;
  }
}

TEST_CASE("endfire arrivals cap the noise floor and flag low quality") {
  const Measurer m = quiet_measurer();
  RngStream rng(14);
  const auto aoa =
      m.measure_aoa(node_at(0, 0, 0), node_at(1, 0, 100), los_link(), rng);
  CHECK(aoa.std_rad == doctest::Approx(kPi / 4.0));
  CHECK(aoa.low_quality);
}

TEST_CASE("NLoS scatter replaces the azimuth with a uniform direction") {
  RadioConfig radio;
  const Measurer scatter(radio, true, 1.0);
  const Measurer keep(radio, true, 0.0);
  const LinkState nlos{false, 20.0, 100e-9};
  RngStream rng(15);

  int far_off = 0;
  for (int i = 0; i < 2000; ++i) {
    const auto aoa =
        scatter.measure_aoa(node_at(0, 0, 0), node_at(1, 100, 0), nlos, rng);
    REQUIRE(aoa.azimuth_rad >= -kPi);
    REQUIRE(aoa.azimuth_rad < kPi);
    if (std::abs(aoa.azimuth_rad) > kPi / 2.0) ++far_off;
  }
  // a uniform azimuth lands in the far half about half the time
  CHECK(far_off > 800);
  CHECK(far_off < 1200);

  const auto aoa =
      keep.measure_aoa(node_at(0, 0, 0), node_at(1, 100, 0), nlos, rng);
  CHECK(std::abs(aoa.azimuth_rad) < 0.2);  // plain noise around the truth
}

TEST_CASE("aoa needs at least two antennas") {
  RadioConfig radio;
  radio.n_antennas = 1;
  const Measurer m(radio, false);
  RngStream rng(16);
  CHECK_THROWS_AS(
      m.measure_aoa(node_at(0, 0, 0), node_at(1, 100, 0), los_link(), rng),
      CapabilityError);
}

TEST_CASE("prs transmission counts drive the latency model") {
  CHECK(prs_transmission_count(PositioningMethod::ToaMultilat, 4) == 4);
  CHECK(prs_transmission_count(PositioningMethod::Tdoa, 3) == 3);
  CHECK(prs_transmission_count(PositioningMethod::AoaTriangulation, 5) == 5);
  CHECK(prs_transmission_count(PositioningMethod::RttSingle, 1) == 2);
  CHECK(prs_transmission_count(PositioningMethod::RttSingle, 4) == 8);
  CHECK(prs_transmission_count(PositioningMethod::RttDouble, 1) == 3);
  CHECK(prs_transmission_count(PositioningMethod::RttDouble, 4) == 12);
  CHECK(prs_transmission_count(PositioningMethod::HybridRttAoa, 1) == 3);
}
