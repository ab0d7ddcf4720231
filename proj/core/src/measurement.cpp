#include "slpos/measurement.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "slpos/errors.hpp"

namespace slpos {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kAoaStdCap = kPi / 4.0;

double wrap_azimuth(double rad) {
  double a = std::fmod(rad + kPi, 2.0 * kPi);
  if (a < 0.0) a += 2.0 * kPi;
  return a - kPi;  // [-pi, pi)
}

}  // namespace

void validate(const RadioConfig& radio) {
  if (!(radio.bandwidth_hz > 0.0)) {
    throw ConfigurationError("bandwidth_hz must be > 0");
  }
  if (!(radio.carrier_hz > 0.0)) {
    throw ConfigurationError("carrier_hz must be > 0");
  }
  if (radio.n_antennas < 1) {
    throw ConfigurationError("n_antennas must be >= 1");
  }
  if (!(radio.antenna_spacing_wavelengths > 0.0)) {
    throw ConfigurationError("antenna_spacing_wavelengths must be > 0");
  }
}

double toa_std_s(double bandwidth_hz, double snr_linear) {
  const double beta = bandwidth_hz / std::sqrt(12.0);
  return 1.0 / (2.0 * std::sqrt(2.0) * kPi * beta * std::sqrt(snr_linear));
}

double aoa_std_rad(const RadioConfig& radio, double snr_linear,
                   double broadside_angle_rad, bool* capped) {
  const int n = radio.n_antennas;
  if (n < 2) {
    throw CapabilityError("angle estimation needs at least 2 antennas");
  }
  const double cos_b = std::cos(broadside_angle_rad);
  const double aperture = 2.0 * kPi * radio.antenna_spacing_wavelengths;
  const double denom = aperture * aperture * snr_linear * double(n) *
                       (double(n) * n - 1.0) * cos_b * cos_b;
  double std = denom > 0.0 ? std::sqrt(6.0 / denom)
                           : std::numeric_limits<double>::infinity();
  bool hit_cap = false;
  if (!(std < kAoaStdCap)) {
    std = kAoaStdCap;
    hit_cap = true;
  }
  if (capped) *capped = hit_cap;
  return std;
}

int prs_transmission_count(PositioningMethod method, int n_anchors) {
  switch (method) {
    case PositioningMethod::ToaMultilat: return n_anchors;
    case PositioningMethod::Tdoa: return n_anchors;
    case PositioningMethod::AoaTriangulation: return n_anchors;  // 1 per pair
    case PositioningMethod::RttSingle: return 2 * n_anchors;
    case PositioningMethod::RttDouble: return 3 * n_anchors;
    case PositioningMethod::HybridRttAoa: return 3;  // double RTT, AoA rides
  }
  throw UsageError("unknown positioning method");
}

double Measurer::maybe_noise(double std, RngStream& rng) const {
  if (!noise_enabled_) return 0.0;
  return rng.normal(0.0, std);
}

ToaMeasurement Measurer::measure_toa(const Node& tx, const Node& rx,
                                     const LinkState& link, RngStream& rng) const {
  const double d = distance(tx.position, rx.position);
  const double sigma = toa_std_s(radio_.bandwidth_hz, db_to_linear(link.snr_db));
  ToaMeasurement m;
  m.tx_id = tx.id;
  m.rx_id = rx.id;
  m.snr_db = link.snr_db;
  m.los = link.los;
  m.toa_s = d / kSpeedOfLight + (rx.clock.offset_s - tx.clock.offset_s) +
            link.excess_delay_s + maybe_noise(sigma, rng);
  return m;
}

RttMeasurement Measurer::rtt_single(const Node& a, const Node& b,
                                    double t_reply_s, const LinkState& link,
                                    RngStream& rng) const {
  if (!(t_reply_s > 0.0)) {
    throw ConfigurationError("rtt reply time must be > 0");
  }
  const double tof = (distance(a.position, b.position) / kSpeedOfLight) +
                     link.excess_delay_s;
  const double sigma = toa_std_s(radio_.bandwidth_hz, db_to_linear(link.snr_db));

  // a timestamps b's response, b timestamps a's poll: one reception error on
  // each measured duration.
  const double t_round = local_duration(2.0 * tof + t_reply_s, a.clock) +
                         maybe_noise(sigma, rng);
  const double t_reply = local_duration(t_reply_s, b.clock) +
                         maybe_noise(sigma, rng);

  RttMeasurement m;
  m.a_id = a.id;
  m.b_id = b.id;
  m.kind = RttKind::SingleSided;
  m.reply_times_s = {t_reply_s};
  m.snr_db = link.snr_db;
  m.los = link.los;
  m.est_range_m = kSpeedOfLight * (t_round - t_reply) / 2.0;
  return m;
}

RttMeasurement Measurer::rtt_double(const Node& a, const Node& b,
                                    double t_reply1_s, double t_reply2_s,
                                    const LinkState& link, RngStream& rng) const {
  if (!(t_reply1_s > 0.0) || !(t_reply2_s > 0.0)) {
    throw ConfigurationError("rtt reply times must be > 0");
  }
  const double tof = (distance(a.position, b.position) / kSpeedOfLight) +
                     link.excess_delay_s;
  const double sigma = toa_std_s(radio_.bandwidth_hz, db_to_linear(link.snr_db));

  // Poll / response / final. Each endpoint measures one round and one reply
  // duration in its own clock, each with one reception timestamp error.
  const double t_round1 = local_duration(2.0 * tof + t_reply1_s, a.clock) +
                          maybe_noise(sigma, rng);
  const double t_reply1 = local_duration(t_reply1_s, b.clock) +
                          maybe_noise(sigma, rng);
  const double t_round2 = local_duration(2.0 * tof + t_reply2_s, b.clock) +
                          maybe_noise(sigma, rng);
  const double t_reply2 = local_duration(t_reply2_s, a.clock) +
                          maybe_noise(sigma, rng);

  const double tof_est = (t_round1 * t_round2 - t_reply1 * t_reply2) /
                         (t_round1 + t_round2 + t_reply1 + t_reply2);

  RttMeasurement m;
  m.a_id = a.id;
  m.b_id = b.id;
  m.kind = RttKind::DoubleSided;
  m.reply_times_s = {t_reply1_s, t_reply2_s};
  m.snr_db = link.snr_db;
  m.los = link.los;
  m.est_range_m = kSpeedOfLight * tof_est;
  return m;
}

TdoaSet Measurer::tdoa_set(const Node& target, std::span<const Node> anchors,
                           std::span<const LinkState> links, RngStream& rng) const {
  if (anchors.size() < 3) {
    throw ConfigurationError("tdoa needs at least 3 transmitting anchors");
  }
  if (links.size() != anchors.size()) {
    throw UsageError("one link state per anchor required");
  }
  TdoaSet set;
  set.target_id = target.id;
  set.ref_anchor_id = anchors[0].id;

  std::vector<double> toas(anchors.size());
  for (std::size_t i = 0; i < anchors.size(); ++i) {
    toas[i] = measure_toa(anchors[i], target, links[i], rng).toa_s;
  }
  for (std::size_t i = 1; i < anchors.size(); ++i) {
    set.diffs.push_back(
        {anchors[i].id, kSpeedOfLight * (toas[i] - toas[0])});
  }
  return set;
}

AoaMeasurement Measurer::measure_aoa(const Node& observer, const Node& source,
                                     const LinkState& link, RngStream& rng) const {
  if (radio_.n_antennas < 2) {
    throw CapabilityError("AoA needs at least 2 antennas");
  }
  const Position diff = source.position - observer.position;
  const double d = norm(diff);
  if (d <= 0.0) {
    throw GeometryError("AoA between coincident nodes");
  }
  const double true_azimuth = std::atan2(diff.y, diff.x);
  const double true_zenith = std::acos(std::clamp(diff.z / d, -1.0, 1.0));

  // Broadside points along +x, so the azimuth itself is the off-broadside
  // angle of the arriving wavefront.
  bool capped = false;
  const double sigma = aoa_std_rad(radio_, db_to_linear(link.snr_db),
                                   true_azimuth, &capped);

  AoaMeasurement m;
  m.observer_id = observer.id;
  m.source_id = source.id;
  m.std_rad = sigma;
  m.low_quality = capped;

  const bool scattered =
      !link.los && rng.uniform() < aoa_nlos_scatter_prob_;
  if (scattered) {
    m.azimuth_rad = rng.uniform(-kPi, kPi);
  } else {
    m.azimuth_rad = wrap_azimuth(true_azimuth + maybe_noise(sigma, rng));
  }
  if (radio_.planar_array) {
    m.zenith_rad =
        std::clamp(true_zenith + maybe_noise(sigma, rng), 0.0, kPi);
  } else {
    m.zenith_rad = kPi / 2.0;  // linear array: coplanar assumption
  }
  return m;
}

}  // namespace slpos
