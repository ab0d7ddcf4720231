#pragma once

#include <span>
#include <vector>

#include "slpos/channel.hpp"
#include "slpos/method.hpp"
#include "slpos/radio.hpp"
#include "slpos/rng.hpp"
#include "slpos/scenario.hpp"

namespace slpos {

inline constexpr double kSpeedOfLight = 299792458.0;  // m/s, exact

inline double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }
inline double linear_to_db(double linear) { return 10.0 * std::log10(linear); }

// Delay-estimation noise floor: sigma_tau = 1 / (2*sqrt(2)*pi*beta*sqrt(snr))
// with effective (RMS) bandwidth beta = B / sqrt(12) of a flat spectrum.
// Strictly decreasing in both arguments.
double toa_std_s(double bandwidth_hz, double snr_linear);

// Azimuth noise floor of an N-element uniform linear array at the given
// broadside angle. Capped at pi/4; the cap also marks the sample low quality.
double aoa_std_rad(const RadioConfig& radio, double snr_linear,
                   double broadside_angle_rad, bool* capped = nullptr);

struct ToaMeasurement {
  NodeId tx_id = 0;
  NodeId rx_id = 0;
  double toa_s = 0.0;  // receiver-clock epoch
  double snr_db = 0.0;
  bool los = true;
};

enum class RttKind { SingleSided, DoubleSided };

struct RttMeasurement {
  NodeId a_id = 0;
  NodeId b_id = 0;
  RttKind kind = RttKind::SingleSided;
  double est_range_m = 0.0;
  std::vector<double> reply_times_s;  // 1 entry single-sided, 2 double-sided
  double snr_db = 0.0;
  bool los = true;
};

struct TdoaDiff {
  NodeId anchor_id = 0;
  double diff_m = 0.0;  // c * (toa_anchor - toa_ref)
};

struct TdoaSet {
  NodeId target_id = 0;
  NodeId ref_anchor_id = 0;
  std::vector<TdoaDiff> diffs;  // reference anchor excluded
};

struct AoaMeasurement {
  NodeId observer_id = 0;
  NodeId source_id = 0;
  double azimuth_rad = 0.0;  // east = 0, counter-clockwise positive, [-pi, pi)
  double zenith_rad = 0.0;   // [0, pi], pi/2 for coplanar nodes
  double std_rad = 0.0;      // reported noise level
  bool low_quality = false;  // endfire / capped noise floor
};

// SL-PRS transmissions one positioning round costs; drives the protocol
// latency accounting. RTT counts are per ranging pair, TDoA/ToA/AoA one per
// anchor, hybrid rides its AoA on the double-sided RTT exchange.
int prs_transmission_count(PositioningMethod method, int n_anchors);

// Synthesizes measurements for one drawn link. All corruption sources
// (clock offsets, drift, NLoS excess delay, thermal noise) enter here;
// noise_enabled gates only the additive thermal term so ideal-conditions
// runs can isolate the deterministic effects.
class Measurer {
 public:
  Measurer(const RadioConfig& radio, bool noise_enabled = true,
           double aoa_nlos_scatter_prob = 1.0)
      : radio_(radio),
        noise_enabled_(noise_enabled),
        aoa_nlos_scatter_prob_(aoa_nlos_scatter_prob) {}

  const RadioConfig& radio() const { return radio_; }

  // toa = d/c + (rx offset - tx offset) + NLoS excess + N(0, toa_std_s).
  ToaMeasurement measure_toa(const Node& tx, const Node& rx,
                             const LinkState& link, RngStream& rng) const;

  // Single exchange: a measures the round trip in its own clock, b reports
  // its reply time in its clock. The drift bias c*(t_reply/2)*ddrift*1e-6
  // emerges from the duration definitions.
  RttMeasurement rtt_single(const Node& a, const Node& b, double t_reply_s,
                            const LinkState& link, RngStream& rng) const;

  // Double-sided exchange using the asymmetric product estimator
  //   ToF = (Tr1*Tr2 - Td1*Td2) / (Tr1 + Tr2 + Td1 + Td2),
  // each duration measured in its owner's clock. First-order drift bias is
  // proportional to ToF*drift rather than t_reply*drift.
  RttMeasurement rtt_double(const Node& a, const Node& b, double t_reply1_s,
                            double t_reply2_s, const LinkState& link,
                            RngStream& rng) const;

  // Anchors transmit, the target receives; the target's own offset cancels
  // in the differencing while anchor offsets do not. The first anchor in the
  // list is the reference.
  TdoaSet tdoa_set(const Node& target, std::span<const Node> anchors,
                   std::span<const LinkState> links, RngStream& rng) const;

  // Arrays are mounted with broadside along +x; endfire arrivals degrade to
  // the capped noise floor. NLoS links scatter the azimuth uniformly with
  // the configured probability, and the reported std does not reveal it.
  AoaMeasurement measure_aoa(const Node& observer, const Node& source,
                             const LinkState& link, RngStream& rng) const;

 private:
  double maybe_noise(double std, RngStream& rng) const;

  RadioConfig radio_;
  bool noise_enabled_ = true;
  double aoa_nlos_scatter_prob_ = 1.0;
};

}  // namespace slpos
