#pragma once

#include <variant>

#include "slpos/radio.hpp"
#include "slpos/rng.hpp"
#include "slpos/scenario.hpp"

namespace slpos {

struct ExponentialExcessDelay {
  double mean_s = 100e-9;
};

struct FixedExcessDelay {
  double bias_s = 100e-9;
};

using NlosExcessDelayModel =
    std::variant<ExponentialExcessDelay, FixedExcessDelay>;

// Simplified log-distance channel with an exponential LoS-probability decay
// and a scalar one-sided NLoS excess delay. Deliberately explicit and
// configurable instead of cloning a full stochastic geometry model.
struct ChannelModel {
  double reference_loss_db = 47.86;  // at 1 m
  double pathloss_exponent = 2.0;    // LoS
  double pathloss_exponent_nlos = 3.0;
  double shadowing_std_db = 0.0;
  double los_decay_m = 200.0;  // e-folding distance of the LoS probability
  NlosExcessDelayModel nlos_excess_delay = ExponentialExcessDelay{};
  // Probability that an NLoS link replaces the true arrival angle with a
  // uniform scatter direction.
  double aoa_nlos_scatter_prob = 1.0;
};

struct LinkState {
  bool los = true;
  double snr_db = 0.0;
  double excess_delay_s = 0.0;  // 0 when LoS; never negative
};

void validate(const ChannelModel& model);

// exp(-d / los_decay_m); monotone non-increasing in distance.
double los_probability(double distance_m, const ChannelModel& model);

// Link SNR in dB: tx power minus log-distance pathloss (exponent chosen by
// LoS state, plus lognormal shadowing) minus the thermal noise floor
// -174 dBm/Hz + 10 log10(B) + noise figure.
double link_snr_db(double tx_power_dbm, double distance_m, bool los,
                   const RadioConfig& radio, const ChannelModel& model,
                   RngStream& rng);

// Draws LoS state, SNR and NLoS excess delay for one node pair. The draw is
// symmetric in (a, b): same stream state gives the same link either way.
LinkState draw_link(const Node& a, const Node& b, const ChannelModel& model,
                    const RadioConfig& radio, RngStream& rng);

}  // namespace slpos
