#include "slpos/channel.hpp"

#include <cmath>

#include "slpos/errors.hpp"

namespace slpos {

void validate(const ChannelModel& model) {
  if (!(model.pathloss_exponent >= 1.5) ||
      !(model.pathloss_exponent_nlos >= 1.5)) {
    throw ConfigurationError("pathloss exponents must be >= 1.5");
  }
  if (!(model.shadowing_std_db >= 0.0)) {
    throw ConfigurationError("shadowing_std_db must be >= 0");
  }
  if (!(model.los_decay_m > 0.0)) {
    throw ConfigurationError("los_decay_m must be > 0");
  }
  if (const auto* exp = std::get_if<ExponentialExcessDelay>(&model.nlos_excess_delay)) {
    if (!(exp->mean_s >= 0.0)) {
      throw ConfigurationError("nlos excess delay mean_s must be >= 0");
    }
  } else if (!(std::get<FixedExcessDelay>(model.nlos_excess_delay).bias_s >= 0.0)) {
    throw ConfigurationError("nlos excess delay bias_s must be >= 0");
  }
  if (!(model.aoa_nlos_scatter_prob >= 0.0 && model.aoa_nlos_scatter_prob <= 1.0)) {
    throw ConfigurationError("aoa_nlos_scatter_prob must be in [0, 1]");
  }
}

double los_probability(double distance_m, const ChannelModel& model) {
  return std::exp(-distance_m / model.los_decay_m);
}

double link_snr_db(double tx_power_dbm, double distance_m, bool los,
                   const RadioConfig& radio, const ChannelModel& model,
                   RngStream& rng) {
  const double exponent =
      los ? model.pathloss_exponent : model.pathloss_exponent_nlos;
  double pathloss_db =
      model.reference_loss_db + 10.0 * exponent * std::log10(distance_m);
  if (model.shadowing_std_db > 0.0) {
    pathloss_db += rng.normal(0.0, model.shadowing_std_db);
  }
  const double noise_floor_dbm = -174.0 +
                                 10.0 * std::log10(radio.bandwidth_hz) +
                                 radio.noise_figure_db;
  return tx_power_dbm - pathloss_db - noise_floor_dbm;
}

LinkState draw_link(const Node& a, const Node& b, const ChannelModel& model,
                    const RadioConfig& radio, RngStream& rng) {
  const double d = distance(a.position, b.position);
  if (d <= 0.0) {
    throw GeometryError("draw_link called for coincident nodes");
  }
  LinkState link;
  link.los = rng.uniform() < los_probability(d, model);
  if (!link.los) {
    if (const auto* exp = std::get_if<ExponentialExcessDelay>(&model.nlos_excess_delay)) {
      link.excess_delay_s = rng.exponential(exp->mean_s);
    } else {
      link.excess_delay_s = std::get<FixedExcessDelay>(model.nlos_excess_delay).bias_s;
    }
  }
  link.snr_db = link_snr_db(radio.tx_power_dbm, d, link.los, radio, model, rng);
  return link;
}

}  // namespace slpos
