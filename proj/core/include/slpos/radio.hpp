#pragma once

namespace slpos {

// Radio parameters shared by the channel and measurement models.
// Bandwidth presets of interest: 20, 40, 100 and 400 MHz.
struct RadioConfig {
  double bandwidth_hz = 100e6;
  double carrier_hz = 5.9e9;
  double tx_power_dbm = 23.0;
  double noise_figure_db = 9.0;
  int n_antennas = 8;
  double antenna_spacing_wavelengths = 0.5;
  // A 2x2-or-larger planar panel is required for zenith estimation; linear
  // arrays only resolve azimuth.
  bool planar_array = false;
};

void validate(const RadioConfig& radio);

}  // namespace slpos
