#pragma once

#include "d2dsim/core.hpp"
#include "d2dsim/radio.hpp"

namespace d2dsim {

// Per-interval accounting of one connection: transferred bits, energy spent
// by both endpoints, and utility = data - alpha * energy.

// Energy of an LTE-mode connection: (p_tx + p_rx) * rb_count, J. Throws
// std::invalid_argument on negative input.
double lte_energy(double p_tx_per_rb, double p_rx_per_rb, double rb_count);

// Data moved by an LTE-mode connection: rb_count * bits_per_rb.
double lte_data(double rb_count, double bits_per_rb);

// Data moved over WiFi in one interval: interval_s * rate_bps.
double wifi_data(double interval_s, double wifi_rate_bps);

// WiFi energy: both endpoints' baselines plus per-bit cost,
// 2*beta + (p_tx + p_rx) * data_bits.
double wifi_energy(double beta_wifi_j, double p_tx_per_bit, double p_rx_per_bit,
                   double data_bits);

double utility(double data_bits, double energy_j, double alpha);

struct LinkEconomics {
  double data_bits = 0.0;
  double energy_j = 0.0;
  double utility = 0.0;
};

// RB budget assumed at mode-selection time, before the scheduler has run:
// an Underlay connection gets the shared pool in every subframe, an Overlay
// connection the dedicated pool, and a Cellular connection a fair share of
// the subframes (one eNB grant per subframe, split across candidates).
// Outband uses no RBs.
double predicted_rb_count(Mode mode, const SimConfig& cfg, int n_cellular_candidates);

// Economics under the predicted RB budget; input to the mode selector.
LinkEconomics predicted_economics(Mode mode, const LinkRates& rates,
                                  const SimConfig& cfg, int n_cellular_candidates);

// Economics for a scheduler-produced RB count (ignored for Outband, whose
// data depends only on the interval duration).
LinkEconomics realized_economics(Mode mode, const LinkRates& rates,
                                 const SimConfig& cfg, double rb_count);

}  // namespace d2dsim
