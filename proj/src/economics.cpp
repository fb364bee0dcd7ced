#include "d2dsim/economics.hpp"

#include <stdexcept>

namespace d2dsim {

double lte_energy(double p_tx_per_rb, double p_rx_per_rb, double rb_count) {
  if (p_tx_per_rb < 0 || p_rx_per_rb < 0 || rb_count < 0)
    throw std::invalid_argument("lte_energy: negative input");
  return (p_tx_per_rb + p_rx_per_rb) * rb_count;
}

double lte_data(double rb_count, double bits_per_rb) {
  return rb_count * bits_per_rb;
}

double wifi_data(double interval_s, double wifi_rate_bps) {
  return interval_s * wifi_rate_bps;
}

double wifi_energy(double beta_wifi_j, double p_tx_per_bit, double p_rx_per_bit,
                   double data_bits) {
  return 2.0 * beta_wifi_j + (p_tx_per_bit + p_rx_per_bit) * data_bits;
}

double utility(double data_bits, double energy_j, double alpha) {
  return data_bits - alpha * energy_j;
}

double predicted_rb_count(Mode mode, const SimConfig& cfg, int n_cellular_candidates) {
  const double subframes = cfg.subframes_per_interval();
  switch (mode) {
    case Mode::Cellular:
      if (n_cellular_candidates <= 0) return 0.0;
      return subframes / n_cellular_candidates * cfg.rb_per_subframe;
    case Mode::Underlay:
      return subframes * cfg.rb_per_subframe;
    case Mode::Overlay:
      return subframes * cfg.overlay_rb_pool;
    case Mode::Outband:
      return 0.0;
  }
  return 0.0;
}

namespace {

LinkEconomics economics_for(Mode mode, const LinkRates& rates, const SimConfig& cfg,
                            double rb_count) {
  const ModePower& p = cfg.mode_power[static_cast<int>(mode)];
  LinkEconomics e;
  if (mode == Mode::Outband) {
    e.data_bits = wifi_data(cfg.interval_duration_T, rates.wifi_bps);
    e.energy_j = wifi_energy(cfg.beta_wifi, p.tx, p.rx, e.data_bits);
  } else {
    e.data_bits = lte_data(rb_count, rates.bits_per_rb);
    e.energy_j = lte_energy(p.tx, p.rx, rb_count);
  }
  e.utility = utility(e.data_bits, e.energy_j, cfg.alpha);
  return e;
}

}  // namespace

LinkEconomics predicted_economics(Mode mode, const LinkRates& rates,
                                  const SimConfig& cfg, int n_cellular_candidates) {
  return economics_for(mode, rates, cfg,
                       predicted_rb_count(mode, cfg, n_cellular_candidates));
}

LinkEconomics realized_economics(Mode mode, const LinkRates& rates,
                                 const SimConfig& cfg, double rb_count) {
  return economics_for(mode, rates, cfg, rb_count);
}

}  // namespace d2dsim
