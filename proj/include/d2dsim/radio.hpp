#pragma once

#include <span>
#include <vector>

#include "d2dsim/core.hpp"

namespace d2dsim {

// Planar position in meters; the base station sits at the origin.
struct Position {
  double x = 0.0;
  double y = 0.0;

  friend bool operator==(const Position&, const Position&) = default;
};

inline constexpr Position kEnbPosition{0.0, 0.0};

double distance_m(Position a, Position b);

// Log-distance path gain (max(d, 1m))^-exponent; non-increasing in distance.
double path_gain(Position a, Position b, double exponent);

inline constexpr int kMaxCqi = 15;
// Resource elements per RB pair; scales spectral efficiency to bits per RB.
inline constexpr int kResourceElementsPerRb = 168;

// SNR decision thresholds in dB: CQI q >= 1 requires snr_db >= threshold
// q-1. 15 values evenly spaced from -6.7 to 22.7 dB.
std::span<const double, 15> cqi_snr_thresholds_db();

// Spectral efficiency in bits/symbol for CQI 1..15.
std::span<const double, 15> cqi_efficiency();

// Maps a linear SNR to CQI 0..15; 0 means the link is infeasible.
int snr_to_cqi_db(double snr_db);
int snr_to_cqi(double snr_linear);

// Bits per RB for a CQI index: floor(168 * efficiency), 0 for CQI 0.
// Throws std::out_of_range outside 0..15.
int rate_per_rb(int cqi);

// Step-function WiFi rate: the rate of the first step whose distance bound
// covers d, 0 beyond the last step.
double wifi_rate_bps(double distance_m, std::span<const WifiRateStep> steps);

// Worst-case pairwise interference, linear W. Square over an arbitrary node
// list; entry (from, to) is the power node `from` lands on node `to` when
// transmitting at full configured power. Ids are 1-based.
class InterferenceTable {
 public:
  InterferenceTable() = default;
  explicit InterferenceTable(int n_nodes)
      : n_(n_nodes), v_(static_cast<size_t>(n_nodes) * n_nodes, 0.0) {}

  int n_nodes() const { return n_; }
  double at(int from, int to) const {
    return v_[static_cast<size_t>(from - 1) * n_ + (to - 1)];
  }
  double& at(int from, int to) {
    return v_[static_cast<size_t>(from - 1) * n_ + (to - 1)];
  }

  friend bool operator==(const InterferenceTable&, const InterferenceTable&) = default;

 private:
  int n_ = 0;
  std::vector<double> v_;
};

// Builds the table over the given node list: I(n,m) = tx_power(n) *
// path_gain(n,m) for n != m, zero diagonal.
InterferenceTable build_interference_table(std::span<const Position> node_positions,
                                           std::span<const double> tx_powers,
                                           double path_loss_exponent);

struct RadioParams {
  double tx_power_w = 0.2;
  double noise_w = 1e-10;
  double path_loss_exponent = 3.5;
};

// Per-arc CQI for a graph, indexed like graph.arcs. user_positions holds
// users 1..N at index id-1; the base station is at the origin. An optional
// per-arc linear shadowing factor multiplies the path gain. Throws
// std::invalid_argument when a user position is missing.
std::vector<int> estimate_cqi(const NetworkGraph& graph,
                              std::span<const Position> user_positions,
                              const RadioParams& params,
                              std::span<const double> shadow_linear = {});

// Achievable rates of one arc: bits per RB for the LTE modes, bits per
// second over WiFi.
struct LinkRates {
  int bits_per_rb = 0;
  double wifi_bps = 0.0;
};

std::vector<LinkRates> build_rate_table(const NetworkGraph& graph,
                                        std::span<const int> cqi,
                                        std::span<const Position> user_positions,
                                        std::span<const WifiRateStep> wifi_steps);

// Plain-text topology: one `user_id x y` line per user, meters.
std::vector<Position> load_topology_file(const std::string& path, int n_users);

}  // namespace d2dsim
