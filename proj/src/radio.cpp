#include "d2dsim/radio.hpp"

#include <array>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace d2dsim {

double distance_m(Position a, Position b) {
  return std::hypot(a.x - b.x, a.y - b.y);
}

double path_gain(Position a, Position b, double exponent) {
  const double d = std::max(distance_m(a, b), 1.0);
  return std::pow(d, -exponent);
}

namespace {

// 15 thresholds, -6.7 dB to 22.7 dB inclusive (2.1 dB apart).
constexpr std::array<double, 15> kCqiThresholdsDb = {
    -6.7, -4.6, -2.5, -0.4, 1.7, 3.8, 5.9, 8.0, 10.1, 12.2, 14.3, 16.4,
    18.5, 20.6, 22.7};

// 36.213 table 7.2.3-1 efficiency column, CQI 1..15.
constexpr std::array<double, 15> kCqiEfficiency = {
    0.1523, 0.2344, 0.3770, 0.6016, 0.8770, 1.1758, 1.4766, 1.9141,
    2.4063, 2.7305, 3.3223, 3.9023, 4.5234, 5.1152, 5.5547};

}  // namespace

std::span<const double, 15> cqi_snr_thresholds_db() { return kCqiThresholdsDb; }
std::span<const double, 15> cqi_efficiency() { return kCqiEfficiency; }

int snr_to_cqi_db(double snr_db) {
  int cqi = 0;
  while (cqi < kMaxCqi && snr_db >= kCqiThresholdsDb[cqi]) ++cqi;
  return cqi;
}

int snr_to_cqi(double snr_linear) {
  if (snr_linear <= 0.0) return 0;
  return snr_to_cqi_db(10.0 * std::log10(snr_linear));
}

int rate_per_rb(int cqi) {
  if (cqi < 0 || cqi > kMaxCqi)
    throw std::out_of_range("cqi out of range: " + std::to_string(cqi));
  if (cqi == 0) return 0;
  return static_cast<int>(kResourceElementsPerRb * kCqiEfficiency[cqi - 1]);
}

double wifi_rate_bps(double distance_m, std::span<const WifiRateStep> steps) {
  for (const WifiRateStep& s : steps)
    if (distance_m <= s.max_distance_m) return s.rate_bps;
  return 0.0;
}

InterferenceTable build_interference_table(std::span<const Position> node_positions,
                                           std::span<const double> tx_powers,
                                           double path_loss_exponent) {
  const int n = static_cast<int>(node_positions.size());
  if (static_cast<int>(tx_powers.size()) != n)
    throw std::invalid_argument("tx_powers size does not match node count");
  InterferenceTable table(n);
  for (int from = 1; from <= n; ++from) {
    for (int to = 1; to <= n; ++to) {
      if (from == to) continue;
      table.at(from, to) =
          tx_powers[from - 1] *
          path_gain(node_positions[from - 1], node_positions[to - 1], path_loss_exponent);
    }
  }
  return table;
}

std::vector<int> estimate_cqi(const NetworkGraph& graph,
                              std::span<const Position> user_positions,
                              const RadioParams& params,
                              std::span<const double> shadow_linear) {
  const auto pos = [&](int node) -> Position {
    if (node == graph.enb()) return kEnbPosition;
    if (node < 1 || node > static_cast<int>(user_positions.size()))
      throw std::invalid_argument("missing position for user " + std::to_string(node));
    return user_positions[node - 1];
  };
  if (!shadow_linear.empty() && shadow_linear.size() != graph.arcs.size())
    throw std::invalid_argument("shadowing factors do not match arc count");

  std::vector<int> cqis;
  cqis.reserve(graph.arcs.size());
  for (size_t i = 0; i < graph.arcs.size(); ++i) {
    const Arc& a = graph.arcs[i];
    double gain = path_gain(pos(a.tx), pos(a.rx), params.path_loss_exponent);
    if (!shadow_linear.empty()) gain *= shadow_linear[i];
    cqis.push_back(snr_to_cqi(params.tx_power_w * gain / params.noise_w));
  }
  return cqis;
}

std::vector<LinkRates> build_rate_table(const NetworkGraph& graph,
                                        std::span<const int> cqi,
                                        std::span<const Position> user_positions,
                                        std::span<const WifiRateStep> wifi_steps) {
  if (cqi.size() != graph.arcs.size())
    throw std::invalid_argument("cqi vector does not match arc count");
  std::vector<LinkRates> rates;
  rates.reserve(graph.arcs.size());
  for (size_t i = 0; i < graph.arcs.size(); ++i) {
    const Arc& a = graph.arcs[i];
    LinkRates r;
    r.bits_per_rb = rate_per_rb(cqi[i]);
    if (a.rx != graph.enb())
      r.wifi_bps = wifi_rate_bps(
          distance_m(user_positions[a.tx - 1], user_positions[a.rx - 1]), wifi_steps);
    rates.push_back(r);
  }
  return rates;
}

std::vector<Position> load_topology_file(const std::string& path, int n_users) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read topology file: " + path);
  std::vector<Position> positions(n_users);
  std::vector<bool> seen(n_users, false);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    std::istringstream ss(line);
    int id;
    double x, y;
    if (!(ss >> id)) continue;  // blank line
    if (!(ss >> x >> y))
      throw ConfigError("topology file line " + std::to_string(lineno) +
                        ": expected 'user_id x y'");
    if (id < 1 || id > n_users)
      throw ConfigError("topology file line " + std::to_string(lineno) +
                        ": user id " + std::to_string(id) + " out of range");
    positions[id - 1] = {x, y};
    seen[id - 1] = true;
  }
  for (int i = 0; i < n_users; ++i)
    if (!seen[i])
      throw ConfigError("topology file missing user " + std::to_string(i + 1));
  return positions;
}

}  // namespace d2dsim
