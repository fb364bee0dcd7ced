#include "d2dsim/core.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

namespace d2dsim {

const char* mode_name(Mode m) {
  switch (m) {
    case Mode::Cellular: return "cellular";
    case Mode::Underlay: return "underlay";
    case Mode::Overlay: return "overlay";
    case Mode::Outband: return "outband";
  }
  return "?";
}

int UserState::code(int n_users) const {
  switch (kind) {
    case Kind::Dormant: return 0;
    case Kind::Paired: return partner;
    case Kind::Cellular: return n_users + 1;
  }
  return 0;
}

std::optional<StateViolation> validate_states(std::span<const UserState> states) {
  const int n = static_cast<int>(states.size());
  for (int id = 1; id <= n; ++id) {
    const UserState& s = states[id - 1];
    if (!s.is_paired()) continue;
    const int m = s.partner;
    if (m == id) return StateViolation{id, m, "user paired with itself"};
    if (m < 1 || m > n) return StateViolation{id, m, "partner id out of range"};
    const UserState& p = states[m - 1];
    if (!p.is_paired() || p.partner != id)
      return StateViolation{id, m, "pairing not reciprocated"};
  }
  return std::nullopt;
}

int NetworkGraph::degree(int node) const {
  int d = 0;
  for (const Arc& a : arcs)
    if (a.tx == node || a.rx == node) ++d;
  return d;
}

NetworkGraph build_graph(std::span<const UserState> states, int interval) {
  if (auto v = validate_states(states)) {
    throw std::invalid_argument("invalid state vector at users (" +
                                std::to_string(v->user) + ", " +
                                std::to_string(v->partner) + "): " + v->reason);
  }
  const int n = static_cast<int>(states.size());
  NetworkGraph g{n, interval, {}};
  const int enb = g.enb();
  for (int id = 1; id <= n; ++id) {
    const UserState& s = states[id - 1];
    if (s.is_cellular()) {
      g.arcs.push_back({id, enb});
    } else if (s.is_paired()) {
      if (id < s.partner) g.arcs.push_back({id, s.partner});
      g.arcs.push_back({id, enb});
    }
  }
  std::sort(g.arcs.begin(), g.arcs.end());
  return g;
}

bool mode_legal(Mode mode, const Arc& arc, int enb) {
  const bool enb_arc = arc.tx == enb || arc.rx == enb;
  if (mode == Mode::Cellular) return enb_arc;
  return !enb_arc;
}

// ---------------------------------------------------------------------------
// Configuration file format: one `key=value` per line, `#` starts a comment.

namespace {

std::string trim(std::string s) {
  const auto notspace = [](unsigned char c) { return !std::isspace(c); };
  s.erase(s.begin(), std::find_if(s.begin(), s.end(), notspace));
  s.erase(std::find_if(s.rbegin(), s.rend(), notspace).base(), s.end());
  return s;
}

double parse_double_value(const std::string& key, const std::string& v) {
  double out = 0.0;
  const char* b = v.data();
  const char* e = v.data() + v.size();
  auto res = std::from_chars(b, e, out);
  if (res.ec != std::errc{} || res.ptr != e)
    throw ConfigError("config key '" + key + "': bad number '" + v + "'");
  return out;
}

long long parse_int_value(const std::string& key, const std::string& v) {
  long long out = 0;
  const char* b = v.data();
  const char* e = v.data() + v.size();
  auto res = std::from_chars(b, e, out);
  if (res.ec != std::errc{} || res.ptr != e)
    throw ConfigError("config key '" + key + "': bad integer '" + v + "'");
  return out;
}

std::uint64_t parse_u64_value(const std::string& key, const std::string& v) {
  std::uint64_t out = 0;
  const char* b = v.data();
  const char* e = v.data() + v.size();
  auto res = std::from_chars(b, e, out);
  if (res.ec != std::errc{} || res.ptr != e)
    throw ConfigError("config key '" + key + "': bad unsigned '" + v + "'");
  return out;
}

// "10:54e6,30:24e6,50:6e6" -> steps sorted as given
std::vector<WifiRateStep> parse_wifi_steps(const std::string& v) {
  std::vector<WifiRateStep> steps;
  std::stringstream ss(v);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (item.empty()) continue;
    const auto colon = item.find(':');
    if (colon == std::string::npos)
      throw ConfigError("wifi_rate_steps: expected dist:rate, got '" + item + "'");
    steps.push_back({parse_double_value("wifi_rate_steps", trim(item.substr(0, colon))),
                     parse_double_value("wifi_rate_steps", trim(item.substr(colon + 1)))});
  }
  return steps;
}

std::string wifi_steps_to_string(std::span<const WifiRateStep> steps) {
  std::string out;
  for (const WifiRateStep& s : steps) {
    if (!out.empty()) out += ',';
    out += fmt_double(s.max_distance_m) + ':' + fmt_double(s.rate_bps);
  }
  return out;
}

const char* kClassNames[3] = {"dormant", "cellular", "seeking"};

}  // namespace

SimConfig parse_config(std::istream& in) {
  SimConfig cfg;
  std::optional<double> given_duration;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (const auto hash = line.find('#'); hash != std::string::npos)
      line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError("config line " + std::to_string(lineno) +
                        ": expected key=value, got '" + line + "'");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));

    bool matched = true;
    if (key == "n_users") cfg.n_users = static_cast<int>(parse_int_value(key, value));
    else if (key == "n_intervals") cfg.n_intervals = static_cast<int>(parse_int_value(key, value));
    else if (key == "rb_per_subframe") cfg.rb_per_subframe = static_cast<int>(parse_int_value(key, value));
    else if (key == "subframes_per_frame") cfg.subframes_per_frame = static_cast<int>(parse_int_value(key, value));
    else if (key == "frames_per_interval") cfg.frames_per_interval = static_cast<int>(parse_int_value(key, value));
    else if (key == "interval_duration_T") given_duration = parse_double_value(key, value);
    else if (key == "alpha") cfg.alpha = parse_double_value(key, value);
    else if (key == "gamma") cfg.gamma = parse_double_value(key, value);
    else if (key == "overlay_rb_pool") cfg.overlay_rb_pool = static_cast<int>(parse_int_value(key, value));
    else if (key == "beta_wifi") cfg.beta_wifi = parse_double_value(key, value);
    else if (key == "pair_break_prob") cfg.pair_break_prob = parse_double_value(key, value);
    else if (key == "cell_radius_m") cfg.cell_radius_m = parse_double_value(key, value);
    else if (key == "d2d_range_m") cfg.d2d_range_m = parse_double_value(key, value);
    else if (key == "max_speed_mps") cfg.max_speed_mps = parse_double_value(key, value);
    else if (key == "path_loss_exponent") cfg.path_loss_exponent = parse_double_value(key, value);
    else if (key == "tx_power_w") cfg.tx_power_w = parse_double_value(key, value);
    else if (key == "enb_tx_power_w") cfg.enb_tx_power_w = parse_double_value(key, value);
    else if (key == "noise_w") cfg.noise_w = parse_double_value(key, value);
    else if (key == "shadowing_sigma_db") cfg.shadowing_sigma_db = parse_double_value(key, value);
    else if (key == "wifi_rate_steps") cfg.wifi_rate_steps = parse_wifi_steps(value);
    else if (key == "pf_ewma_weight") cfg.pf_ewma_weight = parse_double_value(key, value);
    else if (key == "pf_avg_floor_bits") cfg.pf_avg_floor_bits = parse_double_value(key, value);
    else if (key == "exact_budget_pairs") cfg.exact_budget_pairs = static_cast<int>(parse_int_value(key, value));
    else if (key == "seed") cfg.seed = parse_u64_value(key, value);
    else if (key == "topology_file") cfg.topology_file = value;
    else matched = false;

    if (matched) continue;

    if (key.rfind("p_tx_mode", 0) == 0 || key.rfind("p_rx_mode", 0) == 0) {
      if (key.size() != 10 || key[9] < '0' || key[9] > '3')
        throw ConfigError("unknown config key '" + key + "'");
      const int mode = key[9] - '0';
      double& slot = key[2] == 't' ? cfg.mode_power[mode].tx : cfg.mode_power[mode].rx;
      slot = parse_double_value(key, value);
      continue;
    }
    if (key.rfind("trans_", 0) == 0) {
      const std::string rest = key.substr(6);
      const auto us = rest.find('_');
      int row = -1, col = -1;
      if (us != std::string::npos) {
        const std::string from = rest.substr(0, us), to = rest.substr(us + 1);
        for (int i = 0; i < 3; ++i) {
          if (from == kClassNames[i]) row = i;
          if (to == kClassNames[i]) col = i;
        }
      }
      if (row < 0 || col < 0)
        throw ConfigError("unknown config key '" + key + "'");
      cfg.transition[row][col] = parse_double_value(key, value);
      continue;
    }
    throw ConfigError("unknown config key '" + key + "'");
  }

  cfg.interval_duration_T = cfg.derived_interval_duration();
  if (given_duration) {
    const double d = cfg.interval_duration_T;
    if (std::abs(*given_duration - d) > 1e-9 * std::max(1.0, std::abs(d)))
      throw ConfigError(
          "interval_duration_T=" + fmt_double(*given_duration) +
          " conflicts with frames_per_interval*subframes_per_frame*1ms=" +
          fmt_double(d));
  }
  return cfg;
}

SimConfig load_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config file: " + path);
  return parse_config(in);
}

void SimConfig::validate() const {
  const auto fail = [](const std::string& msg) { throw ConfigError("config: " + msg); };
  if (n_users < 0) fail("n_users must be >= 0");
  if (n_intervals < 0) fail("n_intervals must be >= 0");
  if (rb_per_subframe < 1) fail("rb_per_subframe must be >= 1");
  if (subframes_per_frame < 1) fail("subframes_per_frame must be >= 1");
  if (frames_per_interval < 1) fail("frames_per_interval must be >= 1");
  if (!(overlay_rb_pool > 0 && overlay_rb_pool < rb_per_subframe))
    fail("overlay_rb_pool must satisfy 0 < overlay_rb_pool < rb_per_subframe");
  if (alpha < 0) fail("alpha must be >= 0");
  if (!(gamma > 0)) fail("gamma must be > 0");
  for (const ModePower& p : mode_power)
    if (p.tx < 0 || p.rx < 0) fail("energy parameters must be >= 0");
  if (beta_wifi < 0) fail("beta_wifi must be >= 0");
  for (int r = 0; r < 3; ++r) {
    double sum = 0;
    for (int c = 0; c < 3; ++c) {
      if (transition[r][c] < 0 || transition[r][c] > 1)
        fail(std::string("trans_") + kClassNames[r] + "_" + kClassNames[c] +
             " must be in [0,1]");
      sum += transition[r][c];
    }
    if (std::abs(sum - 1.0) > 1e-9)
      fail(std::string("transition row '") + kClassNames[r] + "' must sum to 1");
  }
  if (pair_break_prob < 0 || pair_break_prob > 1)
    fail("pair_break_prob must be in [0,1]");
  if (!(cell_radius_m > 0)) fail("cell_radius_m must be > 0");
  if (!(d2d_range_m > 0)) fail("d2d_range_m must be > 0");
  if (max_speed_mps < 0) fail("max_speed_mps must be >= 0");
  if (!(path_loss_exponent > 0)) fail("path_loss_exponent must be > 0");
  if (!(tx_power_w > 0)) fail("tx_power_w must be > 0");
  if (enb_tx_power_w < 0) fail("enb_tx_power_w must be >= 0");
  if (!(noise_w > 0)) fail("noise_w must be > 0");
  if (shadowing_sigma_db < 0) fail("shadowing_sigma_db must be >= 0");
  double prev = 0.0;
  for (const WifiRateStep& s : wifi_rate_steps) {
    if (s.max_distance_m <= prev)
      fail("wifi_rate_steps distances must be strictly increasing");
    if (s.rate_bps < 0) fail("wifi_rate_steps rates must be >= 0");
    prev = s.max_distance_m;
  }
  if (!(pf_ewma_weight > 0 && pf_ewma_weight <= 1))
    fail("pf_ewma_weight must be in (0,1]");
  if (!(pf_avg_floor_bits > 0)) fail("pf_avg_floor_bits must be > 0");
  if (exact_budget_pairs < 0) fail("exact_budget_pairs must be >= 0");
  const double d = derived_interval_duration();
  if (std::abs(interval_duration_T - d) > 1e-9 * std::max(1.0, std::abs(d)))
    fail("interval_duration_T inconsistent with frame counts");
}

void write_config(std::ostream& out, const SimConfig& cfg) {
  const auto kv = [&out](const std::string& k, const std::string& v) {
    out << k << '=' << v << '\n';
  };
  kv("n_users", std::to_string(cfg.n_users));
  kv("n_intervals", std::to_string(cfg.n_intervals));
  kv("rb_per_subframe", std::to_string(cfg.rb_per_subframe));
  kv("subframes_per_frame", std::to_string(cfg.subframes_per_frame));
  kv("frames_per_interval", std::to_string(cfg.frames_per_interval));
  kv("interval_duration_T", fmt_double(cfg.interval_duration_T));
  kv("alpha", fmt_double(cfg.alpha));
  kv("gamma", fmt_double(cfg.gamma));
  kv("overlay_rb_pool", std::to_string(cfg.overlay_rb_pool));
  for (int m = 0; m < 4; ++m) {
    kv("p_tx_mode" + std::to_string(m), fmt_double(cfg.mode_power[m].tx));
    kv("p_rx_mode" + std::to_string(m), fmt_double(cfg.mode_power[m].rx));
  }
  kv("beta_wifi", fmt_double(cfg.beta_wifi));
  for (int r = 0; r < 3; ++r)
    for (int c = 0; c < 3; ++c)
      kv(std::string("trans_") + kClassNames[r] + "_" + kClassNames[c],
         fmt_double(cfg.transition[r][c]));
  kv("pair_break_prob", fmt_double(cfg.pair_break_prob));
  kv("cell_radius_m", fmt_double(cfg.cell_radius_m));
  kv("d2d_range_m", fmt_double(cfg.d2d_range_m));
  kv("max_speed_mps", fmt_double(cfg.max_speed_mps));
  kv("path_loss_exponent", fmt_double(cfg.path_loss_exponent));
  kv("tx_power_w", fmt_double(cfg.tx_power_w));
  kv("enb_tx_power_w", fmt_double(cfg.enb_tx_power_w));
  kv("noise_w", fmt_double(cfg.noise_w));
  kv("shadowing_sigma_db", fmt_double(cfg.shadowing_sigma_db));
  kv("wifi_rate_steps", wifi_steps_to_string(cfg.wifi_rate_steps));
  kv("pf_ewma_weight", fmt_double(cfg.pf_ewma_weight));
  kv("pf_avg_floor_bits", fmt_double(cfg.pf_avg_floor_bits));
  kv("exact_budget_pairs", std::to_string(cfg.exact_budget_pairs));
  kv("seed", std::to_string(cfg.seed));
  if (!cfg.topology_file.empty()) kv("topology_file", cfg.topology_file);
}

}  // namespace d2dsim
