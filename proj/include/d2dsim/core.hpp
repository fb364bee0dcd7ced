#pragma once

#include <array>
#include <charconv>
#include <cstdint>
#include <cstdio>
#include <iosfwd>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace d2dsim {

// Node ids are 1-based. Users occupy 1..N; the base station is the
// distinguished node N+1 and is never a "user".
inline int enb_id(int n_users) { return n_users + 1; }

inline constexpr double kSubframeSeconds = 1e-3;

// Operating mode of an active connection.
enum class Mode : int {
  Cellular = 0,  // relayed through the base station, shared RB pool
  Underlay = 1,  // direct link reusing the shared RB pool
  Overlay = 2,   // direct link on the dedicated RB pool
  Outband = 3,   // direct link over WiFi, no RBs
};

const char* mode_name(Mode m);

// Per-user communication state over one mode interval. A paired user names
// her partner; pairing must be reciprocal across the state vector.
struct UserState {
  enum class Kind : int { Dormant = 0, Cellular = 1, Paired = 2 };

  Kind kind = Kind::Dormant;
  int partner = 0;  // valid iff kind == Paired

  static UserState dormant() { return {}; }
  static UserState cellular() { return {Kind::Cellular, 0}; }
  static UserState paired(int partner) { return {Kind::Paired, partner}; }

  bool is_dormant() const { return kind == Kind::Dormant; }
  bool is_cellular() const { return kind == Kind::Cellular; }
  bool is_paired() const { return kind == Kind::Paired; }

  // Scalar state code: 0 dormant, partner id when paired, N+1 cellular.
  int code(int n_users) const;

  friend bool operator==(const UserState&, const UserState&) = default;
};

// First inconsistency found in a state vector.
struct StateViolation {
  int user = 0;
  int partner = 0;
  std::string reason;
};

// Checks pairing consistency: a paired user must name a distinct in-range
// partner who names her back. Returns the first offending pair, nullopt when
// the vector is consistent.
std::optional<StateViolation> validate_states(std::span<const UserState> states);

// One arc with its designated direction for the whole mode interval: the
// lower-id member transmits on user-user arcs, the user transmits on arcs to
// the base station.
struct Arc {
  int tx = 0;
  int rx = 0;

  friend bool operator==(const Arc&, const Arc&) = default;
  friend auto operator<=>(const Arc&, const Arc&) = default;
};

// Communication graph of one mode interval. Dormant users are isolated,
// cellular users hold a single arc to the base station, and each D2D pair
// contributes its direct arc plus one base-station arc per member, so the
// graph never has more than 3N/2 arcs.
struct NetworkGraph {
  int n_users = 0;
  int interval = 0;
  std::vector<Arc> arcs;  // sorted by (tx, rx)

  int enb() const { return enb_id(n_users); }
  int degree(int node) const;
};

// Builds the interval graph from a validated state vector. Throws
// std::invalid_argument when the vector fails validate_states.
NetworkGraph build_graph(std::span<const UserState> states, int interval);

// Cellular is legal only on arcs incident to the base station; the three D2D
// modes only on direct user-user arcs.
bool mode_legal(Mode mode, const Arc& arc, int enb);

// Coarse user classes driving state evolution between intervals.
enum class UserClass : int { Dormant = 0, Cellular = 1, Seeking = 2 };

struct ModePower {
  double tx = 0.0;  // J per RB for LTE modes, J per bit for Outband
  double rx = 0.0;
};

struct WifiRateStep {
  double max_distance_m = 0.0;
  double rate_bps = 0.0;

  friend bool operator==(const WifiRateStep&, const WifiRateStep&) = default;
};

// Raised for malformed configuration, instances, or unreadable input files.
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Full scenario configuration. Loadable from a key=value file where every
// key carries the field name below; later occurrences of a key win.
struct SimConfig {
  int n_users = 0;
  int n_intervals = 10;
  int rb_per_subframe = 100;
  int subframes_per_frame = 10;
  int frames_per_interval = 200;
  // Derived: frames_per_interval * subframes_per_frame * 1 ms. The key is
  // accepted on input only when consistent with the derivation.
  double interval_duration_T = 2.0;

  double alpha = 0.0;  // relative energy cost in the utility
  double gamma = 1e-6; // interference threshold, linear W
  int overlay_rb_pool = 20;

  // Energy per RB (modes 0-2) / per bit (mode 3), transmit and receive side.
  std::array<ModePower, 4> mode_power{
      ModePower{2e-6, 1e-6}, ModePower{2e-6, 1e-6}, ModePower{2e-6, 1e-6},
      ModePower{1e-8, 1e-8}};
  double beta_wifi = 0.05;  // WiFi baseline J per endpoint per interval

  // Rows: current class dormant/cellular/seeking; columns likewise. The
  // seeking row applies to members of pairs that just broke.
  std::array<std::array<double, 3>, 3> transition{
      std::array<double, 3>{0.7, 0.2, 0.1},
      std::array<double, 3>{0.1, 0.7, 0.2},
      std::array<double, 3>{0.0, 1.0, 0.0}};
  double pair_break_prob = 0.1;

  double cell_radius_m = 500.0;
  double d2d_range_m = 50.0;
  double max_speed_mps = 1.0;

  double path_loss_exponent = 3.5;
  double tx_power_w = 0.2;
  double enb_tx_power_w = 1.0;
  double noise_w = 1e-10;
  double shadowing_sigma_db = 0.0;

  std::vector<WifiRateStep> wifi_rate_steps{
      {10.0, 54e6}, {30.0, 24e6}, {50.0, 6e6}};

  double pf_ewma_weight = 0.01;
  double pf_avg_floor_bits = 1.0;
  int exact_budget_pairs = 24;

  std::uint64_t seed = 1;
  std::string topology_file;

  int subframes_per_interval() const {
    return frames_per_interval * subframes_per_frame;
  }
  double derived_interval_duration() const {
    return frames_per_interval * subframes_per_frame * kSubframeSeconds;
  }

  // Throws ConfigError on any violated invariant.
  void validate() const;
};

SimConfig parse_config(std::istream& in);
SimConfig load_config_file(const std::string& path);

// Writes the fully resolved configuration in the same key=value format; the
// output re-parses to an identical SimConfig.
void write_config(std::ostream& out, const SimConfig& cfg);

// Shortest round-trip-exact decimal rendering of a double.
inline std::string fmt_double(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

}  // namespace d2dsim
