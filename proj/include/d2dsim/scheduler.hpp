#pragma once

#include <map>
#include <span>
#include <tuple>
#include <vector>

#include "d2dsim/core.hpp"
#include "d2dsim/radio.hpp"
#include "d2dsim/selector.hpp"

namespace d2dsim {

// Per-subframe RB split. The overlay pool is dedicated to Overlay
// connections while any is active and released to the shared pool otherwise.
struct RbPools {
  int shared = 0;
  int overlay = 0;

  friend bool operator==(const RbPools&, const RbPools&) = default;
};

RbPools rb_pools(const SimConfig& cfg, bool any_overlay_active);

// Exponentially averaged served bits/subframe per connection, the PF
// denominator. Averages persist across intervals for connections that stay
// active; a connection first seen starts at the configured floor.
class PfState {
 public:
  double average(const ActiveLink& link, const SimConfig& cfg) const;
  void update(const ActiveLink& link, double served_bits, const SimConfig& cfg);

  // Drops state for connections not in the active set.
  void retain(std::span<const ActiveLink> active);

  size_t size() const { return avg_.size(); }

 private:
  std::map<std::tuple<int, int, int>, double> avg_;
};

// RB grants over one frame. Cellular connections compete for a single grant
// per subframe; every other active connection transmits in all subframes
// (Underlay/Overlay on their pool, Outband without RBs).
struct FrameAllocation {
  RbPools pools;
  // Per subframe: index into the assignment's links of the Cellular
  // connection granted the shared pool, or -1.
  std::vector<int> cellular_grant;
};

// Schedules one frame: per subframe the Cellular connection with the highest
// instantaneous-rate / average ratio wins (ties: lowest connection index);
// averages are updated after every subframe. conn_rates is indexed like
// active.links. Throws std::invalid_argument when the assignment fails
// check_feasibility.
FrameAllocation schedule_frame(const SelectionProblem& p, const ModeAssignment& active,
                               std::span<const LinkRates> conn_rates, PfState& pf,
                               const SimConfig& cfg);

// Realized per-interval accounting of one connection.
struct ConnectionTotals {
  ActiveLink link;
  int scheduled_subframes = 0;
  double rb_count = 0.0;  // granted RBs over the interval
  double data_bits = 0.0;
  double energy_j = 0.0;
  double utility = 0.0;
};

// Folds a mode interval's frames into per-connection RB counts and their
// economics. Outband data depends only on the interval duration, never on
// frames.
std::vector<ConnectionTotals> accumulate_interval(const ModeAssignment& active,
                                                  std::span<const FrameAllocation> frames,
                                                  std::span<const LinkRates> conn_rates,
                                                  const SimConfig& cfg);

}  // namespace d2dsim
