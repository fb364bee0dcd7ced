#pragma once

#include <array>
#include <iosfwd>
#include <random>
#include <string>
#include <vector>

#include "d2dsim/core.hpp"
#include "d2dsim/radio.hpp"
#include "d2dsim/scheduler.hpp"
#include "d2dsim/selector.hpp"

namespace d2dsim {

// Mutable scenario state carried across mode intervals.
struct ScenarioState {
  int interval = 0;
  std::vector<UserState> states;
  std::vector<Position> positions;
  PfState pf;
  std::mt19937_64 rng;
};

ScenarioState init_scenario(const SimConfig& cfg);

// Advances user positions and states by one mode interval: users move a
// bounded random step, pairs break on the configured probability or when
// stretched beyond D2D range, unpaired users transition through the
// dormant/cellular/seeking chain, and seekers are matched to the nearest
// in-range seeker (ties: lower id); unmatched seekers fall back to cellular.
// The result always passes validate_states.
void evolve_states(ScenarioState& s, const SimConfig& cfg);

// Assembles the interval's activation problem: per-arc legal modes priced by
// the predicted-RB economics, the worst-case interference table, and the
// protected receiver set (every user holding a base-station arc, plus the
// base station).
SelectionProblem build_selection_problem(const NetworkGraph& graph,
                                         std::span<const UserState> states,
                                         std::span<const LinkRates> rates,
                                         const InterferenceTable& interference,
                                         const SimConfig& cfg);

struct ConnectionReport {
  int tx = 0;
  int rx = 0;
  Mode mode = Mode::Cellular;
  int scheduled_subframes = 0;
  double rb_count = 0.0;
  double data_bits = 0.0;
  double energy_j = 0.0;
  double utility = 0.0;
};

struct IntervalReport {
  int interval = 0;
  std::string solver;  // "exact" or "greedy"
  int legal_pair_count = 0;
  double predicted_objective = 0.0;  // selector view, predicted-RB economics
  std::vector<ConnectionReport> connections;
  double total_data_bits = 0.0;
  double total_energy_j = 0.0;
  double total_utility = 0.0;
  std::array<int, 4> mode_counts{};  // active connections per mode
};

struct RunOptions {
  bool record_frames = false;    // keep per-frame allocations (frames CSV)
  bool record_problems = false;  // keep per-interval problems + assignments
};

struct RunTrace {
  std::vector<std::vector<FrameAllocation>> frames;  // per interval
  std::vector<ModeAssignment> assignments;
  std::vector<SelectionProblem> problems;
};

struct RunResult {
  std::vector<IntervalReport> intervals;
  RunTrace trace;
};

// Top-level loop: evolve, rebuild the graph, estimate CQI and interference,
// solve mode selection (exact within the configured budget, greedy beyond),
// schedule the interval's frames, and account the realized economics.
// Deterministic for a given config and seed.
RunResult run(const SimConfig& cfg, const RunOptions& options = {});

// j,tx,rx,mode,B,theta_bits,energy_J,utility — one row per active
// connection per interval.
void write_intervals_csv(std::ostream& out, std::span<const IntervalReport> reports);

// interval,frame,subframe,conn_tx,conn_rx,mode,rb_count — requires a run
// with record_frames.
void write_frames_csv(std::ostream& out, const RunResult& result);

// Totals, per-mode counts, and the solver used per interval.
void write_summary_json(std::ostream& out, const SimConfig& cfg, const RunResult& result);

// Audit log: the CQI threshold/efficiency tables and per-interval solver
// lines.
void write_run_log(std::ostream& out, const SimConfig& cfg, const RunResult& result);

}  // namespace d2dsim
