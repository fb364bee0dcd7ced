#include "d2dsim/simulator.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <ostream>

#include "d2dsim/economics.hpp"
#include "d2dsim/random.hpp"

#include "json.hpp"

namespace d2dsim {

ScenarioState init_scenario(const SimConfig& cfg) {
  ScenarioState s;
  s.interval = 0;
  s.states.assign(cfg.n_users, UserState::dormant());
  s.rng.seed(cfg.seed);
  if (!cfg.topology_file.empty()) {
    s.positions = load_topology_file(cfg.topology_file, cfg.n_users);
  } else {
    s.positions.resize(cfg.n_users);
    for (int id = 1; id <= cfg.n_users; ++id) {
      const double r = cfg.cell_radius_m * std::sqrt(uniform01(s.rng));
      const double ang = 2.0 * M_PI * uniform01(s.rng);
      s.positions[id - 1] = {r * std::cos(ang), r * std::sin(ang)};
    }
  }
  return s;
}

namespace {

UserClass draw_class(std::mt19937_64& rng, const std::array<double, 3>& row) {
  const double u = uniform01(rng);
  double acc = 0.0;
  for (int c = 0; c < 3; ++c) {
    acc += row[c];
    if (u < acc) return static_cast<UserClass>(c);
  }
  return UserClass::Seeking;
}

}  // namespace

void evolve_states(ScenarioState& s, const SimConfig& cfg) {
  const int n = cfg.n_users;

  // Bounded random step per user, clamped radially to the cell disc.
  if (cfg.max_speed_mps > 0) {
    const double step = cfg.max_speed_mps * cfg.interval_duration_T;
    for (int id = 1; id <= n; ++id) {
      const double ang = 2.0 * M_PI * uniform01(s.rng);
      const double d = step * uniform01(s.rng);
      Position p = s.positions[id - 1];
      p.x += d * std::cos(ang);
      p.y += d * std::sin(ang);
      const double norm = std::hypot(p.x, p.y);
      if (norm > cfg.cell_radius_m) {
        p.x *= cfg.cell_radius_m / norm;
        p.y *= cfg.cell_radius_m / norm;
      }
      s.positions[id - 1] = p;
    }
  }

  // Pair breaks: configured probability, or stretched beyond D2D range.
  // Broken members transition through the seeking row below.
  std::vector<bool> broken(n + 1, false);
  for (int id = 1; id <= n; ++id) {
    const UserState& st = s.states[id - 1];
    if (!st.is_paired() || st.partner < id) continue;
    const double u = uniform01(s.rng);
    const bool snapped =
        distance_m(s.positions[id - 1], s.positions[st.partner - 1]) > cfg.d2d_range_m;
    if (u < cfg.pair_break_prob || snapped) {
      broken[id] = broken[st.partner] = true;
    }
  }

  // Class transitions for everyone not in a surviving pair.
  std::vector<int> seekers;
  for (int id = 1; id <= n; ++id) {
    const UserState& st = s.states[id - 1];
    UserClass row;
    if (st.is_paired()) {
      if (!broken[id]) continue;
      row = UserClass::Seeking;
    } else {
      row = st.is_dormant() ? UserClass::Dormant : UserClass::Cellular;
    }
    switch (draw_class(s.rng, cfg.transition[static_cast<int>(row)])) {
      case UserClass::Dormant:
        s.states[id - 1] = UserState::dormant();
        break;
      case UserClass::Cellular:
        s.states[id - 1] = UserState::cellular();
        break;
      case UserClass::Seeking:
        seekers.push_back(id);
        break;
    }
  }

  // Match seekers to the nearest in-range seeker, ascending id, ties to the
  // lower id. Unmatched seekers fall back to cellular.
  std::vector<bool> taken(n + 1, false);
  for (size_t i = 0; i < seekers.size(); ++i) {
    const int id = seekers[i];
    if (taken[id]) continue;
    int mate = 0;
    double best = cfg.d2d_range_m;
    for (size_t k = i + 1; k < seekers.size(); ++k) {
      const int other = seekers[k];
      if (taken[other]) continue;
      const double d = distance_m(s.positions[id - 1], s.positions[other - 1]);
      if (d <= cfg.d2d_range_m && (mate == 0 || d < best)) {
        best = d;
        mate = other;
      }
    }
    if (mate != 0) {
      s.states[id - 1] = UserState::paired(mate);
      s.states[mate - 1] = UserState::paired(id);
      taken[id] = taken[mate] = true;
    } else {
      s.states[id - 1] = UserState::cellular();
    }
  }

  assert(!validate_states(s.states));
  ++s.interval;
}

SelectionProblem build_selection_problem(const NetworkGraph& graph,
                                         std::span<const UserState> states,
                                         std::span<const LinkRates> rates,
                                         const InterferenceTable& interference,
                                         const SimConfig& cfg) {
  SelectionProblem p;
  p.n_nodes = graph.enb();
  p.gamma = cfg.gamma;
  p.interference = interference;

  for (int id = 1; id <= graph.n_users; ++id)
    if (!states[id - 1].is_dormant()) p.protected_receivers.push_back(id);
  p.protected_receivers.push_back(graph.enb());

  int cellular_candidates = 0;
  for (const Arc& a : graph.arcs)
    if (a.rx == graph.enb()) ++cellular_candidates;

  for (size_t i = 0; i < graph.arcs.size(); ++i) {
    const Arc& a = graph.arcs[i];
    ProblemArc arc{a.tx, a.rx, {}};
    for (Mode mode : {Mode::Cellular, Mode::Underlay, Mode::Overlay, Mode::Outband}) {
      if (!mode_legal(mode, a, graph.enb())) continue;
      const LinkEconomics e =
          predicted_economics(mode, rates[i], cfg, cellular_candidates);
      arc.modes.push_back({mode, e.utility});
    }
    p.arcs.push_back(std::move(arc));
  }
  return p;
}

RunResult run(const SimConfig& cfg, const RunOptions& options) {
  cfg.validate();
  RunResult result;
  ScenarioState s = init_scenario(cfg);

  const std::vector<double> user_powers(cfg.n_users, cfg.tx_power_w);
  const RadioParams radio{cfg.tx_power_w, cfg.noise_w, cfg.path_loss_exponent};

  for (int j = 1; j <= cfg.n_intervals; ++j) {
    evolve_states(s, cfg);
    const NetworkGraph graph = build_graph(s.states, j);

    std::vector<double> shadow;
    if (cfg.shadowing_sigma_db > 0) {
      shadow.reserve(graph.arcs.size());
      for (size_t i = 0; i < graph.arcs.size(); ++i)
        shadow.push_back(
            std::pow(10.0, cfg.shadowing_sigma_db * normal01(s.rng) / 10.0));
    }
    const std::vector<int> cqis = estimate_cqi(graph, s.positions, radio, shadow);
    const std::vector<LinkRates> rates =
        build_rate_table(graph, cqis, s.positions, cfg.wifi_rate_steps);

    std::vector<Position> node_positions(s.positions.begin(), s.positions.end());
    node_positions.push_back(kEnbPosition);
    std::vector<double> node_powers(user_powers);
    node_powers.push_back(cfg.enb_tx_power_w);
    const InterferenceTable interference =
        build_interference_table(node_positions, node_powers, cfg.path_loss_exponent);

    const SelectionProblem problem =
        build_selection_problem(graph, s.states, rates, interference, cfg);
    const size_t pair_count = legal_pairs(problem).size();
    const bool use_exact =
        static_cast<int>(pair_count) <= cfg.exact_budget_pairs;
    const ModeAssignment assignment =
        use_exact ? exact_solve(problem) : greedy_solve(problem);
    if (check_feasibility(problem, assignment) != 0)
      throw std::logic_error("solver produced an infeasible assignment");

    s.pf.retain(assignment.links);

    // Rates per active connection, in assignment order.
    std::vector<LinkRates> conn_rates;
    conn_rates.reserve(assignment.links.size());
    for (const ActiveLink& l : assignment.links) {
      const auto it = std::find(graph.arcs.begin(), graph.arcs.end(), Arc{l.tx, l.rx});
      conn_rates.push_back(rates[it - graph.arcs.begin()]);
    }

    std::vector<FrameAllocation> frames;
    frames.reserve(cfg.frames_per_interval);
    for (int f = 0; f < cfg.frames_per_interval; ++f)
      frames.push_back(schedule_frame(problem, assignment, conn_rates, s.pf, cfg));

    const std::vector<ConnectionTotals> totals =
        accumulate_interval(assignment, frames, conn_rates, cfg);

    IntervalReport report;
    report.interval = j;
    report.solver = use_exact ? "exact" : "greedy";
    report.legal_pair_count = static_cast<int>(pair_count);
    report.predicted_objective = assignment.objective;
    for (const ConnectionTotals& t : totals) {
      report.connections.push_back({t.link.tx, t.link.rx, t.link.mode,
                                    t.scheduled_subframes, t.rb_count, t.data_bits,
                                    t.energy_j, t.utility});
      report.total_data_bits += t.data_bits;
      report.total_energy_j += t.energy_j;
      report.total_utility += t.utility;
      ++report.mode_counts[static_cast<int>(t.link.mode)];
    }
    result.intervals.push_back(std::move(report));

    if (options.record_frames) result.trace.frames.push_back(std::move(frames));
    if (options.record_frames || options.record_problems)
      result.trace.assignments.push_back(assignment);
    if (options.record_problems) result.trace.problems.push_back(problem);
  }
  return result;
}

void write_intervals_csv(std::ostream& out, std::span<const IntervalReport> reports) {
  out << "j,tx,rx,mode,B,theta_bits,energy_J,utility\n";
  for (const IntervalReport& r : reports) {
    for (const ConnectionReport& c : r.connections) {
      out << r.interval << ',' << c.tx << ',' << c.rx << ','
          << static_cast<int>(c.mode) << ',' << fmt_double(c.rb_count) << ','
          << fmt_double(c.data_bits) << ',' << fmt_double(c.energy_j) << ','
          << fmt_double(c.utility) << '\n';
    }
  }
}

void write_frames_csv(std::ostream& out, const RunResult& result) {
  out << "interval,frame,subframe,conn_tx,conn_rx,mode,rb_count\n";
  for (size_t ji = 0; ji < result.trace.frames.size(); ++ji) {
    const int j = static_cast<int>(ji) + 1;
    const ModeAssignment& a = result.trace.assignments.empty()
                                  ? ModeAssignment{}
                                  : result.trace.assignments[ji];
    for (size_t f = 0; f < result.trace.frames[ji].size(); ++f) {
      const FrameAllocation& frame = result.trace.frames[ji][f];
      for (size_t sf = 0; sf < frame.cellular_grant.size(); ++sf) {
        for (size_t ci = 0; ci < a.links.size(); ++ci) {
          const ActiveLink& l = a.links[ci];
          int rb = 0;
          switch (l.mode) {
            case Mode::Cellular:
              rb = frame.cellular_grant[sf] == static_cast<int>(ci) ? frame.pools.shared : 0;
              break;
            case Mode::Underlay: rb = frame.pools.shared; break;
            case Mode::Overlay: rb = frame.pools.overlay; break;
            case Mode::Outband: rb = 0; break;
          }
          out << j << ',' << f << ',' << sf << ',' << l.tx << ',' << l.rx << ','
              << static_cast<int>(l.mode) << ',' << rb << '\n';
        }
      }
    }
  }
}

void write_summary_json(std::ostream& out, const SimConfig& cfg, const RunResult& result) {
  nlohmann::json j;
  j["n_users"] = cfg.n_users;
  j["n_intervals"] = cfg.n_intervals;
  j["seed"] = cfg.seed;
  j["alpha"] = cfg.alpha;
  j["gamma"] = cfg.gamma;

  double data = 0, energy = 0, util = 0, predicted = 0;
  std::array<int, 4> mode_counts{};
  nlohmann::json per_interval = nlohmann::json::array();
  for (const IntervalReport& r : result.intervals) {
    data += r.total_data_bits;
    energy += r.total_energy_j;
    util += r.total_utility;
    predicted += r.predicted_objective;
    for (int m = 0; m < 4; ++m) mode_counts[m] += r.mode_counts[m];
    per_interval.push_back({{"j", r.interval},
                            {"solver", r.solver},
                            {"legal_pairs", r.legal_pair_count},
                            {"predicted_objective", r.predicted_objective},
                            {"realized_utility", r.total_utility},
                            {"active_connections", r.connections.size()}});
  }
  j["totals"] = {{"data_bits", data},
                 {"energy_J", energy},
                 {"utility", util},
                 {"predicted_objective", predicted}};
  j["mode_counts"] = {{"cellular", mode_counts[0]},
                      {"underlay", mode_counts[1]},
                      {"overlay", mode_counts[2]},
                      {"outband", mode_counts[3]}};
  j["per_interval"] = per_interval;
  out << j.dump(2) << '\n';
}

void write_run_log(std::ostream& out, const SimConfig& cfg, const RunResult& result) {
  out << "cqi_snr_thresholds_db:";
  for (double t : cqi_snr_thresholds_db()) out << ' ' << fmt_double(t);
  out << '\n';
  out << "cqi_efficiency:";
  for (double e : cqi_efficiency()) out << ' ' << fmt_double(e);
  out << '\n';
  out << "cqi_bits_per_rb:";
  for (int q = 0; q <= kMaxCqi; ++q) out << ' ' << rate_per_rb(q);
  out << '\n';
  out << "interval_duration_T=" << fmt_double(cfg.interval_duration_T) << '\n';
  for (const IntervalReport& r : result.intervals) {
    out << "interval " << r.interval << ": solver=" << r.solver
        << " legal_pairs=" << r.legal_pair_count
        << " active=" << r.connections.size()
        << " predicted_objective=" << fmt_double(r.predicted_objective)
        << " realized_utility=" << fmt_double(r.total_utility) << '\n';
  }
}

}  // namespace d2dsim
