#include "d2dsim/scheduler.hpp"

#include <algorithm>
#include <stdexcept>

#include "d2dsim/economics.hpp"

namespace d2dsim {

RbPools rb_pools(const SimConfig& cfg, bool any_overlay_active) {
  if (any_overlay_active)
    return {cfg.rb_per_subframe - cfg.overlay_rb_pool, cfg.overlay_rb_pool};
  return {cfg.rb_per_subframe, 0};
}

namespace {

std::tuple<int, int, int> key_of(const ActiveLink& l) {
  return {l.tx, l.rx, static_cast<int>(l.mode)};
}

bool any_overlay(const ModeAssignment& a) {
  return std::any_of(a.links.begin(), a.links.end(),
                     [](const ActiveLink& l) { return l.mode == Mode::Overlay; });
}

}  // namespace

double PfState::average(const ActiveLink& link, const SimConfig& cfg) const {
  const auto it = avg_.find(key_of(link));
  return it == avg_.end() ? cfg.pf_avg_floor_bits : it->second;
}

void PfState::update(const ActiveLink& link, double served_bits, const SimConfig& cfg) {
  const double w = cfg.pf_ewma_weight;
  double& a = avg_.try_emplace(key_of(link), cfg.pf_avg_floor_bits).first->second;
  a = (1.0 - w) * a + w * served_bits;
}

void PfState::retain(std::span<const ActiveLink> active) {
  for (auto it = avg_.begin(); it != avg_.end();) {
    const bool keep = std::any_of(active.begin(), active.end(),
                                  [&](const ActiveLink& l) { return key_of(l) == it->first; });
    it = keep ? std::next(it) : avg_.erase(it);
  }
}

FrameAllocation schedule_frame(const SelectionProblem& p, const ModeAssignment& active,
                               std::span<const LinkRates> conn_rates, PfState& pf,
                               const SimConfig& cfg) {
  if (conn_rates.size() != active.links.size())
    throw std::invalid_argument("conn_rates does not match active connections");
  if (const int c = check_feasibility(p, active); c != 0)
    throw std::invalid_argument("refusing to schedule infeasible assignment (constraint " +
                                std::to_string(c) + ")");

  FrameAllocation frame;
  frame.pools = rb_pools(cfg, any_overlay(active));
  frame.cellular_grant.assign(cfg.subframes_per_frame, -1);

  std::vector<int> cellular;
  for (size_t i = 0; i < active.links.size(); ++i)
    if (active.links[i].mode == Mode::Cellular) cellular.push_back(static_cast<int>(i));

  for (int sf = 0; sf < cfg.subframes_per_frame; ++sf) {
    int winner = -1;
    double best_metric = 0.0;  // a zero-rate connection is never granted
    for (int i : cellular) {
      const double inst_bits =
          static_cast<double>(conn_rates[i].bits_per_rb) * frame.pools.shared;
      const double metric = inst_bits / pf.average(active.links[i], cfg);
      if (metric > best_metric) {
        best_metric = metric;
        winner = i;
      }
    }
    frame.cellular_grant[sf] = winner;
    for (int i : cellular) {
      const double inst_bits =
          static_cast<double>(conn_rates[i].bits_per_rb) * frame.pools.shared;
      pf.update(active.links[i], i == winner ? inst_bits : 0.0, cfg);
    }
  }
  return frame;
}

std::vector<ConnectionTotals> accumulate_interval(const ModeAssignment& active,
                                                  std::span<const FrameAllocation> frames,
                                                  std::span<const LinkRates> conn_rates,
                                                  const SimConfig& cfg) {
  if (conn_rates.size() != active.links.size())
    throw std::invalid_argument("conn_rates does not match active connections");
  const RbPools pools =
      frames.empty() ? rb_pools(cfg, any_overlay(active)) : frames.front().pools;
  const int total_subframes =
      static_cast<int>(frames.size()) * cfg.subframes_per_frame;

  std::vector<ConnectionTotals> totals;
  totals.reserve(active.links.size());
  for (size_t i = 0; i < active.links.size(); ++i) {
    ConnectionTotals t;
    t.link = active.links[i];
    switch (t.link.mode) {
      case Mode::Cellular: {
        int count = 0;
        for (const FrameAllocation& f : frames)
          for (int g : f.cellular_grant)
            if (g == static_cast<int>(i)) ++count;
        t.scheduled_subframes = count;
        t.rb_count = static_cast<double>(count) * pools.shared;
        break;
      }
      case Mode::Underlay:
        t.scheduled_subframes = total_subframes;
        t.rb_count = static_cast<double>(total_subframes) * pools.shared;
        break;
      case Mode::Overlay:
        t.scheduled_subframes = total_subframes;
        t.rb_count = static_cast<double>(total_subframes) * pools.overlay;
        break;
      case Mode::Outband:
        t.scheduled_subframes = total_subframes;
        t.rb_count = 0.0;
        break;
    }
    const LinkEconomics e =
        realized_economics(t.link.mode, conn_rates[i], cfg, t.rb_count);
    t.data_bits = e.data_bits;
    t.energy_j = e.energy_j;
    t.utility = e.utility;
    totals.push_back(t);
  }
  return totals;
}

}  // namespace d2dsim
