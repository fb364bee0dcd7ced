#pragma once

#include <iosfwd>
#include <span>
#include <vector>

#include "d2dsim/core.hpp"
#include "d2dsim/radio.hpp"

namespace d2dsim {

// One candidate mode on an arc together with its per-interval utility.
struct LegalMode {
  Mode mode = Mode::Cellular;
  double utility = 0.0;

  friend bool operator==(const LegalMode&, const LegalMode&) = default;
};

struct ProblemArc {
  int tx = 0;
  int rx = 0;
  std::vector<LegalMode> modes;  // sorted by mode

  friend bool operator==(const ProblemArc&, const ProblemArc&) = default;
};

// One mode interval's activation problem: pick at most one mode per arc and
// at most one active arc per user endpoint (the base station is exempt),
// keeping three interference sums under gamma, to maximize total utility.
struct SelectionProblem {
  int n_nodes = 1;  // ids 1..n_nodes; the base station is node n_nodes
  double gamma = 1.0;
  // Victims of the underlay interference cap: users with a cellular-capable
  // arc this interval, plus the base station itself.
  std::vector<int> protected_receivers;
  std::vector<ProblemArc> arcs;  // sorted by (tx, rx)
  InterferenceTable interference;

  int enb() const { return n_nodes; }

  friend bool operator==(const SelectionProblem&, const SelectionProblem&) = default;
};

struct ActiveLink {
  int tx = 0;
  int rx = 0;
  Mode mode = Mode::Cellular;

  friend bool operator==(const ActiveLink&, const ActiveLink&) = default;
  friend auto operator<=>(const ActiveLink&, const ActiveLink&) = default;
};

struct ModeAssignment {
  std::vector<ActiveLink> links;  // sorted by (tx, rx, mode)
  double objective = 0.0;
};

// Flattened (arc, mode) candidate as the solvers see it.
struct Candidate {
  int arc_index = 0;
  int tx = 0;
  int rx = 0;
  Mode mode = Mode::Cellular;
  double utility = 0.0;
};

// All legal (arc, mode) pairs, sorted by (tx, rx, mode) — the tie-breaking
// order shared by every solver.
std::vector<Candidate> legal_pairs(const SelectionProblem& p);

// Evaluates the five constraints in order and returns the first violated
// constraint id, or 0 when the assignment is feasible:
//   1  a user receives on more than one active arc
//   2  a user transmits on more than one active arc
//   3  active underlay transmitters sum above gamma at a protected receiver
//   4  active cellular+underlay transmitters sum above gamma at an active
//      underlay receiver (other arcs only)
//   5  active overlay transmitters sum above gamma at an active overlay
//      receiver (other arcs only)
// The caps are inclusive: a sum exactly equal to gamma is feasible. Throws
// std::invalid_argument when a link references an unknown arc or an illegal
// mode.
int check_feasibility(const SelectionProblem& p, const ModeAssignment& a);

// Sum of utilities of the given links in canonical (tx, rx, mode) order.
// Both exact solvers report objectives through this one path so that equal
// assignments always produce bit-identical objectives.
double recompute_objective(const SelectionProblem& p, std::span<const ActiveLink> links);

inline constexpr int kBruteForceBudget = 24;

// Exhaustive reference solver: enumerates every subset of legal pairs,
// filters with check_feasibility, and keeps the best objective; ties go to
// the lexicographically smallest sorted link list. Throws std::runtime_error
// above kBruteForceBudget legal pairs.
ModeAssignment brute_force_solve(const SelectionProblem& p);

// Depth-first branch and bound over candidate inclusion, bounded by the sum
// of positive utilities still undecided. Partial assignments are pruned as
// soon as any constraint fails (all five caps only grow when links are
// added, so no completion can repair them). Returns the same assignment as
// brute_force_solve, including the tie-breaking rule.
ModeAssignment exact_solve(const SelectionProblem& p);

// Adds candidates in order of decreasing utility (ties: canonical order)
// whenever the result stays feasible and the utility is positive. Always
// feasible; objective at most the exact optimum.
ModeAssignment greedy_solve(const SelectionProblem& p);

// Plain-text instance format (node count, gamma, protected set, arcs with
// per-mode utilities, full interference matrix). Round-trips exactly.
void write_instance(std::ostream& out, const SelectionProblem& p);
SelectionProblem parse_instance(std::istream& in);
SelectionProblem load_instance_file(const std::string& path);

}  // namespace d2dsim
