#include "d2dsim/selector.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

namespace d2dsim {

namespace {

bool lex_less(std::span<const ActiveLink> a, std::span<const ActiveLink> b) {
  return std::lexicographical_compare(a.begin(), a.end(), b.begin(), b.end());
}

const ProblemArc* find_arc(const SelectionProblem& p, int tx, int rx) {
  for (const ProblemArc& arc : p.arcs)
    if (arc.tx == tx && arc.rx == rx) return &arc;
  return nullptr;
}

double find_utility(const SelectionProblem& p, const ActiveLink& link) {
  if (const ProblemArc* arc = find_arc(p, link.tx, link.rx)) {
    for (const LegalMode& m : arc->modes)
      if (m.mode == link.mode) return m.utility;
  }
  throw std::invalid_argument("assignment references unknown arc/mode (" +
                              std::to_string(link.tx) + "," + std::to_string(link.rx) +
                              ") mode " + std::to_string(static_cast<int>(link.mode)));
}

// Constraint evaluation on links already known to reference legal pairs.
int check_constraints(const SelectionProblem& p, std::span<const ActiveLink> links) {
  const int enb = p.enb();

  // 1, 2: at most one active arc per user endpoint, base station exempt.
  std::vector<int> rx_deg(p.n_nodes + 1, 0), tx_deg(p.n_nodes + 1, 0);
  for (const ActiveLink& l : links)
    if (l.rx != enb && ++rx_deg[l.rx] > 1) return 1;
  for (const ActiveLink& l : links)
    if (l.tx != enb && ++tx_deg[l.tx] > 1) return 2;

  // 3: total underlay interference at every protected receiver.
  for (int x : p.protected_receivers) {
    double sum = 0.0;
    for (const ActiveLink& l : links)
      if (l.mode == Mode::Underlay) sum += p.interference.at(l.tx, x);
    if (sum > p.gamma) return 3;
  }

  // 4: cellular + underlay interference at each active underlay receiver.
  for (size_t i = 0; i < links.size(); ++i) {
    if (links[i].mode != Mode::Underlay) continue;
    double sum = 0.0;
    for (size_t k = 0; k < links.size(); ++k) {
      if (k == i) continue;
      if (links[k].mode == Mode::Cellular || links[k].mode == Mode::Underlay)
        sum += p.interference.at(links[k].tx, links[i].rx);
    }
    if (sum > p.gamma) return 4;
  }

  // 5: overlay interference at each active overlay receiver.
  for (size_t i = 0; i < links.size(); ++i) {
    if (links[i].mode != Mode::Overlay) continue;
    double sum = 0.0;
    for (size_t k = 0; k < links.size(); ++k) {
      if (k == i) continue;
      if (links[k].mode == Mode::Overlay)
        sum += p.interference.at(links[k].tx, links[i].rx);
    }
    if (sum > p.gamma) return 5;
  }

  return 0;
}

ModeAssignment finish(const SelectionProblem& p, std::vector<ActiveLink> links) {
  std::sort(links.begin(), links.end());
  ModeAssignment a{std::move(links), 0.0};
  a.objective = recompute_objective(p, a.links);
  return a;
}

}  // namespace

std::vector<Candidate> legal_pairs(const SelectionProblem& p) {
  for (int x : p.protected_receivers)
    if (x < 1 || x > p.n_nodes)
      throw std::invalid_argument("protected receiver out of range: " +
                                  std::to_string(x));
  std::vector<Candidate> pairs;
  for (size_t i = 0; i < p.arcs.size(); ++i) {
    const ProblemArc& arc = p.arcs[i];
    if (arc.tx < 1 || arc.tx > p.n_nodes || arc.rx < 1 || arc.rx > p.n_nodes)
      throw std::invalid_argument("arc endpoint out of range (" +
                                  std::to_string(arc.tx) + "," +
                                  std::to_string(arc.rx) + ")");
    if (arc.tx == arc.rx)
      throw std::invalid_argument("self arc (" + std::to_string(arc.tx) + ")");
    for (size_t k = 0; k < i; ++k)
      if (p.arcs[k].tx == arc.tx && p.arcs[k].rx == arc.rx)
        throw std::invalid_argument("duplicate arc (" + std::to_string(arc.tx) +
                                    "," + std::to_string(arc.rx) + ")");
    for (const LegalMode& m : arc.modes) {
      if (!mode_legal(m.mode, {arc.tx, arc.rx}, p.enb()))
        throw std::invalid_argument(
            "mode " + std::to_string(static_cast<int>(m.mode)) +
            " is not legal on arc (" + std::to_string(arc.tx) + "," +
            std::to_string(arc.rx) + ")");
      pairs.push_back({static_cast<int>(i), arc.tx, arc.rx, m.mode, m.utility});
    }
  }
  std::sort(pairs.begin(), pairs.end(), [](const Candidate& a, const Candidate& b) {
    return std::tie(a.tx, a.rx, a.mode) < std::tie(b.tx, b.rx, b.mode);
  });
  for (size_t i = 1; i < pairs.size(); ++i)
    if (pairs[i].tx == pairs[i - 1].tx && pairs[i].rx == pairs[i - 1].rx &&
        pairs[i].mode == pairs[i - 1].mode)
      throw std::invalid_argument("duplicate (arc, mode) pair");
  return pairs;
}

int check_feasibility(const SelectionProblem& p, const ModeAssignment& a) {
  for (const ActiveLink& l : a.links) find_utility(p, l);  // throws on unknown
  return check_constraints(p, a.links);
}

double recompute_objective(const SelectionProblem& p, std::span<const ActiveLink> links) {
  std::vector<ActiveLink> sorted(links.begin(), links.end());
  std::sort(sorted.begin(), sorted.end());
  double sum = 0.0;
  for (const ActiveLink& l : sorted) sum += find_utility(p, l);
  return sum;
}

ModeAssignment brute_force_solve(const SelectionProblem& p) {
  const std::vector<Candidate> pairs = legal_pairs(p);
  const int k = static_cast<int>(pairs.size());
  if (k > kBruteForceBudget)
    throw std::runtime_error("brute force budget exceeded: " + std::to_string(k) +
                             " legal pairs, budget " + std::to_string(kBruteForceBudget));

  ModeAssignment best;  // empty set, objective 0, always feasible
  std::vector<ActiveLink> links;
  for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << k); ++mask) {
    links.clear();
    for (int i = 0; i < k; ++i)
      if (mask & (std::uint64_t{1} << i))
        links.push_back({pairs[i].tx, pairs[i].rx, pairs[i].mode});
    if (check_constraints(p, links) != 0) continue;
    const double obj = recompute_objective(p, links);
    if (obj > best.objective ||
        (obj == best.objective && lex_less(links, best.links)))
      best = ModeAssignment{links, obj};
  }
  return finish(p, std::move(best.links));
}

ModeAssignment exact_solve(const SelectionProblem& p) {
  const std::vector<Candidate> pairs = legal_pairs(p);
  const int k = static_cast<int>(pairs.size());

  // Residual optimistic bound: sum of positive utilities not yet decided.
  std::vector<double> positive_suffix(k + 1, 0.0);
  for (int i = k - 1; i >= 0; --i)
    positive_suffix[i] = positive_suffix[i + 1] + std::max(0.0, pairs[i].utility);

  ModeAssignment best;  // empty set, objective 0
  std::vector<ActiveLink> links;

  // Bound comparisons carry a small slack: the running sum accumulates in
  // search order while objectives are recomputed in canonical order, so the
  // two may drift by a few ulps. Ties are never pruned and are resolved at
  // the leaves with the same rule brute force uses.
  const auto dfs = [&](auto&& self, int idx, double sum) -> void {
    const double slack = 1e-9 * (1.0 + std::abs(best.objective));
    if (sum + positive_suffix[idx] < best.objective - slack) return;
    if (idx == k) {
      const double obj = recompute_objective(p, links);
      if (obj > best.objective ||
          (obj == best.objective && lex_less(links, best.links)))
        best = ModeAssignment{links, obj};
      return;
    }
    links.push_back({pairs[idx].tx, pairs[idx].rx, pairs[idx].mode});
    if (check_constraints(p, links) == 0)
      self(self, idx + 1, sum + pairs[idx].utility);
    links.pop_back();
    self(self, idx + 1, sum);
  };
  dfs(dfs, 0, 0.0);
  return finish(p, std::move(best.links));
}

ModeAssignment greedy_solve(const SelectionProblem& p) {
  std::vector<Candidate> pairs = legal_pairs(p);
  std::sort(pairs.begin(), pairs.end(), [](const Candidate& a, const Candidate& b) {
    if (a.utility != b.utility) return a.utility > b.utility;
    return std::tie(a.tx, a.rx, a.mode) < std::tie(b.tx, b.rx, b.mode);
  });
  std::vector<ActiveLink> links;
  for (const Candidate& c : pairs) {
    if (!(c.utility > 0)) break;  // sorted descending, rest can only hurt
    links.push_back({c.tx, c.rx, c.mode});
    if (check_constraints(p, links) != 0) links.pop_back();
  }
  return finish(p, std::move(links));
}

// ---------------------------------------------------------------------------
// Plain-text instance format.

void write_instance(std::ostream& out, const SelectionProblem& p) {
  out << "nodes " << p.n_nodes << '\n';
  out << "gamma " << fmt_double(p.gamma) << '\n';
  out << "protected";
  for (int x : p.protected_receivers) out << ' ' << x;
  out << '\n';
  out << "arcs " << p.arcs.size() << '\n';
  for (const ProblemArc& arc : p.arcs) {
    out << arc.tx << ' ' << arc.rx;
    for (const LegalMode& m : arc.modes)
      out << ' ' << static_cast<int>(m.mode) << ':' << fmt_double(m.utility);
    out << '\n';
  }
  out << "interference\n";
  for (int from = 1; from <= p.n_nodes; ++from) {
    for (int to = 1; to <= p.n_nodes; ++to) {
      if (to > 1) out << ' ';
      out << fmt_double(p.interference.at(from, to));
    }
    out << '\n';
  }
}

namespace {

std::string next_content_line(std::istream& in, const char* what) {
  std::string line;
  while (std::getline(in, line)) {
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    const auto pos = line.find_first_not_of(" \t\r");
    if (pos == std::string::npos) continue;
    return line;
  }
  throw ConfigError(std::string("instance: unexpected end of input, expected ") + what);
}

double parse_double_token(const std::string& tok, const char* what) {
  double v = 0.0;
  auto res = std::from_chars(tok.data(), tok.data() + tok.size(), v);
  if (res.ec != std::errc{} || res.ptr != tok.data() + tok.size())
    throw ConfigError(std::string("instance: bad ") + what + " '" + tok + "'");
  return v;
}

}  // namespace

SelectionProblem parse_instance(std::istream& in) {
  SelectionProblem p;

  {
    std::istringstream ss(next_content_line(in, "'nodes N'"));
    std::string kw;
    if (!(ss >> kw >> p.n_nodes) || kw != "nodes" || p.n_nodes < 1)
      throw ConfigError("instance: expected 'nodes N'");
  }
  {
    std::istringstream ss(next_content_line(in, "'gamma G'"));
    std::string kw, val;
    if (!(ss >> kw >> val) || kw != "gamma")
      throw ConfigError("instance: expected 'gamma G'");
    p.gamma = parse_double_token(val, "gamma");
  }
  {
    std::istringstream ss(next_content_line(in, "'protected [ids...]'"));
    std::string kw;
    if (!(ss >> kw) || kw != "protected")
      throw ConfigError("instance: expected 'protected [ids...]'");
    int id;
    while (ss >> id) {
      if (id < 1 || id > p.n_nodes)
        throw ConfigError("instance: protected id out of range: " + std::to_string(id));
      p.protected_receivers.push_back(id);
    }
    std::sort(p.protected_receivers.begin(), p.protected_receivers.end());
  }
  int n_arcs = 0;
  {
    std::istringstream ss(next_content_line(in, "'arcs K'"));
    std::string kw;
    if (!(ss >> kw >> n_arcs) || kw != "arcs" || n_arcs < 0)
      throw ConfigError("instance: expected 'arcs K'");
  }
  for (int i = 0; i < n_arcs; ++i) {
    std::istringstream ss(next_content_line(in, "arc line"));
    ProblemArc arc;
    if (!(ss >> arc.tx >> arc.rx))
      throw ConfigError("instance: bad arc line");
    if (arc.tx < 1 || arc.tx > p.n_nodes || arc.rx < 1 || arc.rx > p.n_nodes ||
        arc.tx == arc.rx)
      throw ConfigError("instance: arc endpoints out of range");
    std::string tok;
    while (ss >> tok) {
      const auto colon = tok.find(':');
      if (colon == std::string::npos)
        throw ConfigError("instance: expected mode:utility, got '" + tok + "'");
      const int mode = static_cast<int>(parse_double_token(tok.substr(0, colon), "mode"));
      if (mode < 0 || mode > 3)
        throw ConfigError("instance: mode out of range in '" + tok + "'");
      arc.modes.push_back({static_cast<Mode>(mode),
                           parse_double_token(tok.substr(colon + 1), "utility")});
    }
    std::sort(arc.modes.begin(), arc.modes.end(),
              [](const LegalMode& a, const LegalMode& b) { return a.mode < b.mode; });
    p.arcs.push_back(std::move(arc));
  }
  std::sort(p.arcs.begin(), p.arcs.end(), [](const ProblemArc& a, const ProblemArc& b) {
    return std::tie(a.tx, a.rx) < std::tie(b.tx, b.rx);
  });
  {
    std::istringstream ss(next_content_line(in, "'interference'"));
    std::string kw;
    if (!(ss >> kw) || kw != "interference")
      throw ConfigError("instance: expected 'interference'");
  }
  p.interference = InterferenceTable(p.n_nodes);
  for (int from = 1; from <= p.n_nodes; ++from) {
    std::istringstream ss(next_content_line(in, "interference row"));
    std::string tok;
    for (int to = 1; to <= p.n_nodes; ++to) {
      if (!(ss >> tok))
        throw ConfigError("instance: interference row " + std::to_string(from) +
                          " too short");
      p.interference.at(from, to) = parse_double_token(tok, "interference entry");
    }
  }
  try {
    legal_pairs(p);  // structural validation: legality, duplicates
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("instance: ") + e.what());
  }
  return p;
}

SelectionProblem load_instance_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read instance file: " + path);
  return parse_instance(in);
}

}  // namespace d2dsim
