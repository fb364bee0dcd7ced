#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <random>
#include <sstream>

#include "d2dsim/selector.hpp"
#include "generators.hpp"

using namespace d2dsim;

namespace {

// Minimal problem builder for hand-constructed cases.
SelectionProblem make_problem(int n_nodes, double gamma,
                              std::vector<ProblemArc> arcs,
                              std::vector<int> protected_receivers = {}) {
  SelectionProblem p;
  p.n_nodes = n_nodes;
  p.gamma = gamma;
  p.arcs = std::move(arcs);
  p.protected_receivers = std::move(protected_receivers);
  p.interference = InterferenceTable(n_nodes);
  return p;
}

}  // namespace

TEST_CASE("check_feasibility constraint ids") {
  SUBCASE("empty assignment is feasible") {
    auto p = make_problem(3, 1.0, {{1, 3, {{Mode::Cellular, 5.0}}}}, {3});
    CHECK(check_feasibility(p, {}) == 0);
  }
  SUBCASE("shared receiver violates constraint 1") {
    auto p = make_problem(4, 1.0,
                          {{1, 3, {{Mode::Underlay, 1.0}}},
                           {2, 3, {{Mode::Underlay, 1.0}}}});
    ModeAssignment a{{{1, 3, Mode::Underlay}, {2, 3, Mode::Underlay}}, 0};
    CHECK(check_feasibility(p, a) == 1);
  }
  SUBCASE("shared transmitter violates constraint 2") {
    auto p = make_problem(4, 1.0,
                          {{1, 2, {{Mode::Underlay, 1.0}}},
                           {1, 3, {{Mode::Outband, 1.0}}}});
    ModeAssignment a{{{1, 2, Mode::Underlay}, {1, 3, Mode::Outband}}, 0};
    CHECK(check_feasibility(p, a) == 2);
  }
  SUBCASE("the base station is exempt from degree caps") {
    auto p = make_problem(3, 1.0,
                          {{1, 3, {{Mode::Cellular, 1.0}}},
                           {2, 3, {{Mode::Cellular, 1.0}}}});
    ModeAssignment a{{{1, 3, Mode::Cellular}, {2, 3, Mode::Cellular}}, 0};
    CHECK(check_feasibility(p, a) == 0);
  }
  SUBCASE("underlay interference cap at a protected receiver is inclusive") {
    const double gamma = 1e-3;
    auto p = make_problem(3, gamma, {{1, 2, {{Mode::Underlay, 1.0}}}}, {3});
    ModeAssignment a{{{1, 2, Mode::Underlay}}, 0};

    p.interference.at(1, 3) = gamma;  // exactly at the cap
    CHECK(check_feasibility(p, a) == 0);
    p.interference.at(1, 3) = gamma * (1 + 1e-9);
    CHECK(check_feasibility(p, a) == 3);
  }
  SUBCASE("cellular and underlay transmitters load an underlay receiver") {
    auto p = make_problem(5, 1e-3,
                          {{1, 2, {{Mode::Underlay, 1.0}}},
                           {3, 5, {{Mode::Cellular, 1.0}}}});
    p.interference.at(3, 2) = 2e-3;  // cellular tx 3 hits underlay rx 2
    ModeAssignment a{{{1, 2, Mode::Underlay}, {3, 5, Mode::Cellular}}, 0};
    CHECK(check_feasibility(p, a) == 4);
    ModeAssignment alone{{{1, 2, Mode::Underlay}}, 0};
    CHECK(check_feasibility(p, alone) == 0);
  }
  SUBCASE("overlay transmitters load an overlay receiver, inclusive cap") {
    const double gamma = 1e-3;
    auto p = make_problem(5, gamma,
                          {{1, 2, {{Mode::Overlay, 1.0}}},
                           {3, 4, {{Mode::Overlay, 1.0}}}});
    ModeAssignment a{{{1, 2, Mode::Overlay}, {3, 4, Mode::Overlay}}, 0};
    p.interference.at(3, 2) = gamma;
    CHECK(check_feasibility(p, a) == 0);
    p.interference.at(3, 2) = gamma * (1 + 1e-9);
    CHECK(check_feasibility(p, a) == 5);
  }
  SUBCASE("unknown arc reference throws") {
    auto p = make_problem(3, 1.0, {{1, 3, {{Mode::Cellular, 5.0}}}});
    ModeAssignment a{{{1, 2, Mode::Underlay}}, 0};
    CHECK_THROWS_AS(check_feasibility(p, a), std::invalid_argument);
    ModeAssignment b{{{1, 3, Mode::Underlay}}, 0};  // arc exists, mode not legal
    CHECK_THROWS_AS(check_feasibility(p, b), std::invalid_argument);
  }
}

TEST_CASE("brute force examples") {
  SUBCASE("no arcs") {
    auto p = make_problem(1, 1.0, {});
    const ModeAssignment a = brute_force_solve(p);
    CHECK(a.links.empty());
    CHECK(a.objective == 0.0);
  }
  SUBCASE("single positive cellular arc is activated") {
    auto p = make_problem(2, 1.0, {{1, 2, {{Mode::Cellular, 5.0}}}});
    const ModeAssignment a = brute_force_solve(p);
    REQUIRE(a.links.size() == 1);
    CHECK(a.links[0] == ActiveLink{1, 2, Mode::Cellular});
    CHECK(a.objective == 5.0);
  }
  SUBCASE("negative utility stays inactive") {
    auto p = make_problem(2, 1.0, {{1, 2, {{Mode::Cellular, -1.0}}}});
    const ModeAssignment a = brute_force_solve(p);
    CHECK(a.links.empty());
    CHECK(a.objective == 0.0);
  }
  SUBCASE("zero utility prefers the empty assignment") {
    auto p = make_problem(2, 1.0, {{1, 2, {{Mode::Cellular, 0.0}}}});
    CHECK(brute_force_solve(p).links.empty());
  }
  SUBCASE("budget enforced") {
    // 8 direct arcs x 3 modes + 1 cellular arc = 25 legal pairs
    std::vector<ProblemArc> arcs;
    for (int i = 1; i <= 8; ++i)
      arcs.push_back({i, i + 1, {{Mode::Underlay, 1.0},
                                 {Mode::Overlay, 1.0},
                                 {Mode::Outband, 1.0}}});
    arcs.push_back({1, 10, {{Mode::Cellular, 1.0}}});
    auto p = make_problem(10, 1.0, std::move(arcs));
    CHECK_THROWS_AS(brute_force_solve(p), std::runtime_error);
  }
}

TEST_CASE("exact solver examples") {
  SUBCASE("all utilities non-positive gives the empty assignment") {
    auto p = make_problem(3, 1.0,
                          {{1, 2, {{Mode::Underlay, -2.0}, {Mode::Outband, 0.0}}},
                           {1, 3, {{Mode::Cellular, -0.5}}}});
    const ModeAssignment a = exact_solve(p);
    CHECK(a.links.empty());
    CHECK(a.objective == 0.0);
  }
  SUBCASE("two mutually interfering underlay pairs, lex-smaller one wins") {
    auto p = make_problem(5, 1e-3,
                          {{1, 2, {{Mode::Underlay, 10.0}}},
                           {3, 4, {{Mode::Underlay, 10.0}}}});
    p.interference.at(1, 4) = 2e-3;
    p.interference.at(3, 2) = 2e-3;
    const ModeAssignment a = exact_solve(p);
    const ModeAssignment b = brute_force_solve(p);
    REQUIRE(a.links.size() == 1);
    CHECK(a.links[0] == ActiveLink{1, 2, Mode::Underlay});
    CHECK(a.objective == 10.0);
    CHECK(a.links == b.links);
    CHECK(a.objective == b.objective);
  }
}

TEST_CASE("greedy solver examples") {
  SUBCASE("single arc matches exact") {
    auto p = make_problem(2, 1.0, {{1, 2, {{Mode::Cellular, 5.0}}}});
    CHECK(greedy_solve(p).links == exact_solve(p).links);
  }
  SUBCASE("takes the big pair first") {
    auto p = make_problem(5, 1.0,
                          {{1, 2, {{Mode::Underlay, 3.0}, {Mode::Outband, 8.0}}},
                           {3, 4, {{Mode::Outband, 4.0}}}});
    const ModeAssignment a = greedy_solve(p);
    REQUIRE(a.links.size() == 2);
    CHECK(a.links[0] == ActiveLink{1, 2, Mode::Outband});
    CHECK(a.links[1] == ActiveLink{3, 4, Mode::Outband});
    CHECK(a.objective == 12.0);
  }
}

TEST_CASE("oracle equivalence on random instances") {
  std::mt19937_64 rng(1234);
  int greedy_hits = 0, total = 0, positive = 0;
  double ratio_sum = 0.0;
  for (int trial = 0; trial < 150; ++trial) {
    const SelectionProblem p = (trial % 3 == 0)
                                   ? testgen::random_pipeline_problem(rng, 4)
                                   : testgen::random_synthetic_problem(rng, trial % 2);
    if (legal_pairs(p).size() > 14) continue;  // keep enumeration fast here

    const ModeAssignment oracle = brute_force_solve(p);
    const ModeAssignment exact = exact_solve(p);
    const ModeAssignment greedy = greedy_solve(p);

    CHECK(exact.objective == oracle.objective);
    CHECK(exact.links == oracle.links);

    CHECK(check_feasibility(p, oracle) == 0);
    CHECK(check_feasibility(p, exact) == 0);
    CHECK(check_feasibility(p, greedy) == 0);

    CHECK(greedy.objective <= exact.objective);
    CHECK(exact.objective == recompute_objective(p, exact.links));
    CHECK(greedy.objective == recompute_objective(p, greedy.links));

    ++total;
    if (greedy.objective == exact.objective) ++greedy_hits;
    if (exact.objective > 0) {
      ++positive;
      ratio_sum += greedy.objective / exact.objective;
    }
  }
  REQUIRE(total > 80);
  MESSAGE("greedy matched exact on ", greedy_hits, "/", total,
          ", mean ratio on positive instances ",
          ratio_sum / std::max(1, positive));
}

TEST_CASE("gamma monotonicity of the exact objective") {
  std::mt19937_64 rng(77);
  for (int trial = 0; trial < 40; ++trial) {
    SelectionProblem p = testgen::random_synthetic_problem(rng, false);
    const double g0 = p.gamma;
    double prev = -1e300;
    for (double g : {0.0, g0 / 2, g0, 2 * g0, 1e300}) {
      // gamma = 0 is below the config floor but legal for the solver itself
      p.gamma = g;
      const double obj = exact_solve(p).objective;
      CHECK(obj >= prev);
      prev = obj;
    }
  }
}

TEST_CASE("scaling all utilities preserves the exact argmax") {
  std::mt19937_64 rng(88);
  for (int trial = 0; trial < 40; ++trial) {
    SelectionProblem p = testgen::random_synthetic_problem(rng, false);
    const ModeAssignment before = exact_solve(p);
    SelectionProblem scaled = p;
    for (ProblemArc& arc : scaled.arcs)
      for (LegalMode& m : arc.modes) m.utility *= 3.0;
    const ModeAssignment after = exact_solve(scaled);
    CHECK(after.links == before.links);
  }
}

TEST_CASE("an independent positive arc never lowers the exact objective") {
  std::mt19937_64 rng(99);
  for (int trial = 0; trial < 40; ++trial) {
    SelectionProblem p = testgen::random_synthetic_problem(rng, false);
    if (p.n_nodes < 4) continue;
    const int u = p.n_nodes - 2, v = p.n_nodes - 1;  // spare users
    std::erase_if(p.arcs, [&](const ProblemArc& a) {
      return a.tx == u || a.rx == u || a.tx == v || a.rx == v;
    });
    for (int x = 1; x <= p.n_nodes; ++x) {
      p.interference.at(u, x) = 0;
      p.interference.at(x, u) = 0;
      p.interference.at(v, x) = 0;
      p.interference.at(x, v) = 0;
    }
    const double before = exact_solve(p).objective;

    SelectionProblem grown = p;
    grown.arcs.push_back({u, v, {{Mode::Underlay, 3.0}}});
    std::sort(grown.arcs.begin(), grown.arcs.end(),
              [](const ProblemArc& a, const ProblemArc& b) {
                return std::tie(a.tx, a.rx) < std::tie(b.tx, b.rx);
              });
    CHECK(exact_solve(grown).objective >= before);
  }
}

TEST_CASE("instance files round-trip exactly") {
  std::mt19937_64 rng(555);
  for (int trial = 0; trial < 25; ++trial) {
    const SelectionProblem p = trial % 2 == 0
                                   ? testgen::random_synthetic_problem(rng, false)
                                   : testgen::random_pipeline_problem(rng, 5);
    std::stringstream ss;
    write_instance(ss, p);
    const SelectionProblem back = parse_instance(ss);
    CHECK(back == p);
  }
}

TEST_CASE("instance parsing rejects malformed input") {
  const auto reject = [](const std::string& text) {
    std::istringstream in(text);
    CHECK_THROWS_AS(parse_instance(in), ConfigError);
  };
  reject("");
  reject("nodes 0\n");
  reject("nodes 2\ngamma x\n");
  reject("nodes 2\ngamma 1\nprotected 9\n");
  reject("nodes 2\ngamma 1\nprotected\narcs 1\n1 1 0:1\ninterference\n0 0\n0 0\n");
  reject("nodes 2\ngamma 1\nprotected\narcs 1\n1 2 7:1\ninterference\n0 0\n0 0\n");
  reject("nodes 2\ngamma 1\nprotected\narcs 0\ninterference\n0\n");  // short row
  // mode 1 is not legal on a base-station arc
  reject("nodes 2\ngamma 1\nprotected\narcs 1\n1 2 1:1\ninterference\n0 0\n0 0\n");
}

TEST_CASE("empty instance solves to the empty assignment") {
  std::istringstream in("nodes 1\ngamma 1\nprotected 1\narcs 0\ninterference\n0\n");
  const SelectionProblem p = parse_instance(in);
  for (const ModeAssignment& a :
       {brute_force_solve(p), exact_solve(p), greedy_solve(p)}) {
    CHECK(a.links.empty());
    CHECK(a.objective == 0.0);
  }
}
