// Copyright 2026 The Diakoptic Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>

#include "doctest.h"

#include "diakoptic/network.hpp"

using namespace diak;

namespace {

std::string read_netlist(const std::string& name) {
  const std::string path = std::string(DIAKOPTIC_NETLIST_DIR) + "/" + name;
  std::ifstream in(path, std::ios::binary);
  REQUIRE_MESSAGE(in.good(), "cannot open ", path);
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

Network inverter_pair() {
  // Two wired cnot gates: the smallest network exercising every directive.
  return parse_netlist(read_netlist("fig2.net"));
}

}  // namespace

TEST_CASE("builtin gate tables") {
  const GateTable n = builtin_gate_table("not");
  CHECK(n.fan_in == 1);
  CHECK(n.rows == std::vector<std::string>{"01", "10"});

  const GateTable c = builtin_gate_table("cnot");
  CHECK(c.fan_in == 2);
  CHECK(c.fan_out == 2);
  CHECK(c.rows == std::vector<std::string>{"0000", "0101", "1011", "1110"});

  const GateTable t = builtin_gate_table("toffoli");
  CHECK(t.rows.size() == 8);
  CHECK(std::binary_search(t.rows.begin(), t.rows.end(), "111110"));
  CHECK(std::binary_search(t.rows.begin(), t.rows.end(), "110111"));

  CHECK_THROWS_AS(builtin_gate_table("fredkin"), std::invalid_argument);
}

TEST_CASE("user gate tables must be reversible and complete") {
  CHECK_NOTHROW(make_gate_table("swap", 2, 2, {"0000", "0110", "1001", "1111"}));
  // Missing an input tuple.
  CHECK_THROWS_AS(make_gate_table("bad", 2, 2, {"0000", "0110", "1001"}),
                  std::invalid_argument);
  // Two inputs mapping to one output.
  CHECK_THROWS_AS(make_gate_table("bad", 1, 1, {"00", "10"}), std::invalid_argument);
  // Non-square tables are not reversible.
  CHECK_THROWS_AS(make_gate_table("bad", 2, 1, {"000", "011", "101", "110"}),
                  std::invalid_argument);
  CHECK_THROWS_AS(make_gate_table("bad", 1, 1, {"0x", "10"}), std::invalid_argument);
  CHECK_THROWS_AS(make_gate_table("bad", 0, 0, {}), std::invalid_argument);
}

TEST_CASE("netlist parsing") {
  SUBCASE("the wired cnot network parses to the expected structure") {
    const Network net = inverter_pair();
    REQUIRE(net.gates.size() == 1);
    CHECK(net.gates[0].table.kind == "cnot");
    CHECK(net.gates[0].inputs == std::vector<std::string>{"t", "u"});
    CHECK(net.gates[0].outputs == std::vector<std::string>{"v", "r"});
    REQUIRE(net.wires.size() == 1);
    CHECK(net.wires[0].a == "r");
    CHECK(net.wires[0].b == "s");
    CHECK(net.input_constraints == Assignment{{"u", 1}});
    CHECK(net.output_constraints == Assignment{{"s", 1}});
    CHECK(network_nodes(net) == std::vector<std::string>{"t", "u", "v", "r", "s"});
  }

  SUBCASE("comments and blank lines are ignored") {
    const Network net = parse_netlist("# header\n\ngate not a -> b  # trailing\n");
    CHECK(net.gates.size() == 1);
  }

  SUBCASE("user tables parse inline") {
    const Network net =
        parse_netlist("gate table swap a b -> x y { 0000 0110 1001 1111 }\n");
    REQUIRE(net.gates.size() == 1);
    CHECK(net.gates[0].table.fan_in == 2);
    const Assignment total = classical_propagate(net, {{"a", 1}, {"b", 0}});
    CHECK(total.at("x") == 0);
    CHECK(total.at("y") == 1);
  }

  SUBCASE("errors carry the offending line number") {
    auto expect_line = [](const std::string& text, const std::string& needle) {
      try {
        parse_netlist(text);
        FAIL_CHECK("expected parse failure for: " << text);
      } catch (const std::invalid_argument& e) {
        CHECK_MESSAGE(std::string(e.what()).find(needle) != std::string::npos,
                      "message was: ", e.what());
      }
    };
    expect_line("gate not a -> b\nwire a\n", "netlist line 2");
    expect_line("gate not a -> b\n\nfrobnicate a\n", "netlist line 3");
    expect_line("gate not a -> b\nin a = 2\n", "netlist line 2");
    expect_line("gate not a -> b\nin a = 1\nin a = 0\n", "netlist line 3");
    expect_line("gate not a -> b\nin z = 1\n", "netlist line 2");
    expect_line("gate bogus a -> b\n", "netlist line 1");
  }
}

TEST_CASE("network validation rules") {
  SUBCASE("a node may sit on only one gate terminal") {
    Network net;
    net.gates.push_back(Gate{builtin_gate_table("not"), {"a"}, {"b"}});
    net.gates.push_back(Gate{builtin_gate_table("not"), {"b"}, {"c"}});
    CHECK_THROWS_AS(validate_network(net), std::invalid_argument);
  }

  SUBCASE("wires may not join two terminals of the same gate") {
    Network net;
    net.gates.push_back(Gate{builtin_gate_table("not"), {"a"}, {"b"}});
    net.wires.push_back(Wire{"a", "b"});
    CHECK_THROWS_AS(validate_network(net), std::invalid_argument);
  }

  SUBCASE("at most one wire per node") {
    Network net;
    net.gates.push_back(Gate{builtin_gate_table("cnot"), {"t", "u"}, {"v", "r"}});
    net.wires.push_back(Wire{"r", "x"});
    net.wires.push_back(Wire{"r", "y"});
    CHECK_THROWS_AS(validate_network(net), std::invalid_argument);
  }

  SUBCASE("wire endpoints must differ") {
    Network net;
    net.wires.push_back(Wire{"x", "x"});
    CHECK_THROWS_AS(validate_network(net), std::invalid_argument);
  }
}

TEST_CASE("classical propagation") {
  const Network net = inverter_pair();

  SUBCASE("full forward run") {
    const Assignment total = classical_propagate(net, {{"t", 1}, {"u", 1}});
    CHECK(total.at("v") == 1);
    CHECK(total.at("r") == 0);
    CHECK(total.at("s") == 1);
  }

  SUBCASE("wires propagate in both directions") {
    const Network bare = parse_netlist("wire x y\n");
    CHECK(classical_propagate(bare, {{"x", 1}}).at("y") == 0);
    CHECK(classical_propagate(bare, {{"y", 1}}).at("x") == 0);
  }

  SUBCASE("gate tables fire forward only") {
    // Seeding an output does not recover the inputs: u stays unreachable.
    CHECK_THROWS_AS(classical_propagate(net, {{"t", 0}, {"s", 0}}),
                    std::invalid_argument);
  }

  SUBCASE("a seeded value clashing with a deduction is a conflict") {
    CHECK_THROWS_AS(classical_propagate(net, {{"t", 1}, {"u", 1}, {"s", 0}}),
                    std::runtime_error);
  }

  SUBCASE("an underdetermined seed leaves nodes unreachable") {
    CHECK_THROWS_AS(classical_propagate(net, {{"u", 1}}), std::invalid_argument);
  }

  SUBCASE("unknown seed nodes are rejected") {
    CHECK_THROWS_AS(classical_propagate(net, {{"nope", 1}}), std::invalid_argument);
  }
}

TEST_CASE("free fill nodes are the minimal classical seed set") {
  const Network fig = inverter_pair();
  CHECK(free_fill_nodes(fig) == std::vector<std::string>{"t"});

  const Network two = parse_netlist(read_netlist("two_solutions.net"));
  CHECK(free_fill_nodes(two) == std::vector<std::string>{"t", "u"});

  const Network chain = parse_netlist(read_netlist("chain.net"));
  CHECK(free_fill_nodes(chain) == std::vector<std::string>{"t"});
}

TEST_CASE("initial state preparation encodes the propagated assignment") {
  const Network net = inverter_pair();
  const NetworkSpace space(net);

  const StateVector psi = prepare_initial_state(net, {});
  // Default fill t=0 with u pinned to 1: the gate reads (0,1) -> (0,1), the
  // wire inverts r=1 into s=0.  Gate row "0101" is label index 1, s digit 0.
  CHECK(std::abs(psi.amplitude(2) - Complex(1.0, 0.0)) < 1e-15);
  CHECK(space.decode(2) ==
        Assignment{{"t", 0}, {"u", 1}, {"v", 0}, {"r", 1}, {"s", 0}});

  const StateVector flipped = prepare_initial_state(net, {{"t", 1}});
  CHECK(std::abs(flipped.amplitude(7) - Complex(1.0, 0.0)) < 1e-15);

  CHECK_THROWS_AS(prepare_initial_state(net, {{"v", 1}}), std::invalid_argument);
}

TEST_CASE("assignment checking") {
  const Network net = inverter_pair();
  const Assignment good{{"t", 1}, {"u", 1}, {"v", 1}, {"r", 0}, {"s", 1}};
  CHECK(check_assignment(net, good));

  Assignment bad_gate = good;
  bad_gate["v"] = 0;  // v must equal t
  CHECK_FALSE(check_assignment(net, bad_gate));

  Assignment bad_wire{{"t", 0}, {"u", 1}, {"v", 0}, {"r", 1}, {"s", 1}};
  CHECK_FALSE(check_assignment(net, bad_wire));

  Assignment bad_output{{"t", 0}, {"u", 1}, {"v", 0}, {"r", 1}, {"s", 0}};
  CHECK_FALSE(check_assignment(net, bad_output));  // demands s = 1

  Assignment missing = good;
  missing.erase("s");
  CHECK_THROWS_AS(check_assignment(net, missing), std::invalid_argument);
}

TEST_CASE("brute-force oracle solution counts") {
  SUBCASE("the wired cnot network has exactly one solution") {
    const auto solutions = brute_force_oracle(inverter_pair());
    REQUIRE(solutions.size() == 1);
    CHECK(solutions[0] ==
          Assignment{{"t", 1}, {"u", 1}, {"v", 1}, {"r", 0}, {"s", 1}});
  }

  SUBCASE("pinning the remaining free input to the wrong value leaves none") {
    const auto solutions =
        brute_force_oracle(parse_netlist(read_netlist("fig2_unsat.net")));
    CHECK(solutions.empty());
  }

  SUBCASE("an output-only constraint leaves the unconstrained input free") {
    const auto solutions =
        brute_force_oracle(parse_netlist(read_netlist("two_solutions.net")));
    REQUIRE(solutions.size() == 2);
    CHECK(solutions[0] == Assignment{{"t", 1}, {"u", 0}, {"v", 1}, {"r", 1}});
    CHECK(solutions[1] == Assignment{{"t", 1}, {"u", 1}, {"v", 1}, {"r", 0}});
  }
}

TEST_CASE("network space encoding") {
  const Network net = inverter_pair();
  const NetworkSpace space(net);

  CHECK(space.nodes() == std::vector<std::string>{"t", "u", "v", "r", "s"});
  CHECK(space.basis().dim() == 8);  // 4 admissible gate rows x 2 values of s
  CHECK(space.wire_projectors().size() == 1);
  CHECK(space.wire_projectors()[0].rank() == 4);

  SUBCASE("encode/decode roundtrip over every basis state") {
    for (std::size_t i = 0; i < space.basis().dim(); ++i) {
      CHECK(space.encode(space.decode(i)) == i);
    }
  }

  SUBCASE("gate-violating assignments cannot be encoded") {
    CHECK_THROWS_AS(
        space.encode(Assignment{{"t", 0}, {"u", 0}, {"v", 1}, {"r", 0}, {"s", 1}}),
        std::invalid_argument);
  }

  SUBCASE("node sectors split the basis by the node's value") {
    const auto sectors = space.node_sectors("s");
    CHECK(sectors[0].size() + sectors[1].size() == space.basis().dim());
    for (const std::size_t idx : sectors[1]) {
      CHECK(space.decode(idx).at("s") == 1);
    }
  }
}

TEST_CASE("satisfiability solve on the wired cnot network") {
  const Network net = inverter_pair();
  const SatOutcome outcome = solve_satisfiability(net);

  REQUIRE(outcome.status == SatOutcome::Status::Solution);
  CHECK(outcome.assignment ==
        Assignment{{"t", 1}, {"u", 1}, {"v", 1}, {"r", 0}, {"s", 1}});
  CHECK(outcome.fidelity >= 1.0 - 1e-6);
  CHECK_FALSE(outcome.sampled);
  CHECK(outcome.prepared ==
        Assignment{{"t", 0}, {"u", 1}, {"v", 0}, {"r", 1}, {"s", 0}});
  CHECK(check_assignment(net, outcome.assignment));

  // The run rotates the prepared basis state (flat index 2) into the solution
  // basis state (flat index 7).
  REQUIRE(outcome.trajectory.points.size() == 1001);
  for (const auto& point : outcome.trajectory.points) {
    const double c = std::cos(point.phi);
    const double s = std::sin(point.phi);
    CHECK(std::abs(point.state.amplitude(2) - Complex(c, 0.0)) <= 1e-6);
    CHECK(std::abs(point.state.amplitude(7) - Complex(s, 0.0)) <= 1e-6);
    for (const std::size_t other : {0u, 1u, 3u, 4u, 5u, 6u}) {
      CHECK(std::abs(point.state.amplitude(other)) <= 1e-6);
    }
  }
}

TEST_CASE("unsatisfiable networks die early with evidence") {
  const Network net = parse_netlist(read_netlist("fig2_unsat.net"));
  SolveOptions options;
  options.steps = 1000;
  const SatOutcome outcome = solve_satisfiability(net, options);
  CHECK(outcome.status == SatOutcome::Status::Unsat);
  CHECK(outcome.assignment.empty());
  CHECK(outcome.infeasible_step >= 1);
  CHECK(outcome.infeasible_step <= options.steps / 20);
  CHECK_FALSE(outcome.evidence.empty());
}

TEST_CASE("multi-solution networks sample a verified branch") {
  const Network net = parse_netlist(read_netlist("two_solutions.net"));
  const SatOutcome outcome = solve_satisfiability(net);
  REQUIRE(outcome.status == SatOutcome::Status::Multi);
  CHECK(outcome.sampled);
  CHECK(outcome.fidelity == doctest::Approx(0.5).epsilon(1e-6));
  CHECK(check_assignment(net, outcome.assignment));
  // Seed 0 reproducibly picks the same branch.
  const SatOutcome again = solve_satisfiability(net);
  CHECK(again.assignment == outcome.assignment);

  SolveOptions other_seed;
  other_seed.seed = 12345;
  const SatOutcome reseeded = solve_satisfiability(net, other_seed);
  CHECK(check_assignment(net, reseeded.assignment));
}

TEST_CASE("a fill that already satisfies the outputs needs no rotation") {
  const Network net = parse_netlist(read_netlist("two_solutions.net"));
  SolveOptions options;
  options.fill = {{"t", 1}, {"u", 0}};
  const SatOutcome outcome = solve_satisfiability(net, options);
  REQUIRE(outcome.status == SatOutcome::Status::Solution);
  CHECK(outcome.assignment == Assignment{{"t", 1}, {"u", 0}, {"v", 1}, {"r", 1}});
  CHECK(outcome.fidelity == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("solve rejects malformed options") {
  const Network net = inverter_pair();
  SolveOptions zero_steps;
  zero_steps.steps = 0;
  CHECK_THROWS_AS(solve_satisfiability(net, zero_steps), std::invalid_argument);

  SolveOptions bad_fill;
  bad_fill.fill = {{"v", 1}};  // classically derived, not free
  CHECK_THROWS_AS(solve_satisfiability(net, bad_fill), std::invalid_argument);
}

TEST_CASE("chained gates solve end to end") {
  const Network net = parse_netlist(read_netlist("chain.net"));
  const SatOutcome outcome = solve_satisfiability(net);
  REQUIRE(outcome.status == SatOutcome::Status::Solution);
  CHECK(outcome.assignment == Assignment{{"t", 1}, {"u", 1}, {"v", 1}, {"r", 0},
                                         {"a", 1}, {"b", 0}});
  CHECK(check_assignment(net, outcome.assignment));
}
