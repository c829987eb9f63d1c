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

#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "diakoptic/basis.hpp"
#include "diakoptic/evolver.hpp"
#include "diakoptic/hilbert.hpp"
#include "diakoptic/types.hpp"

namespace diak {

/// Reversible truth table: a permutation of bit tuples, stored as the sorted
/// list of admissible rows (input bits followed by output bits).
struct GateTable {
  std::string kind;
  std::size_t fan_in = 0;
  std::size_t fan_out = 0;
  std::vector<std::string> rows;
};

/// Built-in tables: "not" (1->1), "cnot" (2->2, passthrough + parity), and
/// "toffoli" (3->3, doubly controlled flip).  Throws for unknown kinds.
GateTable builtin_gate_table(const std::string& kind);

/// Validates and normalizes a user table: equal input/output width (1..10),
/// every input tuple present exactly once, output tuples pairwise distinct.
GateTable make_gate_table(std::string kind, std::size_t fan_in, std::size_t fan_out,
                          std::vector<std::string> rows);

/// A gate instance: which named nodes sit on which terminals.
struct Gate {
  GateTable table;
  std::vector<std::string> inputs;
  std::vector<std::string> outputs;
};

/// An inverting link between two nodes: the joined values must differ.
struct Wire {
  std::string a;
  std::string b;
};

/// Total or partial map node name -> bit value.
using Assignment = std::map<std::string, int>;

/// A Boolean network laid out in space: gate instances, inverting wires, and
/// partial input/output value constraints.  Node names are global; a node
/// belongs to at most one gate terminal and at most one wire end.
struct Network {
  std::vector<Gate> gates;
  std::vector<Wire> wires;
  Assignment input_constraints;
  Assignment output_constraints;
};

/// Structural validation (throws std::invalid_argument): node-name uniqueness
/// across gate terminals, wire endpoint rules (distinct nodes, at most one
/// wire per node, never two terminals of the same gate), constraint nodes
/// present somewhere in the network, bits in {0,1}.
void validate_network(const Network& net);

/// Every node, deterministically ordered: gate terminals in declaration order
/// (inputs before outputs), then wire-only nodes by first appearance.  Gates
/// and wires declare nodes; constraints only reference them.
std::vector<std::string> network_nodes(const Network& net);

/// Parse the line-oriented netlist format:
///
///   gate cnot t u -> v r
///   gate table xor3 a b c -> x y z { 000000 001001 ... }
///   wire r s
///   in u = 1
///   out s = 1
///   # comment
///
/// Built-in kinds: not, cnot, toffoli.  User tables list one admissible row
/// per tuple, input bits then output bits.  Errors carry the source line.
Network parse_netlist(const std::string& text);

/// Forward-run the classical network from a seed assignment: gate tables fire
/// once all their inputs are known, wires propagate the inverted value both
/// ways.  Throws std::runtime_error on a conflict (a node deduced to two
/// different values), std::invalid_argument when some node is unreachable
/// from the seed.
Assignment classical_propagate(const Network& net, const Assignment& seed);

/// Nodes a fill may assign: the deterministic minimal seed set that, together
/// with the input constraints, classically determines every node.  Gate input
/// terminals are preferred as seeds, in declaration order; dangling nodes
/// follow.
std::vector<std::string> free_fill_nodes(const Network& net);

/// The computational basis state encoding classical_propagate(inputs ∪ fill),
/// where unassigned free nodes default to 0.  Fill keys outside
/// free_fill_nodes() are rejected.
StateVector prepare_initial_state(const Network& net, const Assignment& fill);

/// True iff the total assignment satisfies every gate table, every wire
/// inversion, and every input/output constraint.  Throws when a node is
/// missing from the assignment.
bool check_assignment(const Network& net, const Assignment& assignment);

/// All solutions by exhaustion over the free seed set (capped at 24 free
/// nodes), in lexicographic seed order.  Exact: every solution extends a
/// unique seed tuple.
std::vector<Assignment> brute_force_oracle(const Network& net);

/// Where a node's bit lives in the network Hilbert space: which subsystem
/// hosts it and which character of that subsystem's label carries the value.
struct NodeSite {
  std::size_t subsystem = 0;
  std::size_t char_pos = 0;
};

/// The quantum arena for a network: one subsystem per gate whose labels are
/// exactly the admissible tuples (so every basis state satisfies every gate
/// by construction), one qubit per gate-free node, and one exclusion
/// projector per wire keeping the index set where the wired values differ.
class NetworkSpace {
 public:
  explicit NetworkSpace(Network net);

  const Network& network() const { return net_; }
  const Basis& basis() const { return basis_; }
  const std::vector<std::string>& nodes() const { return nodes_; }
  const std::vector<Projector>& wire_projectors() const { return wire_projectors_; }

  const NodeSite& site(const std::string& node) const;

  /// Basis indices split by the node's value: sectors()[b] lists the flat
  /// indices where the node reads b.
  std::array<std::vector<std::size_t>, 2> node_sectors(const std::string& node) const;

  /// Node values encoded by one computational basis state.
  Assignment decode(std::size_t index) const;

  /// Flat index of the basis state encoding a total assignment; throws when
  /// a gate reads an inadmissible tuple.
  std::size_t encode(const Assignment& assignment) const;

 private:
  Network net_;
  Basis basis_;
  std::vector<std::string> nodes_;
  std::map<std::string, NodeSite> sites_;
  std::vector<Projector> wire_projectors_;
};

inline NetworkSpace build_network_space(Network net) { return NetworkSpace(std::move(net)); }

struct SolveOptions {
  std::size_t steps = 1000;
  std::uint64_t seed = 0;  ///< Born sampling for the multi-solution readout
  Assignment fill;         ///< overrides for free_fill_nodes (others default 0)
};

struct SatOutcome {
  enum class Status { Solution, Multi, Unsat };

  Status status = Status::Unsat;
  /// Decoded solution (Solution/Multi); empty for Unsat.
  Assignment assignment;
  /// Weight of the dominant basis state in the final state.
  double fidelity = 0.0;
  /// True when `assignment` was Born-sampled from a genuine superposition.
  bool sampled = false;
  /// Unsat evidence: first infeasible step (0 when not applicable) and the
  /// residual the solver stalled at, plus a human-readable summary.
  std::size_t infeasible_step = 0;
  double infeasible_residual = 0.0;
  std::string evidence;
  /// Classical preparation actually used (input constraints + chosen fill).
  Assignment prepared;
  Trajectory trajectory;
  std::optional<StateVector> final_state;
};

/// The quantum satisfiability procedure: prepare the classical start state,
/// pin every input-constrained node, rotate every mismatched output node's
/// population from its prepared value to its demanded value over
/// φ ∈ [0, π/2], evolve under the wire projectors, and read out.
///
/// Readout: a final state within 1e-6 of a single basis state decodes
/// directly (SOLUTION); a genuine superposition is Born-sampled with the
/// seeded generator (MULTI when the sample verifies).  Infeasible evolution
/// or a failed verification yields UNSAT with evidence.
SatOutcome solve_satisfiability(const Network& net, const SolveOptions& options = {});

}  // namespace diak
