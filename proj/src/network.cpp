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

#include <algorithm>
#include <cmath>
#include <random>
#include <set>
#include <sstream>
#include <stdexcept>

#include "diakoptic/connection.hpp"
#include "diakoptic/log.hpp"
#include "diakoptic/network.hpp"

namespace diak {

namespace {

std::map<std::string, std::size_t> gate_index_of_node(const Network& net) {
  std::map<std::string, std::size_t> host;
  for (std::size_t g = 0; g < net.gates.size(); ++g) {
    for (const auto& node : net.gates[g].inputs) host[node] = g;
    for (const auto& node : net.gates[g].outputs) host[node] = g;
  }
  return host;
}

// Gate rows are sorted, so the unique row starting with `prefix` is found by
// binary search.
const std::string& row_for_inputs(const GateTable& table, const std::string& prefix) {
  const auto it = std::lower_bound(table.rows.begin(), table.rows.end(), prefix);
  if (it == table.rows.end() || it->compare(0, prefix.size(), prefix) != 0) {
    throw std::logic_error("gate table '" + table.kind + "' is missing input tuple " + prefix);
  }
  return *it;
}

std::string fill_to_string(const Assignment& a) {
  std::ostringstream out;
  bool first = true;
  for (const auto& [node, bit] : a) {
    if (!first) out << ",";
    out << node << "=" << bit;
    first = false;
  }
  return out.str();
}

}  // namespace

Assignment classical_propagate(const Network& net, const Assignment& seed) {
  validate_network(net);
  const std::vector<std::string> nodes = network_nodes(net);
  const std::set<std::string> node_set(nodes.begin(), nodes.end());

  Assignment known;
  for (const auto& [node, bit] : seed) {
    if (node_set.find(node) == node_set.end()) {
      throw std::invalid_argument("seed assigns unknown node '" + node + "'");
    }
    if (bit != 0 && bit != 1) {
      throw std::invalid_argument("seed assigns non-bit value to '" + node + "'");
    }
    known[node] = bit;
  }

  auto learn = [&known](const std::string& node, int bit) {
    const auto [it, inserted] = known.emplace(node, bit);
    if (!inserted && it->second != bit) {
      throw std::runtime_error("propagation conflict at node '" + node + "'");
    }
    return inserted;
  };

  bool changed = true;
  while (changed) {
    changed = false;
    for (const Gate& gate : net.gates) {
      std::string prefix;
      prefix.reserve(gate.table.fan_in);
      bool ready = true;
      for (const auto& node : gate.inputs) {
        const auto it = known.find(node);
        if (it == known.end()) {
          ready = false;
          break;
        }
        prefix.push_back(static_cast<char>('0' + it->second));
      }
      if (!ready) continue;
      const std::string& row = row_for_inputs(gate.table, prefix);
      for (std::size_t j = 0; j < gate.outputs.size(); ++j) {
        changed |= learn(gate.outputs[j], row[gate.table.fan_in + j] - '0');
      }
    }
    for (const Wire& wire : net.wires) {
      const auto ia = known.find(wire.a);
      const auto ib = known.find(wire.b);
      if (ia != known.end() && ib == known.end()) {
        changed |= learn(wire.b, 1 - ia->second);
      } else if (ib != known.end() && ia == known.end()) {
        changed |= learn(wire.a, 1 - ib->second);
      } else if (ia != known.end() && ib != known.end() && ia->second == ib->second) {
        throw std::runtime_error("propagation conflict: wire '" + wire.a + "'-'" + wire.b +
                                 "' carries equal values");
      }
    }
  }

  for (const auto& node : nodes) {
    if (known.find(node) == known.end()) {
      throw std::invalid_argument("node '" + node + "' is not reachable from the seed");
    }
  }
  return known;
}

std::vector<std::string> free_fill_nodes(const Network& net) {
  validate_network(net);
  const std::vector<std::string> nodes = network_nodes(net);
  const auto host = gate_index_of_node(net);

  // Seed candidates in preference order: gate inputs by declaration, then
  // nodes on no gate at all.
  std::vector<std::string> candidates;
  for (const Gate& gate : net.gates) {
    candidates.insert(candidates.end(), gate.inputs.begin(), gate.inputs.end());
  }
  for (const auto& node : nodes) {
    if (host.find(node) == host.end()) candidates.push_back(node);
  }

  std::set<std::string> reachable;
  for (const auto& [node, bit] : net.input_constraints) reachable.insert(node);

  auto close = [&]() {
    bool changed = true;
    while (changed) {
      changed = false;
      for (const Gate& gate : net.gates) {
        const bool ready = std::all_of(gate.inputs.begin(), gate.inputs.end(),
                                       [&](const std::string& n) { return reachable.count(n); });
        if (!ready) continue;
        for (const auto& node : gate.outputs) changed |= reachable.insert(node).second;
      }
      for (const Wire& wire : net.wires) {
        if (reachable.count(wire.a) && !reachable.count(wire.b)) {
          reachable.insert(wire.b);
          changed = true;
        } else if (reachable.count(wire.b) && !reachable.count(wire.a)) {
          reachable.insert(wire.a);
          changed = true;
        }
      }
    }
  };

  std::vector<std::string> seeds;
  close();
  while (reachable.size() < nodes.size()) {
    bool advanced = false;
    for (const auto& candidate : candidates) {
      if (!reachable.count(candidate)) {
        seeds.push_back(candidate);
        reachable.insert(candidate);
        close();
        advanced = true;
        break;
      }
    }
    if (!advanced) {
      // Cannot happen for a validated network: every node is a gate output
      // (derivable), a gate input, or dangling (both in `candidates`).
      throw std::logic_error("seed search failed to cover the network");
    }
  }
  return seeds;
}

StateVector prepare_initial_state(const Network& net, const Assignment& fill) {
  const std::vector<std::string> free_nodes = free_fill_nodes(net);
  const std::set<std::string> free_set(free_nodes.begin(), free_nodes.end());
  for (const auto& [node, bit] : fill) {
    if (free_set.find(node) == free_set.end()) {
      throw std::invalid_argument(
          "fill assigns '" + node +
          "', which is not a free input (it is constrained or classically derived)");
    }
  }
  Assignment seed = net.input_constraints;
  for (const auto& node : free_nodes) {
    const auto it = fill.find(node);
    seed[node] = it == fill.end() ? 0 : it->second;
  }
  const Assignment total = classical_propagate(net, seed);
  const NetworkSpace space(net);
  return StateVector::basis_state(space.basis(), space.encode(total));
}

bool check_assignment(const Network& net, const Assignment& assignment) {
  const std::vector<std::string> nodes = network_nodes(net);
  for (const auto& node : nodes) {
    const auto it = assignment.find(node);
    if (it == assignment.end()) {
      throw std::invalid_argument("assignment is missing node '" + node + "'");
    }
    if (it->second != 0 && it->second != 1) {
      throw std::invalid_argument("assignment gives node '" + node + "' a non-bit value");
    }
  }
  for (const Gate& gate : net.gates) {
    std::string row;
    row.reserve(gate.table.fan_in + gate.table.fan_out);
    for (const auto& node : gate.inputs) row.push_back(static_cast<char>('0' + assignment.at(node)));
    for (const auto& node : gate.outputs) row.push_back(static_cast<char>('0' + assignment.at(node)));
    if (!std::binary_search(gate.table.rows.begin(), gate.table.rows.end(), row)) {
      return false;
    }
  }
  for (const Wire& wire : net.wires) {
    if (assignment.at(wire.a) == assignment.at(wire.b)) return false;
  }
  for (const auto& [node, bit] : net.input_constraints) {
    if (assignment.at(node) != bit) return false;
  }
  for (const auto& [node, bit] : net.output_constraints) {
    if (assignment.at(node) != bit) return false;
  }
  return true;
}

std::vector<Assignment> brute_force_oracle(const Network& net) {
  const std::vector<std::string> free_nodes = free_fill_nodes(net);
  const std::size_t k = free_nodes.size();
  if (k > 24) {
    throw std::runtime_error("brute-force oracle capped at 24 free nodes, network has " +
                             std::to_string(k));
  }
  std::vector<Assignment> solutions;
  const std::uint64_t count = std::uint64_t{1} << k;
  for (std::uint64_t mask = 0; mask < count; ++mask) {
    Assignment seed = net.input_constraints;
    for (std::size_t i = 0; i < k; ++i) {
      seed[free_nodes[i]] = static_cast<int>((mask >> (k - 1 - i)) & 1u);
    }
    Assignment total;
    try {
      total = classical_propagate(net, seed);
    } catch (const std::runtime_error&) {
      continue;  // conflicting deduction: this seed extends to no assignment
    }
    if (check_assignment(net, total)) solutions.push_back(std::move(total));
  }
  return solutions;
}

NetworkSpace::NetworkSpace(Network net) : net_(std::move(net)), basis_({Subsystem::qubit("_")}) {
  validate_network(net_);
  nodes_ = network_nodes(net_);
  const auto host = gate_index_of_node(net_);

  std::vector<Subsystem> subsystems;
  for (std::size_t g = 0; g < net_.gates.size(); ++g) {
    const Gate& gate = net_.gates[g];
    subsystems.push_back(Subsystem{"g" + std::to_string(g), gate.table.rows});
    for (std::size_t j = 0; j < gate.inputs.size(); ++j) {
      sites_[gate.inputs[j]] = NodeSite{g, j};
    }
    for (std::size_t j = 0; j < gate.outputs.size(); ++j) {
      sites_[gate.outputs[j]] = NodeSite{g, gate.table.fan_in + j};
    }
  }
  for (const auto& node : nodes_) {
    if (host.find(node) != host.end()) continue;
    sites_[node] = NodeSite{subsystems.size(), 0};
    subsystems.push_back(Subsystem::qubit(node));
  }
  basis_ = Basis(std::move(subsystems));

  for (const Wire& wire : net_.wires) {
    const auto sa = node_sectors(wire.a);
    const auto sb = node_sectors(wire.b);
    std::vector<char> b_is_one(basis_.dim(), 0);
    for (const std::size_t idx : sb[1]) b_is_one[idx] = 1;
    std::vector<std::size_t> keep;
    for (const std::size_t idx : sa[0]) {
      if (b_is_one[idx]) keep.push_back(idx);
    }
    for (const std::size_t idx : sa[1]) {
      if (!b_is_one[idx]) keep.push_back(idx);
    }
    std::sort(keep.begin(), keep.end());
    if (keep.empty()) {
      throw std::invalid_argument("wire '" + wire.a + "'-'" + wire.b +
                                  "' admits no basis state");
    }
    wire_projectors_.push_back(projector_onto_indices(basis_, keep));
  }
}

const NodeSite& NetworkSpace::site(const std::string& node) const {
  const auto it = sites_.find(node);
  if (it == sites_.end()) {
    throw std::invalid_argument("unknown node '" + node + "'");
  }
  return it->second;
}

std::array<std::vector<std::size_t>, 2> NetworkSpace::node_sectors(const std::string& node) const {
  const NodeSite& where = site(node);
  const Subsystem& sub = basis_.subsystem(where.subsystem);
  std::array<std::vector<std::size_t>, 2> sectors;
  for (std::size_t idx = 0; idx < basis_.dim(); ++idx) {
    const std::size_t digit = basis_.digit_at(idx, where.subsystem);
    const int bit = sub.labels[digit][where.char_pos] - '0';
    sectors[static_cast<std::size_t>(bit)].push_back(idx);
  }
  return sectors;
}

Assignment NetworkSpace::decode(std::size_t index) const {
  Assignment out;
  for (const auto& [node, where] : sites_) {
    const std::size_t digit = basis_.digit_at(index, where.subsystem);
    out[node] = basis_.subsystem(where.subsystem).labels[digit][where.char_pos] - '0';
  }
  return out;
}

std::size_t NetworkSpace::encode(const Assignment& assignment) const {
  std::vector<std::size_t> digits(basis_.subsystem_count(), 0);
  for (std::size_t g = 0; g < net_.gates.size(); ++g) {
    const Gate& gate = net_.gates[g];
    std::string row;
    for (const auto& node : gate.inputs) {
      row.push_back(static_cast<char>('0' + assignment.at(node)));
    }
    for (const auto& node : gate.outputs) {
      row.push_back(static_cast<char>('0' + assignment.at(node)));
    }
    const auto& labels = basis_.subsystem(g).labels;
    const auto it = std::lower_bound(labels.begin(), labels.end(), row);
    if (it == labels.end() || *it != row) {
      throw std::invalid_argument("assignment violates gate '" + gate.table.kind + "' (#" +
                                  std::to_string(g) + "): tuple " + row + " is inadmissible");
    }
    digits[g] = static_cast<std::size_t>(it - labels.begin());
  }
  for (const auto& [node, where] : sites_) {
    if (where.subsystem >= net_.gates.size()) {
      digits[where.subsystem] = static_cast<std::size_t>(assignment.at(node));
    }
  }
  return basis_.index_of(digits);
}

SatOutcome solve_satisfiability(const Network& net, const SolveOptions& options) {
  if (options.steps < 1) {
    throw std::invalid_argument("solve needs at least one step");
  }
  const NetworkSpace space(net);
  const std::vector<std::string> free_nodes = free_fill_nodes(net);

  // Classical preparation.  A caller-given fill is authoritative (conflicts
  // are errors); otherwise start all-zeros and walk fills lexicographically
  // until one propagates cleanly.
  Assignment fill;
  Assignment prepared;
  bool have_prep = false;
  if (!options.fill.empty()) {
    fill = options.fill;
    prepared = classical_propagate(net, [&] {
      const std::set<std::string> free_set(free_nodes.begin(), free_nodes.end());
      for (const auto& [node, bit] : fill) {
        if (!free_set.count(node)) {
          throw std::invalid_argument("fill assigns '" + node + "', which is not a free input");
        }
      }
      Assignment seed = net.input_constraints;
      for (const auto& node : free_nodes) {
        const auto it = fill.find(node);
        seed[node] = it == fill.end() ? 0 : it->second;
      }
      return seed;
    }());
    have_prep = true;
  } else {
    const std::size_t k = free_nodes.size();
    if (k > 24) {
      throw std::runtime_error("fill search capped at 24 free nodes, network has " +
                               std::to_string(k));
    }
    for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << k); ++mask) {
      Assignment seed = net.input_constraints;
      fill.clear();
      for (std::size_t i = 0; i < k; ++i) {
        const int bit = static_cast<int>((mask >> (k - 1 - i)) & 1u);
        seed[free_nodes[i]] = bit;
        fill[free_nodes[i]] = bit;
      }
      try {
        prepared = classical_propagate(net, seed);
        have_prep = true;
        break;
      } catch (const std::runtime_error&) {
        continue;
      }
    }
  }

  SatOutcome outcome;
  if (!have_prep) {
    outcome.status = SatOutcome::Status::Unsat;
    outcome.evidence = "no fill yields a consistent classical preparation";
    return outcome;
  }
  outcome.prepared = prepared;
  if (!fill.empty()) {
    log(LogLevel::Info, "prepared with fill " + fill_to_string(fill));
  }

  // Drive every output-constrained node whose prepared value is wrong.
  std::vector<std::string> mismatched;
  for (const auto& [node, bit] : net.output_constraints) {
    if (prepared.at(node) != bit) mismatched.push_back(node);
  }

  const StateVector initial =
      StateVector::basis_state(space.basis(), space.encode(prepared));
  const double delta_phi = (kPi / 2.0) / static_cast<double>(options.steps);

  std::vector<MarginalSchedule> marginals;
  for (const auto& [node, bit] : net.input_constraints) {
    const auto sectors = space.node_sectors(node);
    RVector p = RVector::Zero(2);
    p(bit) = 1.0;
    marginals.push_back(
        MarginalSchedule::pinned_partition(node, {sectors[0], sectors[1]}, std::move(p)));
  }
  for (const auto& node : mismatched) {
    const auto sectors = space.node_sectors(node);
    const int from = prepared.at(node);
    std::vector<RVector> table(options.steps + 1, RVector::Zero(2));
    for (std::size_t n = 0; n <= options.steps; ++n) {
      const double phi = delta_phi * static_cast<double>(n);
      const double c = std::cos(phi);
      const double s = std::sin(phi);
      table[n](from) = c * c;
      table[n](1 - from) = s * s;
    }
    marginals.push_back(MarginalSchedule::driven_partition(node, {sectors[0], sectors[1]},
                                                           std::move(table)));
  }

  ConstraintSystem system(space.basis(), space.wire_projectors(), std::move(marginals), initial,
                          options.steps);
  system.delta_phi = delta_phi;

  EvolutionOutcome evolution = evolve(system);
  outcome.trajectory = std::move(evolution.trajectory);
  outcome.final_state = evolution.final_state;

  const CVector& amps = evolution.final_state.amplitudes();
  Eigen::Index argmax = 0;
  double best = 0.0;
  for (Eigen::Index i = 0; i < amps.size(); ++i) {
    const double w = std::norm(amps(i));
    if (w > best) {
      best = w;
      argmax = i;
    }
  }
  outcome.fidelity = best;

  if (!evolution.feasible()) {
    outcome.status = SatOutcome::Status::Unsat;
    outcome.infeasible_step = evolution.infeasible_step;
    outcome.infeasible_residual = evolution.infeasible_residual;
    outcome.evidence = "evolution infeasible at step " +
                       std::to_string(evolution.infeasible_step) + " of " +
                       std::to_string(options.steps) + " (stalled residual " +
                       std::to_string(evolution.infeasible_residual) + ")";
    return outcome;
  }

  if (best >= 1.0 - 1e-6) {
    const Assignment decoded = space.decode(static_cast<std::size_t>(argmax));
    if (check_assignment(net, decoded)) {
      outcome.status = SatOutcome::Status::Solution;
      outcome.assignment = decoded;
    } else {
      outcome.status = SatOutcome::Status::Unsat;
      outcome.evidence = "readout reached a single basis state that fails verification";
    }
    return outcome;
  }

  // Genuine superposition: Born-sample one branch, then verify it.
  std::vector<double> weights(static_cast<std::size_t>(amps.size()), 0.0);
  double total = 0.0;
  for (Eigen::Index i = 0; i < amps.size(); ++i) {
    double w = std::norm(amps(i));
    if (w < 1e-9) w = 0.0;
    weights[static_cast<std::size_t>(i)] = w;
    total += w;
  }
  std::mt19937_64 engine(options.seed);
  const double u =
      static_cast<double>(engine() >> 11) * (1.0 / 9007199254740992.0) * total;
  double cumulative = 0.0;
  std::size_t sampled_index = weights.size() - 1;
  for (std::size_t i = 0; i < weights.size(); ++i) {
    cumulative += weights[i];
    if (u < cumulative) {
      sampled_index = i;
      break;
    }
  }
  const Assignment decoded = space.decode(sampled_index);
  if (check_assignment(net, decoded)) {
    outcome.status = SatOutcome::Status::Multi;
    outcome.assignment = decoded;
    outcome.sampled = true;
  } else {
    outcome.status = SatOutcome::Status::Unsat;
    outcome.evidence = "sampled readout fails verification";
  }
  return outcome;
}

}  // namespace diak
