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
#include <cctype>
#include <map>
#include <set>
#include <sstream>
#include <stdexcept>

#include "diakoptic/network.hpp"

namespace diak {

namespace {

[[noreturn]] void fail(std::size_t line, const std::string& message) {
  throw std::invalid_argument("netlist line " + std::to_string(line) + ": " + message);
}

bool valid_node_name(const std::string& token) {
  if (token.empty()) return false;
  if (!std::isalpha(static_cast<unsigned char>(token[0])) && token[0] != '_') return false;
  for (const char c : token) {
    if (!std::isalnum(static_cast<unsigned char>(c)) && c != '_') return false;
  }
  return true;
}

bool valid_row(const std::string& row, std::size_t width) {
  if (row.size() != width) return false;
  return std::all_of(row.begin(), row.end(), [](char c) { return c == '0' || c == '1'; });
}

std::vector<std::string> tokenize(const std::string& line) {
  std::string padded;
  padded.reserve(line.size() + 8);
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (c == '-' && i + 1 < line.size() && line[i + 1] == '>') {
      padded += " -> ";
      ++i;
    } else if (c == '{' || c == '}' || c == '=' || c == ',') {
      padded += ' ';
      padded += c;
      padded += ' ';
    } else {
      padded += c;
    }
  }
  std::istringstream stream(padded);
  std::vector<std::string> tokens;
  std::string token;
  while (stream >> token) {
    if (token != ",") tokens.push_back(token);
  }
  return tokens;
}

int parse_bit(const std::string& token, std::size_t line) {
  if (token == "0") return 0;
  if (token == "1") return 1;
  fail(line, "expected a bit (0 or 1), got '" + token + "'");
}

}  // namespace

GateTable builtin_gate_table(const std::string& kind) {
  if (kind == "not") {
    return GateTable{"not", 1, 1, {"01", "10"}};
  }
  if (kind == "cnot") {
    // (t, u) -> (v, r): v = t, r = t XOR u.
    return GateTable{"cnot", 2, 2, {"0000", "0101", "1011", "1110"}};
  }
  if (kind == "toffoli") {
    // (a, b, c) -> (a, b, c XOR (a AND b)).
    return GateTable{"toffoli", 3, 3,
                     {"000000", "001001", "010010", "011011", "100100", "101101", "110111",
                      "111110"}};
  }
  throw std::invalid_argument("unknown gate kind '" + kind +
                              "' (built-ins: not, cnot, toffoli)");
}

GateTable make_gate_table(std::string kind, std::size_t fan_in, std::size_t fan_out,
                          std::vector<std::string> rows) {
  if (fan_in < 1 || fan_in > 10) {
    throw std::invalid_argument("gate '" + kind + "': input width must be in 1..10");
  }
  if (fan_out != fan_in) {
    throw std::invalid_argument("gate '" + kind +
                                "': reversible tables need equal input and output width");
  }
  const std::size_t expected = std::size_t{1} << fan_in;
  if (rows.size() != expected) {
    throw std::invalid_argument("gate '" + kind + "': expected " + std::to_string(expected) +
                                " rows covering every input tuple, got " +
                                std::to_string(rows.size()));
  }
  for (const auto& row : rows) {
    if (!valid_row(row, fan_in + fan_out)) {
      throw std::invalid_argument("gate '" + kind + "': bad row '" + row + "'");
    }
  }
  std::sort(rows.begin(), rows.end());
  std::set<std::string> ins;
  std::set<std::string> outs;
  for (const auto& row : rows) {
    ins.insert(row.substr(0, fan_in));
    outs.insert(row.substr(fan_in));
  }
  if (ins.size() != expected) {
    throw std::invalid_argument("gate '" + kind + "': input tuples must be pairwise distinct");
  }
  if (outs.size() != expected) {
    throw std::invalid_argument("gate '" + kind +
                                "': output tuples repeat, table is not reversible");
  }
  return GateTable{std::move(kind), fan_in, fan_out, std::move(rows)};
}

void validate_network(const Network& net) {
  std::set<std::string> gate_hosted;
  for (std::size_t g = 0; g < net.gates.size(); ++g) {
    const Gate& gate = net.gates[g];
    if (gate.inputs.size() != gate.table.fan_in || gate.outputs.size() != gate.table.fan_out) {
      throw std::invalid_argument("gate '" + gate.table.kind + "' (#" + std::to_string(g) +
                                  ") terminal count does not match its table");
    }
    std::vector<std::string> terminals = gate.inputs;
    terminals.insert(terminals.end(), gate.outputs.begin(), gate.outputs.end());
    for (const auto& node : terminals) {
      if (!valid_node_name(node)) {
        throw std::invalid_argument("bad node name '" + node + "'");
      }
      if (!gate_hosted.insert(node).second) {
        throw std::invalid_argument("duplicate node '" + node +
                                    "': a node may sit on only one gate terminal");
      }
    }
  }

  std::map<std::string, std::size_t> gate_of;
  for (std::size_t g = 0; g < net.gates.size(); ++g) {
    for (const auto& node : net.gates[g].inputs) gate_of[node] = g;
    for (const auto& node : net.gates[g].outputs) gate_of[node] = g;
  }

  std::set<std::string> wired;
  for (const Wire& wire : net.wires) {
    if (!valid_node_name(wire.a) || !valid_node_name(wire.b)) {
      throw std::invalid_argument("bad wire endpoint name");
    }
    if (wire.a == wire.b) {
      throw std::invalid_argument("wire endpoints must be distinct nodes (got '" + wire.a +
                                  "' twice)");
    }
    const auto ga = gate_of.find(wire.a);
    const auto gb = gate_of.find(wire.b);
    if (ga != gate_of.end() && gb != gate_of.end() && ga->second == gb->second) {
      throw std::invalid_argument("wire '" + wire.a + "'-'" + wire.b +
                                  "' joins two terminals of the same gate");
    }
    if (!wired.insert(wire.a).second) {
      throw std::invalid_argument("node '" + wire.a + "' sits on more than one wire");
    }
    if (!wired.insert(wire.b).second) {
      throw std::invalid_argument("node '" + wire.b + "' sits on more than one wire");
    }
  }

  const std::vector<std::string> known = network_nodes(net);
  const std::set<std::string> known_set(known.begin(), known.end());
  for (const auto* constraints : {&net.input_constraints, &net.output_constraints}) {
    for (const auto& [node, bit] : *constraints) {
      if (bit != 0 && bit != 1) {
        throw std::invalid_argument("constraint on '" + node + "' has non-bit value " +
                                    std::to_string(bit));
      }
      if (known_set.find(node) == known_set.end()) {
        throw std::invalid_argument("constraint names unknown node '" + node + "'");
      }
    }
  }
}

std::vector<std::string> network_nodes(const Network& net) {
  std::vector<std::string> nodes;
  std::set<std::string> seen;
  auto add = [&](const std::string& node) {
    if (seen.insert(node).second) nodes.push_back(node);
  };
  for (const Gate& gate : net.gates) {
    for (const auto& node : gate.inputs) add(node);
    for (const auto& node : gate.outputs) add(node);
  }
  for (const Wire& wire : net.wires) {
    add(wire.a);
    add(wire.b);
  }
  return nodes;
}

Network parse_netlist(const std::string& text) {
  Network net;
  // Constraint lines are remembered with their source line so the existence
  // check (which must wait until every node has been declared) can still
  // point at the offending line.
  std::vector<std::pair<std::size_t, std::string>> constraint_lines;

  std::istringstream stream(text);
  std::string raw;
  std::size_t line_no = 0;
  while (std::getline(stream, raw)) {
    ++line_no;
    const std::size_t hash = raw.find('#');
    if (hash != std::string::npos) raw.erase(hash);
    const std::vector<std::string> tokens = tokenize(raw);
    if (tokens.empty()) continue;

    if (tokens[0] == "gate") {
      if (tokens.size() < 2) fail(line_no, "missing gate kind");
      GateTable table;
      std::vector<std::string> rest;
      if (tokens[1] == "table") {
        if (tokens.size() < 3) fail(line_no, "missing table name");
        const std::string& name = tokens[2];
        const auto brace = std::find(tokens.begin(), tokens.end(), "{");
        const auto arrow = std::find(tokens.begin(), tokens.end(), "->");
        if (brace == tokens.end() || tokens.back() != "}") {
          fail(line_no, "user table needs '{ rows }' on the same line");
        }
        if (arrow == tokens.end() || arrow > brace) fail(line_no, "missing '->'");
        const std::size_t fan_in = static_cast<std::size_t>(arrow - (tokens.begin() + 3));
        const std::size_t fan_out = static_cast<std::size_t>(brace - (arrow + 1));
        std::vector<std::string> rows(brace + 1, tokens.end() - 1);
        try {
          table = make_gate_table(name, fan_in, fan_out, std::move(rows));
        } catch (const std::invalid_argument& e) {
          fail(line_no, e.what());
        }
        rest.assign(tokens.begin() + 3, brace);
      } else {
        try {
          table = builtin_gate_table(tokens[1]);
        } catch (const std::invalid_argument& e) {
          fail(line_no, e.what());
        }
        rest.assign(tokens.begin() + 2, tokens.end());
      }
      const auto arrow = std::find(rest.begin(), rest.end(), "->");
      if (arrow == rest.end()) fail(line_no, "missing '->'");
      Gate gate;
      gate.table = std::move(table);
      gate.inputs.assign(rest.begin(), arrow);
      gate.outputs.assign(arrow + 1, rest.end());
      if (gate.inputs.size() != gate.table.fan_in) {
        fail(line_no, "gate '" + gate.table.kind + "' expects " +
                          std::to_string(gate.table.fan_in) + " input node(s)");
      }
      if (gate.outputs.size() != gate.table.fan_out) {
        fail(line_no, "gate '" + gate.table.kind + "' expects " +
                          std::to_string(gate.table.fan_out) + " output node(s)");
      }
      for (const auto& node : gate.inputs) {
        if (!valid_node_name(node)) fail(line_no, "bad node name '" + node + "'");
      }
      for (const auto& node : gate.outputs) {
        if (!valid_node_name(node)) fail(line_no, "bad node name '" + node + "'");
      }
      net.gates.push_back(std::move(gate));
    } else if (tokens[0] == "wire") {
      if (tokens.size() != 3) fail(line_no, "expected: wire <node> <node>");
      if (!valid_node_name(tokens[1]) || !valid_node_name(tokens[2])) {
        fail(line_no, "bad node name in wire");
      }
      net.wires.push_back(Wire{tokens[1], tokens[2]});
    } else if (tokens[0] == "in" || tokens[0] == "out") {
      if (tokens.size() != 4 || tokens[2] != "=") {
        fail(line_no, "expected: " + tokens[0] + " <node> = <bit>");
      }
      if (!valid_node_name(tokens[1])) fail(line_no, "bad node name '" + tokens[1] + "'");
      const int bit = parse_bit(tokens[3], line_no);
      Assignment& target = tokens[0] == "in" ? net.input_constraints : net.output_constraints;
      const auto [it, inserted] = target.emplace(tokens[1], bit);
      if (!inserted) {
        fail(line_no, "node '" + tokens[1] + "' already has an '" + tokens[0] + "' constraint");
      }
      constraint_lines.emplace_back(line_no, tokens[1]);
    } else {
      fail(line_no, "unknown directive '" + tokens[0] + "'");
    }
  }

  try {
    validate_network(net);
  } catch (const std::invalid_argument& e) {
    // Attach a line number when the failure concerns a constraint we saw.
    const std::string message = e.what();
    for (const auto& [line, node] : constraint_lines) {
      if (message.find("'" + node + "'") != std::string::npos) fail(line, message);
    }
    throw;
  }
  return net;
}

}  // namespace diak
