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

// Acceptance gate: ten end-to-end criteria, one pass/fail line each, nonzero
// exit if any fails.  Unlike the unit suite this binary exercises the library
// at full production scale (1000-step runs, the exhaustive small-network
// corpus) and measures wall-clock budgets.

#include <sys/wait.h>

#include <algorithm>
#include <bit>
#include <chrono>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "diakoptic/connection.hpp"
#include "diakoptic/evolver.hpp"
#include "diakoptic/fock.hpp"
#include "diakoptic/hilbert.hpp"
#include "diakoptic/network.hpp"

using namespace diak;

namespace {

struct Outcome {
  bool passed = false;
  std::string detail;
};

int g_failures = 0;

void report(int id, const char* name, const Outcome& outcome) {
  std::printf("[%s] %2d %-34s %s\n", outcome.passed ? "PASS" : "FAIL", id, name,
              outcome.detail.c_str());
  std::fflush(stdout);
  if (!outcome.passed) ++g_failures;
}

template <typename F>
Outcome guarded(F&& f) {
  try {
    return f();
  } catch (const std::exception& e) {
    return {false, std::string("unexpected exception: ") + e.what()};
  }
}

std::string fmt(const char* format, ...) {
  va_list args;
  va_start(args, format);
  char buffer[512];
  std::vsnprintf(buffer, sizeof buffer, format, args);
  va_end(args);
  return buffer;
}

double ms_since(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start)
      .count();
}

RVector pops2(double p0, double p1) {
  RVector p(2);
  p << p0, p1;
  return p;
}

/// Exclusion projector on (r, s) plus the r-side population track of a
/// rotation schedule, starting from the matching closed-form state.
ConstraintSystem driven_link(double theta, std::size_t steps) {
  RotationSchedule schedule;
  schedule.theta = theta;
  schedule.steps = steps;
  schedule.validate();

  const StateVector initial = closed_form_state(theta, 0.0);
  const Basis basis = initial.basis();
  std::vector<RVector> table;
  table.reserve(steps + 1);
  for (std::size_t n = 0; n <= steps; ++n) {
    table.push_back(rotation_populations(schedule.angle_at(n)));
  }
  ConstraintSystem system(basis, {exclusion_projector(ConnectionSpec{}, basis)},
                          {MarginalSchedule::driven(basis, "r", std::move(table))}, initial,
                          steps);
  system.delta_phi = schedule.delta_phi();
  return system;
}

std::string read_netlist(const std::string& name) {
  const std::string path = std::string(DIAKOPTIC_NETLIST_DIR) + "/" + name;
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

const std::vector<double>& theta_sweep() {
  static const std::vector<double> values{0.0, kPi / 8.0, kPi / 4.0, kPi / 3.0};
  return values;
}

// ---------------------------------------------------------------------------
// Criteria 1 & 2 share the four 1000-step runs.

struct LinkRun {
  double theta = 0.0;
  double delta_phi = 0.0;
  Trajectory trajectory;
};

std::vector<LinkRun> g_link_runs;

Outcome criterion_trajectory() {
  constexpr std::size_t kSteps = 1000;
  double worst_dev = 0.0;
  double slowest_ms = 0.0;
  for (const double theta : theta_sweep()) {
    const auto start = std::chrono::steady_clock::now();
    ConstraintSystem system = driven_link(theta, kSteps);
    const double delta_phi = system.delta_phi;
    EvolutionOutcome outcome = evolve(system);
    const double elapsed = ms_since(start);
    slowest_ms = std::max(slowest_ms, elapsed);
    if (!outcome.feasible()) {
      return {false, fmt("theta=%.4f run went infeasible at step %zu", theta,
                         outcome.infeasible_step)};
    }
    if (outcome.trajectory.points.size() != kSteps + 1) {
      return {false, fmt("theta=%.4f recorded %zu points, expected %zu", theta,
                         outcome.trajectory.points.size(), kSteps + 1)};
    }
    for (const auto& point : outcome.trajectory.points) {
      const StateVector target =
          closed_form_state(theta, delta_phi * static_cast<double>(point.step));
      worst_dev = std::max(worst_dev,
                           (point.state.amplitudes() - target.amplitudes()).norm());
    }
    g_link_runs.push_back(LinkRun{theta, delta_phi, std::move(outcome.trajectory)});
  }
  const bool ok = worst_dev <= 1e-6 && slowest_ms < 1000.0;
  return {ok, fmt("max deviation %.3g (<= 1e-6), slowest run %.0f ms (< 1000 ms)", worst_dev,
                  slowest_ms)};
}

Outcome criterion_marginal() {
  if (g_link_runs.empty()) return {false, "skipped: trajectory runs unavailable"};
  double worst = 0.0;
  for (const LinkRun& run : g_link_runs) {
    for (const auto& point : run.trajectory.points) {
      const double angle = run.theta + run.delta_phi * static_cast<double>(point.step);
      const Operator rho = partial_trace(point.state, {"s"});
      const double s = std::sin(angle);
      const double c = std::cos(angle);
      worst = std::max(worst, std::abs(rho.matrix()(0, 0).real() - s * s));
      worst = std::max(worst, std::abs(rho.matrix()(1, 1).real() - c * c));
    }
  }
  return {worst <= 1e-6, fmt("max s-marginal deviation %.3g (<= 1e-6) over %zu runs", worst,
                             g_link_runs.size())};
}

Outcome criterion_propagator() {
  constexpr int kSamples = 100;
  const Basis basis = closed_form_state(0.0, 0.0).basis();
  const Projector exclusion = exclusion_projector(ConnectionSpec{}, basis);

  double worst_transport = 0.0;
  double worst_commutator = 0.0;
  for (int k = 0; k < kSamples; ++k) {
    const double phi = 2.0 * kPi * static_cast<double>(k) / kSamples;
    const Operator q = connection_propagator(phi);
    for (const double theta : theta_sweep()) {
      const CVector moved = q.matrix() * closed_form_state(theta, 0.0).amplitudes();
      worst_transport = std::max(
          worst_transport, (moved - closed_form_state(theta, phi).amplitudes()).norm());
    }
    const CMatrix commutator =
        exclusion.matrix() * q.matrix() - q.matrix() * exclusion.matrix();
    worst_commutator = std::max(worst_commutator, commutator.cwiseAbs().maxCoeff());
  }
  const bool ok = worst_transport <= 1e-9 && worst_commutator <= 1e-12;
  return {ok, fmt("transport %.3g (<= 1e-9), commutator %.3g (<= 1e-12), %d angles", worst_transport,
                  worst_commutator, kSamples)};
}

Outcome criterion_reference_network() {
  const Network net = parse_netlist(read_netlist("fig2.net"));
  SolveOptions options;
  options.steps = 1000;
  const auto start = std::chrono::steady_clock::now();
  const SatOutcome outcome = solve_satisfiability(net, options);
  const double elapsed = ms_since(start);

  if (outcome.status != SatOutcome::Status::Solution) {
    return {false, fmt("status is not SOLUTION (fidelity %.6f)", outcome.fidelity)};
  }
  const Assignment expected{{"r", 0}, {"s", 1}, {"t", 1}, {"u", 1}, {"v", 1}};
  if (outcome.assignment != expected) {
    return {false, "decoded assignment differs from r=0 s=1 t=1 u=1 v=1"};
  }
  const Assignment& prep = outcome.prepared;
  const bool prepared_ok = prep.at("t") == 0 && prep.at("u") == 1 && prep.at("r") == 1 &&
                           prep.at("s") == 0;
  if (!prepared_ok) {
    return {false, "prepared state does not carry the 0110 pattern on (t, u, r, s)"};
  }
  const bool ok = outcome.fidelity >= 1.0 - 1e-6 && elapsed < 1000.0;
  return {ok, fmt("fidelity %.9f (>= 1-1e-6), %.0f ms (< 1000 ms), assignment verified",
                  outcome.fidelity, elapsed)};
}

Outcome criterion_mismatched_drive() {
  const double theta = kPi / 4.0;
  constexpr std::size_t kSteps = 1000;
  ConstraintSystem system = driven_link(theta, kSteps);

  RotationSchedule schedule;
  schedule.theta = theta;
  schedule.steps = kSteps;
  std::vector<RVector> s_table;
  s_table.reserve(kSteps + 1);
  for (std::size_t n = 0; n <= kSteps; ++n) {
    const double angle = schedule.angle_at(n) + (n == 0 ? 0.0 : 0.3);
    s_table.push_back(pops2(std::sin(angle) * std::sin(angle), std::cos(angle) * std::cos(angle)));
  }
  system.marginals.push_back(MarginalSchedule::driven(system.basis, "s", std::move(s_table)));

  const EvolutionOutcome outcome = evolve(system);
  if (outcome.feasible()) return {false, "run stayed feasible despite the 0.3 rad offset"};
  const bool ok = outcome.infeasible_step >= 1 && outcome.infeasible_step <= kSteps / 20;
  return {ok, fmt("infeasible at step %zu of %zu (must be within the first 5%%)",
                  outcome.infeasible_step, kSteps)};
}

Outcome criterion_unsat_variant() {
  const Network net = parse_netlist(read_netlist("fig2_unsat.net"));
  SolveOptions options;
  options.steps = 1000;
  const SatOutcome outcome = solve_satisfiability(net, options);
  if (outcome.status != SatOutcome::Status::Unsat) return {false, "status is not UNSAT"};
  const std::vector<Assignment> solutions = brute_force_oracle(net);
  if (!solutions.empty()) {
    return {false, fmt("oracle found %zu solutions, expected none", solutions.size())};
  }
  return {true, fmt("UNSAT confirmed (%s), oracle agrees: 0 solutions", outcome.evidence.c_str())};
}

// ---------------------------------------------------------------------------
// Criterion 7: the exhaustive corpus of one- and two-gate networks.

struct Skeleton {
  std::vector<Gate> gates;
  std::vector<Wire> wires;
  std::string label;
};

Gate corpus_gate(const std::string& kind, int index) {
  Gate gate;
  gate.table = builtin_gate_table(kind);
  const std::string suffix = std::to_string(index);
  if (kind == "not") {
    gate.inputs = {"a" + suffix};
    gate.outputs = {"b" + suffix};
  } else {
    gate.inputs = {"t" + suffix, "u" + suffix};
    gate.outputs = {"v" + suffix, "r" + suffix};
  }
  return gate;
}

std::vector<std::string> terminals_of(const Gate& gate) {
  std::vector<std::string> nodes = gate.inputs;
  nodes.insert(nodes.end(), gate.outputs.begin(), gate.outputs.end());
  return nodes;
}

std::string wire_label(const std::vector<Wire>& wires) {
  if (wires.empty()) return "wires[]";
  std::string out = "wires[";
  for (std::size_t i = 0; i < wires.size(); ++i) {
    if (i) out += ",";
    out += wires[i].a + "-" + wires[i].b;
  }
  return out + "]";
}

/// Every one-gate network (bare, or with one inverting stub to a fresh node)
/// and every two-gate network with all node-disjoint cross-gate wire sets.
std::vector<Skeleton> corpus_skeletons() {
  std::vector<Skeleton> skeletons;

  for (const std::string kind : {"not", "cnot"}) {
    const Gate gate = corpus_gate(kind, 1);
    skeletons.push_back({{gate}, {}, kind + "1 wires[]"});
    for (const auto& node : terminals_of(gate)) {
      const std::vector<Wire> wires{Wire{node, "w1"}};
      skeletons.push_back({{gate}, wires, kind + "1 " + wire_label(wires)});
    }
  }

  const std::pair<std::string, std::string> pairs[] = {
      {"not", "not"}, {"not", "cnot"}, {"cnot", "cnot"}};
  for (const auto& [first, second] : pairs) {
    const Gate g1 = corpus_gate(first, 1);
    const Gate g2 = corpus_gate(second, 2);
    const std::string base = first + "1+" + second + "2 ";
    const std::vector<std::string> left = terminals_of(g1);
    const std::vector<std::string> right = terminals_of(g2);

    skeletons.push_back({{g1, g2}, {}, base + "wires[]"});

    std::vector<Wire> cross;
    for (const auto& a : left) {
      for (const auto& b : right) cross.push_back(Wire{a, b});
    }
    for (const Wire& wire : cross) {
      const std::vector<Wire> wires{wire};
      skeletons.push_back({{g1, g2}, wires, base + wire_label(wires)});
    }
    for (std::size_t i = 0; i < cross.size(); ++i) {
      for (std::size_t j = i + 1; j < cross.size(); ++j) {
        if (cross[i].a == cross[j].a || cross[i].b == cross[j].b) continue;
        const std::vector<Wire> wires{cross[i], cross[j]};
        skeletons.push_back({{g1, g2}, wires, base + wire_label(wires)});
      }
    }
  }
  return skeletons;
}

std::string constraint_label(const Assignment& in, const Assignment& out) {
  std::string label = " in{";
  for (const auto& [node, bit] : in) label += node + "=" + std::to_string(bit);
  label += "} out{";
  for (const auto& [node, bit] : out) label += node + "=" + std::to_string(bit);
  return label + "}";
}

Outcome criterion_oracle_equivalence() {
  const auto start = std::chrono::steady_clock::now();
  std::size_t instances = 0;
  std::size_t disagreements = 0;
  std::size_t bad_assignments = 0;
  std::vector<std::string> samples;

  for (const Skeleton& skeleton : corpus_skeletons()) {
    std::set<std::string> on_gate;
    std::vector<std::string> input_universe;
    std::vector<std::string> output_universe;
    for (const Gate& gate : skeleton.gates) {
      for (const auto& node : gate.inputs) {
        on_gate.insert(node);
        input_universe.push_back(node);
      }
      for (const auto& node : gate.outputs) {
        on_gate.insert(node);
        output_universe.push_back(node);
      }
    }
    for (const Wire& wire : skeleton.wires) {
      for (const auto& node : {wire.a, wire.b}) {
        if (!on_gate.count(node)) {
          input_universe.push_back(node);   // a dangling stub is seedable
          output_universe.push_back(node);  // ... and observable
        }
      }
    }

    std::vector<Assignment> in_choices{Assignment{}};
    for (const auto& node : input_universe) {
      for (int bit : {0, 1}) in_choices.push_back(Assignment{{node, bit}});
    }
    std::vector<Assignment> out_choices{Assignment{}};
    for (const auto& node : output_universe) {
      for (int bit : {0, 1}) out_choices.push_back(Assignment{{node, bit}});
    }

    for (const Assignment& in : in_choices) {
      for (const Assignment& out : out_choices) {
        Network net;
        net.gates = skeleton.gates;
        net.wires = skeleton.wires;
        net.input_constraints = in;
        net.output_constraints = out;
        ++instances;

        const bool oracle_sat = !brute_force_oracle(net).empty();
        SolveOptions options;
        options.steps = 200;
        const SatOutcome outcome = solve_satisfiability(net, options);
        const bool solver_sat = outcome.status != SatOutcome::Status::Unsat;

        if (solver_sat != oracle_sat) {
          ++disagreements;
          if (samples.size() < 3) {
            samples.push_back(skeleton.label + constraint_label(in, out) +
                              (oracle_sat ? " oracle=SAT solver=UNSAT" : " oracle=UNSAT solver=SAT"));
          }
        }
        if (!outcome.assignment.empty() && !check_assignment(net, outcome.assignment)) {
          ++bad_assignments;
          if (samples.size() < 3) {
            samples.push_back(skeleton.label + constraint_label(in, out) + " bad assignment");
          }
        }
      }
    }
  }

  const double elapsed_s = ms_since(start) / 1000.0;
  std::string detail =
      fmt("%zu instances, %zu disagreements, %zu bad assignments, %.0f s (< 300 s)", instances,
          disagreements, bad_assignments, elapsed_s);
  for (const auto& sample : samples) detail += "\n        " + sample;
  const bool ok =
      instances >= 500 && disagreements == 0 && bad_assignments == 0 && elapsed_s < 300.0;
  return {ok, detail};
}

Outcome criterion_fermionic_suite() {
  const double car = car_deviation(ladder_operators());
  if (car > 1e-14) return {false, fmt("canonical anticommutators deviate by %.3g", car)};

  const FockEnergies energies;
  const Operator h = penalty_hamiltonian(energies);
  std::vector<Eigen::Index> sector;
  for (Eigen::Index i = 0; i < h.matrix().rows(); ++i) {
    if (std::popcount(static_cast<unsigned>(i)) == 2) sector.push_back(i);
  }
  CMatrix block(sector.size(), sector.size());
  for (std::size_t row = 0; row < sector.size(); ++row) {
    for (std::size_t col = 0; col < sector.size(); ++col) {
      block(static_cast<Eigen::Index>(row), static_cast<Eigen::Index>(col)) =
          h.matrix()(sector[row], sector[col]);
    }
  }
  Eigen::SelfAdjointEigenSolver<CMatrix> solver(block);
  std::vector<double> spectrum(solver.eigenvalues().data(),
                               solver.eigenvalues().data() + solver.eigenvalues().size());
  std::vector<double> expected{0.0, 0.0, energies.e_c, energies.e_d, energies.e_a, energies.e_b};
  std::sort(expected.begin(), expected.end());
  double spectrum_dev = 0.0;
  for (std::size_t i = 0; i < expected.size(); ++i) {
    spectrum_dev = std::max(spectrum_dev, std::abs(spectrum[i] - expected[i]));
  }
  if (spectrum_dev > 1e-10) {
    return {false, fmt("two-particle spectrum deviates by %.3g", spectrum_dev)};
  }

  const Projector ground = ground_projector(energies);
  if (ground.rank() != 2) {
    return {false, fmt("zero-energy subspace has rank %zu, expected 2", ground.rank())};
  }
  const NamedStates states = named_states();
  const CMatrix intertwiner = slot_to_fock_intertwiner();
  const StateVector e01(slot_basis(), intertwiner.adjoint() * states.q01.amplitudes());
  const StateVector e10(slot_basis(), intertwiner.adjoint() * states.q10.amplitudes());
  const Projector span = projector_from_span({e01, e10});
  const double span_dev = (ground.matrix() - span.matrix()).cwiseAbs().maxCoeff();
  if (span_dev > 1e-10) {
    return {false, fmt("zero-energy subspace differs from the pair span by %.3g", span_dev)};
  }

  const double max_energy = std::max(energies.e_a, energies.e_b);
  double induced_dev = 0.0;
  double worst_xi = 0.0;
  for (const double theta : theta_sweep()) {
    RotationSchedule schedule;
    schedule.theta = theta;
    schedule.steps = 1000;
    const InducedRun run = induced_connection_evolution(theta, schedule, energies);
    for (Eigen::Index n = 0; n < run.qubit_amplitudes.rows(); ++n) {
      const double angle = schedule.angle_at(static_cast<std::size_t>(n));
      const Complex c1 = run.qubit_amplitudes(n, 0);
      const Complex c2 = run.qubit_amplitudes(n, 1);
      const double leak = std::max(0.0, 1.0 - std::norm(c1) - std::norm(c2));
      induced_dev = std::max(
          induced_dev, std::sqrt(std::norm(c1 - Complex(std::cos(angle), 0.0)) +
                                 std::norm(c2 - Complex(std::sin(angle), 0.0)) + leak));
    }
    worst_xi = std::max(worst_xi, run.penalty_expectation.cwiseAbs().maxCoeff());
  }
  const bool ok = induced_dev <= 1e-6 && worst_xi <= 1e-12 * max_energy;
  return {ok, fmt("CAR %.3g, spectrum %.3g, span %.3g, induced %.3g (<= 1e-6), <xi> %.3g", car,
                  spectrum_dev, span_dev, induced_dev, worst_xi)};
}

Outcome criterion_pair_densities() {
  const double k_a = 2.3;
  const double k_b = 0.6;
  const double singlet_zero = spatial_statistics_density(k_a, k_b, 0.0, 0.0, SpinCharacter::Singlet);
  const double triplet_zero = spatial_statistics_density(k_a, k_b, 0.0, 0.0, SpinCharacter::Triplet);

  double singlet_max = 0.0;
  double constancy_dev = 0.0;
  for (int i = 0; i < 1000; ++i) {
    const double x = -5.0 + 10.0 * static_cast<double>(i) / 999.0;
    const double singlet = spatial_statistics_density(k_a, k_b, x, 0.0, SpinCharacter::Singlet);
    const double triplet = spatial_statistics_density(k_a, k_b, x, 0.0, SpinCharacter::Triplet);
    singlet_max = std::max(singlet_max, singlet);
    constancy_dev = std::max(constancy_dev, std::abs(singlet + triplet - singlet_zero));
  }
  const bool ok = triplet_zero <= 1e-12 && singlet_zero >= singlet_max - 1e-12 &&
                  constancy_dev <= 1e-12;
  return {ok, fmt("triplet(0) %.3g, singlet(0) %.6f is the max, total constant within %.3g",
                  triplet_zero, singlet_zero, constancy_dev)};
}

Outcome criterion_determinism() {
  const std::string netlist = std::string(DIAKOPTIC_NETLIST_DIR) + "/fig2.net";
  const std::string out1 = "/tmp/diakoptic_accept_run1.json";
  const std::string out2 = "/tmp/diakoptic_accept_run2.json";
  std::remove(out1.c_str());
  std::remove(out2.c_str());

  for (const std::string& out : {out1, out2}) {
    const std::string command = std::string("\"") + DIAKOPTIC_CLI_PATH + "\" solve \"" + netlist +
                                "\" --steps 1000 --seed 0 --format json --out \"" + out +
                                "\" > /dev/null 2>&1";
    const int status = std::system(command.c_str());
    if (!WIFEXITED(status) || WEXITSTATUS(status) != 0) {
      return {false, fmt("solver run writing %s failed", out.c_str())};
    }
  }
  const std::string first = slurp(out1);
  const std::string second = slurp(out2);
  if (first.empty()) return {false, "solver produced an empty report"};
  if (first != second) return {false, "two identical runs produced different JSON bytes"};
  return {true, fmt("two 1000-step runs agree byte for byte (%zu bytes)", first.size())};
}

}  // namespace

int main() {
  report(1, "closed-form trajectory tracking", guarded(criterion_trajectory));
  report(2, "complement transmission marginal", guarded(criterion_marginal));
  report(3, "propagator consistency", guarded(criterion_propagator));
  report(4, "reference network solve", guarded(criterion_reference_network));
  report(5, "mismatched drive infeasibility", guarded(criterion_mismatched_drive));
  report(6, "unsatisfiable variant detection", guarded(criterion_unsat_variant));
  report(7, "oracle equivalence corpus", guarded(criterion_oracle_equivalence));
  report(8, "fermionic realization suite", guarded(criterion_fermionic_suite));
  report(9, "spatial pair densities", guarded(criterion_pair_densities));
  report(10, "deterministic solver output", guarded(criterion_determinism));

  std::printf("acceptance: %d of 10 criteria passed\n", 10 - g_failures);
  return g_failures == 0 ? EXIT_SUCCESS : EXIT_FAILURE;
}
