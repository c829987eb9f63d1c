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
#include <cstdio>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "diakoptic/connection.hpp"
#include "diakoptic/evolver.hpp"
#include "diakoptic/fock.hpp"
#include "diakoptic/hilbert.hpp"
#include "diakoptic/network.hpp"
#include "diakoptic/report.hpp"
#include "diakoptic/types.hpp"

namespace {

using namespace diak;

// Exit codes shared by the subcommands: 0 success (solve: SOLUTION/MULTI;
// fock-verify: all checks pass), 2 negative result (UNSAT / failed checks),
// 1 configuration or I/O error.
constexpr int kExitOk = 0;
constexpr int kExitError = 1;
constexpr int kExitNegative = 2;

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read input file '" + path + "'");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

void write_report(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot open output file '" + path + "'");
  out << content;
  out.flush();
  if (!out) throw std::runtime_error("write to '" + path + "' failed");
}

Assignment parse_fill(const std::string& text) {
  Assignment fill;
  if (text.empty()) return fill;
  std::stringstream stream(text);
  std::string item;
  while (std::getline(stream, item, ',')) {
    const std::size_t eq = item.find('=');
    if (eq == std::string::npos || eq == 0 || eq + 1 >= item.size()) {
      throw std::invalid_argument("bad --fill entry '" + item + "' (want node=bit)");
    }
    const std::string node = item.substr(0, eq);
    const std::string bit = item.substr(eq + 1);
    if (bit != "0" && bit != "1") {
      throw std::invalid_argument("bad --fill bit for '" + node + "' (want 0 or 1)");
    }
    if (!fill.emplace(node, bit == "1" ? 1 : 0).second) {
      throw std::invalid_argument("duplicate --fill entry for '" + node + "'");
    }
  }
  return fill;
}

FockEnergies parse_energies(const std::string& text) {
  std::vector<double> values;
  std::stringstream stream(text);
  std::string item;
  while (std::getline(stream, item, ',')) {
    std::size_t used = 0;
    double value = 0.0;
    try {
      value = std::stod(item, &used);
    } catch (const std::exception&) {
      throw std::invalid_argument("bad --energies entry '" + item + "'");
    }
    if (used != item.size()) throw std::invalid_argument("bad --energies entry '" + item + "'");
    values.push_back(value);
  }
  if (values.size() != 4) {
    throw std::invalid_argument("--energies wants exactly four values Ea,Eb,Ec,Ed");
  }
  return FockEnergies{values[0], values[1], values[2], values[3]};
}

std::string assignment_line(const Assignment& assignment) {
  std::string line;
  for (const auto& [node, bit] : assignment) {
    if (!line.empty()) line += ' ';
    line += node + '=' + (bit ? '1' : '0');
  }
  return line;
}

// ---------------------------------------------------------------------------
// connection-demo

int cmd_connection_demo(double theta, double phi_final, std::size_t steps,
                        const std::string& out_path, ReportFormat format) {
  RotationSchedule schedule;
  schedule.theta = theta;
  schedule.phi_final = phi_final;
  schedule.steps = steps;
  schedule.validate();

  const StateVector initial = closed_form_state(theta, 0.0);
  const Basis& basis = initial.basis();

  std::vector<RVector> table;
  table.reserve(steps + 1);
  for (std::size_t n = 0; n <= steps; ++n) {
    table.push_back(rotation_populations(schedule.angle_at(n)));
  }

  ConstraintSystem system(basis, {exclusion_projector({}, basis)},
                          {MarginalSchedule::driven(basis, "r", std::move(table))}, initial,
                          steps);
  system.delta_phi = schedule.delta_phi();

  EvolutionOutcome outcome = evolve(system);
  if (!outcome.feasible()) {
    std::cerr << "error: drive became infeasible at step " << outcome.infeasible_step
              << " (residual " << outcome.infeasible_residual << ")\n";
    return kExitError;
  }

  ConnectionReport report;
  report.theta = theta;
  report.phi_final = phi_final;
  report.steps = steps;
  for (const TrajectoryPoint& p : outcome.trajectory.points) {
    const double angle = schedule.angle_at(p.step);
    const StateVector reference = closed_form_state(theta, angle - theta);
    report.max_closed_form_deviation =
        std::max(report.max_closed_form_deviation,
                 (p.state.amplitudes() - reference.amplitudes()).norm());
    const CMatrix rho_r = partial_trace(p.state, {"r"}).matrix();
    const CMatrix rho_s = partial_trace(p.state, {"s"}).matrix();
    const double c2 = std::cos(angle) * std::cos(angle);
    const double s2 = 1.0 - c2;
    const double marginal_dev = std::max(
        {std::abs(rho_r(0, 0).real() - c2), std::abs(rho_r(1, 1).real() - s2),
         std::abs(rho_s(0, 0).real() - s2), std::abs(rho_s(1, 1).real() - c2)});
    report.max_marginal_deviation = std::max(report.max_marginal_deviation, marginal_dev);
  }
  report.unitarity = unitarity_report(outcome.trajectory);
  report.trajectory = std::move(outcome.trajectory);

  std::printf("connection-demo: theta=%.17g phi_final=%.17g steps=%zu\n", theta, phi_final,
              steps);
  std::printf("max closed-form deviation: %.3g\n", report.max_closed_form_deviation);
  std::printf("max marginal deviation:    %.3g\n", report.max_marginal_deviation);
  std::printf("unitarity: norm dev %.3g, min step overlap %.9f, isometry dev %.3g, fit %.3g\n",
              report.unitarity.max_norm_deviation, report.unitarity.min_step_overlap,
              report.unitarity.isometry_deviation, report.unitarity.fit_residual);

  if (!out_path.empty()) {
    write_report(out_path, render_connection_report(basis, report, format));
    std::printf("wrote %s\n", out_path.c_str());
  }
  return kExitOk;
}

// ---------------------------------------------------------------------------
// solve

const char* status_word(SatOutcome::Status status) {
  switch (status) {
    case SatOutcome::Status::Solution:
      return "SOLUTION";
    case SatOutcome::Status::Multi:
      return "MULTI";
    case SatOutcome::Status::Unsat:
      return "UNSAT";
  }
  return "UNSAT";
}

int cmd_solve(const std::string& netlist_path, const SolveOptions& options,
              int oracle_request, const std::string& out_path, ReportFormat format) {
  const Network net = parse_netlist(read_file(netlist_path));
  const std::vector<std::string> free_nodes = free_fill_nodes(net);

  const bool oracle_enabled =
      oracle_request >= 0 ? oracle_request > 0 : free_nodes.size() <= 24;

  const NetworkSpace space(net);
  SatOutcome outcome = solve_satisfiability(net, options);

  OracleSummary oracle;
  oracle.enabled = oracle_enabled;
  if (oracle_enabled) {
    const std::vector<Assignment> solutions = brute_force_oracle(net);
    oracle.solution_count = solutions.size();
    if (outcome.status == SatOutcome::Status::Unsat) {
      oracle.agreement = solutions.empty();
    } else {
      oracle.agreement = !solutions.empty() &&
                         std::find(solutions.begin(), solutions.end(), outcome.assignment) !=
                             solutions.end();
    }
  }

  std::printf("solve: %s steps=%zu seed=%llu\n", netlist_path.c_str(), options.steps,
              static_cast<unsigned long long>(options.seed));
  if (!outcome.prepared.empty()) {
    std::printf("prepared: %s\n", assignment_line(outcome.prepared).c_str());
  }
  std::printf("status: %s fidelity=%.9f%s\n", status_word(outcome.status), outcome.fidelity,
              outcome.sampled ? " (sampled)" : "");
  if (outcome.status == SatOutcome::Status::Unsat) {
    std::printf("evidence: %s\n", outcome.evidence.c_str());
  } else {
    std::printf("assignment: %s\n", assignment_line(outcome.assignment).c_str());
  }
  if (oracle_enabled) {
    std::printf("oracle: %zu solution(s), %s\n", oracle.solution_count,
                oracle.agreement ? "agreement" : "DISAGREEMENT");
  }

  if (!out_path.empty()) {
    SolveReport report;
    report.netlist = netlist_path;
    report.steps = options.steps;
    report.seed = options.seed;
    report.fill = options.fill;
    report.nodes = space.nodes();
    report.outcome = std::move(outcome);
    report.oracle = oracle;
    write_report(out_path, render_solve_report(space.basis(), report, format));
    std::printf("wrote %s\n", out_path.c_str());
    return report.outcome.status == SatOutcome::Status::Unsat ? kExitNegative : kExitOk;
  }
  return outcome.status == SatOutcome::Status::Unsat ? kExitNegative : kExitOk;
}

// ---------------------------------------------------------------------------
// fock-verify

int cmd_fock_verify(double theta, std::size_t steps, const FockEnergies& energies,
                    const std::string& out_path, ReportFormat format) {
  energies.validate();  // reject bad configs before any work

  FockReport report;
  report.theta = theta;
  report.steps = steps;
  report.energies = energies;

  auto add = [&report](const std::string& name, double value, double bound) {
    report.checks.push_back(FockCheck{name, value <= bound, value, bound});
  };

  add("car_relations", car_deviation(ladder_operators()), 1e-14);

  const DualConstructionReport dual = dual_construction_report(energies);
  add("named_state_constructions", dual.named_state_deviation, 1e-12);
  add("hamiltonian_constructions", dual.hamiltonian_deviation, 1e-12);

  // Spectrum on the two-particle sector: the four pair energies plus the
  // doubly degenerate zero of the opposite-spin/opposite-site pair.
  {
    const CMatrix h = penalty_hamiltonian(energies).matrix();
    std::vector<double> sector;
    for (std::size_t n = 0; n < 16; ++n) {
      const int particles = ((n >> 3) & 1) + ((n >> 2) & 1) + ((n >> 1) & 1) + (n & 1);
      if (particles == 2) {
        sector.push_back(h(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n)).real());
      }
    }
    std::vector<double> expected{0.0, 0.0, energies.e_c, energies.e_d, energies.e_a,
                                 energies.e_b};
    std::sort(sector.begin(), sector.end());
    std::sort(expected.begin(), expected.end());
    double worst = 0.0;
    for (std::size_t k = 0; k < sector.size(); ++k) {
      worst = std::max(worst, std::abs(sector[k] - expected[k]));
    }
    add("two_particle_spectrum", worst, 1e-10);
  }

  {
    const Projector ground = ground_projector(energies);
    add("ground_space_rank_error",
        std::abs(static_cast<double>(ground.rank()) - 2.0), 0.0);

    const CMatrix t = slot_to_fock_intertwiner();
    const NamedStates states = named_states();
    const Basis slots = slot_basis();
    const StateVector e01(slots, t.adjoint() * states.q01.amplitudes());
    const StateVector e10(slots, t.adjoint() * states.q10.amplitudes());
    const Projector qubit_span = projector_from_span({e01, e10});
    add("ground_space_span",
        (ground.matrix() - qubit_span.matrix()).cwiseAbs().maxCoeff(), 1e-10);
  }

  {
    const AntisymmetryReport anti = antisymmetrizer_check();
    add("antisymmetrizer_named_states", anti.named_state_deviation, 1e-12);
    add("antisymmetrizer_product", anti.product_projection_deviation, 1e-12);
    add("symmetric_pair_exchange", anti.symmetric_pair_deviation, 1e-12);
  }

  {
    RotationSchedule schedule;
    schedule.theta = theta;
    schedule.steps = steps;
    const InducedRun run = induced_connection_evolution(theta, schedule, energies);
    double worst = 0.0;
    for (Eigen::Index n = 0; n < run.qubit_amplitudes.rows(); ++n) {
      const double angle = schedule.angle_at(static_cast<std::size_t>(n));
      const Complex c1 = run.qubit_amplitudes(n, 0);
      const Complex c2 = run.qubit_amplitudes(n, 1);
      const double leak2 =
          std::max(0.0, 1.0 - std::norm(c1) - std::norm(c2));
      const double dev2 = std::norm(c1 - std::cos(angle)) + std::norm(c2 - std::sin(angle));
      worst = std::max(worst, std::sqrt(dev2 + leak2));
    }
    add("induced_vs_closed_form", worst, 1e-6);
    add("penalty_expectation", run.penalty_expectation.cwiseAbs().maxCoeff(),
        1e-12 * std::max(energies.e_a, energies.e_b));
  }

  {
    const double k_a = 2.3;
    const double k_b = 0.6;
    const double x1 = 0.37;
    double worst_sum = 0.0;
    for (int k = 0; k < 1000; ++k) {
      const double x2 = -5.0 + 10.0 * static_cast<double>(k) / 999.0;
      const double singlet = spatial_statistics_density(k_a, k_b, x1, x2,
                                                        SpinCharacter::Singlet);
      const double triplet = spatial_statistics_density(k_a, k_b, x1, x2,
                                                        SpinCharacter::Triplet);
      worst_sum = std::max(worst_sum, std::abs(singlet + triplet - 4.0));
    }
    add("spatial_complementarity", worst_sum, 1e-12);
    add("triplet_coincidence",
        spatial_statistics_density(k_a, k_b, x1, x1, SpinCharacter::Triplet), 1e-12);
    add("singlet_coincidence_peak",
        std::abs(spatial_statistics_density(k_a, k_b, x1, x1, SpinCharacter::Singlet) - 4.0),
        1e-12);
  }

  for (const FockCheck& check : report.checks) {
    std::printf("[%s] %-28s value=%.3g bound=%.3g\n", check.passed ? "PASS" : "FAIL",
                check.name.c_str(), check.value, check.bound);
  }
  const bool all_passed = report.all_passed();
  std::printf("fock-verify: %s\n", all_passed ? "all checks passed" : "CHECKS FAILED");

  if (!out_path.empty()) {
    write_report(out_path, render_fock_report(report, format));
    std::printf("wrote %s\n", out_path.c_str());
  }
  return all_passed ? kExitOk : kExitNegative;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Constrained-evolution simulator: drive projector-constrained states, solve "
               "netlist satisfiability by physical relaxation, verify the fermionic model."};
  app.require_subcommand(1);

  // connection-demo
  double theta = 0.0;
  double phi_final = kPi / 2.0;
  std::size_t steps = 1000;
  std::string out_path;
  std::string format_name = "json";
  CLI::App* demo = app.add_subcommand(
      "connection-demo", "Drive one two-qubit link and compare against the closed form");
  demo->add_option("--theta", theta, "initial mixing angle (radians)");
  demo->add_option("--phi-final", phi_final, "total drive angle (radians)");
  demo->add_option("--steps", steps, "number of drive increments");
  demo->add_option("--out", out_path, "write the trajectory report here");
  demo->add_option("--format", format_name, "report format: json or csv");

  // solve
  std::string netlist_path;
  std::uint64_t seed = 0;
  std::string fill_text;
  std::string oracle_text;
  CLI::App* solve = app.add_subcommand(
      "solve", "Relax a netlist into a satisfying assignment (or report UNSAT)");
  solve->add_option("netlist", netlist_path, "netlist file")->required();
  solve->add_option("--steps", steps, "number of drive increments");
  solve->add_option("--seed", seed, "seed for sampling a multi-solution readout");
  solve->add_option("--fill", fill_text, "free-node overrides, node=bit[,node=bit...]");
  solve->add_option("--oracle", oracle_text, "on|off (default: on when <= 24 free nodes)")
      ->check(CLI::IsMember({"on", "off"}));
  solve->add_option("--out", out_path, "write the run report here");
  solve->add_option("--format", format_name, "report format: json or csv");

  // fock-verify
  std::string energies_text = "3,3,1,1";
  CLI::App* fock = app.add_subcommand(
      "fock-verify", "Run the fermionic-model invariant suite and induced-evolution check");
  fock->add_option("--theta", theta, "initial mixing angle (radians)");
  fock->add_option("--steps", steps, "number of drive increments");
  fock->add_option("--energies", energies_text, "pair penalties Ea,Eb,Ec,Ed");
  fock->add_option("--out", out_path, "write the check report here");
  fock->add_option("--format", format_name, "report format: json or csv");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& error) {
    // Normalize usage failures onto the documented error exit; --help and
    // --version still leave through app.exit with status 0.
    const int code = app.exit(error);
    return code == 0 ? kExitOk : kExitError;
  }

  try {
    const ReportFormat format = parse_report_format(format_name);
    if (demo->parsed()) {
      return cmd_connection_demo(theta, phi_final, steps, out_path, format);
    }
    if (solve->parsed()) {
      SolveOptions options;
      options.steps = steps;
      options.seed = seed;
      options.fill = parse_fill(fill_text);
      const int oracle_request =
          oracle_text.empty() ? -1 : (oracle_text == "on" ? 1 : 0);
      return cmd_solve(netlist_path, options, oracle_request, out_path, format);
    }
    if (fock->parsed()) {
      return cmd_fock_verify(theta, steps, parse_energies(energies_text), out_path, format);
    }
  } catch (const std::exception& error) {
    std::cerr << "error: " << error.what() << "\n";
    return kExitError;
  }
  return kExitError;
}
