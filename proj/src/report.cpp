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

#include "diakoptic/report.hpp"

#include <algorithm>
#include <cctype>
#include <cstdio>
#include <sstream>
#include <stdexcept>

#include "json.hpp"

#include "diakoptic/hilbert.hpp"

namespace diak {

namespace {

using nlohmann::json;

std::string column_label(const Basis& basis, std::size_t index) {
  const std::vector<std::size_t> digits = basis.digits_of(index);
  std::string label;
  for (std::size_t k = 0; k < digits.size(); ++k) {
    if (k > 0) label += '_';
    label += basis.subsystem(k).labels[digits[k]];
  }
  return label;
}

std::vector<std::string> basis_labels(const Basis& basis) {
  std::vector<std::string> labels;
  labels.reserve(basis.dim());
  for (std::size_t i = 0; i < basis.dim(); ++i) labels.push_back(column_label(basis, i));
  return labels;
}

json trajectory_to_json(const Trajectory& trajectory) {
  json points = json::array();
  for (const TrajectoryPoint& p : trajectory.points) {
    json amps = json::array();
    for (Eigen::Index i = 0; i < p.state.amplitudes().size(); ++i) {
      const Complex& a = p.state.amplitudes()(i);
      amps.push_back(json::array({a.real(), a.imag()}));
    }
    points.push_back(json{{"step", p.step},
                          {"phi", p.phi},
                          {"amplitudes", std::move(amps)},
                          {"overlap", p.overlap},
                          {"degenerate", p.degenerate},
                          {"residuals", p.residuals}});
  }
  return json{{"residual_names", trajectory.residual_names}, {"points", std::move(points)}};
}

// One CSV row per trajectory point: step, phi, re/im per amplitude, overlap,
// then the residual columns.  `extra` columns (per-point real values) slot in
// between the amplitudes and the overlap.
std::string trajectory_to_csv(const Basis& basis, const Trajectory& trajectory,
                              const std::vector<std::string>& extra_names,
                              const std::vector<std::vector<double>>& extra_rows) {
  std::ostringstream out;
  out << "step,phi";
  for (std::size_t i = 0; i < basis.dim(); ++i) {
    const std::string label = column_label(basis, i);
    out << ",re_" << label << ",im_" << label;
  }
  for (const auto& name : extra_names) out << "," << name;
  out << ",overlap";
  for (const auto& name : trajectory.residual_names) out << ",residual_" << name;
  out << "\n";

  for (std::size_t row = 0; row < trajectory.points.size(); ++row) {
    const TrajectoryPoint& p = trajectory.points[row];
    out << p.step << "," << format_double(p.phi);
    for (Eigen::Index i = 0; i < p.state.amplitudes().size(); ++i) {
      const Complex& a = p.state.amplitudes()(i);
      out << "," << format_double(a.real()) << "," << format_double(a.imag());
    }
    if (!extra_names.empty()) {
      for (const double v : extra_rows[row]) out << "," << format_double(v);
    }
    out << "," << format_double(p.overlap);
    for (const double r : p.residuals) out << "," << format_double(r);
    out << "\n";
  }
  return out.str();
}

json unitarity_to_json(const UnitarityReport& u) {
  return json{{"max_norm_deviation", u.max_norm_deviation},
              {"min_step_overlap", u.min_step_overlap},
              {"isometry_deviation", u.isometry_deviation},
              {"fit_residual", u.fit_residual}};
}

const char* status_name(SatOutcome::Status status) {
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

}  // namespace

ReportFormat parse_report_format(const std::string& name) {
  std::string lower = name;
  std::transform(lower.begin(), lower.end(), lower.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  if (lower == "json") return ReportFormat::Json;
  if (lower == "csv") return ReportFormat::Csv;
  throw std::invalid_argument("unknown report format '" + name + "' (expected json or csv)");
}

std::string format_double(double value) {
  char buffer[40];
  std::snprintf(buffer, sizeof buffer, "%.17g", value);
  return buffer;
}

std::string render_connection_report(const Basis& basis, const ConnectionReport& report,
                                     ReportFormat format) {
  // Reduced populations of both endpoints, per recorded point.
  std::vector<std::vector<double>> rho_rows;
  rho_rows.reserve(report.trajectory.points.size());
  for (const TrajectoryPoint& p : report.trajectory.points) {
    const CMatrix rho_r = partial_trace(p.state, {"r"}).matrix();
    const CMatrix rho_s = partial_trace(p.state, {"s"}).matrix();
    rho_rows.push_back({rho_r(0, 0).real(), rho_r(1, 1).real(), rho_s(0, 0).real(),
                        rho_s(1, 1).real()});
  }

  if (format == ReportFormat::Csv) {
    return trajectory_to_csv(basis, report.trajectory,
                             {"rho_r_0", "rho_r_1", "rho_s_0", "rho_s_1"}, rho_rows);
  }

  json traj = trajectory_to_json(report.trajectory);
  for (std::size_t i = 0; i < rho_rows.size(); ++i) {
    traj["points"][i]["rho_r"] = {rho_rows[i][0], rho_rows[i][1]};
    traj["points"][i]["rho_s"] = {rho_rows[i][2], rho_rows[i][3]};
  }
  const json doc{{"schema_version", kReportSchemaVersion},
                 {"command", "connection-demo"},
                 {"config",
                  {{"theta", report.theta},
                   {"phi_final", report.phi_final},
                   {"steps", report.steps}}},
                 {"basis_labels", basis_labels(basis)},
                 {"trajectory", std::move(traj)},
                 {"summary",
                  {{"max_closed_form_deviation", report.max_closed_form_deviation},
                   {"max_marginal_deviation", report.max_marginal_deviation},
                   {"unitarity", unitarity_to_json(report.unitarity)}}}};
  return doc.dump(2) + "\n";
}

std::string render_solve_report(const Basis& basis, const SolveReport& report,
                                ReportFormat format) {
  if (format == ReportFormat::Csv) {
    return trajectory_to_csv(basis, report.outcome.trajectory, {}, {});
  }

  const SatOutcome& outcome = report.outcome;
  json result{{"status", status_name(outcome.status)},
              {"fidelity", outcome.fidelity},
              {"sampled", outcome.sampled}};
  if (outcome.status == SatOutcome::Status::Unsat) {
    result["assignment"] = nullptr;
    result["evidence"] = outcome.evidence;
    if (outcome.infeasible_step > 0) {
      result["infeasible_step"] = outcome.infeasible_step;
      result["infeasible_residual"] = outcome.infeasible_residual;
    }
  } else {
    result["assignment"] = outcome.assignment;
  }
  if (report.oracle.enabled) {
    result["oracle"] = {{"solution_count", report.oracle.solution_count},
                        {"agreement", report.oracle.agreement}};
  }

  const json doc{{"schema_version", kReportSchemaVersion},
                 {"command", "solve"},
                 {"config",
                  {{"netlist", report.netlist},
                   {"steps", report.steps},
                   {"seed", report.seed},
                   {"fill", report.fill}}},
                 {"nodes", report.nodes},
                 {"prepared", outcome.prepared},
                 {"basis_labels", basis_labels(basis)},
                 {"trajectory", trajectory_to_json(outcome.trajectory)},
                 {"result", std::move(result)}};
  return doc.dump(2) + "\n";
}

bool FockReport::all_passed() const {
  return std::all_of(checks.begin(), checks.end(),
                     [](const FockCheck& c) { return c.passed; });
}

std::string render_fock_report(const FockReport& report, ReportFormat format) {
  if (format == ReportFormat::Csv) {
    std::ostringstream out;
    out << "check,passed,value,bound\n";
    for (const FockCheck& c : report.checks) {
      out << c.name << "," << (c.passed ? 1 : 0) << "," << format_double(c.value) << ","
          << format_double(c.bound) << "\n";
    }
    return out.str();
  }

  json checks = json::array();
  for (const FockCheck& c : report.checks) {
    checks.push_back(json{
        {"name", c.name}, {"passed", c.passed}, {"value", c.value}, {"bound", c.bound}});
  }
  const json doc{{"schema_version", kReportSchemaVersion},
                 {"command", "fock-verify"},
                 {"config",
                  {{"theta", report.theta},
                   {"steps", report.steps},
                   {"energies",
                    {report.energies.e_a, report.energies.e_b, report.energies.e_c,
                     report.energies.e_d}}}},
                 {"checks", std::move(checks)},
                 {"passed", report.all_passed()}};
  return doc.dump(2) + "\n";
}

}  // namespace diak
