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

#include <cstdint>
#include <string>
#include <vector>

#include "diakoptic/basis.hpp"
#include "diakoptic/evolver.hpp"
#include "diakoptic/fock.hpp"
#include "diakoptic/network.hpp"

// Machine-readable run reports.  JSON is the canonical format (versioned via
// "schema_version"); CSV is a flat export of the same trajectory/check data.
// Neither embeds timestamps or hostnames: identical runs serialize to
// identical bytes.

namespace diak {

inline constexpr int kReportSchemaVersion = 1;

enum class ReportFormat { Json, Csv };

/// "json" / "csv" (case-insensitive); throws std::invalid_argument otherwise.
ReportFormat parse_report_format(const std::string& name);

/// Doubles in CSV output: shortest-17-significant-digit form, round-trip
/// exact.
std::string format_double(double value);

struct ConnectionReport {
  double theta = 0.0;
  double phi_final = kPi / 2.0;
  std::size_t steps = 0;
  Trajectory trajectory;
  double max_closed_form_deviation = 0.0;
  double max_marginal_deviation = 0.0;
  UnitarityReport unitarity;
};
std::string render_connection_report(const Basis& basis, const ConnectionReport& report,
                                     ReportFormat format);

struct OracleSummary {
  bool enabled = false;
  std::size_t solution_count = 0;
  bool agreement = false;
};

struct SolveReport {
  std::string netlist;
  std::size_t steps = 0;
  std::uint64_t seed = 0;
  Assignment fill;  ///< fill overrides requested on the command line
  std::vector<std::string> nodes;
  SatOutcome outcome;
  OracleSummary oracle;
};
std::string render_solve_report(const Basis& basis, const SolveReport& report,
                                ReportFormat format);

struct FockCheck {
  std::string name;
  bool passed = false;
  double value = 0.0;  ///< measured deviation (or count, for rank checks)
  double bound = 0.0;  ///< what the value must stay at or below
};

struct FockReport {
  double theta = 0.0;
  std::size_t steps = 0;
  FockEnergies energies;
  std::vector<FockCheck> checks;

  bool all_passed() const;
};
std::string render_fock_report(const FockReport& report, ReportFormat format);

}  // namespace diak
