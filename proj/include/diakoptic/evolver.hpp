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

#include <cstddef>
#include <string>
#include <vector>

#include "diakoptic/basis.hpp"
#include "diakoptic/hilbert.hpp"
#include "diakoptic/types.hpp"

namespace diak {

/// Prescribed population track for one observable partition of the basis.
///
/// A marginal groups basis indices into value sectors (for a tensor-factor
/// subsystem these are simply the index sets sharing one digit; custom
/// partitions cover derived readouts such as "the qubit encoded at site r").
/// At step n the squared amplitudes summed over sector v must equal
/// `at(n)[v]`.  PINNED tracks repeat one vector; DRIVEN tracks tabulate one
/// vector per step, 0..steps inclusive.
class MarginalSchedule {
 public:
  enum class Kind { Pinned, Driven };

  /// Constant track over the value sectors of a tensor-factor subsystem.
  static MarginalSchedule pinned(const Basis& basis, const std::string& subsystem,
                                 RVector populations);
  /// Tabulated track over the value sectors of a tensor-factor subsystem.
  static MarginalSchedule driven(const Basis& basis, const std::string& subsystem,
                                 std::vector<RVector> table);
  /// Same, for an arbitrary disjoint partition of basis indices.  Indices
  /// missing from every sector are unconstrained by this marginal.
  static MarginalSchedule pinned_partition(std::string name,
                                           std::vector<std::vector<std::size_t>> sectors,
                                           RVector populations);
  static MarginalSchedule driven_partition(std::string name,
                                           std::vector<std::vector<std::size_t>> sectors,
                                           std::vector<RVector> table);

  const std::string& name() const { return name_; }
  Kind kind() const { return kind_; }
  std::size_t sector_count() const { return sectors_.size(); }
  const std::vector<std::vector<std::size_t>>& sectors() const { return sectors_; }
  /// Number of tabulated steps (1 for pinned).
  std::size_t table_size() const { return table_.size(); }
  /// Prescribed populations at step n.
  const RVector& at(std::size_t n) const;

 private:
  MarginalSchedule(std::string name, std::vector<std::vector<std::size_t>> sectors, Kind kind,
                   std::vector<RVector> table);

  std::string name_;
  std::vector<std::vector<std::size_t>> sectors_;
  Kind kind_;
  std::vector<RVector> table_;
};

/// Everything one constrained run needs: the subspace constraints (commuting
/// projectors), the population tracks, the start state and the step count.
///
/// Tolerances: a step is accepted when its fixed-point residual falls to
/// eps_convergence; the run dies (INFEASIBLE) when the residual cannot be
/// brought below eps_feasibility.  delta_phi is bookkeeping for reporting the
/// drive angle of step n as n * delta_phi.
struct ConstraintSystem {
  Basis basis;
  std::vector<Projector> projectors;
  std::vector<MarginalSchedule> marginals;
  StateVector initial;
  std::size_t steps = 1000;
  double delta_phi = 0.0;
  double eps_feasibility = 1e-9;
  double eps_convergence = 1e-12;
  std::size_t max_inner_iterations = 10000;
  /// Optional phase frame for support injection.  When a prescribed sector
  /// must grow out of exactly zero weight, every constraint is blind to the
  /// sign of the new component: the feasible set splits into branches that
  /// the data cannot distinguish, and the evolver has to pick one.  A
  /// non-empty frame (dimension of `basis`) donates its per-component phases
  /// to the injected support, letting the caller select the branch smoothly
  /// connected to its drive; components the frame leaves at zero fall back to
  /// the extrapolated reference's nearest occupied phase (the default when no
  /// frame is given).
  CVector injection_frame;

  ConstraintSystem(Basis basis_, std::vector<Projector> projectors_,
                   std::vector<MarginalSchedule> marginals_, StateVector initial_,
                   std::size_t steps_);
};

/// One recorded step.  `residuals` holds, in order: the projector residual
/// ||P psi - psi||_inf, one entry per marginal (max sector deviation), and
/// the norm deviation |  ||psi||^2 - 1 |.
struct TrajectoryPoint {
  std::size_t step = 0;
  double phi = 0.0;
  StateVector state;
  std::vector<double> residuals;
  double overlap = 1.0;       // |<psi_{n-1}|psi_n>|
  bool degenerate = false;    // near-tied optimum reported, not resolved
};

struct Trajectory {
  std::vector<std::string> residual_names;
  std::vector<TrajectoryPoint> points;
};

struct EvolutionOutcome {
  enum class Status { Feasible, Infeasible };
  Status status = Status::Feasible;
  /// First step whose constraint set could not be met (when infeasible).
  std::size_t infeasible_step = 0;
  /// Residual the inner solver stalled at (when infeasible).
  double infeasible_residual = 0.0;
  Trajectory trajectory;
  /// Last feasible state (the endpoint when feasible throughout).
  StateVector final_state;

  bool feasible() const { return status == Status::Feasible; }
};

/// Map-level summary of how close a recorded trajectory is to a unitary flow:
/// max norm drift, min per-step overlap, and the best-fit single linear map
/// psi_n -> psi_{n+1} on the subspace the trajectory spans, with its
/// deviation from an isometry and its fit residual.
struct UnitarityReport {
  double max_norm_deviation = 0.0;
  double min_step_overlap = 1.0;
  double isometry_deviation = 0.0;
  double fit_residual = 0.0;
};

/// Intersection of pairwise-commuting projectors (max-norm commutator bound
/// 1e-10, violations throw std::invalid_argument).  The result is the product
/// projector with a freshly extracted spanning set.
Projector intersect_projectors(const std::vector<Projector>& projectors);

/// Options for a single constrained step, exposed for tests; evolve() drives
/// this internally.
struct StepOptions {
  double eps_feasibility = 1e-9;
  double eps_convergence = 1e-12;
  std::size_t max_inner_iterations = 10000;
  bool probe_degeneracy = true;
  /// Branch-selection phases for injected support; see
  /// ConstraintSystem::injection_frame.  Empty = no frame.
  CVector injection_frame;
};

struct StepResult {
  StateVector state;
  std::vector<double> residuals;
  double residual = 0.0;  // max over `residuals`
  double overlap = 0.0;
  bool feasible = false;
  bool degenerate = false;
};

/// Solve one step: find a unit state in range(P) meeting every marginal's
/// step-n populations, as close as possible to `previous`.
///
/// Alternating sweeps project onto range(P) and rescale each sector block to
/// its prescribed mass (blocks that are numerically empty but must carry mass
/// get a uniform injection).  Remaining phase freedom is resolved against
/// `reference` — the caller passes the linear extrapolation of the trajectory
/// so the selected branch stays differentiable where per-step overlap alone
/// would be blind to a sign flip happening inside one angle increment.
StepResult constrained_step(const StateVector& previous, const StateVector& reference,
                            const Projector& constraint, const std::vector<MarginalSchedule>& marginals,
                            std::size_t step_index, const StepOptions& options);

/// Run the full schedule.  Throws std::invalid_argument when the system is
/// malformed (basis mismatches, non-commuting projectors, initial state
/// violating the step-0 constraints); returns an INFEASIBLE outcome when a
/// later step has no solution within tolerance.
EvolutionOutcome evolve(const ConstraintSystem& system);

UnitarityReport unitarity_report(const Trajectory& trajectory);

}  // namespace diak
