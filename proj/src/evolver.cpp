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

#include "diakoptic/evolver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "diakoptic/log.hpp"

namespace diak {

namespace {

// Sector blocks below this mass are refilled from scratch instead of being
// rescaled: rescaling from ~0 amplifies whatever rounding noise the block
// happens to hold into the full prescribed mass.
double injection_threshold(double prescribed) {
  return std::max(1e-24, prescribed * 1e-16);
}

std::vector<std::vector<std::size_t>> subsystem_sectors(const Basis& basis,
                                                        const std::string& subsystem) {
  const std::size_t pos = basis.find(subsystem);
  std::vector<std::vector<std::size_t>> sectors(basis.subsystem(pos).dim());
  for (std::size_t idx = 0; idx < basis.dim(); ++idx) {
    sectors[basis.digit_at(idx, pos)].push_back(idx);
  }
  return sectors;
}

void check_populations(const RVector& p, std::size_t sector_count, const std::string& name) {
  if (static_cast<std::size_t>(p.size()) != sector_count) {
    throw std::invalid_argument("population vector size does not match sector count for '" +
                                name + "'");
  }
  double sum = 0.0;
  for (Eigen::Index i = 0; i < p.size(); ++i) {
    if (p(i) < -kStructuralTol) {
      throw std::invalid_argument("negative population prescribed for '" + name + "'");
    }
    sum += p(i);
  }
  if (std::abs(sum - 1.0) > kStructuralTol) {
    throw std::invalid_argument("populations for '" + name + "' do not sum to one");
  }
}

// Per-index unit phase factors taken from `reference`: the component's own
// phase when it is nonzero, otherwise the phase the caller's injection frame
// assigns there, otherwise the phase of the nearest nonzero reference
// component (lower index wins ties), otherwise 1.
CVector reference_phases(const CVector& reference, const CVector& frame) {
  const Eigen::Index n = reference.size();
  CVector phases = CVector::Constant(n, Complex(1.0, 0.0));
  std::vector<Eigen::Index> alive;
  for (Eigen::Index i = 0; i < n; ++i) {
    if (std::abs(reference(i)) > 1e-14) alive.push_back(i);
  }
  for (Eigen::Index i = 0; i < n; ++i) {
    if (std::abs(reference(i)) > 1e-14) {
      phases(i) = reference(i) / std::abs(reference(i));
      continue;
    }
    if (frame.size() == n && std::abs(frame(i)) > 1e-14) {
      phases(i) = frame(i) / std::abs(frame(i));
      continue;
    }
    if (alive.empty()) continue;
    auto it = std::lower_bound(alive.begin(), alive.end(), i);
    Eigen::Index best;
    if (it == alive.end()) {
      best = alive.back();
    } else if (it == alive.begin()) {
      best = *it;
    } else {
      const Eigen::Index hi = *it;
      const Eigen::Index lo = *(it - 1);
      best = (i - lo <= hi - i) ? lo : hi;
    }
    phases(i) = reference(best) / std::abs(reference(best));
  }
  return phases;
}

struct InnerResult {
  CVector v;
  std::vector<double> residuals;
  double residual = 0.0;
  bool converged_or_feasible = false;
};

// Alternating fixed-point sweeps: subspace projection, then one mass rescale
// per marginal sector.  Returns the final iterate with its residual profile;
// feasibility is judged by the caller against eps_feasibility.
InnerResult inner_fixed_point(CVector v, const Projector& constraint,
                              const std::vector<MarginalSchedule>& marginals,
                              std::size_t step_index, const CVector& phases,
                              const StepOptions& options) {
  const Eigen::Index dim = v.size();
  const CMatrix& pmat = constraint.matrix();
  const bool aligned = constraint.basis_aligned();

  // Crisp support mask for the diagonal fast path (diagonal entries of a
  // projector are 0 or 1 up to rounding).
  std::vector<char> support;
  if (aligned) {
    support.resize(static_cast<std::size_t>(dim));
    for (Eigen::Index i = 0; i < dim; ++i) {
      support[static_cast<std::size_t>(i)] = std::real(pmat(i, i)) > 0.5 ? 1 : 0;
    }
  }

  std::vector<double> residuals(1 + marginals.size() + 1, 0.0);
  double residual = 0.0;
  double best_residual = std::numeric_limits<double>::infinity();
  std::size_t sweeps_since_improvement = 0;
  // A residual oscillating without relative improvement for this many sweeps
  // is treated as stalled (the infeasible signature: sector prescriptions
  // fighting the subspace or each other).
  constexpr std::size_t kStallWindow = 200;

  for (std::size_t iter = 0; iter < options.max_inner_iterations; ++iter) {
    // Subspace projection.
    if (aligned) {
      for (Eigen::Index i = 0; i < dim; ++i) {
        if (!support[static_cast<std::size_t>(i)]) v(i) = Complex(0.0, 0.0);
      }
    } else {
      v = (pmat * v).eval();
    }

    // Sector mass enforcement.
    for (const auto& m : marginals) {
      const RVector& p = m.at(step_index);
      for (std::size_t k = 0; k < m.sectors().size(); ++k) {
        const auto& sector = m.sectors()[k];
        double q = 0.0;
        for (const std::size_t i : sector) q += std::norm(v(static_cast<Eigen::Index>(i)));
        const double target = std::max(p(static_cast<Eigen::Index>(k)), 0.0);
        if (q >= injection_threshold(target)) {
          const double scale = std::sqrt(target / q);
          for (const std::size_t i : sector) v(static_cast<Eigen::Index>(i)) *= scale;
        } else if (target > options.eps_feasibility) {
          const double amp = std::sqrt(target / static_cast<double>(sector.size()));
          for (const std::size_t i : sector) {
            v(static_cast<Eigen::Index>(i)) = amp * phases(static_cast<Eigen::Index>(i));
          }
        } else {
          for (const std::size_t i : sector) v(static_cast<Eigen::Index>(i)) = Complex(0.0, 0.0);
        }
      }
    }

    // Residual profile: projector, per-marginal, norm.
    double proj_dev = 0.0;
    if (aligned) {
      for (Eigen::Index i = 0; i < dim; ++i) {
        if (!support[static_cast<std::size_t>(i)]) {
          proj_dev = std::max(proj_dev, std::abs(v(i)));
        }
      }
    } else {
      proj_dev = (pmat * v - v).cwiseAbs().maxCoeff();
    }
    residuals[0] = proj_dev;
    for (std::size_t mi = 0; mi < marginals.size(); ++mi) {
      const auto& m = marginals[mi];
      const RVector& p = m.at(step_index);
      double dev = 0.0;
      for (std::size_t k = 0; k < m.sectors().size(); ++k) {
        double q = 0.0;
        for (const std::size_t i : m.sectors()[k]) {
          q += std::norm(v(static_cast<Eigen::Index>(i)));
        }
        dev = std::max(dev, std::abs(q - p(static_cast<Eigen::Index>(k))));
      }
      residuals[1 + mi] = dev;
    }
    residuals.back() = std::abs(v.squaredNorm() - 1.0);
    residual = *std::max_element(residuals.begin(), residuals.end());

    if (residual <= options.eps_convergence) break;
    if (residual < best_residual * (1.0 - 1e-3)) {
      best_residual = residual;
      sweeps_since_improvement = 0;
    } else if (++sweeps_since_improvement >= kStallWindow) {
      break;  // stalled; caller decides feasibility from the residual
    }
  }

  InnerResult out;
  out.v = std::move(v);
  out.residuals = std::move(residuals);
  out.residual = residual;
  out.converged_or_feasible = residual <= options.eps_feasibility;
  return out;
}

void align_phases(CVector& v, const CVector& reference, const CVector& frame, bool aligned) {
  if (aligned) {
    const CVector phases = reference_phases(reference, frame);
    for (Eigen::Index i = 0; i < v.size(); ++i) {
      const double mag = std::abs(v(i));
      if (mag > 0.0) v(i) = mag * phases(i);
    }
  } else {
    // Only a global phase is free without leaving the constraint subspace.
    const Complex z = reference.dot(v);
    if (std::abs(z) > 1e-14) v *= std::conj(z) / std::abs(z);
  }
}

}  // namespace

MarginalSchedule::MarginalSchedule(std::string name,
                                   std::vector<std::vector<std::size_t>> sectors, Kind kind,
                                   std::vector<RVector> table)
    : name_(std::move(name)), sectors_(std::move(sectors)), kind_(kind), table_(std::move(table)) {
  if (sectors_.size() < 2) {
    throw std::invalid_argument("marginal '" + name_ + "' needs at least two value sectors");
  }
  std::vector<char> seen;
  for (const auto& sector : sectors_) {
    for (const std::size_t idx : sector) {
      if (idx >= seen.size()) seen.resize(idx + 1, 0);
      if (seen[idx]) {
        throw std::invalid_argument("marginal '" + name_ + "' has overlapping sectors");
      }
      seen[idx] = 1;
    }
  }
  if (table_.empty()) {
    throw std::invalid_argument("marginal '" + name_ + "' has an empty population table");
  }
  if (kind_ == Kind::Pinned && table_.size() != 1) {
    throw std::invalid_argument("pinned marginal '" + name_ + "' must hold exactly one vector");
  }
  for (const auto& p : table_) check_populations(p, sectors_.size(), name_);
}

MarginalSchedule MarginalSchedule::pinned(const Basis& basis, const std::string& subsystem,
                                          RVector populations) {
  return MarginalSchedule(subsystem, subsystem_sectors(basis, subsystem), Kind::Pinned,
                          {std::move(populations)});
}

MarginalSchedule MarginalSchedule::driven(const Basis& basis, const std::string& subsystem,
                                          std::vector<RVector> table) {
  return MarginalSchedule(subsystem, subsystem_sectors(basis, subsystem), Kind::Driven,
                          std::move(table));
}

MarginalSchedule MarginalSchedule::pinned_partition(std::string name,
                                                    std::vector<std::vector<std::size_t>> sectors,
                                                    RVector populations) {
  return MarginalSchedule(std::move(name), std::move(sectors), Kind::Pinned,
                          {std::move(populations)});
}

MarginalSchedule MarginalSchedule::driven_partition(std::string name,
                                                    std::vector<std::vector<std::size_t>> sectors,
                                                    std::vector<RVector> table) {
  return MarginalSchedule(std::move(name), std::move(sectors), Kind::Driven, std::move(table));
}

const RVector& MarginalSchedule::at(std::size_t n) const {
  if (kind_ == Kind::Pinned) return table_.front();
  if (n >= table_.size()) {
    throw std::invalid_argument("marginal '" + name_ + "' has no populations for step " +
                                std::to_string(n));
  }
  return table_[n];
}

ConstraintSystem::ConstraintSystem(Basis basis_, std::vector<Projector> projectors_,
                                   std::vector<MarginalSchedule> marginals_, StateVector initial_,
                                   std::size_t steps_)
    : basis(std::move(basis_)),
      projectors(std::move(projectors_)),
      marginals(std::move(marginals_)),
      initial(std::move(initial_)),
      steps(steps_) {
  if (steps < 1) throw std::invalid_argument("constraint system needs at least one step");
  if (!(initial.basis() == basis)) {
    throw std::invalid_argument("initial state does not live on the system basis");
  }
  for (const auto& p : projectors) {
    if (!(p.basis() == basis)) {
      throw std::invalid_argument("projector does not live on the system basis");
    }
  }
  for (const auto& m : marginals) {
    for (const auto& sector : m.sectors()) {
      for (const std::size_t idx : sector) {
        if (idx >= basis.dim()) {
          throw std::invalid_argument("marginal '" + m.name() + "' indexes outside the basis");
        }
      }
    }
    if (m.kind() == MarginalSchedule::Kind::Driven && m.table_size() < steps + 1) {
      throw std::invalid_argument("driven marginal '" + m.name() +
                                  "' does not cover every step");
    }
  }
  if (std::abs(initial.norm() - 1.0) > 1e-9) {
    throw std::invalid_argument("initial state must be normalized");
  }
}

Projector intersect_projectors(const std::vector<Projector>& projectors) {
  if (projectors.empty()) {
    throw std::invalid_argument("projector intersection needs at least one projector");
  }
  const Basis& basis = projectors.front().basis();
  for (const auto& p : projectors) {
    if (!(p.basis() == basis)) {
      throw std::invalid_argument("projector intersection across different bases");
    }
  }
  for (std::size_t a = 0; a < projectors.size(); ++a) {
    for (std::size_t b = a + 1; b < projectors.size(); ++b) {
      const CMatrix& ma = projectors[a].matrix();
      const CMatrix& mb = projectors[b].matrix();
      const double comm = (ma * mb - mb * ma).cwiseAbs().maxCoeff();
      if (comm > kCommutatorTol) {
        throw std::invalid_argument("projectors do not commute (max deviation " +
                                    std::to_string(comm) + ")");
      }
    }
  }
  if (projectors.size() == 1) return projectors.front();

  CMatrix product = projectors.front().matrix();
  for (std::size_t i = 1; i < projectors.size(); ++i) {
    product = (product * projectors[i].matrix()).eval();
  }

  // The product of commuting projectors is itself a projector; recover an
  // orthonormal span from it.  Diagonal products read off directly.
  bool diagonal = true;
  for (Eigen::Index j = 0; j < product.cols() && diagonal; ++j) {
    for (Eigen::Index i = 0; i < product.rows(); ++i) {
      if (i != j && std::abs(product(i, j)) > 1e-14) {
        diagonal = false;
        break;
      }
    }
  }
  if (diagonal) {
    std::vector<std::size_t> kept;
    for (Eigen::Index i = 0; i < product.rows(); ++i) {
      if (std::real(product(i, i)) > 0.5) kept.push_back(static_cast<std::size_t>(i));
    }
    if (kept.empty()) {
      throw std::invalid_argument("projector intersection is empty");
    }
    return projector_onto_indices(basis, kept);
  }

  Eigen::SelfAdjointEigenSolver<CMatrix> solver((product + product.adjoint()) / 2.0);
  if (solver.info() != Eigen::Success) {
    throw std::runtime_error("eigendecomposition failed in projector intersection");
  }
  std::vector<StateVector> span;
  for (Eigen::Index i = 0; i < solver.eigenvalues().size(); ++i) {
    if (solver.eigenvalues()(i) > 0.5) {
      span.emplace_back(basis, solver.eigenvectors().col(i));
    }
  }
  if (span.empty()) {
    throw std::invalid_argument("projector intersection is empty");
  }
  return projector_from_span(span);
}

StepResult constrained_step(const StateVector& previous, const StateVector& reference,
                            const Projector& constraint,
                            const std::vector<MarginalSchedule>& marginals,
                            std::size_t step_index, const StepOptions& options) {
  const CVector phases = reference_phases(reference.amplitudes(), options.injection_frame);
  // The contraction starts from the reference, not from psi_prev: when the
  // constraint subspace is not axis-aligned the post-hoc phase alignment can
  // only fix a global phase, so the branch a component takes through an
  // amplitude zero crossing is decided by the seed's sign structure.  The
  // reference extrapolates through the crossing; psi_prev reflects off it.
  InnerResult primary = inner_fixed_point(reference.amplitudes(), constraint, marginals,
                                          step_index, phases, options);

  StepResult result{StateVector(previous.basis(), primary.v), primary.residuals,
                    primary.residual, 0.0, primary.converged_or_feasible, false};
  if (!result.feasible) return result;

  CVector v = std::move(primary.v);
  align_phases(v, reference.amplitudes(), options.injection_frame, constraint.basis_aligned());
  const double n = v.norm();
  if (n < kStructuralTol) {
    // A fixed point with vanishing norm cannot meet unit-sum populations.
    result.feasible = false;
    return result;
  }
  v /= n;

  const double overlap = std::abs(previous.amplitudes().dot(v));
  result.overlap = overlap;

  bool degenerate = overlap < 1e-9;  // the whole feasible set is orthogonal to psi_prev
  if (!degenerate && options.probe_degeneracy) {
    // Deterministic second seed: the index-reversed warm start.  If it lands
    // on an equally good but materially different fixed point, the step's
    // optimum is not unique and we say so instead of pretending otherwise.
    CVector seed2 = previous.amplitudes().reverse();
    InnerResult alt = inner_fixed_point(std::move(seed2), constraint, marginals, step_index,
                                        phases, options);
    if (alt.residual <= options.eps_feasibility) {
      CVector w = std::move(alt.v);
      align_phases(w, reference.amplitudes(), options.injection_frame,
                   constraint.basis_aligned());
      const double wn = w.norm();
      if (wn > kStructuralTol) {
        w /= wn;
        const double alt_overlap = std::abs(previous.amplitudes().dot(w));
        if (std::abs(alt_overlap - overlap) <= 1e-9 && (w - v).cwiseAbs().maxCoeff() > 1e-6) {
          degenerate = true;
        }
      }
    }
  }
  result.degenerate = degenerate;
  result.state = StateVector(previous.basis(), std::move(v));
  return result;
}

EvolutionOutcome evolve(const ConstraintSystem& system) {
  const Projector constraint =
      system.projectors.empty()
          ? projector_onto_indices(system.basis, [&] {
              std::vector<std::size_t> all(system.basis.dim());
              for (std::size_t i = 0; i < all.size(); ++i) all[i] = i;
              return all;
            }())
          : intersect_projectors(system.projectors);

  StepOptions options;
  options.eps_feasibility = system.eps_feasibility;
  options.eps_convergence = system.eps_convergence;
  options.max_inner_iterations = system.max_inner_iterations;
  if (system.injection_frame.size() != 0) {
    if (static_cast<std::size_t>(system.injection_frame.size()) != system.basis.dim()) {
      throw std::invalid_argument("injection frame dimension does not match the basis");
    }
    options.injection_frame = system.injection_frame;
  }

  Trajectory trajectory;
  trajectory.residual_names.push_back("projector");
  for (const auto& m : system.marginals) trajectory.residual_names.push_back("marginal:" + m.name());
  trajectory.residual_names.push_back("norm");

  // Step-0 feasibility of the provided initial state is a precondition, not a
  // runtime outcome: violations are programming errors.
  const StateVector psi0 = system.initial.normalized();
  std::vector<double> residuals0;
  {
    const CVector& a = psi0.amplitudes();
    const CVector pa = constraint.matrix() * a;
    residuals0.push_back((pa - a).cwiseAbs().maxCoeff());
    for (const auto& m : system.marginals) {
      const RVector& p = m.at(0);
      double dev = 0.0;
      for (std::size_t k = 0; k < m.sectors().size(); ++k) {
        double q = 0.0;
        for (const std::size_t i : m.sectors()[k]) q += std::norm(a(static_cast<Eigen::Index>(i)));
        dev = std::max(dev, std::abs(q - p(static_cast<Eigen::Index>(k))));
      }
      residuals0.push_back(dev);
    }
    residuals0.push_back(std::abs(a.squaredNorm() - 1.0));
    const double worst = *std::max_element(residuals0.begin(), residuals0.end());
    if (worst > system.eps_feasibility) {
      throw std::invalid_argument("initial state violates the step-0 constraints (residual " +
                                  std::to_string(worst) + ")");
    }
  }
  trajectory.points.push_back(TrajectoryPoint{0, 0.0, psi0, residuals0, 1.0, false});

  EvolutionOutcome outcome{EvolutionOutcome::Status::Feasible, 0, 0.0, {}, psi0};

  for (std::size_t n = 1; n <= system.steps; ++n) {
    const StateVector& prev = trajectory.points.back().state;
    // Differentiable-branch reference: linear extrapolation of the last two
    // accepted states.  Identical to psi_prev everywhere except within one
    // angle increment of an amplitude zero crossing, where psi_prev alone
    // cannot tell the two phase branches apart.
    CVector ref_amps;
    if (trajectory.points.size() >= 2) {
      const CVector& a1 = trajectory.points[trajectory.points.size() - 1].state.amplitudes();
      const CVector& a2 = trajectory.points[trajectory.points.size() - 2].state.amplitudes();
      ref_amps = 2.0 * a1 - a2;
    } else {
      ref_amps = prev.amplitudes();
    }
    const StateVector reference(system.basis, std::move(ref_amps));

    StepResult step = constrained_step(prev, reference, constraint, system.marginals, n, options);
    if (!step.feasible) {
      outcome.status = EvolutionOutcome::Status::Infeasible;
      outcome.infeasible_step = n;
      outcome.infeasible_residual = step.residual;
      log(LogLevel::Info, "constraints became infeasible at step " + std::to_string(n) +
                              " (residual " + std::to_string(step.residual) + ")");
      break;
    }
    if (step.degenerate) {
      log(LogLevel::Warn, "near-degenerate optimum at step " + std::to_string(n) +
                              "; branch choice reported, not asserted unique");
    }
    trajectory.points.push_back(TrajectoryPoint{
        n, system.delta_phi * static_cast<double>(n), step.state, step.residuals, step.overlap,
        step.degenerate});
  }

  outcome.final_state = trajectory.points.back().state;
  outcome.trajectory = std::move(trajectory);
  return outcome;
}

UnitarityReport unitarity_report(const Trajectory& trajectory) {
  UnitarityReport report;
  const auto& pts = trajectory.points;
  if (pts.empty()) return report;

  for (const auto& p : pts) {
    report.max_norm_deviation = std::max(report.max_norm_deviation,
                                         std::abs(p.state.norm() - 1.0));
  }
  if (pts.size() < 2) return report;

  const Eigen::Index dim = static_cast<Eigen::Index>(pts.front().state.dim());
  const Eigen::Index m = static_cast<Eigen::Index>(pts.size());

  for (Eigen::Index k = 1; k < m; ++k) {
    const double ov = std::abs(pts[static_cast<std::size_t>(k - 1)].state.inner(
        pts[static_cast<std::size_t>(k)].state));
    report.min_step_overlap = std::min(report.min_step_overlap, ov);
  }

  // Orthonormal basis of the subspace the whole trajectory spans.
  CMatrix all(dim, m);
  for (Eigen::Index k = 0; k < m; ++k) {
    all.col(k) = pts[static_cast<std::size_t>(k)].state.amplitudes();
  }
  Eigen::JacobiSVD<CMatrix> span_svd(all, Eigen::ComputeThinU);
  const double span_cut = span_svd.singularValues()(0) * 1e-10;
  Eigen::Index rank = 0;
  for (Eigen::Index i = 0; i < span_svd.singularValues().size(); ++i) {
    if (span_svd.singularValues()(i) > span_cut) ++rank;
  }
  const CMatrix b = span_svd.matrixU().leftCols(rank);

  // Least-squares single map advancing each state to its successor, in span
  // coordinates.
  const CMatrix xc = b.adjoint() * all.leftCols(m - 1);
  const CMatrix yc = b.adjoint() * all.rightCols(m - 1);
  Eigen::JacobiSVD<CMatrix> x_svd(xc, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const double x_cut = x_svd.singularValues()(0) * 1e-10;
  Eigen::Index x_rank = 0;
  for (Eigen::Index i = 0; i < x_svd.singularValues().size(); ++i) {
    if (x_svd.singularValues()(i) > x_cut) ++x_rank;
  }
  CMatrix pinv = CMatrix::Zero(xc.cols(), xc.rows());
  for (Eigen::Index i = 0; i < x_rank; ++i) {
    pinv += (1.0 / x_svd.singularValues()(i)) * x_svd.matrixV().col(i) *
            x_svd.matrixU().col(i).adjoint();
  }
  const CMatrix map = yc * pinv;

  report.fit_residual = (map * xc - yc).cwiseAbs().maxCoeff();
  const CMatrix ux = x_svd.matrixU().leftCols(x_rank);
  const CMatrix mu = map * ux;
  report.isometry_deviation =
      (mu.adjoint() * mu - CMatrix::Identity(x_rank, x_rank)).cwiseAbs().maxCoeff();
  return report;
}

}  // namespace diak
