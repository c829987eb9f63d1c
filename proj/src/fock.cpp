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

#include "diakoptic/fock.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace diak {

namespace {

constexpr double kInvSqrt2 = 0.70710678118654752440;

// Flat index in fock_basis(): mode m occupied contributes 8 >> m.
std::size_t occupation_index(std::size_t mode_i, std::size_t mode_j) {
  return (std::size_t{8} >> mode_i) | (std::size_t{8} >> mode_j);
}

// Flat index in slot_basis() for slot 1 in mode i and slot 2 in mode j.
std::size_t slot_pair_index(std::size_t mode_i, std::size_t mode_j) {
  const std::size_t chi1 = mode_i & 1u;
  const std::size_t lambda1 = mode_i >> 1u;
  const std::size_t chi2 = mode_j & 1u;
  const std::size_t lambda2 = mode_j >> 1u;
  return chi1 * 8 + chi2 * 4 + lambda1 * 2 + lambda2;
}

// Antisymmetrized slot pair (|i>|j> - |j>|i>)/sqrt2, i != j.
CVector antisymmetric_pair(std::size_t mode_i, std::size_t mode_j) {
  CVector v = CVector::Zero(16);
  v(static_cast<Eigen::Index>(slot_pair_index(mode_i, mode_j))) = kInvSqrt2;
  v(static_cast<Eigen::Index>(slot_pair_index(mode_j, mode_i))) = -kInvSqrt2;
  return v;
}

CVector apply_pair_of_creators(const LadderOperators& ops, std::size_t first,
                               std::size_t second) {
  CVector vacuum = CVector::Zero(16);
  vacuum(0) = 1.0;
  return ops.create[first] * (ops.create[second] * vacuum);
}

struct PairRecipe {
  const char* name;
  std::size_t first;   // created second-to-last, i.e. leftmost operator
  std::size_t second;  // created first
};

// Mode pairs in the creation order a_first† a_second† |0>.
constexpr PairRecipe kPairRecipes[6] = {
    {"a", mode_index(0, 0), mode_index(1, 0)},  // both spins at r
    {"b", mode_index(0, 1), mode_index(1, 1)},  // both spins at s
    {"c", mode_index(0, 0), mode_index(0, 1)},  // spin 0 at r and s
    {"d", mode_index(1, 0), mode_index(1, 1)},  // spin 1 at r and s
    {"q01", mode_index(0, 0), mode_index(1, 1)},
    {"q10", mode_index(1, 0), mode_index(0, 1)},
};

CMatrix penalty_from_numbers(const FockEnergies& energies) {
  CMatrix h = CMatrix::Zero(16, 16);
  for (std::size_t n = 0; n < 16; ++n) {
    const double n0r = static_cast<double>((n >> 3) & 1u);
    const double n1r = static_cast<double>((n >> 2) & 1u);
    const double n0s = static_cast<double>((n >> 1) & 1u);
    const double n1s = static_cast<double>(n & 1u);
    h(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n)) =
        energies.e_a * n0r * n1r + energies.e_b * n0s * n1s + energies.e_c * n0r * n0s +
        energies.e_d * n1r * n1s;
  }
  return h;
}

CMatrix penalty_from_ladders(const FockEnergies& energies) {
  const LadderOperators ops = ladder_operators();
  auto pair_term = [&ops](std::size_t i, std::size_t j) {
    return ops.create[i] * ops.create[j] * ops.annihilate[i] * ops.annihilate[j];
  };
  return -(energies.e_a * pair_term(0, 1) + energies.e_b * pair_term(2, 3) +
           energies.e_c * pair_term(0, 2) + energies.e_d * pair_term(1, 3));
}

}  // namespace

Basis fock_basis() {
  return Basis({Subsystem::qubit("n0r"), Subsystem::qubit("n1r"), Subsystem::qubit("n0s"),
                Subsystem::qubit("n1s")});
}

Basis slot_basis() {
  return Basis({Subsystem{"chi1", {"0", "1"}}, Subsystem{"chi2", {"0", "1"}},
                Subsystem{"lambda1", {"r", "s"}}, Subsystem{"lambda2", {"r", "s"}}});
}

LadderOperators ladder_operators() {
  LadderOperators ops;
  for (std::size_t m = 0; m < 4; ++m) {
    CMatrix create = CMatrix::Zero(16, 16);
    for (std::size_t from = 0; from < 16; ++from) {
      const bool occupied = (from >> (3 - m)) & 1u;
      if (occupied) continue;
      std::size_t parity = 0;
      for (std::size_t k = 0; k < m; ++k) parity += (from >> (3 - k)) & 1u;
      const double sign = (parity % 2 == 0) ? 1.0 : -1.0;
      const std::size_t to = from | (std::size_t{8} >> m);
      create(static_cast<Eigen::Index>(to), static_cast<Eigen::Index>(from)) = sign;
    }
    ops.create[m] = create;
    ops.annihilate[m] = create.adjoint();
  }
  return ops;
}

double car_deviation(const LadderOperators& ops) {
  // The eight ladder matrices, annihilators first.
  std::array<const CMatrix*, 8> all{};
  for (std::size_t m = 0; m < 4; ++m) {
    all[m] = &ops.annihilate[m];
    all[m + 4] = &ops.create[m];
  }
  const CMatrix identity = CMatrix::Identity(16, 16);
  double worst = 0.0;
  for (std::size_t p = 0; p < 8; ++p) {
    for (std::size_t q = 0; q < 8; ++q) {
      const CMatrix anti = (*all[p]) * (*all[q]) + (*all[q]) * (*all[p]);
      const bool conjugate_pair = (p % 4 == q % 4) && (p / 4 != q / 4);
      const CMatrix expected = conjugate_pair ? identity : CMatrix::Zero(16, 16);
      worst = std::max(worst, (anti - expected).cwiseAbs().maxCoeff());
    }
  }
  return worst;
}

CMatrix slot_to_fock_intertwiner() {
  CMatrix t = CMatrix::Zero(16, 16);
  for (std::size_t i = 0; i < 4; ++i) {
    for (std::size_t j = 0; j < 4; ++j) {
      if (i == j) continue;
      const double sign = i < j ? 1.0 : -1.0;
      t(static_cast<Eigen::Index>(occupation_index(i, j)),
        static_cast<Eigen::Index>(slot_pair_index(i, j))) = sign * kInvSqrt2;
    }
  }
  return t;
}

NamedStates named_states() {
  const Basis basis = fock_basis();
  const LadderOperators ops = ladder_operators();
  const CMatrix t = slot_to_fock_intertwiner();

  std::array<CVector, 6> built;
  for (std::size_t k = 0; k < 6; ++k) {
    const PairRecipe& r = kPairRecipes[k];
    const CVector from_ladders = apply_pair_of_creators(ops, r.first, r.second);
    const CVector from_slots = t * antisymmetric_pair(r.first, r.second);
    if ((from_ladders - from_slots).cwiseAbs().maxCoeff() > kStructuralTol) {
      throw std::runtime_error(std::string("the ladder and slot constructions of state '") +
                               r.name + "' disagree");
    }
    built[k] = from_ladders;
  }

  const CVector e = (built[4] + built[5]) * kInvSqrt2;
  const CVector f = (built[4] - built[5]) * kInvSqrt2;
  return NamedStates{StateVector(basis, built[0]), StateVector(basis, built[1]),
                     StateVector(basis, built[2]), StateVector(basis, built[3]),
                     StateVector(basis, e),        StateVector(basis, f),
                     StateVector(basis, built[4]), StateVector(basis, built[5])};
}

Projector antisymmetric_projector() {
  CMatrix span(16, 6);
  std::size_t col = 0;
  for (std::size_t i = 0; i < 4; ++i) {
    for (std::size_t j = i + 1; j < 4; ++j) {
      span.col(static_cast<Eigen::Index>(col++)) = antisymmetric_pair(i, j);
    }
  }
  return Projector(slot_basis(), span);
}

Projector symmetric_projector() {
  CMatrix span = CMatrix::Zero(16, 10);
  std::size_t col = 0;
  for (std::size_t i = 0; i < 4; ++i) {
    CVector diag = CVector::Zero(16);
    diag(static_cast<Eigen::Index>(slot_pair_index(i, i))) = 1.0;
    span.col(static_cast<Eigen::Index>(col++)) = diag;
  }
  for (std::size_t i = 0; i < 4; ++i) {
    for (std::size_t j = i + 1; j < 4; ++j) {
      CVector v = CVector::Zero(16);
      v(static_cast<Eigen::Index>(slot_pair_index(i, j))) = kInvSqrt2;
      v(static_cast<Eigen::Index>(slot_pair_index(j, i))) = kInvSqrt2;
      span.col(static_cast<Eigen::Index>(col++)) = v;
    }
  }
  return Projector(slot_basis(), span);
}

Operator exchange_operator() {
  CMatrix x = CMatrix::Zero(16, 16);
  for (std::size_t i = 0; i < 4; ++i) {
    for (std::size_t j = 0; j < 4; ++j) {
      x(static_cast<Eigen::Index>(slot_pair_index(j, i)),
        static_cast<Eigen::Index>(slot_pair_index(i, j))) = 1.0;
    }
  }
  return Operator(slot_basis(), x, true);
}

void FockEnergies::validate() const {
  const double floor = std::min(e_c, e_d);
  const double pair_ceiling = std::max(e_c, e_d);
  if (!(floor > 0.0)) {
    throw std::invalid_argument("spin-aligned pair energies must be strictly positive");
  }
  if (!(e_a > pair_ceiling) || !(e_b > pair_ceiling)) {
    throw std::invalid_argument(
        "doubly-occupied site energies must exceed the spin-aligned pair energies");
  }
}

Operator penalty_hamiltonian(const FockEnergies& energies) {
  energies.validate();
  const Basis basis = fock_basis();

  const CMatrix from_numbers = penalty_from_numbers(energies);
  const CMatrix from_ladders = penalty_from_ladders(energies);
  if ((from_numbers - from_ladders).cwiseAbs().maxCoeff() > kStructuralTol) {
    throw std::runtime_error(
        "the number-product and ladder constructions of the penalty Hamiltonian disagree");
  }

  // On the two-particle sector the same operator must be the rank-one sum
  // over the four penalized named states.
  const NamedStates states = named_states();
  CMatrix rank_one = CMatrix::Zero(16, 16);
  rank_one += energies.e_a * states.a.amplitudes() * states.a.amplitudes().adjoint();
  rank_one += energies.e_b * states.b.amplitudes() * states.b.amplitudes().adjoint();
  rank_one += energies.e_c * states.c.amplitudes() * states.c.amplitudes().adjoint();
  rank_one += energies.e_d * states.d.amplitudes() * states.d.amplitudes().adjoint();
  CMatrix on_sector = CMatrix::Zero(16, 16);
  for (std::size_t n = 0; n < 16; ++n) {
    const int particles = ((n >> 3) & 1) + ((n >> 2) & 1) + ((n >> 1) & 1) + (n & 1);
    if (particles != 2) continue;
    on_sector(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n)) =
        from_numbers(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
  }
  if ((on_sector - rank_one).cwiseAbs().maxCoeff() > kStructuralTol) {
    throw std::runtime_error(
        "the penalty Hamiltonian disagrees with its rank-one form on the two-particle sector");
  }

  return Operator(basis, from_numbers, true);
}

Operator slot_hamiltonian(const FockEnergies& energies) {
  const CMatrix t = slot_to_fock_intertwiner();
  const CMatrix h = penalty_hamiltonian(energies).matrix();
  return Operator(slot_basis(), t.adjoint() * h * t, true);
}

DualConstructionReport dual_construction_report(const FockEnergies& energies) {
  energies.validate();
  const LadderOperators ops = ladder_operators();
  const CMatrix t = slot_to_fock_intertwiner();

  DualConstructionReport report;
  for (const PairRecipe& r : kPairRecipes) {
    const CVector from_ladders = apply_pair_of_creators(ops, r.first, r.second);
    const CVector from_slots = t * antisymmetric_pair(r.first, r.second);
    report.named_state_deviation = std::max(
        report.named_state_deviation, (from_ladders - from_slots).cwiseAbs().maxCoeff());
  }
  report.hamiltonian_deviation =
      (penalty_from_numbers(energies) - penalty_from_ladders(energies)).cwiseAbs().maxCoeff();
  return report;
}

Projector ground_projector(const FockEnergies& energies) {
  energies.validate();
  const Projector antisym = antisymmetric_projector();
  const CMatrix& b = antisym.span();
  const CMatrix h = slot_hamiltonian(energies).matrix();
  const CMatrix reduced = b.adjoint() * h * b;

  Eigen::SelfAdjointEigenSolver<CMatrix> solver(reduced);
  if (solver.info() != Eigen::Success) {
    throw std::runtime_error("eigendecomposition of the reduced penalty Hamiltonian failed");
  }
  const double cutoff = 1e-10 * std::max(energies.e_a, energies.e_b);
  std::vector<Eigen::Index> kept;
  for (Eigen::Index i = 0; i < solver.eigenvalues().size(); ++i) {
    if (std::abs(solver.eigenvalues()(i)) < cutoff) kept.push_back(i);
  }
  if (kept.empty()) {
    throw std::runtime_error("the penalty Hamiltonian has no zero-energy antisymmetric states");
  }
  CMatrix span(16, static_cast<Eigen::Index>(kept.size()));
  for (std::size_t k = 0; k < kept.size(); ++k) {
    span.col(static_cast<Eigen::Index>(k)) = b * solver.eigenvectors().col(kept[k]);
  }
  return Projector(slot_basis(), span);
}

AntisymmetryReport antisymmetrizer_check() {
  const Projector antisym = antisymmetric_projector();
  const CMatrix& a = antisym.matrix();
  const CMatrix t = slot_to_fock_intertwiner();
  const NamedStates states = named_states();

  AntisymmetryReport report;
  const StateVector* named[] = {&states.a, &states.b, &states.c,
                                &states.d, &states.e, &states.f};
  for (const StateVector* state : named) {
    const CVector embedded = t.adjoint() * state->amplitudes();
    report.named_state_deviation =
        std::max(report.named_state_deviation, (a * embedded - embedded).norm());
  }

  // Bare ordered product: slot 1 carries spin 0 at r, slot 2 spin 1 at s.
  CVector product = CVector::Zero(16);
  product(static_cast<Eigen::Index>(slot_pair_index(mode_index(0, 0), mode_index(1, 1)))) = 1.0;
  const CVector expected =
      0.5 * (t.adjoint() * states.e.amplitudes() + t.adjoint() * states.f.amplitudes());
  report.product_projection_deviation = (a * product - expected).norm();

  const CMatrix x = exchange_operator().matrix();
  for (const std::size_t chi : {std::size_t{0}, std::size_t{1}}) {
    CVector sym = CVector::Zero(16);
    sym(static_cast<Eigen::Index>(slot_pair_index(mode_index(chi, 0), mode_index(chi, 1)))) =
        kInvSqrt2;
    sym(static_cast<Eigen::Index>(slot_pair_index(mode_index(chi, 1), mode_index(chi, 0)))) =
        kInvSqrt2;
    report.symmetric_pair_deviation =
        std::max(report.symmetric_pair_deviation, (x * sym - sym).norm());
  }
  return report;
}

InducedRun induced_connection_evolution(double theta, const RotationSchedule& schedule,
                                        const FockEnergies& energies) {
  schedule.validate();
  energies.validate();
  const Basis basis = slot_basis();
  const CMatrix t = slot_to_fock_intertwiner();
  const NamedStates states = named_states();

  const CVector embedded01 = t.adjoint() * states.q01.amplitudes();
  const CVector embedded10 = t.adjoint() * states.q10.amplitudes();
  const CVector start = std::cos(theta) * embedded01 + std::sin(theta) * embedded10;

  // Population sectors of the qubit encoded at site r: the slot sitting at r
  // carries the value in its spin.  Doubly-occupied-site indices stay
  // unconstrained (the ground projector already excludes them).
  std::array<std::vector<std::size_t>, 2> sectors;
  for (std::size_t idx = 0; idx < basis.dim(); ++idx) {
    const std::vector<std::size_t> digits = basis.digits_of(idx);
    const std::size_t chi1 = digits[0];
    const std::size_t chi2 = digits[1];
    const std::size_t lambda1 = digits[2];
    const std::size_t lambda2 = digits[3];
    if (lambda1 == 0 && lambda2 == 1) {
      sectors[chi1].push_back(idx);
    } else if (lambda1 == 1 && lambda2 == 0) {
      sectors[chi2].push_back(idx);
    }
  }
  std::vector<RVector> table(schedule.steps + 1, RVector::Zero(2));
  for (std::size_t n = 0; n <= schedule.steps; ++n) {
    const double angle = schedule.angle_at(n);
    const double c = std::cos(angle);
    const double s = std::sin(angle);
    table[n](0) = c * c;
    table[n](1) = s * s;
  }

  ConstraintSystem system(basis, {antisymmetric_projector(), ground_projector(energies)},
                          {MarginalSchedule::driven_partition("r", {sectors[0], sectors[1]},
                                                              std::move(table))},
                          StateVector(basis, start), schedule.steps);
  system.delta_phi = schedule.delta_phi();
  // When the drive grows a site-qubit value out of zero weight, every
  // constraint is symmetric under flipping the sign of the new component;
  // the forward frame |01> + |10> selects the branch the rotation actually
  // follows (its phases are the signs both components carry for angles in
  // the first quadrant).
  system.injection_frame = embedded01 + embedded10;

  EvolutionOutcome outcome = evolve(system);
  if (!outcome.feasible()) {
    throw std::runtime_error("induced evolution infeasible at step " +
                             std::to_string(outcome.infeasible_step));
  }

  InducedRun run;
  const CMatrix h = slot_hamiltonian(energies).matrix();
  const std::size_t count = outcome.trajectory.points.size();
  run.penalty_expectation = RVector::Zero(static_cast<Eigen::Index>(count));
  run.qubit_amplitudes = CMatrix::Zero(static_cast<Eigen::Index>(count), 2);
  for (std::size_t k = 0; k < count; ++k) {
    const CVector& psi = outcome.trajectory.points[k].state.amplitudes();
    run.penalty_expectation(static_cast<Eigen::Index>(k)) = std::real(psi.dot(h * psi));
    run.qubit_amplitudes(static_cast<Eigen::Index>(k), 0) = embedded01.dot(psi);
    run.qubit_amplitudes(static_cast<Eigen::Index>(k), 1) = embedded10.dot(psi);
  }
  run.trajectory = std::move(outcome.trajectory);
  return run;
}

double spatial_statistics_density(double k_a, double k_b, double x1, double x2,
                                  SpinCharacter character) {
  const Complex i(0.0, 1.0);
  const Complex direct = std::exp(i * k_a * x1) * std::exp(i * k_b * x2);
  const Complex exchanged = std::exp(i * k_a * x2) * std::exp(i * k_b * x1);
  // The spin singlet is antisymmetric, so its spatial factor is symmetric;
  // the triplet is the other way around.
  const Complex amplitude =
      character == SpinCharacter::Singlet ? direct + exchanged : direct - exchanged;
  return std::norm(amplitude);
}

}  // namespace diak
