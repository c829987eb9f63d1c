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
#include <cstddef>

#include "diakoptic/basis.hpp"
#include "diakoptic/connection.hpp"
#include "diakoptic/evolver.hpp"
#include "diakoptic/hilbert.hpp"
#include "diakoptic/types.hpp"

namespace diak {

// Two identical fermions shared between two sites r, s with a spin-like
// binary degree of freedom.  Modes are ordered 0r < 1r < 0s < 1s (spin value
// first, site second); every second-quantization sign below is fixed by this
// order.

/// Occupation-number basis of the full 4-mode fermionic space: one occupation
/// qubit per mode, dimension 16, mode 0r most significant.
Basis fock_basis();

/// Two-slot ("first-quantized") basis: spin of slot 1, spin of slot 2, then
/// site of slot 1 and site of slot 2 with labels r/s.  Dimension 16.
Basis slot_basis();

/// Flat mode index for spin chi at site lambda (0 = r, 1 = s).
constexpr std::size_t mode_index(std::size_t chi, std::size_t lambda) {
  return 2 * lambda + chi;
}

/// Creation/annihilation matrices on fock_basis() with Jordan-Wigner sign
/// bookkeeping: create[m] adds a fermion in mode m with sign (-1)^(number of
/// occupied modes below m); annihilate[m] is its adjoint.
struct LadderOperators {
  std::array<CMatrix, 4> create;
  std::array<CMatrix, 4> annihilate;
};
LadderOperators ladder_operators();

/// Worst-case deviation over all 64 anticommutators {x, y} of the eight
/// ladder matrices from their canonical values: identity when x, y are the
/// annihilator/creator pair of a single mode, zero in every other case.
double car_deviation(const LadderOperators& ops);

/// The six two-fermion states, each built twice — by creation operators on
/// the vacuum and by mapping the (anti)symmetrized slot expression through
/// the intertwiner — and verified equal (throws std::runtime_error on
/// disagreement).  q01/q10 are the site-qubit readings of the two
/// singly-occupied-per-site states; e/f are their sum/difference.
struct NamedStates {
  StateVector a;    ///< both spins at r
  StateVector b;    ///< both spins at s
  StateVector c;    ///< spin 0 at r and at s   (site qubits |00>)
  StateVector d;    ///< spin 1 at r and at s   (site qubits |11>)
  StateVector e;    ///< (q01 + q10)/sqrt(2)
  StateVector f;    ///< (q01 - q10)/sqrt(2)
  StateVector q01;  ///< spin 0 at r, spin 1 at s (site qubits |01>)
  StateVector q10;  ///< spin 1 at r, spin 0 at s (site qubits |10>)
};
NamedStates named_states();

/// Linear map from slot_basis() to fock_basis(): the pair state |i>|j> goes
/// to (sign/sqrt2)|occupied {i,j}> with sign +1 for i < j, -1 for i > j, and
/// to zero for i = j.  Restricted to the antisymmetric subspace it is an
/// isometry onto the two-particle sector; T†T is the antisymmetric projector.
CMatrix slot_to_fock_intertwiner();

/// Orthogonal projectors onto the exchange-antisymmetric (rank 6) and
/// exchange-symmetric (rank 10) subspaces of slot_basis().
Projector antisymmetric_projector();
Projector symmetric_projector();

/// Exchange (slot swap) operator on slot_basis().
Operator exchange_operator();

/// Mode-pair penalty energies.  Doubly-occupied sites must cost more than
/// spin-aligned pairs, which must cost more than zero; validate() throws
/// std::invalid_argument otherwise.
struct FockEnergies {
  double e_a = 3.0;  ///< both spins at r
  double e_b = 3.0;  ///< both spins at s
  double e_c = 1.0;  ///< spin 0 at both sites
  double e_d = 1.0;  ///< spin 1 at both sites

  void validate() const;
};

/// The penalty Hamiltonian sum_pairs E * n_i n_j on fock_basis(), assembled
/// both from number products and from the normal-ordered ladder form and
/// checked equal; on the two-particle sector it equals the rank-one sum over
/// the named states a..d, leaving span{q01, q10} as its null space.
Operator penalty_hamiltonian(const FockEnergies& energies);

/// penalty_hamiltonian conjugated into slot_basis() by the intertwiner.
Operator slot_hamiltonian(const FockEnergies& energies);

/// Measured disagreement between the paired constructions that the builders
/// above assert equal: the ladder-vs-slot named states and the
/// number-product-vs-ladder Hamiltonian.  Useful for reporting the actual
/// deviations instead of a bare pass/throw.
struct DualConstructionReport {
  double named_state_deviation = 0.0;
  double hamiltonian_deviation = 0.0;
};
DualConstructionReport dual_construction_report(const FockEnergies& energies = {});

/// Projector onto the zero-energy antisymmetric subspace of the slot space
/// (rank 2 for valid energies): the arena the induced evolution lives in.
Projector ground_projector(const FockEnergies& energies);

/// Consistency report for the exchange machinery (see the fields).  All
/// deviations should be at machine-precision level.
struct AntisymmetryReport {
  /// max over the six named states (embedded in the slot space) of
  /// ||A psi - psi||: physical states are already antisymmetric.
  double named_state_deviation = 0.0;
  /// ||A p - (e_emb + f_emb)/2|| for the ordered product p = |spin 0 at r on
  /// slot 1, spin 1 at s on slot 2>: antisymmetrizing the bare product yields
  /// the equal-weight e/f mixture, not a single named state.
  double product_projection_deviation = 0.0;
  /// max over the two doubly-symmetric spin patterns of ||X v - v|| under the
  /// exchange operator X: the states sharing site-qubit notation with c and d
  /// but symmetrized are exchange eigenstates with eigenvalue +1.
  double symmetric_pair_deviation = 0.0;
};
AntisymmetryReport antisymmetrizer_check();

/// One induced-evolution run on the slot space: trajectory under
/// [antisymmetric projector, ground projector] with the r-site population
/// driven as cos^2/sin^2 of the scheduled angle.
struct InducedRun {
  Trajectory trajectory;
  /// <psi|H|psi> at each recorded step (H = slot_hamiltonian).
  RVector penalty_expectation;
  /// Components along the embedded site-qubit states |01>, |10>, one row per
  /// recorded step.
  CMatrix qubit_amplitudes;
};

/// Drive the embedded state cos(theta)|01> + sin(theta)|10> through the
/// schedule while confined to the zero-energy antisymmetric subspace.
/// Throws std::runtime_error if any step is infeasible.
InducedRun induced_connection_evolution(double theta, const RotationSchedule& schedule,
                                        const FockEnergies& energies = {});

enum class SpinCharacter { Singlet, Triplet };

/// Squared modulus of the two-particle plane-wave amplitude
/// e^{i k_a x1} e^{i k_b x2} ± e^{i k_a x2} e^{i k_b x1} (symmetric spatial
/// part for Singlet, antisymmetric for Triplet), normalization deliberately
/// left off.
double spatial_statistics_density(double k_a, double k_b, double x1, double x2,
                                  SpinCharacter character);

}  // namespace diak
