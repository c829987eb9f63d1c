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

#include "diakoptic/basis.hpp"
#include "diakoptic/hilbert.hpp"
#include "diakoptic/types.hpp"

namespace diak {

/// A two-qubit link that pins its endpoints to opposite values: the kept
/// subspace is span{|01>, |10>}, i.e. a hard-wired logical NOT between the
/// named qubits.
struct ConnectionSpec {
  std::string r = "r";
  std::string s = "s";
};

/// Discretized rotation drive: the driven angle advances from theta to
/// theta + phi_final over `steps` equal increments.  `omega` is the angular
/// rate used for time bookkeeping only (dt = phi_final / (steps * omega));
/// the trajectory itself depends on the angle grid alone.
struct RotationSchedule {
  double theta = 0.0;
  double omega = 1.0;
  double phi_final = 1.5707963267948966;  // pi/2
  std::size_t steps = 1000;

  /// Angle increment per step.
  double delta_phi() const { return phi_final / static_cast<double>(steps); }
  /// Driven angle after n steps.
  double angle_at(std::size_t n) const { return theta + delta_phi() * static_cast<double>(n); }
  /// Throws std::invalid_argument unless omega > 0, steps >= 1, phi_final >= 0.
  void validate() const;
};

/// Projector enforcing value disagreement between the two named qubits of
/// `spec` inside `basis`: keeps every computational basis state whose r and s
/// digits differ, kills the rest.  Diagonal; rank = dim/2.
Projector exclusion_projector(const ConnectionSpec& spec, const Basis& basis);

/// The driven two-qubit state cos(theta+phi)|01> + sin(theta+phi)|10> on the
/// basis (r, s).
StateVector closed_form_state(double theta, double phi, const ConnectionSpec& spec = {});

/// Reduced density of the s end of the closed-form state: diagonal
/// (sin²(theta+phi), cos²(theta+phi)).
Operator closed_form_s_marginal(double theta, double phi);

/// One-step propagator on the two-qubit (r, s) space: rotates span{|01>,|10>}
/// by phi (|01> -> cos phi |01> + sin phi |10>), with the matching rotation on
/// span{|00>,|11>} so the operator is unitary and commutes with the exclusion
/// projector.  Only the action on span{|01>,|10>} and the commutation are
/// contractual; the complementary block is a convention.
Operator connection_propagator(double phi, const ConnectionSpec& spec = {});

/// Single-qubit rotation cos phi (|0><0| + |1><1|) + sin phi (|1><0| - |0><1|).
/// Conjugating a pure state cos(t)|0> + sin(t)|1> by it advances the
/// population diagonal (cos² t, sin² t) to (cos²(t+phi), sin²(t+phi)); this is
/// what generates the driven marginal schedules.
Operator single_qubit_rotation(double phi);

/// Population pair (cos²(angle), sin²(angle)) as a 2-vector.
RVector rotation_populations(double angle);

}  // namespace diak
