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

#include "diakoptic/connection.hpp"

#include <cmath>
#include <stdexcept>
#include <vector>

namespace diak {

void RotationSchedule::validate() const {
  if (!(omega > 0.0)) throw std::invalid_argument("rotation schedule needs omega > 0");
  if (steps < 1) throw std::invalid_argument("rotation schedule needs at least one step");
  if (phi_final < 0.0) throw std::invalid_argument("rotation schedule needs phi_final >= 0");
}

Projector exclusion_projector(const ConnectionSpec& spec, const Basis& basis) {
  const std::size_t r_pos = basis.find(spec.r);
  const std::size_t s_pos = basis.find(spec.s);
  if (r_pos == s_pos) {
    throw std::invalid_argument("exclusion projector endpoints must be distinct subsystems");
  }
  for (const std::size_t pos : {r_pos, s_pos}) {
    if (basis.subsystem(pos).dim() != 2) {
      throw std::invalid_argument("exclusion projector endpoints must be qubits");
    }
  }
  std::vector<std::size_t> kept;
  for (std::size_t idx = 0; idx < basis.dim(); ++idx) {
    if (basis.digit_at(idx, r_pos) != basis.digit_at(idx, s_pos)) kept.push_back(idx);
  }
  return projector_onto_indices(basis, kept);
}

StateVector closed_form_state(double theta, double phi, const ConnectionSpec& spec) {
  const Basis basis = Basis::qubits({spec.r, spec.s});
  const double angle = theta + phi;
  CVector amps = CVector::Zero(4);
  amps(1) = std::cos(angle);  // |01>
  amps(2) = std::sin(angle);  // |10>
  return StateVector(basis, std::move(amps));
}

Operator closed_form_s_marginal(double theta, double phi) {
  const double angle = theta + phi;
  const double s2 = std::sin(angle) * std::sin(angle);
  CMatrix rho = CMatrix::Zero(2, 2);
  rho(0, 0) = s2;
  rho(1, 1) = 1.0 - s2;
  return Operator(Basis::qubits({"s"}), std::move(rho), true);
}

Operator connection_propagator(double phi, const ConnectionSpec& spec) {
  const Basis basis = Basis::qubits({spec.r, spec.s});
  const double c = std::cos(phi);
  const double s = std::sin(phi);
  CMatrix q = CMatrix::Zero(4, 4);
  // Rotation by phi on span{|01>, |10>}; the complementary block rotates
  // span{|00>, |11>} by the same angle, which keeps the operator unitary and
  // block-diagonal with respect to the exclusion split.
  q(1, 1) = c;
  q(2, 1) = s;
  q(1, 2) = -s;
  q(2, 2) = c;
  q(0, 0) = c;
  q(3, 0) = s;
  q(0, 3) = -s;
  q(3, 3) = c;
  return Operator(basis, std::move(q), false);
}

Operator single_qubit_rotation(double phi) {
  const double c = std::cos(phi);
  const double s = std::sin(phi);
  CMatrix m(2, 2);
  m(0, 0) = c;
  m(0, 1) = -s;
  m(1, 0) = s;
  m(1, 1) = c;
  return Operator(Basis::qubits({"q"}), std::move(m), false);
}

RVector rotation_populations(double angle) {
  RVector p(2);
  const double c = std::cos(angle);
  p(0) = c * c;
  p(1) = 1.0 - p(0);
  return p;
}

}  // namespace diak
