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

#include <optional>
#include <string>
#include <vector>

#include "diakoptic/basis.hpp"
#include "diakoptic/types.hpp"

namespace diak {

/// A ket over a labeled basis.  Amplitudes are dense complex doubles; the
/// class does not force normalization (marginal bookkeeping needs raw
/// vectors), but normalized() and norm() make the common case cheap.
class StateVector {
 public:
  StateVector(Basis basis, CVector amplitudes);

  /// The computational basis state with the given value index per subsystem.
  static StateVector basis_state(const Basis& basis, std::span<const std::size_t> digits);
  /// The computational basis state at a flat index.
  static StateVector basis_state(const Basis& basis, std::size_t index);

  const Basis& basis() const { return basis_; }
  const CVector& amplitudes() const { return amps_; }
  CVector& amplitudes() { return amps_; }
  std::size_t dim() const { return static_cast<std::size_t>(amps_.size()); }

  Complex amplitude(std::size_t index) const { return amps_(static_cast<Eigen::Index>(index)); }

  double norm() const { return amps_.norm(); }
  /// Unit-norm copy; throws std::invalid_argument when the norm is ~0.
  StateVector normalized() const;

  Complex inner(const StateVector& other) const;

 private:
  Basis basis_;
  CVector amps_;
};

/// Dense linear operator tagged with its basis.  `hermitian` is a promise
/// checked at construction (within 1e-12).
class Operator {
 public:
  Operator(Basis basis, CMatrix matrix, bool hermitian = false);

  static Operator identity(const Basis& basis);

  const Basis& basis() const { return basis_; }
  const CMatrix& matrix() const { return mat_; }
  bool hermitian() const { return hermitian_; }
  std::size_t dim() const { return static_cast<std::size_t>(mat_.rows()); }

  StateVector apply(const StateVector& state) const;

 private:
  Basis basis_;
  CMatrix mat_;
  bool hermitian_;
};

/// Orthogonal projector: Hermitian, idempotent, carried together with an
/// orthonormal spanning set of its range.  Construction validates P = P†,
/// P² = P and P e_k = e_k for every span column (all within 1e-12); for
/// dimensions past a few hundred the idempotence check is randomized rather
/// than O(dim³).
class Projector {
 public:
  Projector(Basis basis, CMatrix span_columns);

  const Basis& basis() const { return basis_; }
  const CMatrix& matrix() const { return mat_; }
  const CMatrix& span() const { return span_; }
  std::size_t rank() const { return static_cast<std::size_t>(span_.cols()); }
  std::size_t dim() const { return static_cast<std::size_t>(mat_.rows()); }

  /// P|psi> without renormalization.
  StateVector apply(const StateVector& state) const;

  /// True when the matrix is diagonal in the computational basis (all wire /
  /// particle-statistics projectors over value sectors are).
  bool basis_aligned() const { return basis_aligned_; }

 private:
  Basis basis_;
  CMatrix span_;  // orthonormal columns
  CMatrix mat_;
  bool basis_aligned_;
};

/// Kronecker product of two states on disjoint subsystem name sets.  The
/// result basis is a.basis() followed by b.basis(); amplitudes multiply.
StateVector tensor_product(const StateVector& a, const StateVector& b);

/// Reduced density matrix of `state` on the named subsystems (kept in their
/// original relative order); everything else is traced out.  The result is
/// Hermitian with unit trace for a normalized input.
Operator partial_trace(const StateVector& state, const std::vector<std::string>& keep);

/// Orthogonal projector onto span{vectors}: modified Gram-Schmidt with a
/// re-orthogonalization pass, dropping columns whose residual norm falls
/// below 1e-10.  Duplicate / linearly dependent vectors are legal and
/// collapse; an exactly zero vector is rejected.
Projector projector_from_span(const std::vector<StateVector>& vectors);

/// Projector that keeps exactly the computational basis states selected by
/// `keep_index` (diagonal 0/1 matrix).
Projector projector_onto_indices(const Basis& basis, const std::vector<std::size_t>& keep_index);

/// P|psi> renormalized, or std::nullopt when ||P psi|| < 1e-12 (the state has
/// no component inside the constraint range).
std::optional<StateVector> apply_and_renormalize(const Projector& p, const StateVector& state);

}  // namespace diak
