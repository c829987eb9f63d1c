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

#include "diakoptic/hilbert.hpp"

#include <random>
#include <stdexcept>

namespace diak {

namespace {

// Full O(dim^3) idempotence checks get replaced by randomized probes past
// this dimension; everything in the shipped test corpus sits far below it.
constexpr std::size_t kDenseCheckDim = 256;

void check_square(const CMatrix& m, std::size_t dim, const char* what) {
  if (static_cast<std::size_t>(m.rows()) != dim || static_cast<std::size_t>(m.cols()) != dim) {
    throw std::invalid_argument(std::string(what) + " does not match the basis dimension");
  }
}

}  // namespace

StateVector::StateVector(Basis basis, CVector amplitudes)
    : basis_(std::move(basis)), amps_(std::move(amplitudes)) {
  if (static_cast<std::size_t>(amps_.size()) != basis_.dim()) {
    throw std::invalid_argument("amplitude count does not match the basis dimension");
  }
}

StateVector StateVector::basis_state(const Basis& basis, std::span<const std::size_t> digits) {
  return basis_state(basis, basis.index_of(digits));
}

StateVector StateVector::basis_state(const Basis& basis, std::size_t index) {
  if (index >= basis.dim()) throw std::invalid_argument("basis index out of range");
  CVector amps = CVector::Zero(static_cast<Eigen::Index>(basis.dim()));
  amps(static_cast<Eigen::Index>(index)) = Complex(1.0, 0.0);
  return StateVector(basis, std::move(amps));
}

StateVector StateVector::normalized() const {
  const double n = norm();
  if (n < kStructuralTol) {
    throw std::invalid_argument("cannot normalize a (numerically) zero state");
  }
  return StateVector(basis_, amps_ / n);
}

Complex StateVector::inner(const StateVector& other) const {
  if (!(basis_ == other.basis_)) {
    throw std::invalid_argument("inner product between states on different bases");
  }
  return amps_.dot(other.amps_);  // Eigen's dot conjugates the left argument.
}

Operator::Operator(Basis basis, CMatrix matrix, bool hermitian)
    : basis_(std::move(basis)), mat_(std::move(matrix)), hermitian_(hermitian) {
  check_square(mat_, basis_.dim(), "operator matrix");
  if (hermitian_) {
    const double dev = (mat_ - mat_.adjoint()).cwiseAbs().maxCoeff();
    if (dev > kStructuralTol) {
      throw std::invalid_argument("matrix flagged hermitian deviates from its adjoint");
    }
  }
}

Operator Operator::identity(const Basis& basis) {
  const auto n = static_cast<Eigen::Index>(basis.dim());
  return Operator(basis, CMatrix::Identity(n, n), true);
}

StateVector Operator::apply(const StateVector& state) const {
  if (!(basis_ == state.basis())) {
    throw std::invalid_argument("operator applied to a state on a different basis");
  }
  return StateVector(basis_, mat_ * state.amplitudes());
}

Projector::Projector(Basis basis, CMatrix span_columns)
    : basis_(std::move(basis)), span_(std::move(span_columns)) {
  const auto dim = static_cast<Eigen::Index>(basis_.dim());
  if (span_.rows() != dim) {
    throw std::invalid_argument("span columns do not match the basis dimension");
  }
  if (span_.cols() == 0) {
    throw std::invalid_argument("projector needs a non-empty spanning set");
  }
  // Orthonormality of the span.
  const CMatrix gram = span_.adjoint() * span_;
  const double gram_dev =
      (gram - CMatrix::Identity(span_.cols(), span_.cols())).cwiseAbs().maxCoeff();
  if (gram_dev > kStructuralTol) {
    throw std::invalid_argument("projector span is not orthonormal");
  }
  mat_ = span_ * span_.adjoint();

  // P = P† holds by construction up to rounding; check anyway, then validate
  // idempotence and span fixation.
  if ((mat_ - mat_.adjoint()).cwiseAbs().maxCoeff() > kStructuralTol) {
    throw std::invalid_argument("projector matrix is not hermitian");
  }
  if (basis_.dim() <= kDenseCheckDim) {
    if ((mat_ * mat_ - mat_).cwiseAbs().maxCoeff() > kStructuralTol) {
      throw std::invalid_argument("projector matrix is not idempotent");
    }
  } else {
    std::mt19937_64 rng(0x9e3779b97f4a7c15ull);
    std::uniform_real_distribution<double> unif(-1.0, 1.0);
    for (int probe = 0; probe < 8; ++probe) {
      CVector v(dim);
      for (Eigen::Index i = 0; i < dim; ++i) v(i) = Complex(unif(rng), unif(rng));
      v /= v.norm();
      const CVector pv = mat_ * v;
      if ((mat_ * pv - pv).cwiseAbs().maxCoeff() > kStructuralTol) {
        throw std::invalid_argument("projector matrix is not idempotent");
      }
    }
  }
  if ((mat_ * span_ - span_).cwiseAbs().maxCoeff() > kStructuralTol) {
    throw std::invalid_argument("projector does not fix its own span");
  }

  basis_aligned_ = true;
  for (Eigen::Index j = 0; j < mat_.cols() && basis_aligned_; ++j) {
    for (Eigen::Index i = 0; i < mat_.rows(); ++i) {
      if (i != j && std::abs(mat_(i, j)) > 1e-14) {
        basis_aligned_ = false;
        break;
      }
    }
  }
}

StateVector Projector::apply(const StateVector& state) const {
  if (!(basis_ == state.basis())) {
    throw std::invalid_argument("projector applied to a state on a different basis");
  }
  return StateVector(basis_, mat_ * state.amplitudes());
}

StateVector tensor_product(const StateVector& a, const StateVector& b) {
  const Basis basis = a.basis().concat(b.basis());  // throws on name overlap
  const auto nb = static_cast<Eigen::Index>(b.dim());
  CVector amps(static_cast<Eigen::Index>(basis.dim()));
  for (Eigen::Index i = 0; i < static_cast<Eigen::Index>(a.dim()); ++i) {
    amps.segment(i * nb, nb) = a.amplitudes()(i) * b.amplitudes();
  }
  return StateVector(basis, std::move(amps));
}

Operator partial_trace(const StateVector& state, const std::vector<std::string>& keep) {
  const Basis& basis = state.basis();
  if (keep.empty()) throw std::invalid_argument("partial_trace needs at least one kept subsystem");

  std::vector<bool> kept(basis.subsystem_count(), false);
  for (const auto& name : keep) {
    const std::size_t pos = basis.find(name);  // throws on unknown name
    if (kept[pos]) throw std::invalid_argument("subsystem '" + name + "' listed twice");
    kept[pos] = true;
  }

  // Kept subsystems stay in their original relative order.
  std::vector<Subsystem> kept_subs;
  std::size_t keep_dim = 1;
  std::size_t traced_dim = 1;
  for (std::size_t i = 0; i < basis.subsystem_count(); ++i) {
    if (kept[i]) {
      kept_subs.push_back(basis.subsystem(i));
      keep_dim *= basis.subsystem(i).dim();
    } else {
      traced_dim *= basis.subsystem(i).dim();
    }
  }
  Basis reduced(kept_subs);

  // Split every flat index into (kept digits, traced digits) and accumulate
  // rho[k1, k2] = sum_e psi[k1, e] conj(psi[k2, e]).
  std::vector<std::size_t> keep_part(basis.dim()), trace_part(basis.dim());
  for (std::size_t idx = 0; idx < basis.dim(); ++idx) {
    std::size_t k = 0;
    std::size_t t = 0;
    for (std::size_t i = 0; i < basis.subsystem_count(); ++i) {
      const std::size_t digit = basis.digit_at(idx, i);
      if (kept[i]) {
        k = k * basis.subsystem(i).dim() + digit;
      } else {
        t = t * basis.subsystem(i).dim() + digit;
      }
    }
    keep_part[idx] = k;
    trace_part[idx] = t;
  }

  std::vector<std::vector<std::pair<std::size_t, Complex>>> by_trace(traced_dim);
  for (std::size_t idx = 0; idx < basis.dim(); ++idx) {
    const Complex amp = state.amplitude(idx);
    if (amp != Complex(0.0, 0.0)) {
      by_trace[trace_part[idx]].emplace_back(keep_part[idx], amp);
    }
  }

  CMatrix rho = CMatrix::Zero(static_cast<Eigen::Index>(keep_dim),
                              static_cast<Eigen::Index>(keep_dim));
  for (const auto& group : by_trace) {
    for (const auto& [k1, a1] : group) {
      for (const auto& [k2, a2] : group) {
        rho(static_cast<Eigen::Index>(k1), static_cast<Eigen::Index>(k2)) += a1 * std::conj(a2);
      }
    }
  }
  // Rounding can leave a ~1e-17 asymmetry; symmetrize so the hermitian
  // promise of the returned Operator is exact.
  rho = ((rho + rho.adjoint()) / 2.0).eval();
  return Operator(std::move(reduced), std::move(rho), true);
}

Projector projector_from_span(const std::vector<StateVector>& vectors) {
  if (vectors.empty()) throw std::invalid_argument("projector span must be non-empty");
  const Basis& basis = vectors.front().basis();
  const auto dim = static_cast<Eigen::Index>(basis.dim());

  CMatrix columns(dim, static_cast<Eigen::Index>(vectors.size()));
  Eigen::Index rank = 0;
  for (const auto& v : vectors) {
    if (!(v.basis() == basis)) {
      throw std::invalid_argument("span vectors live on different bases");
    }
    if (v.norm() < kSpanDropTol) {
      throw std::invalid_argument("span contains a (numerically) zero vector");
    }
    CVector w = v.amplitudes();
    // Modified Gram-Schmidt with one re-orthogonalization pass.
    for (int pass = 0; pass < 2; ++pass) {
      for (Eigen::Index j = 0; j < rank; ++j) {
        w -= columns.col(j).dot(w) * columns.col(j);
      }
    }
    const double residual = w.norm();
    if (residual > kSpanDropTol) {
      columns.col(rank) = w / residual;
      ++rank;
    }
  }
  if (rank == 0) {
    throw std::invalid_argument("span collapsed to nothing during orthonormalization");
  }
  return Projector(basis, columns.leftCols(rank));
}

Projector projector_onto_indices(const Basis& basis, const std::vector<std::size_t>& keep_index) {
  if (keep_index.empty()) {
    throw std::invalid_argument("projector needs at least one kept basis state");
  }
  CMatrix columns = CMatrix::Zero(static_cast<Eigen::Index>(basis.dim()),
                                  static_cast<Eigen::Index>(keep_index.size()));
  for (std::size_t j = 0; j < keep_index.size(); ++j) {
    if (keep_index[j] >= basis.dim()) throw std::invalid_argument("kept index out of range");
    columns(static_cast<Eigen::Index>(keep_index[j]), static_cast<Eigen::Index>(j)) = 1.0;
  }
  return Projector(basis, std::move(columns));
}

std::optional<StateVector> apply_and_renormalize(const Projector& p, const StateVector& state) {
  StateVector projected = p.apply(state);
  const double n = projected.norm();
  if (n < kStructuralTol) return std::nullopt;
  return StateVector(projected.basis(), projected.amplitudes() / n);
}

}  // namespace diak
