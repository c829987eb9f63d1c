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

#include <complex>

#include <Eigen/Dense>

namespace diak {

using Complex = std::complex<double>;
using CVector = Eigen::VectorXcd;
using CMatrix = Eigen::MatrixXcd;
using RVector = Eigen::VectorXd;

inline constexpr double kPi = 3.14159265358979323846;

/// Tolerance used by structural invariant checks (hermiticity, idempotence,
/// orthonormality, unit norm).
inline constexpr double kStructuralTol = 1e-12;

/// Columns produced by span orthonormalization are dropped below this norm.
inline constexpr double kSpanDropTol = 1e-10;

/// Two projectors are considered simultaneously enforceable when the max-norm
/// of their commutator stays below this bound.
inline constexpr double kCommutatorTol = 1e-10;

/// Hard cap on total Hilbert-space dimension.  Dense storage only; anything
/// past this is out of scope for this simulator.
inline constexpr std::size_t kMaxDimension = 1ull << 16;

}  // namespace diak
