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
#include <span>
#include <string>
#include <vector>

namespace diak {

/// One labeled tensor factor: a name plus the ordered alphabet of its basis
/// values.  Qubits use {"0","1"}; composite factors (e.g. a gate's admissible
/// input/output tuples) may use any label strings.
struct Subsystem {
  std::string name;
  std::vector<std::string> labels;

  std::size_t dim() const { return labels.size(); }

  static Subsystem qubit(std::string name) { return Subsystem{std::move(name), {"0", "1"}}; }
};

/// An ordered list of named subsystems fixing how amplitudes are indexed.
///
/// Indexing is lexicographic over (subsystem order, label order): the first
/// subsystem is the most significant digit.  For two qubits r, s the order is
/// |00>, |01>, |10>, |11> with the r value leading, so |01> means r=0, s=1.
class Basis {
 public:
  explicit Basis(std::vector<Subsystem> subsystems);

  /// Convenience: all-qubit basis in the given name order.
  static Basis qubits(const std::vector<std::string>& names);

  std::size_t dim() const { return dim_; }
  std::size_t subsystem_count() const { return subsystems_.size(); }
  const Subsystem& subsystem(std::size_t i) const { return subsystems_.at(i); }
  const std::vector<Subsystem>& subsystems() const { return subsystems_; }

  bool has(const std::string& name) const;
  /// Position of the named subsystem; throws std::invalid_argument if absent.
  std::size_t find(const std::string& name) const;

  /// Flat index of a basis state given one value index per subsystem.
  std::size_t index_of(std::span<const std::size_t> digits) const;
  /// Per-subsystem value indices of a flat basis index.
  std::vector<std::size_t> digits_of(std::size_t index) const;
  /// Value index of a single subsystem inside a flat basis index.
  std::size_t digit_at(std::size_t index, std::size_t subsystem_index) const;

  /// Tensor concatenation: this basis followed by `other`.  Throws when a
  /// subsystem name appears in both.
  Basis concat(const Basis& other) const;

  /// Human-readable label of a flat index, e.g. "|01>" with one digit per
  /// subsystem (multi-character labels are separated by commas).
  std::string state_label(std::size_t index) const;

  bool operator==(const Basis& other) const;

 private:
  std::vector<Subsystem> subsystems_;
  std::vector<std::size_t> strides_;
  std::size_t dim_;
};

}  // namespace diak
