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

#include "diakoptic/basis.hpp"

#include <algorithm>
#include <stdexcept>
#include <unordered_set>

#include "diakoptic/types.hpp"

namespace diak {

Basis::Basis(std::vector<Subsystem> subsystems) : subsystems_(std::move(subsystems)) {
  if (subsystems_.empty()) {
    throw std::invalid_argument("Basis requires at least one subsystem");
  }
  std::unordered_set<std::string> seen;
  for (const auto& sub : subsystems_) {
    if (sub.name.empty()) {
      throw std::invalid_argument("subsystem name must be non-empty");
    }
    if (sub.labels.size() < 2) {
      throw std::invalid_argument("subsystem '" + sub.name + "' needs at least two basis labels");
    }
    if (!seen.insert(sub.name).second) {
      throw std::invalid_argument("duplicate subsystem name '" + sub.name + "'");
    }
    std::unordered_set<std::string> label_seen;
    for (const auto& label : sub.labels) {
      if (!label_seen.insert(label).second) {
        throw std::invalid_argument("duplicate label '" + label + "' in subsystem '" + sub.name +
                                    "'");
      }
    }
  }
  dim_ = 1;
  for (const auto& sub : subsystems_) {
    if (dim_ > kMaxDimension / sub.dim()) {
      throw std::invalid_argument("basis dimension exceeds the dense-storage cap");
    }
    dim_ *= sub.dim();
  }
  // Row-major strides: first subsystem most significant.
  strides_.assign(subsystems_.size(), 1);
  for (std::size_t i = subsystems_.size(); i-- > 1;) {
    strides_[i - 1] = strides_[i] * subsystems_[i].dim();
  }
}

Basis Basis::qubits(const std::vector<std::string>& names) {
  std::vector<Subsystem> subs;
  subs.reserve(names.size());
  for (const auto& name : names) subs.push_back(Subsystem::qubit(name));
  return Basis(std::move(subs));
}

bool Basis::has(const std::string& name) const {
  return std::any_of(subsystems_.begin(), subsystems_.end(),
                     [&](const Subsystem& s) { return s.name == name; });
}

std::size_t Basis::find(const std::string& name) const {
  for (std::size_t i = 0; i < subsystems_.size(); ++i) {
    if (subsystems_[i].name == name) return i;
  }
  throw std::invalid_argument("no subsystem named '" + name + "'");
}

std::size_t Basis::index_of(std::span<const std::size_t> digits) const {
  if (digits.size() != subsystems_.size()) {
    throw std::invalid_argument("digit count does not match subsystem count");
  }
  std::size_t index = 0;
  for (std::size_t i = 0; i < digits.size(); ++i) {
    if (digits[i] >= subsystems_[i].dim()) {
      throw std::invalid_argument("digit out of range for subsystem '" + subsystems_[i].name +
                                  "'");
    }
    index += digits[i] * strides_[i];
  }
  return index;
}

std::vector<std::size_t> Basis::digits_of(std::size_t index) const {
  if (index >= dim_) throw std::invalid_argument("basis index out of range");
  std::vector<std::size_t> digits(subsystems_.size());
  for (std::size_t i = 0; i < subsystems_.size(); ++i) {
    digits[i] = (index / strides_[i]) % subsystems_[i].dim();
  }
  return digits;
}

std::size_t Basis::digit_at(std::size_t index, std::size_t subsystem_index) const {
  if (index >= dim_) throw std::invalid_argument("basis index out of range");
  if (subsystem_index >= subsystems_.size()) {
    throw std::invalid_argument("subsystem index out of range");
  }
  return (index / strides_[subsystem_index]) % subsystems_[subsystem_index].dim();
}

Basis Basis::concat(const Basis& other) const {
  std::vector<Subsystem> subs = subsystems_;
  for (const auto& sub : other.subsystems_) {
    if (has(sub.name)) {
      throw std::invalid_argument("tensor product would duplicate subsystem '" + sub.name + "'");
    }
    subs.push_back(sub);
  }
  return Basis(std::move(subs));
}

std::string Basis::state_label(std::size_t index) const {
  const auto digits = digits_of(index);
  bool single_char = true;
  for (std::size_t i = 0; i < digits.size(); ++i) {
    if (subsystems_[i].labels[digits[i]].size() != 1) single_char = false;
  }
  std::string out = "|";
  for (std::size_t i = 0; i < digits.size(); ++i) {
    if (i > 0 && !single_char) out += ",";
    out += subsystems_[i].labels[digits[i]];
  }
  out += ">";
  return out;
}

bool Basis::operator==(const Basis& other) const {
  if (subsystems_.size() != other.subsystems_.size()) return false;
  for (std::size_t i = 0; i < subsystems_.size(); ++i) {
    if (subsystems_[i].name != other.subsystems_[i].name) return false;
    if (subsystems_[i].labels != other.subsystems_[i].labels) return false;
  }
  return true;
}

}  // namespace diak
