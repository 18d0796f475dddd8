// Copyright 2026 The qcarrier Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <complex>
#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "json.hpp"
#include "qcarrier/rng.hpp"

namespace qcarrier {

using Amplitude = std::complex<double>;

// One computational-basis index per wire, big-endian in wire order.
using Digits = std::vector<int>;

// Terms below this magnitude are dropped from sparse maps after
// superposition-creating gates.
inline constexpr double kPruneEpsilon = 1e-14;

// Largest total dimension the dense backend will allocate.
inline constexpr std::size_t kDenseDimensionCap = std::size_t{1} << 24;

// Thrown when a state splits across a cut that is expected to be a
// product but carries residual entanglement.
class EntangledCutError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Wire register of equal-dimension qudits with unique role labels
/// (e.g. "alice", "player_2", "message_2", "eve_1").
class RegisterLayout {
 public:
  RegisterLayout(int dimension, std::vector<std::string> labels);

  /// Labels prefix_1 ... prefix_count.
  static RegisterLayout numbered(int dimension, int count, std::string_view prefix);

  int dimension() const { return dimension_; }
  int wire_count() const { return static_cast<int>(labels_.size()); }
  const std::vector<std::string>& labels() const { return labels_; }
  const std::string& label(int wire) const;

  std::optional<int> find(std::string_view label) const;
  int wire(std::string_view label) const;

  /// d^wire_count; throws std::overflow_error past 2^62.
  std::size_t total_dimension() const;

  RegisterLayout concat(const RegisterLayout& other) const;
  RegisterLayout select(std::span<const int> wires) const;

  bool operator==(const RegisterLayout&) const = default;

 private:
  int dimension_;
  std::vector<std::string> labels_;
};

enum class Backend { sparse, dense };

/// Pure state over a RegisterLayout. The sparse backend keeps an ordered
/// map from digit tuples to amplitudes; the dense backend keeps the full
/// amplitude vector in big-endian index order.
class QuditState {
 public:
  explicit QuditState(RegisterLayout layout, Backend backend = Backend::sparse);

  const RegisterLayout& layout() const { return layout_; }
  int dimension() const { return layout_.dimension(); }
  int wire_count() const { return layout_.wire_count(); }
  Backend backend() const { return backend_; }

  Amplitude amplitude(const Digits& digits) const;
  void set(const Digits& digits, Amplitude value);
  void add(const Digits& digits, Amplitude value);

  std::size_t nonzero_count() const;
  double squared_norm() const;
  double norm() const;
  void normalize();
  void prune(double epsilon = kPruneEpsilon);

  /// Nonzero terms in lexicographic digit order.
  std::vector<std::pair<Digits, Amplitude>> terms() const;

  template <class Fn>
  void for_each_term(Fn&& fn) const {
    if (backend_ == Backend::sparse) {
      for (const auto& [digits, amp] : sparse_) fn(digits, amp);
      return;
    }
    Digits digits(static_cast<std::size_t>(wire_count()), 0);
    for (Eigen::Index i = 0; i < dense_.size(); ++i) {
      if (dense_[i] != Amplitude{}) {
        decode_index(static_cast<std::size_t>(i), digits);
        fn(std::as_const(digits), dense_[i]);
      }
    }
  }

  QuditState with_backend(Backend backend) const;
  QuditState relabeled(std::vector<std::string> labels) const;

  std::size_t encode_index(const Digits& digits) const;
  void decode_index(std::size_t index, Digits& digits) const;

  const Eigen::VectorXcd& dense_vector() const { return dense_; }

 private:
  void check_digits(const Digits& digits) const;

  RegisterLayout layout_;
  Backend backend_;
  std::map<Digits, Amplitude> sparse_;
  Eigen::VectorXcd dense_;
};

/// ω^power with ω = exp(2πi/d); quarter turns are exact.
Amplitude root_of_unity(int d, long long power);

QuditState basis_state(const RegisterLayout& layout, const Digits& digits,
                       Backend backend = Backend::sparse);

/// Uniform superposition Σ amplitudes[i] |branches[i]⟩, normalized.
QuditState superposition(const RegisterLayout& layout,
                         std::span<const std::pair<Digits, Amplitude>> branches,
                         Backend backend = Backend::sparse);

QuditState tensor(const QuditState& a, const QuditState& b);

// |i,j⟩ → |i, j + power·i mod d⟩
QuditState apply_cnot(QuditState state, int control, int target, int power = 1);
// |i,j⟩ → |i, j − power·i mod d⟩
QuditState apply_inverse_cnot(QuditState state, int control, int target, int power = 1);

// X^x_power followed by Z^z_power on one wire.
QuditState apply_pauli(QuditState state, int wire, int x_power, int z_power);

// F|j⟩ = d^{-1/2} Σ_k ω^{jk} |k⟩, or ω → ω^{-1} when conjugated.
QuditState apply_fourier(QuditState state, int wire, bool conjugated = false);

/// ⟨a|b⟩
Amplitude inner_product(const QuditState& a, const QuditState& b);

/// |⟨a|b⟩| for normalized inputs.
double fidelity(const QuditState& a, const QuditState& b);

struct MeasurementResult {
  Digits outcome;
  QuditState post_state;
  double probability;
};

/// Born-rule sample of the listed wires; deterministic given the generator.
MeasurementResult measure_computational(const QuditState& state, std::span<const int> wires,
                                        Rng& rng);
MeasurementResult measure_computational(const QuditState& state, std::span<const int> wires,
                                        std::uint64_t rng_seed);

/// Marginal outcome distribution of the listed wires, ordered by outcome.
std::map<Digits, double> outcome_distribution(const QuditState& state,
                                              std::span<const int> wires);

/// Removes wires that sit in a single basis value (e.g. after measurement).
QuditState drop_definite_wires(const QuditState& state, std::span<const int> wires);

/// Reorders wires so that new wire i is old wire order[i].
QuditState permute_wires(const QuditState& state, std::span<const int> order);

struct ProductFactors {
  QuditState rest;    // the wires not listed, in original order
  QuditState factor;  // the listed wires, in listed order
};

/// Splits a product state across the cut {wires} | rest. Throws
/// EntangledCutError when the purity deficit of the factor exceeds
/// max_purity_deficit.
ProductFactors split_product(const QuditState& state, std::span<const int> wires,
                             double max_purity_deficit = 1e-10);

/// {dimension, labels, amplitudes: [{digits, re, im}]}, sorted by digits.
nlohmann::json state_to_json(const QuditState& state);
QuditState state_from_json(const nlohmann::json& j, Backend backend = Backend::sparse);

}  // namespace qcarrier
