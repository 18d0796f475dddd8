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

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "json.hpp"
#include "qcarrier/attack_model.hpp"
#include "qcarrier/carriers.hpp"
#include "qcarrier/protocol_engine.hpp"

namespace qcarrier {

struct AttackReport {
  AttackKind kind = AttackKind::passive_intercept;
  std::vector<int> recovered_differences;
  std::vector<double> density_distances;
  double detection_probability = 0.0;
  std::vector<double> entanglement_measures;
  /// Named scalar side results (fidelities, reference distances).
  std::map<std::string, double> metrics;
  /// Exact per-round probability that a stray check would flag.
  std::vector<double> round_mismatch_probabilities;
  std::string notes;

  double max_distance() const;
};

nlohmann::json report_to_json(const AttackReport& report);

inline constexpr std::string_view kEvePrefix = "eve";
inline constexpr std::string_view kInsiderPrefix = "insider";

/// Probability that a stray check with symbol s fails when every player
/// announces: weight of decoded(message) ≠ s after upload and download on
/// the carrier (which may carry foreign wires).
double stray_mismatch_probability(const QuditState& carrier, const SchemeSpec& scheme, Parity parity,
                                  int symbol);

/// Average of stray_mismatch_probability over uniformly random symbols.
double mean_stray_mismatch_probability(const QuditState& carrier, const SchemeSpec& scheme, Parity parity);

/// Σ_q |q⟩_alice |rest_q⟩ |ξ_q⟩_eve, renormalized. Appends the ancilla wires
/// labelled eve_1..eve_m. Throws std::invalid_argument when the result
/// vanishes.
QuditState contaminate(const QuditState& carrier, std::span<const Eigen::VectorXcd> ancillas);

/// Applies a matrix to the register formed by `wires` (first wire most
/// significant).
QuditState apply_register_operator(const QuditState& state, std::span<const int> wires,
                                   const Eigen::MatrixXcd& op);

/// Projective measurement onto {|x̄⟩} ∪ (code space)^⊥ on the listed n
/// wires; returns x, or nullopt for the complement outcome. The state is
/// replaced by the normalized post-measurement state.
std::optional<int> measure_codeword(QuditState& state, std::span<const int> wires, const SchemeSpec& scheme,
                                    Rng& rng);

/// In-transit message marginals per symbol; distances between rounds that
/// carry different symbols.
AttackReport passive_intercept(const SchemeSpec& scheme, std::span<const int> symbols);

/// Eve CNOTs the message into an n-wire register holding |0̄⟩ in round 1 and
/// in later rounds un-CNOTs, measures s₁ − s_r in the codeword basis and
/// re-CNOTs. KD and KN only.
AttackReport entangle_difference_attack(const SchemeSpec& scheme, std::span<const int> symbols,
                                        bool hadamard_rounds, std::uint64_t rng_seed = 0);

/// Contaminated carrier followed by one Hadamard round (and Eve's optional
/// unitary); detection_probability is the exact stray-check mismatch
/// probability averaged over symbols.
AttackReport contamination_detection(const SchemeSpec& scheme, std::span<const Eigen::VectorXcd> ancillas,
                                     const std::optional<Eigen::MatrixXcd>& eve_unitary = std::nullopt);

/// True when every ξ_q equals ξ_0 to within tolerance (relative to ‖ξ_0‖).
bool ancillas_coincide(std::span<const Eigen::VectorXcd> ancillas, double tolerance = 1e-10);

struct MonteCarloResult {
  int rounds = 0;
  int stray_checks = 0;
  int mismatches = 0;
  double frequency = 0.0;
  double exact = 0.0;
};

/// Runs contamination through a full session with Hadamard rounds.
MonteCarloResult contamination_monte_carlo(const SchemeSpec& scheme, std::vector<Eigen::VectorXcd> ancillas,
                                           int rounds, double stray_fraction, std::uint64_t rng_seed);

/// KN(2,3): B3 holds Σ_{i,j} |i, j+i, j+2i, j⟩|η_j⟩ (default η_j = |j⟩ on
/// one extra wire). Reports pairwise trace distances of ρ_{B3,B3',1,2,3}
/// over s ∈ Z_3 and full-state fidelities as a contrast.
AttackReport insider_b3_attack(std::span<const Eigen::VectorXcd> eta = {});

}  // namespace qcarrier
