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

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "json.hpp"
#include "qcarrier/modular_codes.hpp"
#include "qcarrier/qudit_state.hpp"

namespace qcarrier {

enum class Variant { key_distribution, two_two, n_n, k_n };
enum class Parity { odd, even };

std::string to_string(Variant v);
std::string to_string(Parity p);
Variant variant_from_string(std::string_view name);
Parity parity_from_string(std::string_view name);

/// Which protocol runs, over which register. Wires carry role labels:
/// "alice", "player_i" and "message_i" for i = 1..n; operations locate
/// them by label, so adversary wires may sit anywhere in a joint state.
class SchemeSpec {
 public:
  static SchemeSpec key_distribution();
  static SchemeSpec two_two(Parity parity = Parity::odd);
  static SchemeSpec n_n(int n, Parity parity = Parity::odd);
  static SchemeSpec k_n(int k, int n);

  Variant variant() const { return variant_; }
  int k() const { return k_; }
  int n() const { return n_; }
  int dimension() const { return dimension_; }
  Parity parity() const { return parity_; }
  const std::optional<CodeSpec>& code() const { return code_; }

  /// TwoTwo and NN alternate odd/even carriers under the Hadamard round.
  bool alternates_parity() const { return variant_ == Variant::two_two || variant_ == Variant::n_n; }

  SchemeSpec with_parity(Parity parity) const;

  RegisterLayout carrier_layout() const;
  RegisterLayout message_layout() const;
  RegisterLayout joint_layout() const;

  std::string name() const;

  bool operator==(const SchemeSpec&) const = default;

 private:
  SchemeSpec(Variant variant, int k, int n, int dimension, Parity parity);

  Variant variant_;
  int k_;
  int n_;
  int dimension_;
  Parity parity_;
  std::optional<CodeSpec> code_;
};

nlohmann::json scheme_to_json(const SchemeSpec& scheme);
SchemeSpec scheme_from_json(const nlohmann::json& j);

std::string player_label(int i);
std::string message_label(int i);
inline constexpr std::string_view kAliceLabel = "alice";

int alice_wire(const RegisterLayout& layout);
/// player_1..player_n wires of the layout, in player order.
std::vector<int> player_wires(const RegisterLayout& layout, const SchemeSpec& scheme);
std::vector<int> message_wires(const RegisterLayout& layout, const SchemeSpec& scheme);
bool has_message_wires(const RegisterLayout& layout);

struct CarrierState {
  SchemeSpec scheme;
  QuditState state;  // alice + players, plus any foreign (eavesdropper) wires
};

/// (1/√d) Σ_q |q⟩_alice |q̄⟩_players using the scheme's encoding (and
/// parity, for TwoTwo/NN).
CarrierState build_carrier(const SchemeSpec& scheme);

/// Encoded symbol on message_1..message_n. KD: |s⟩. TwoTwo/NN odd: |s⟩^⊗n;
/// even: 2^{-(n-1)/2} Σ_{|x| ≡ s mod 2} |x⟩. KN: the codeword |s̄⟩
/// (parity ignored).
QuditState encode_message(const SchemeSpec& scheme, Parity parity, int s);

/// Σ_s amplitudes[s] |s̄⟩ for superposition transport.
QuditState encode_logical_message(const SchemeSpec& scheme, Parity parity,
                                  std::span<const Amplitude> amplitudes);

/// Symbol carried by a computational-basis outcome of all n message wires,
/// or nullopt when the outcome is not a branch of any encoded symbol.
std::optional<int> decode_message_digits(const SchemeSpec& scheme, Parity parity,
                                         std::span<const int> digits);

/// Alice's uploading CNOT string: KD C_{a,1}; TwoTwo/NN odd Π_j C_{a,j},
/// even C_{a,1}; KN Π_j C^{e_j}_{a,j}.
QuditState upload(QuditState joint, const SchemeSpec& scheme, Parity parity);

/// The players' C_B^{-1} = Π_j C^{-1}_{b_j,j}, restricted to the listed
/// players (1-based) when given.
QuditState apply_download(QuditState joint, const SchemeSpec& scheme);
QuditState apply_download(QuditState joint, const SchemeSpec& scheme,
                          std::span<const int> acting_players);

struct Downloaded {
  CarrierState carrier;
  QuditState message;
};

/// C_B^{-1}, then splits the message off the carrier. Throws
/// EntangledCutError when the message marginal's purity deficit exceeds
/// max_purity_deficit.
Downloaded download(const QuditState& joint, const SchemeSpec& scheme,
                    double max_purity_deficit = 1e-10);

/// Fourier transform by alice and every player. Flips the parity of
/// alternating schemes. Throws when message wires are still attached.
CarrierState hadamard_round(const CarrierState& carrier);
QuditState apply_hadamard_round(QuditState state, const SchemeSpec& scheme);

}  // namespace qcarrier
