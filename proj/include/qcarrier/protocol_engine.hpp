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
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "json.hpp"
#include "qcarrier/attack_model.hpp"
#include "qcarrier/carriers.hpp"
#include "qcarrier/rng.hpp"

namespace qcarrier {

inline constexpr double kDefaultStrayFraction = 0.25;

/// Player subsets are 1-based player indices.
using PlayerSubset = std::vector<int>;

enum class PartyRole { alice, player, eve };

struct PartyId {
  PartyRole role = PartyRole::player;
  int index = 1;  // 1-based; ignored for alice

  static PartyId alice() { return {PartyRole::alice, 0}; }
  static PartyId player(int i) { return {PartyRole::player, i}; }
  static PartyId eve(int i = 1) { return {PartyRole::eve, i}; }

  std::string label() const;
  bool operator==(const PartyId&) const = default;
};

/// Player indices of the parties; throws std::invalid_argument for
/// non-players or repeated players.
PlayerSubset player_indices(std::span<const PartyId> parties);

struct SessionConfig {
  SchemeSpec scheme = SchemeSpec::key_distribution();
  int rounds = 1;
  std::vector<int> payload;
  double stray_fraction = kDefaultStrayFraction;
  std::uint64_t rng_seed = 0;
  bool hadamard_every_round = true;
  std::optional<AttackModel> adversary;
  /// Subsets that retrieve each round; empty selects players 1..k.
  std::vector<PlayerSubset> retrieval_subsets;
  /// Players who announce stray outcomes; empty selects everyone.
  PlayerSubset announcing_players;

  /// Throws std::invalid_argument on inconsistent settings.
  void validate() const;

  std::vector<PlayerSubset> effective_retrieval_subsets() const;
  PlayerSubset effective_announcers() const;
};

/// Reads a session config from a TOML or JSON document (format detected
/// from content). Keys: scheme, k, n, rounds, payload, stray_fraction,
/// seed, hadamard_every_round, retrieval_subsets, announcing_players,
/// [adversary].
SessionConfig parse_session_config(std::string_view text);
SessionConfig load_session_config(const std::string& path);
nlohmann::json session_config_to_json(const SessionConfig& config);

struct Announcement {
  int player;
  int digit;
};

struct RoundRecord {
  int round = 0;  // 1-based
  Parity parity = Parity::odd;
  bool is_stray = false;
  bool is_payload = false;
  int symbol_sent = 0;
  std::vector<int> measured;                // digits of message_1..message_n
  std::vector<std::optional<int>> retrieved;  // one per retrieval subset
  std::vector<Announcement> announced;      // stray rounds only
  std::optional<bool> detection_flag;       // stray rounds only; true = mismatch
};

struct SessionTranscript {
  SchemeSpec scheme = SchemeSpec::key_distribution();
  std::uint64_t rng_seed = 0;
  std::string rng_name{Rng::kName};
  std::vector<PlayerSubset> retrieval_subsets;
  std::vector<RoundRecord> rounds;
  double final_carrier_fidelity = 0.0;
  std::vector<int> payload_sent;
  std::vector<std::optional<int>> payload_retrieved;  // by the first subset
  nlohmann::json adversary_log;
};

struct DetectionStats {
  int stray_rounds = 0;
  int mismatches = 0;
  double mismatch_rate = 0.0;
  std::vector<int> flagged_rounds;
};

/// Hooks through which an adversary acts on the states of a session.
class SessionAdversary {
 public:
  virtual ~SessionAdversary() = default;
  /// Once, on the freshly built carrier.
  virtual void on_session_start(QuditState& /*carrier*/, const SchemeSpec&, Rng&) {}
  /// After Alice's upload, before the players' download.
  virtual void on_transit(QuditState& /*joint*/, const SchemeSpec&, int /*round*/, Rng&) {}
  /// After the message is removed, before the Hadamard round.
  virtual void on_round_end(QuditState& /*carrier*/, const SchemeSpec&, Rng&) {}
  /// After the legitimate Hadamard round.
  virtual void on_hadamard(QuditState& /*carrier*/, const SchemeSpec&, Rng&) {}
  virtual nlohmann::json log() const { return nlohmann::json::object(); }
};

/// Defined by the adversary module.
std::unique_ptr<SessionAdversary> make_session_adversary(const AttackModel& model,
                                                         const SchemeSpec& scheme);

/// Round pipeline: encode, upload, transit, download, measure, retrieve,
/// announce strays, optional Hadamard round.
SessionTranscript run_session(const SessionConfig& config);
SessionTranscript run_session(const SessionConfig& config, SessionAdversary* adversary);

/// True when the announced digits are consistent with the sent stray symbol.
bool stray_check_passes(const SchemeSpec& scheme, Parity parity, int symbol_sent,
                        std::span<const Announcement> announced);

/// Recomputes every stray round's flag from the public announcements.
DetectionStats detection_check(const SessionTranscript& transcript);

/// Symbol recovered by a subset from measured message digits (1-based
/// players); nullopt on inconsistent shares.
std::optional<int> retrieve_from_digits(const SchemeSpec& scheme, Parity parity,
                                        std::span<const int> message_digits,
                                        const PlayerSubset& subset);

/// Measures the subset's message wires of a downloaded state and decodes.
/// KN needs at least k players (InsufficientSharesError otherwise); NN even
/// rounds need every player.
int authorized_retrieve(const SchemeSpec& scheme, Parity parity, const QuditState& downloaded,
                        const PlayerSubset& subset, std::uint64_t rng_seed);
int authorized_retrieve(const SchemeSpec& scheme, Parity parity, const QuditState& downloaded,
                        std::span<const PartyId> subset, std::uint64_t rng_seed);

/// Throws when the subset may not retrieve alone: InsufficientSharesError
/// below k players for KN, std::invalid_argument for malformed subsets or
/// anything but the full set for TwoTwo/NN.
void check_authorized(const SchemeSpec& scheme, const PlayerSubset& subset);

/// Only the acting players apply their inverse CNOTs.
QuditState partial_download(QuditState joint, const SchemeSpec& scheme,
                            const PlayerSubset& acting_subset);

struct CleaningOutcome {
  int symbol;
  std::vector<int> measured;  // the subset's message digits
  QuditState carrier;         // after the message register is split off
};

/// C_K, measure K's message wires, then C_{N-K}.
CleaningOutcome retrieve_then_clean(const QuditState& uploaded, const SchemeSpec& scheme,
                                    const PlayerSubset& subset, std::uint64_t rng_seed);
/// C_{N-K}, C_K, then measure K's message wires.
CleaningOutcome clean_then_retrieve(const QuditState& uploaded, const SchemeSpec& scheme,
                                    const PlayerSubset& subset, std::uint64_t rng_seed);

/// One JSON object per round, then {"summary": {...}}; newline-terminated.
std::string transcript_to_jsonl(const SessionTranscript& transcript);
std::string transcript_to_csv(const SessionTranscript& transcript);
nlohmann::json transcript_summary(const SessionTranscript& transcript);

}  // namespace qcarrier
