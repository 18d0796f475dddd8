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

#include "qcarrier/protocol_engine.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <set>
#include <sstream>

#include "qcarrier/density_matrix.hpp"
#include "toml.hpp"

namespace qcarrier {

std::string PartyId::label() const {
  switch (role) {
    case PartyRole::alice: return std::string(kAliceLabel);
    case PartyRole::player: return player_label(index);
    case PartyRole::eve: return "eve_" + std::to_string(index);
  }
  return "?";
}

PlayerSubset player_indices(std::span<const PartyId> parties) {
  PlayerSubset out;
  for (const auto& p : parties) {
    if (p.role != PartyRole::player) throw std::invalid_argument("only players hold shares: " + p.label());
    out.push_back(p.index);
  }
  std::set<int> seen(out.begin(), out.end());
  if (seen.size() != out.size()) throw std::invalid_argument("repeated player in subset");
  return out;
}

namespace {

PlayerSubset all_players(const SchemeSpec& scheme) {
  PlayerSubset v(static_cast<std::size_t>(scheme.n()));
  std::iota(v.begin(), v.end(), 1);
  return v;
}

void check_subset_shape(const SchemeSpec& scheme, const PlayerSubset& subset) {
  if (subset.empty()) throw std::invalid_argument("empty player subset");
  std::set<int> seen;
  for (int p : subset) {
    if (p < 1 || p > scheme.n()) {
      throw std::invalid_argument("player " + std::to_string(p) + " outside 1.." + std::to_string(scheme.n()));
    }
    if (!seen.insert(p).second) throw std::invalid_argument("player " + std::to_string(p) + " repeated in subset");
  }
}

PlayerSubset complement_of(const SchemeSpec& scheme, const PlayerSubset& subset) {
  PlayerSubset out;
  for (int p = 1; p <= scheme.n(); ++p) {
    if (std::find(subset.begin(), subset.end(), p) == subset.end()) out.push_back(p);
  }
  return out;
}

std::vector<int> subset_message_wires(const RegisterLayout& layout, const PlayerSubset& subset) {
  std::vector<int> wires;
  for (int p : subset) wires.push_back(layout.wire(message_label(p)));
  return wires;
}

Parity flipped(Parity p) { return p == Parity::odd ? Parity::even : Parity::odd; }

}  // namespace

void check_authorized(const SchemeSpec& scheme, const PlayerSubset& subset) {
  check_subset_shape(scheme, subset);
  const int size = static_cast<int>(subset.size());
  if (scheme.variant() == Variant::k_n) {
    if (size < scheme.k()) {
      throw InsufficientSharesError("insufficient shares: " + std::to_string(size) + " of k = " +
                                    std::to_string(scheme.k()));
    }
  } else if (size != scheme.n()) {
    throw InsufficientSharesError("insufficient shares: " + scheme.name() + " needs every player");
  }
}

// ---------------------------------------------------------------------------
// Config

void SessionConfig::validate() const {
  if (rounds < 1) throw std::invalid_argument("rounds must be positive");
  if (!(stray_fraction >= 0.0 && stray_fraction < 1.0)) throw std::invalid_argument("stray_fraction must lie in [0, 1)");
  if (scheme.alternates_parity() && !hadamard_every_round) {
    throw std::invalid_argument(scheme.name() + " alternates parity every round; hadamard_every_round must be true");
  }
  for (int s : payload) {
    if (s < 0 || s >= scheme.dimension()) throw std::invalid_argument("payload symbol " + std::to_string(s) + " outside Z_d");
  }
  const int budget = scheme.alternates_parity()
                         ? rounds / 2
                         : rounds - static_cast<int>(std::floor(stray_fraction * rounds));
  if (static_cast<int>(payload.size()) > budget) {
    throw std::invalid_argument("payload of " + std::to_string(payload.size()) + " symbols exceeds the budget of " +
                                std::to_string(budget) + " non-stray rounds");
  }
  for (const auto& subset : effective_retrieval_subsets()) check_authorized(scheme, subset);
  const auto announcers = effective_announcers();
  check_subset_shape(scheme, announcers);
  if (scheme.variant() == Variant::k_n && static_cast<int>(announcers.size()) < scheme.k()) {
    throw std::invalid_argument("at least k players must announce stray outcomes");
  }
  if (scheme.variant() == Variant::n_n || scheme.variant() == Variant::two_two) {
    if (static_cast<int>(announcers.size()) != scheme.n()) {
      throw std::invalid_argument(scheme.name() + " stray checks need every player's announcement");
    }
  }
  if (adversary) {
    if (adversary->kind == AttackKind::insider_b3) throw std::invalid_argument("insider_b3 is a standalone experiment, not a session adversary");
    if (adversary->kind == AttackKind::entangle_difference && scheme.alternates_parity()) {
      throw std::invalid_argument("entangle_difference targets KD and KN sessions");
    }
    if (adversary->kind == AttackKind::contaminate_carrier) adversary->ancilla_wires(scheme.dimension());
  }
}

std::vector<PlayerSubset> SessionConfig::effective_retrieval_subsets() const {
  if (!retrieval_subsets.empty()) return retrieval_subsets;
  if (scheme.variant() == Variant::k_n) {
    PlayerSubset first(static_cast<std::size_t>(scheme.k()));
    std::iota(first.begin(), first.end(), 1);
    return {first};
  }
  return {all_players(scheme)};
}

PlayerSubset SessionConfig::effective_announcers() const {
  return announcing_players.empty() ? all_players(scheme) : announcing_players;
}

namespace {

const std::set<std::string> kConfigKeys{"scheme", "k", "n", "rounds", "payload", "stray_fraction", "seed",
                                        "hadamard_every_round", "retrieval_subsets", "announcing_players",
                                        "adversary"};

SchemeSpec scheme_from_config(const nlohmann::json& j) {
  const std::string name = j.at("scheme").get<std::string>();
  switch (variant_from_string(name)) {
    case Variant::key_distribution: return SchemeSpec::key_distribution();
    case Variant::two_two: return SchemeSpec::two_two();
    case Variant::n_n: return SchemeSpec::n_n(j.at("n").get<int>());
    case Variant::k_n: {
      const int k = j.at("k").get<int>();
      return SchemeSpec::k_n(k, j.value("n", 2 * k - 1));
    }
  }
  throw std::invalid_argument("unreachable scheme");
}

SessionConfig config_from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw std::invalid_argument("config must be a table");
  for (const auto& [key, value] : j.items()) {
    if (!kConfigKeys.contains(key)) throw std::invalid_argument("unknown config key '" + key + "'");
  }
  SessionConfig c;
  c.scheme = scheme_from_config(j);
  c.rounds = j.value("rounds", 1);
  c.payload = j.value("payload", std::vector<int>{});
  c.stray_fraction = j.value("stray_fraction", kDefaultStrayFraction);
  c.rng_seed = j.value("seed", std::uint64_t{0});
  c.hadamard_every_round = j.value("hadamard_every_round", true);
  c.retrieval_subsets = j.value("retrieval_subsets", std::vector<PlayerSubset>{});
  c.announcing_players = j.value("announcing_players", PlayerSubset{});
  if (j.contains("adversary")) c.adversary = attack_model_from_json(j.at("adversary"), c.scheme.dimension());
  c.validate();
  return c;
}

}  // namespace

SessionConfig parse_session_config(std::string_view text) {
  const auto first = text.find_first_not_of(" \t\r\n");
  nlohmann::json j;
  try {
    if (first != std::string_view::npos && text[first] == '{') {
      j = nlohmann::json::parse(text);
    } else {
      const toml::table table = toml::parse(text);
      std::ostringstream out;
      out << toml::json_formatter{table};
      j = nlohmann::json::parse(out.str());
    }
  } catch (const toml::parse_error& e) {
    throw std::invalid_argument(std::string("config parse error: ") + std::string(e.description()));
  } catch (const nlohmann::json::exception& e) {
    throw std::invalid_argument(std::string("config parse error: ") + e.what());
  }
  try {
    return config_from_json(j);
  } catch (const nlohmann::json::exception& e) {
    throw std::invalid_argument(std::string("config error: ") + e.what());
  }
}

SessionConfig load_session_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot read config '" + path + "'");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse_session_config(buffer.str());
}

nlohmann::json session_config_to_json(const SessionConfig& c) {
  nlohmann::json j{{"scheme", to_string(c.scheme.variant())},
                   {"k", c.scheme.k()},
                   {"n", c.scheme.n()},
                   {"rounds", c.rounds},
                   {"payload", c.payload},
                   {"stray_fraction", c.stray_fraction},
                   {"seed", c.rng_seed},
                   {"hadamard_every_round", c.hadamard_every_round},
                   {"retrieval_subsets", c.effective_retrieval_subsets()},
                   {"announcing_players", c.effective_announcers()}};
  if (c.adversary) j["adversary"] = attack_model_to_json(*c.adversary);
  return j;
}

// ---------------------------------------------------------------------------
// Retrieval and stray checks

std::optional<int> retrieve_from_digits(const SchemeSpec& scheme, Parity parity,
                                        std::span<const int> message_digits, const PlayerSubset& subset) {
  check_subset_shape(scheme, subset);
  if (static_cast<int>(message_digits.size()) != scheme.n()) {
    throw std::invalid_argument("retrieve_from_digits: need one digit per message wire");
  }
  auto digit = [&](int p) { return message_digits[static_cast<std::size_t>(p - 1)]; };
  switch (scheme.variant()) {
    case Variant::key_distribution:
      return digit(subset.front());
    case Variant::two_two:
    case Variant::n_n: {
      if (parity == Parity::even) {
        if (static_cast<int>(subset.size()) != scheme.n()) throw InsufficientSharesError("parity needs every player");
        int weight = 0;
        for (int p : subset) weight += digit(p);
        return weight % 2;
      }
      const int first = digit(subset.front());
      for (int p : subset) {
        if (digit(p) != first) return std::nullopt;
      }
      return first;
    }
    case Variant::k_n: {
      std::vector<Share> shares;
      for (int p : subset) shares.push_back({p - 1, digit(p)});
      try {
        return retrieve_classical(*scheme.code(), shares);
      } catch (const InconsistentSharesError&) {
        return std::nullopt;
      }
    }
  }
  return std::nullopt;
}

int authorized_retrieve(const SchemeSpec& scheme, Parity parity, const QuditState& downloaded,
                        const PlayerSubset& subset, std::uint64_t rng_seed) {
  check_authorized(scheme, subset);
  const auto wires = subset_message_wires(downloaded.layout(), subset);
  const auto result = measure_computational(downloaded, wires, rng_seed);
  std::vector<int> digits(static_cast<std::size_t>(scheme.n()), 0);
  for (std::size_t i = 0; i < subset.size(); ++i) digits[static_cast<std::size_t>(subset[i] - 1)] = result.outcome[i];
  const auto symbol = retrieve_from_digits(scheme, parity, digits, subset);
  if (!symbol) throw InconsistentSharesError("measured shares do not decode to a symbol");
  return *symbol;
}

int authorized_retrieve(const SchemeSpec& scheme, Parity parity, const QuditState& downloaded,
                        std::span<const PartyId> subset, std::uint64_t rng_seed) {
  return authorized_retrieve(scheme, parity, downloaded, player_indices(subset), rng_seed);
}

bool stray_check_passes(const SchemeSpec& scheme, Parity parity, int symbol_sent,
                        std::span<const Announcement> announced) {
  if (announced.empty()) throw std::invalid_argument("stray check without announcements");
  std::vector<int> digits(static_cast<std::size_t>(scheme.n()), 0);
  PlayerSubset subset;
  for (const auto& a : announced) {
    subset.push_back(a.player);
    if (a.player >= 1 && a.player <= scheme.n()) digits[static_cast<std::size_t>(a.player - 1)] = a.digit;
  }
  const auto symbol = retrieve_from_digits(scheme, parity, digits, subset);
  return symbol && *symbol == symbol_sent;
}

DetectionStats detection_check(const SessionTranscript& transcript) {
  DetectionStats stats;
  for (const auto& r : transcript.rounds) {
    if (!r.is_stray) continue;
    ++stats.stray_rounds;
    const SchemeSpec scheme = transcript.scheme.with_parity(r.parity);
    if (!stray_check_passes(scheme, r.parity, r.symbol_sent, r.announced)) {
      ++stats.mismatches;
      stats.flagged_rounds.push_back(r.round);
    }
  }
  stats.mismatch_rate = stats.stray_rounds > 0 ? static_cast<double>(stats.mismatches) / stats.stray_rounds : 0.0;
  return stats;
}

// ---------------------------------------------------------------------------
// Partial download and the cleaning identity

QuditState partial_download(QuditState joint, const SchemeSpec& scheme, const PlayerSubset& acting_subset) {
  check_subset_shape(scheme, acting_subset);
  return apply_download(std::move(joint), scheme, acting_subset);
}

namespace {

CleaningOutcome finish_cleaning(const MeasurementResult& measured, const SchemeSpec& scheme,
                                const PlayerSubset& subset, QuditState cleaned) {
  std::vector<int> digits(static_cast<std::size_t>(scheme.n()), 0);
  for (std::size_t i = 0; i < subset.size(); ++i) digits[static_cast<std::size_t>(subset[i] - 1)] = measured.outcome[i];
  const auto symbol = retrieve_from_digits(scheme, Parity::odd, digits, subset);
  if (!symbol) throw InconsistentSharesError("measured shares do not decode to a symbol");
  auto factors = split_product(cleaned, message_wires(cleaned.layout(), scheme));
  return {*symbol, measured.outcome, std::move(factors.rest)};
}

}  // namespace

CleaningOutcome retrieve_then_clean(const QuditState& uploaded, const SchemeSpec& scheme,
                                    const PlayerSubset& subset, std::uint64_t rng_seed) {
  check_authorized(scheme, subset);
  QuditState joint = partial_download(uploaded, scheme, subset);
  const auto measured = measure_computational(joint, subset_message_wires(joint.layout(), subset), rng_seed);
  const auto rest = complement_of(scheme, subset);
  QuditState cleaned = rest.empty() ? measured.post_state : partial_download(measured.post_state, scheme, rest);
  return finish_cleaning(measured, scheme, subset, std::move(cleaned));
}

CleaningOutcome clean_then_retrieve(const QuditState& uploaded, const SchemeSpec& scheme,
                                    const PlayerSubset& subset, std::uint64_t rng_seed) {
  check_authorized(scheme, subset);
  const auto rest = complement_of(scheme, subset);
  QuditState joint = rest.empty() ? uploaded : partial_download(uploaded, scheme, rest);
  joint = partial_download(std::move(joint), scheme, subset);
  const auto measured = measure_computational(joint, subset_message_wires(joint.layout(), subset), rng_seed);
  return finish_cleaning(measured, scheme, subset, measured.post_state);
}

// ---------------------------------------------------------------------------
// Sessions

namespace {

// Which rounds are stray. Alternating schemes use every odd-parity round;
// the others draw exactly floor(fraction·R) rounds by a seeded shuffle.
std::vector<bool> choose_stray_rounds(const SessionConfig& config, std::uint64_t seed) {
  std::vector<bool> stray(static_cast<std::size_t>(config.rounds), false);
  if (config.scheme.alternates_parity()) {
    for (std::size_t r = 0; r < stray.size(); r += 2) stray[r] = true;
    return stray;
  }
  const auto count = static_cast<std::size_t>(std::floor(config.stray_fraction * config.rounds));
  std::vector<std::size_t> order(stray.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  Rng rng(seed);
  for (std::size_t i = 0; i < count; ++i) {
    const std::size_t j = i + static_cast<std::size_t>(rng.below(order.size() - i));
    std::swap(order[i], order[j]);
    stray[order[i]] = true;
  }
  return stray;
}

// sqrt(⟨φ|ρ|φ⟩) with ρ the marginal of the carrier wires.
double carrier_fidelity(const QuditState& state, const SchemeSpec& scheme) {
  const CarrierState clean = build_carrier(scheme);
  std::vector<int> wires{alice_wire(state.layout())};
  for (int w : player_wires(state.layout(), scheme)) wires.push_back(w);
  if (static_cast<int>(wires.size()) == state.wire_count()) {
    return fidelity(permute_wires(state, wires), clean.state);
  }
  const DensityMatrix rho = partial_trace(state, wires);
  const auto terms = clean.state.terms();
  Amplitude total{};
  for (const auto& [row, a] : terms) {
    for (const auto& [col, b] : terms) total += std::conj(a) * rho.element(row, col) * b;
  }
  return std::sqrt(std::clamp(total.real(), 0.0, 1.0));
}

}  // namespace

SessionTranscript run_session(const SessionConfig& config) {
  std::unique_ptr<SessionAdversary> adversary;
  if (config.adversary) adversary = make_session_adversary(*config.adversary, config.scheme);
  return run_session(config, adversary.get());
}

SessionTranscript run_session(const SessionConfig& config, SessionAdversary* adversary) {
  config.validate();
  Rng master(config.rng_seed);
  const std::uint64_t selection_seed = master.split();
  Rng symbols(master.split());
  Rng measurement(master.split());
  Rng eve(master.split());

  const auto stray = choose_stray_rounds(config, selection_seed);
  const auto subsets = config.effective_retrieval_subsets();
  const auto announcers = config.effective_announcers();

  SessionTranscript t;
  t.scheme = config.scheme;
  t.rng_seed = config.rng_seed;
  t.retrieval_subsets = subsets;

  SchemeSpec scheme = config.scheme.with_parity(Parity::odd);
  QuditState carrier = build_carrier(scheme).state;
  if (adversary) adversary->on_session_start(carrier, scheme, eve);

  std::size_t next_payload = 0;
  for (int r = 1; r <= config.rounds; ++r) {
    RoundRecord rec;
    rec.round = r;
    rec.parity = scheme.parity();
    rec.is_stray = stray[static_cast<std::size_t>(r - 1)];
    if (!rec.is_stray && next_payload < config.payload.size()) {
      rec.is_payload = true;
      rec.symbol_sent = config.payload[next_payload++];
    } else {
      rec.symbol_sent = static_cast<int>(symbols.below(static_cast<std::uint64_t>(scheme.dimension())));
    }

    QuditState joint = tensor(carrier, encode_message(scheme, rec.parity, rec.symbol_sent));
    joint = upload(std::move(joint), scheme, rec.parity);
    if (adversary) adversary->on_transit(joint, scheme, r, eve);
    joint = apply_download(std::move(joint), scheme);

    const auto msg = message_wires(joint.layout(), scheme);
    const auto measured = measure_computational(joint, msg, measurement);
    rec.measured = measured.outcome;
    for (const auto& subset : subsets) rec.retrieved.push_back(retrieve_from_digits(scheme, rec.parity, rec.measured, subset));
    if (rec.is_payload) {
      t.payload_sent.push_back(rec.symbol_sent);
      t.payload_retrieved.push_back(rec.retrieved.front());
    }
    if (rec.is_stray) {
      for (int p : announcers) rec.announced.push_back({p, rec.measured[static_cast<std::size_t>(p - 1)]});
      rec.detection_flag = !stray_check_passes(scheme, rec.parity, rec.symbol_sent, rec.announced);
    }

    carrier = drop_definite_wires(measured.post_state, msg);
    if (adversary) adversary->on_round_end(carrier, scheme, eve);
    if (config.hadamard_every_round) {
      carrier = apply_hadamard_round(std::move(carrier), scheme);
      if (scheme.alternates_parity()) scheme = scheme.with_parity(flipped(scheme.parity()));
      if (adversary) adversary->on_hadamard(carrier, scheme, eve);
    }
    t.rounds.push_back(std::move(rec));
  }
  t.final_carrier_fidelity = carrier_fidelity(carrier, scheme);
  if (adversary) t.adversary_log = adversary->log();
  return t;
}

// ---------------------------------------------------------------------------
// Serialization

namespace {

nlohmann::json optional_to_json(const std::optional<int>& v) { return v ? nlohmann::json(*v) : nlohmann::json(nullptr); }

nlohmann::json round_to_json(const RoundRecord& r) {
  nlohmann::json retrieved = nlohmann::json::array();
  for (const auto& v : r.retrieved) retrieved.push_back(optional_to_json(v));
  nlohmann::json j{{"round", r.round},           {"parity", to_string(r.parity)}, {"stray", r.is_stray},
                   {"payload", r.is_payload},    {"symbol", r.symbol_sent},       {"measured", r.measured},
                   {"retrieved", retrieved}};
  if (r.is_stray) {
    nlohmann::json ann = nlohmann::json::array();
    for (const auto& a : r.announced) ann.push_back({{"player", a.player}, {"digit", a.digit}});
    j["announced"] = ann;
    j["mismatch"] = r.detection_flag.value_or(false);
  }
  return j;
}

}  // namespace

nlohmann::json transcript_summary(const SessionTranscript& t) {
  const DetectionStats stats = detection_check(t);
  nlohmann::json retrieved = nlohmann::json::array();
  bool recovered = true;
  for (std::size_t i = 0; i < t.payload_retrieved.size(); ++i) {
    retrieved.push_back(optional_to_json(t.payload_retrieved[i]));
    recovered = recovered && t.payload_retrieved[i] == t.payload_sent[i];
  }
  return {{"scheme", scheme_to_json(t.scheme)},
          {"rng", t.rng_name},
          {"seed", t.rng_seed},
          {"rounds", t.rounds.size()},
          {"retrieval_subsets", t.retrieval_subsets},
          {"stray_rounds", stats.stray_rounds},
          {"mismatches", stats.mismatches},
          {"mismatch_rate", stats.mismatch_rate},
          {"flagged_rounds", stats.flagged_rounds},
          {"payload_sent", t.payload_sent},
          {"payload_retrieved", retrieved},
          {"payload_recovered", recovered},
          {"final_carrier_fidelity", t.final_carrier_fidelity},
          {"adversary", t.adversary_log.is_null() ? nlohmann::json::object() : t.adversary_log}};
}

std::string transcript_to_jsonl(const SessionTranscript& t) {
  std::string out;
  for (const auto& r : t.rounds) out += round_to_json(r).dump() + "\n";
  out += nlohmann::json{{"summary", transcript_summary(t)}}.dump() + "\n";
  return out;
}

std::string transcript_to_csv(const SessionTranscript& t) {
  auto join = [](const auto& values, char sep, auto&& fmt) {
    std::string s;
    for (std::size_t i = 0; i < values.size(); ++i) {
      if (i) s += sep;
      s += fmt(values[i]);
    }
    return s;
  };
  std::string out = "round,parity,stray,payload,symbol,measured,retrieved,announced,mismatch\n";
  for (const auto& r : t.rounds) {
    out += std::to_string(r.round) + "," + to_string(r.parity) + "," + (r.is_stray ? "1" : "0") + "," +
           (r.is_payload ? "1" : "0") + "," + std::to_string(r.symbol_sent) + ",";
    out += join(r.measured, ' ', [](int v) { return std::to_string(v); }) + ",";
    out += join(r.retrieved, ' ', [](const std::optional<int>& v) { return v ? std::to_string(*v) : std::string("-"); }) + ",";
    out += join(r.announced, ' ', [](const Announcement& a) { return std::to_string(a.player) + ":" + std::to_string(a.digit); }) + ",";
    out += r.detection_flag ? (*r.detection_flag ? "1" : "0") : "";
    out += "\n";
  }
  return out;
}

}  // namespace qcarrier
