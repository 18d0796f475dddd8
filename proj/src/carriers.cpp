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

#include "qcarrier/carriers.hpp"

#include <cmath>

namespace qcarrier {

std::string to_string(Variant v) {
  switch (v) {
    case Variant::key_distribution: return "kd";
    case Variant::two_two: return "two_two";
    case Variant::n_n: return "nn";
    case Variant::k_n: return "kn";
  }
  return "?";
}

std::string to_string(Parity p) { return p == Parity::odd ? "odd" : "even"; }

Variant variant_from_string(std::string_view name) {
  if (name == "kd" || name == "KD" || name == "key_distribution") return Variant::key_distribution;
  if (name == "two_two" || name == "TwoTwo" || name == "22") return Variant::two_two;
  if (name == "nn" || name == "NN" || name == "n_n") return Variant::n_n;
  if (name == "kn" || name == "KN" || name == "k_n") return Variant::k_n;
  throw std::invalid_argument("unknown scheme variant '" + std::string(name) + "'");
}

Parity parity_from_string(std::string_view name) {
  if (name == "odd") return Parity::odd;
  if (name == "even") return Parity::even;
  throw std::invalid_argument("unknown parity '" + std::string(name) + "'");
}

// ---------------------------------------------------------------------------
// SchemeSpec

SchemeSpec::SchemeSpec(Variant variant, int k, int n, int dimension, Parity parity)
    : variant_(variant), k_(k), n_(n), dimension_(dimension), parity_(parity) {
  if (variant_ == Variant::k_n) code_.emplace(k, n);
}

SchemeSpec SchemeSpec::key_distribution() { return {Variant::key_distribution, 1, 1, 2, Parity::odd}; }

SchemeSpec SchemeSpec::two_two(Parity parity) { return {Variant::two_two, 2, 2, 2, parity}; }

SchemeSpec SchemeSpec::n_n(int n, Parity parity) {
  if (n < 2) throw std::invalid_argument("SchemeSpec::n_n: need at least two players");
  return {Variant::n_n, n, n, 2, parity};
}

SchemeSpec SchemeSpec::k_n(int k, int n) { return {Variant::k_n, k, n, n, Parity::odd}; }

SchemeSpec SchemeSpec::with_parity(Parity parity) const {
  SchemeSpec copy = *this;
  if (alternates_parity()) copy.parity_ = parity;
  return copy;
}

std::string player_label(int i) { return "player_" + std::to_string(i); }
std::string message_label(int i) { return "message_" + std::to_string(i); }

RegisterLayout SchemeSpec::carrier_layout() const {
  std::vector<std::string> labels{std::string(kAliceLabel)};
  for (int i = 1; i <= n_; ++i) labels.push_back(player_label(i));
  return RegisterLayout(dimension_, std::move(labels));
}

RegisterLayout SchemeSpec::message_layout() const {
  return RegisterLayout::numbered(dimension_, n_, "message");
}

RegisterLayout SchemeSpec::joint_layout() const { return carrier_layout().concat(message_layout()); }

std::string SchemeSpec::name() const {
  switch (variant_) {
    case Variant::key_distribution: return "KD";
    case Variant::two_two: return "TwoTwo/" + to_string(parity_);
    case Variant::n_n: return "NN(" + std::to_string(n_) + ")/" + to_string(parity_);
    case Variant::k_n: return "KN(" + std::to_string(k_) + "," + std::to_string(n_) + ")";
  }
  return "?";
}

nlohmann::json scheme_to_json(const SchemeSpec& scheme) {
  return {{"variant", to_string(scheme.variant())},
          {"k", scheme.k()},
          {"n", scheme.n()},
          {"parity", to_string(scheme.parity())}};
}

SchemeSpec scheme_from_json(const nlohmann::json& j) {
  const Variant v = variant_from_string(j.at("variant").get<std::string>());
  const Parity parity = parity_from_string(j.value("parity", std::string("odd")));
  switch (v) {
    case Variant::key_distribution: return SchemeSpec::key_distribution();
    case Variant::two_two: return SchemeSpec::two_two(parity);
    case Variant::n_n: return SchemeSpec::n_n(j.at("n").get<int>(), parity);
    case Variant::k_n: {
      const int k = j.at("k").get<int>();
      return SchemeSpec::k_n(k, j.value("n", 2 * k - 1));
    }
  }
  throw std::invalid_argument("scheme_from_json: unreachable");
}

int alice_wire(const RegisterLayout& layout) { return layout.wire(kAliceLabel); }

std::vector<int> player_wires(const RegisterLayout& layout, const SchemeSpec& scheme) {
  std::vector<int> wires;
  for (int i = 1; i <= scheme.n(); ++i) wires.push_back(layout.wire(player_label(i)));
  return wires;
}

std::vector<int> message_wires(const RegisterLayout& layout, const SchemeSpec& scheme) {
  std::vector<int> wires;
  for (int i = 1; i <= scheme.n(); ++i) wires.push_back(layout.wire(message_label(i)));
  return wires;
}

bool has_message_wires(const RegisterLayout& layout) {
  for (const auto& l : layout.labels()) {
    if (l.starts_with("message_")) return true;
  }
  return false;
}

// ---------------------------------------------------------------------------
// Encodings

namespace {

void check_symbol(const SchemeSpec& scheme, int s) {
  if (s < 0 || s >= scheme.dimension()) {
    throw std::out_of_range("symbol " + std::to_string(s) + " outside Z_" + std::to_string(scheme.dimension()));
  }
}

// Encoded symbol on `layout` (n wires).
QuditState encode_on(const SchemeSpec& scheme, Parity parity, int s, const RegisterLayout& layout) {
  check_symbol(scheme, s);
  const int n = scheme.n();
  QuditState out(layout);
  switch (scheme.variant()) {
    case Variant::key_distribution:
      out.set({s}, 1.0);
      break;
    case Variant::two_two:
    case Variant::n_n:
      if (parity == Parity::odd) {
        out.set(Digits(static_cast<std::size_t>(n), s), 1.0);
      } else {
        const double amp = std::pow(2.0, -0.5 * (n - 1));
        Digits bits(static_cast<std::size_t>(n));
        for (unsigned mask = 0; mask < (1u << n); ++mask) {
          int weight = 0;
          for (int b = 0; b < n; ++b) {
            bits[static_cast<std::size_t>(b)] = static_cast<int>((mask >> (n - 1 - b)) & 1u);
            weight += bits[static_cast<std::size_t>(b)];
          }
          if (weight % 2 == s) out.set(bits, amp);
        }
      }
      break;
    case Variant::k_n:
      encode_codeword(*scheme.code(), s).state.for_each_term([&](const Digits& d, Amplitude a) { out.set(d, a); });
      break;
  }
  return out;
}

}  // namespace

CarrierState build_carrier(const SchemeSpec& scheme) {
  const int d = scheme.dimension();
  const RegisterLayout players = RegisterLayout::numbered(d, scheme.n(), "player");
  QuditState state(scheme.carrier_layout());
  const double scale = 1.0 / std::sqrt(static_cast<double>(d));
  for (int q = 0; q < d; ++q) {
    encode_on(scheme, scheme.parity(), q, players).for_each_term([&](const Digits& digits, Amplitude a) {
      Digits joined{q};
      joined.insert(joined.end(), digits.begin(), digits.end());
      state.set(joined, scale * a);
    });
  }
  return {scheme, std::move(state)};
}

QuditState encode_message(const SchemeSpec& scheme, Parity parity, int s) {
  return encode_on(scheme, parity, s, scheme.message_layout());
}

QuditState encode_logical_message(const SchemeSpec& scheme, Parity parity,
                                  std::span<const Amplitude> amplitudes) {
  if (static_cast<int>(amplitudes.size()) != scheme.dimension()) {
    throw std::invalid_argument("encode_logical_message: need one amplitude per symbol");
  }
  QuditState out(scheme.message_layout());
  for (int s = 0; s < scheme.dimension(); ++s) {
    const Amplitude a = amplitudes[static_cast<std::size_t>(s)];
    if (a == Amplitude{}) continue;
    encode_message(scheme, parity, s).for_each_term([&](const Digits& d, Amplitude v) { out.add(d, a * v); });
  }
  out.normalize();
  return out;
}

std::optional<int> decode_message_digits(const SchemeSpec& scheme, Parity parity,
                                         std::span<const int> digits) {
  if (static_cast<int>(digits.size()) != scheme.n()) {
    throw std::invalid_argument("decode_message_digits: need one digit per message wire");
  }
  switch (scheme.variant()) {
    case Variant::key_distribution:
      return digits[0];
    case Variant::two_two:
    case Variant::n_n: {
      if (parity == Parity::even) {
        int weight = 0;
        for (int b : digits) weight += b;
        return weight % 2;
      }
      for (int b : digits) {
        if (b != digits[0]) return std::nullopt;
      }
      return digits[0];
    }
    case Variant::k_n:
      return scheme.code()->decode_branch(digits);
  }
  return std::nullopt;
}

// ---------------------------------------------------------------------------
// Upload / download / Hadamard round

QuditState upload(QuditState joint, const SchemeSpec& scheme, Parity parity) {
  if (joint.dimension() != scheme.dimension()) throw std::invalid_argument("upload: dimension mismatch");
  const int a = alice_wire(joint.layout());
  const auto messages = message_wires(joint.layout(), scheme);
  switch (scheme.variant()) {
    case Variant::key_distribution:
      return apply_cnot(std::move(joint), a, messages[0]);
    case Variant::two_two:
    case Variant::n_n:
      if (parity == Parity::even) return apply_cnot(std::move(joint), a, messages[0]);
      for (int m : messages) joint = apply_cnot(std::move(joint), a, m);
      return joint;
    case Variant::k_n: {
      const auto& e = scheme.code()->special();
      for (std::size_t j = 0; j < messages.size(); ++j) joint = apply_cnot(std::move(joint), a, messages[j], e[j]);
      return joint;
    }
  }
  return joint;
}

QuditState apply_download(QuditState joint, const SchemeSpec& scheme,
                          std::span<const int> acting_players) {
  if (joint.dimension() != scheme.dimension()) throw std::invalid_argument("download: dimension mismatch");
  const auto players = player_wires(joint.layout(), scheme);
  const auto messages = message_wires(joint.layout(), scheme);
  for (int p : acting_players) {
    if (p < 1 || p > scheme.n()) throw std::out_of_range("download: player index " + std::to_string(p) + " out of range");
    const auto i = static_cast<std::size_t>(p - 1);
    joint = apply_inverse_cnot(std::move(joint), players[i], messages[i]);
  }
  return joint;
}

QuditState apply_download(QuditState joint, const SchemeSpec& scheme) {
  std::vector<int> everyone;
  for (int i = 1; i <= scheme.n(); ++i) everyone.push_back(i);
  return apply_download(std::move(joint), scheme, everyone);
}

Downloaded download(const QuditState& joint, const SchemeSpec& scheme, double max_purity_deficit) {
  QuditState cleaned = apply_download(joint, scheme);
  const auto messages = message_wires(cleaned.layout(), scheme);
  auto factors = split_product(cleaned, messages, max_purity_deficit);
  return {CarrierState{scheme, std::move(factors.rest)}, std::move(factors.factor)};
}

QuditState apply_hadamard_round(QuditState state, const SchemeSpec& scheme) {
  if (has_message_wires(state.layout())) {
    throw std::invalid_argument("hadamard_round: message wires are still attached to the carrier");
  }
  // Every legitimate wire uses the unconjugated transform; with this
  // choice F^{⊗(n+1)} fixes the KN carrier exactly.
  state = apply_fourier(std::move(state), alice_wire(state.layout()));
  for (int w : player_wires(state.layout(), scheme)) state = apply_fourier(std::move(state), w);
  return state;
}

CarrierState hadamard_round(const CarrierState& carrier) {
  QuditState state = apply_hadamard_round(carrier.state, carrier.scheme);
  SchemeSpec next = carrier.scheme;
  if (next.alternates_parity()) {
    next = next.with_parity(next.parity() == Parity::odd ? Parity::even : Parity::odd);
  }
  return {next, std::move(state)};
}

}  // namespace qcarrier
