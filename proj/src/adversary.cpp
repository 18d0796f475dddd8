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

#include "qcarrier/adversary.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "qcarrier/density_matrix.hpp"

namespace qcarrier {

double AttackReport::max_distance() const {
  double m = 0.0;
  for (double v : density_distances) m = std::max(m, v);
  return m;
}

nlohmann::json report_to_json(const AttackReport& r) {
  return {{"kind", to_string(r.kind)},
          {"differences", r.recovered_differences},
          {"distances", r.density_distances},
          {"detection_probability", r.detection_probability},
          {"entanglement_measures", r.entanglement_measures},
          {"metrics", r.metrics},
          {"round_mismatch_probabilities", r.round_mismatch_probabilities},
          {"notes", r.notes}};
}

namespace {

Digits index_digits(Eigen::Index index, int wires, int d) {
  Digits out(static_cast<std::size_t>(wires), 0);
  for (int w = wires - 1; w >= 0; --w) {
    out[static_cast<std::size_t>(w)] = static_cast<int>(index % d);
    index /= d;
  }
  return out;
}

std::vector<int> prefixed_wires(const RegisterLayout& layout, std::string_view prefix) {
  std::vector<int> wires;
  const std::string head = std::string(prefix) + "_";
  for (int w = 0; w < layout.wire_count(); ++w) {
    if (layout.label(w).starts_with(head)) wires.push_back(w);
  }
  return wires;
}

// Σ_t amp_t |t⟩ ⊗ |v_{t[key]}⟩ on new wires prefix_1..prefix_m.
QuditState attach_conditioned(const QuditState& state, int key_wire, std::span<const Eigen::VectorXcd> vectors,
                              std::string_view prefix) {
  const int d = state.dimension();
  std::vector<Eigen::VectorXcd> copy(vectors.begin(), vectors.end());
  const int m = AttackModel::contamination(copy).ancilla_wires(d);
  QuditState out(state.layout().concat(RegisterLayout::numbered(d, m, prefix)));
  state.for_each_term([&](const Digits& digits, Amplitude amp) {
    const auto& v = vectors[static_cast<std::size_t>(digits[static_cast<std::size_t>(key_wire)])];
    for (Eigen::Index i = 0; i < v.size(); ++i) {
      if (v[i] == Amplitude{}) continue;
      Digits joined = digits;
      const Digits tail = index_digits(i, m, d);
      joined.insert(joined.end(), tail.begin(), tail.end());
      out.add(joined, amp * v[i]);
    }
  });
  if (out.squared_norm() == 0.0) throw std::invalid_argument("contaminated state vanishes");
  out.normalize();
  return out;
}

void require_difference_scheme(const SchemeSpec& scheme) {
  if (scheme.alternates_parity()) throw std::invalid_argument("the difference attack targets KD and KN carriers");
}

QuditState fresh_eve_register(const SchemeSpec& scheme) {
  std::vector<std::string> labels;
  for (int i = 1; i <= scheme.n(); ++i) labels.push_back(std::string(kEvePrefix) + "_" + std::to_string(i));
  return encode_message(scheme, Parity::odd, 0).relabeled(std::move(labels));
}

// One transit step of the difference attack; returns the measured
// difference (nullopt in round 1 or on the complement outcome).
std::optional<int> difference_step(QuditState& joint, const SchemeSpec& scheme, bool first_round, Rng& rng) {
  const auto msg = message_wires(joint.layout(), scheme);
  const auto eve = prefixed_wires(joint.layout(), kEvePrefix);
  std::optional<int> x;
  if (!first_round) {
    for (std::size_t j = 0; j < msg.size(); ++j) joint = apply_inverse_cnot(std::move(joint), msg[j], eve[j]);
    x = measure_codeword(joint, eve, scheme, rng);
  }
  for (std::size_t j = 0; j < msg.size(); ++j) joint = apply_cnot(std::move(joint), msg[j], eve[j]);
  return x;
}

DensityMatrix code_mixture(const SchemeSpec& scheme, Parity parity) {
  std::vector<QuditState> states;
  std::vector<double> weights;
  for (int q = 0; q < scheme.dimension(); ++q) {
    states.push_back(encode_message(scheme, parity, q));
    weights.push_back(1.0 / scheme.dimension());
  }
  return mixture(states, weights);
}

}  // namespace

// ---------------------------------------------------------------------------
// State-level helpers

QuditState contaminate(const QuditState& carrier, std::span<const Eigen::VectorXcd> ancillas) {
  return attach_conditioned(carrier, alice_wire(carrier.layout()), ancillas, kEvePrefix);
}

QuditState apply_register_operator(const QuditState& state, std::span<const int> wires, const Eigen::MatrixXcd& op) {
  const int d = state.dimension();
  const int m = static_cast<int>(wires.size());
  Eigen::Index size = 1;
  for (int i = 0; i < m; ++i) size *= d;
  if (op.rows() != size || op.cols() != size) throw std::invalid_argument("operator does not match the register");
  std::map<Digits, Eigen::VectorXcd> groups;
  state.for_each_term([&](const Digits& digits, Amplitude amp) {
    Digits rest = digits;
    Eigen::Index index = 0;
    for (int w : wires) {
      index = index * d + digits[static_cast<std::size_t>(w)];
      rest[static_cast<std::size_t>(w)] = 0;
    }
    auto [it, inserted] = groups.try_emplace(rest, Eigen::VectorXcd::Zero(size));
    it->second[index] += amp;
  });
  QuditState out(state.layout(), state.backend());
  for (const auto& [rest, v] : groups) {
    const Eigen::VectorXcd w = op * v;
    for (Eigen::Index i = 0; i < size; ++i) {
      if (w[i] == Amplitude{}) continue;
      Digits digits = rest;
      const Digits reg = index_digits(i, m, d);
      for (int k = 0; k < m; ++k) digits[static_cast<std::size_t>(wires[static_cast<std::size_t>(k)])] = reg[static_cast<std::size_t>(k)];
      out.add(digits, w[i]);
    }
  }
  out.prune();
  return out;
}

std::optional<int> measure_codeword(QuditState& state, std::span<const int> wires, const SchemeSpec& scheme, Rng& rng) {
  if (static_cast<int>(wires.size()) != scheme.n()) throw std::invalid_argument("measure_codeword: need n wires");
  const int d = scheme.dimension();
  // Group amplitudes by the digits outside the register.
  std::map<Digits, std::map<Digits, Amplitude>> groups;
  state.for_each_term([&](const Digits& digits, Amplitude amp) {
    Digits rest = digits;
    Digits reg;
    for (int w : wires) {
      reg.push_back(digits[static_cast<std::size_t>(w)]);
      rest[static_cast<std::size_t>(w)] = 0;
    }
    groups[rest][reg] += amp;
  });
  std::vector<std::vector<std::pair<Digits, Amplitude>>> code;
  for (int x = 0; x < d; ++x) code.push_back(encode_message(scheme, Parity::odd, x).terms());

  const double total = state.squared_norm();
  std::vector<std::map<Digits, Amplitude>> projections(static_cast<std::size_t>(d));
  std::vector<double> probs(static_cast<std::size_t>(d), 0.0);
  for (int x = 0; x < d; ++x) {
    for (const auto& [rest, reg] : groups) {
      Amplitude a{};
      for (const auto& [cw, c] : code[static_cast<std::size_t>(x)]) {
        const auto it = reg.find(cw);
        if (it != reg.end()) a += std::conj(c) * it->second;
      }
      if (std::norm(a) == 0.0) continue;
      projections[static_cast<std::size_t>(x)][rest] = a;
      probs[static_cast<std::size_t>(x)] += std::norm(a) / total;
    }
  }
  const double u = rng.uniform();
  double acc = 0.0;
  std::optional<int> outcome;
  for (int x = 0; x < d && !outcome; ++x) {
    acc += probs[static_cast<std::size_t>(x)];
    if (u < acc) outcome = x;
  }

  auto write = [&](QuditState& out, int x, Amplitude sign) {
    for (const auto& [rest, a] : projections[static_cast<std::size_t>(x)]) {
      for (const auto& [cw, c] : code[static_cast<std::size_t>(x)]) {
        Digits digits = rest;
        for (std::size_t k = 0; k < wires.size(); ++k) digits[static_cast<std::size_t>(wires[k])] = cw[k];
        out.add(digits, sign * a * c);
      }
    }
  };
  if (outcome) {
    QuditState post(state.layout(), state.backend());
    write(post, *outcome, 1.0);
    post.normalize();
    state = std::move(post);
  } else {
    QuditState post = state;
    for (int x = 0; x < d; ++x) write(post, x, -1.0);
    post.prune(1e-12);
    post.normalize();
    state = std::move(post);
  }
  return outcome;
}

double stray_mismatch_probability(const QuditState& carrier, const SchemeSpec& scheme, Parity parity, int symbol) {
  QuditState joint = upload(tensor(carrier, encode_message(scheme, parity, symbol)), scheme, parity);
  joint = apply_download(std::move(joint), scheme);
  double p = 0.0;
  for (const auto& [digits, prob] : outcome_distribution(joint, message_wires(joint.layout(), scheme))) {
    const auto decoded = decode_message_digits(scheme, parity, digits);
    if (!decoded || *decoded != symbol) p += prob;
  }
  return std::clamp(p, 0.0, 1.0);
}

double mean_stray_mismatch_probability(const QuditState& carrier, const SchemeSpec& scheme, Parity parity) {
  double total = 0.0;
  for (int s = 0; s < scheme.dimension(); ++s) total += stray_mismatch_probability(carrier, scheme, parity, s);
  return total / scheme.dimension();
}

bool ancillas_coincide(std::span<const Eigen::VectorXcd> ancillas, double tolerance) {
  if (ancillas.empty()) return true;
  const double scale = std::max(ancillas.front().norm(), 1.0);
  for (const auto& v : ancillas) {
    if (v.size() != ancillas.front().size() || (v - ancillas.front()).norm() > tolerance * scale) return false;
  }
  return true;
}

// ---------------------------------------------------------------------------
// Experiments

AttackReport passive_intercept(const SchemeSpec& scheme, std::span<const int> symbols) {
  AttackReport report;
  report.kind = AttackKind::passive_intercept;
  const Parity parity = scheme.parity();
  const QuditState carrier = build_carrier(scheme).state;
  std::vector<DensityMatrix> marginals;
  for (int s : symbols) {
    const QuditState joint = upload(tensor(carrier, encode_message(scheme, parity, s)), scheme, parity);
    marginals.push_back(partial_trace(joint, message_wires(joint.layout(), scheme)));
  }
  for (std::size_t a = 0; a < symbols.size(); ++a) {
    for (std::size_t b = a + 1; b < symbols.size(); ++b) {
      if (symbols[a] != symbols[b]) report.density_distances.push_back(trace_distance(marginals[a], marginals[b]));
    }
  }
  double to_mixture = 0.0;
  if (!marginals.empty()) {
    const DensityMatrix reference = code_mixture(scheme, parity);
    for (const auto& rho : marginals) to_mixture = std::max(to_mixture, trace_distance(rho, reference));
  }
  report.metrics["max_distance_to_code_mixture"] = to_mixture;
  report.notes = "in-transit message marginal of " + scheme.name();
  return report;
}

AttackReport entangle_difference_attack(const SchemeSpec& scheme, std::span<const int> symbols, bool hadamard_rounds,
                                        std::uint64_t rng_seed) {
  require_difference_scheme(scheme);
  AttackReport report;
  report.kind = AttackKind::entangle_difference;
  Rng rng(rng_seed);
  QuditState state = tensor(build_carrier(scheme).state, fresh_eve_register(scheme));
  int correct = 0;
  for (std::size_t r = 0; r < symbols.size(); ++r) {
    const int s = symbols[r];
    report.round_mismatch_probabilities.push_back(mean_stray_mismatch_probability(state, scheme, Parity::odd));
    QuditState joint = upload(tensor(state, encode_message(scheme, Parity::odd, s)), scheme, Parity::odd);
    const auto x = difference_step(joint, scheme, r == 0, rng);
    if (r > 0) report.recovered_differences.push_back(x.value_or(-1));
    joint = apply_download(std::move(joint), scheme);
    const auto msg = message_wires(joint.layout(), scheme);
    const auto measured = measure_computational(joint, msg, rng);
    if (decode_message_digits(scheme, Parity::odd, measured.outcome) == s) ++correct;
    state = drop_definite_wires(measured.post_state, msg);
    if (hadamard_rounds) state = apply_hadamard_round(std::move(state), scheme);
  }
  for (double p : report.round_mismatch_probabilities) report.detection_probability = std::max(report.detection_probability, p);
  report.metrics["players_correct_fraction"] = symbols.empty() ? 1.0 : static_cast<double>(correct) / symbols.size();
  const std::vector<int> eve = prefixed_wires(state.layout(), kEvePrefix);
  report.entanglement_measures.push_back(partial_trace(state, eve).entropy(scheme.dimension()));
  report.notes = hadamard_rounds ? "Hadamard rounds on: detection_probability is the largest per-round stray-check mismatch"
                                 : "Hadamard rounds off: differences s1 - s_r";
  return report;
}

AttackReport contamination_detection(const SchemeSpec& scheme, std::span<const Eigen::VectorXcd> ancillas,
                                     const std::optional<Eigen::MatrixXcd>& eve_unitary) {
  AttackModel model = AttackModel::contamination({ancillas.begin(), ancillas.end()});
  model.eve_unitary = eve_unitary;
  model.ancilla_wires(scheme.dimension());

  AttackReport report;
  report.kind = AttackKind::contaminate_carrier;
  const CarrierState clean = build_carrier(scheme.with_parity(Parity::odd));
  const QuditState contaminated = contaminate(clean.state, ancillas);
  const auto eve = prefixed_wires(contaminated.layout(), kEvePrefix);
  report.entanglement_measures.push_back(partial_trace(contaminated, eve).entropy(scheme.dimension()));

  const CarrierState after = hadamard_round(CarrierState{clean.scheme, contaminated});
  QuditState state = after.state;
  if (eve_unitary) state = apply_register_operator(state, eve, *eve_unitary);
  report.detection_probability = mean_stray_mismatch_probability(state, after.scheme, after.scheme.parity());
  report.metrics["ancillas_coincide"] = ancillas_coincide(ancillas) ? 1.0 : 0.0;
  report.notes = "stray check after one Hadamard round on the contaminated " + scheme.name() + " carrier";
  return report;
}

MonteCarloResult contamination_monte_carlo(const SchemeSpec& scheme, std::vector<Eigen::VectorXcd> ancillas,
                                           int rounds, double stray_fraction, std::uint64_t rng_seed) {
  if (scheme.alternates_parity()) throw std::invalid_argument("Monte Carlo detection runs on KD and KN carriers");
  MonteCarloResult result;
  result.exact = contamination_detection(scheme, ancillas).detection_probability;
  SessionConfig config;
  config.scheme = scheme;
  config.rounds = rounds;
  config.stray_fraction = stray_fraction;
  config.rng_seed = rng_seed;
  config.hadamard_every_round = true;
  config.adversary = AttackModel::contamination(std::move(ancillas));
  const DetectionStats stats = detection_check(run_session(config));
  result.rounds = rounds;
  result.stray_checks = stats.stray_rounds;
  result.mismatches = stats.mismatches;
  result.frequency = stats.mismatch_rate;
  return result;
}

AttackReport insider_b3_attack(std::span<const Eigen::VectorXcd> eta) {
  const SchemeSpec scheme = SchemeSpec::k_n(2, 3);
  std::vector<Eigen::VectorXcd> defaults;
  if (eta.empty()) {
    defaults = AttackModel::orthogonal_ancillas(3);
    eta = defaults;
  }
  AttackReport report;
  report.kind = AttackKind::insider_b3;
  const QuditState carrier = build_carrier(scheme).state;
  const int insider = carrier.layout().wire(player_label(3));
  // B3 keeps an extra register correlated with its own share digit.
  const QuditState attacked = attach_conditioned(carrier, insider, eta, kInsiderPrefix);

  std::vector<QuditState> joints;
  std::vector<DensityMatrix> marginals;
  for (int s = 0; s < 3; ++s) {
    QuditState joint = upload(tensor(attacked, encode_message(scheme, Parity::odd, s)), scheme, Parity::odd);
    std::vector<int> keep{joint.layout().wire(player_label(3))};
    for (int w : prefixed_wires(joint.layout(), kInsiderPrefix)) keep.push_back(w);
    for (int w : message_wires(joint.layout(), scheme)) keep.push_back(w);
    marginals.push_back(partial_trace(joint, keep));
    report.entanglement_measures.push_back(marginals.back().entropy(3));
    joints.push_back(std::move(joint));
  }
  for (int a = 0; a < 3; ++a) {
    for (int b = a + 1; b < 3; ++b) {
      report.density_distances.push_back(trace_distance(marginals[static_cast<std::size_t>(a)], marginals[static_cast<std::size_t>(b)]));
      report.metrics["full_state_fidelity_" + std::to_string(a) + "_" + std::to_string(b)] =
          fidelity(joints[static_cast<std::size_t>(a)], joints[static_cast<std::size_t>(b)]);
    }
  }
  report.notes = "reduced state of player_3, its extra register and the three message wires";
  return report;
}

// ---------------------------------------------------------------------------
// Session adversaries

namespace {

class PassiveAdversary final : public SessionAdversary {
 public:
  void on_transit(QuditState& joint, const SchemeSpec& scheme, int, Rng&) override {
    const DensityMatrix rho = partial_trace(joint, message_wires(joint.layout(), scheme));
    max_distance_ = std::max(max_distance_, trace_distance(rho, code_mixture(scheme, scheme.parity())));
  }
  nlohmann::json log() const override {
    return {{"kind", to_string(AttackKind::passive_intercept)}, {"max_distance_to_code_mixture", max_distance_}};
  }

 private:
  double max_distance_ = 0.0;
};

class DifferenceAdversary final : public SessionAdversary {
 public:
  void on_session_start(QuditState& carrier, const SchemeSpec& scheme, Rng&) override {
    require_difference_scheme(scheme);
    carrier = tensor(carrier, fresh_eve_register(scheme));
  }
  void on_transit(QuditState& joint, const SchemeSpec& scheme, int round, Rng& rng) override {
    const auto x = difference_step(joint, scheme, round == 1, rng);
    if (round > 1) differences_.push_back(x ? nlohmann::json(*x) : nlohmann::json(nullptr));
  }
  nlohmann::json log() const override {
    return {{"kind", to_string(AttackKind::entangle_difference)}, {"differences", differences_}};
  }

 private:
  nlohmann::json differences_ = nlohmann::json::array();
};

// Eve keeps the carrier contaminated: at the end of every round she
// discards her previous ancillas and re-attaches fresh ones, so each
// subsequent stray check sees a freshly contaminated, Hadamard-rotated
// carrier.
class ContaminationAdversary final : public SessionAdversary {
 public:
  explicit ContaminationAdversary(AttackModel model) : model_(std::move(model)) {}

  void on_session_start(QuditState& carrier, const SchemeSpec&, Rng&) override {
    carrier = contaminate(carrier, model_.ancillas);
    ++contaminations_;
  }
  void on_round_end(QuditState& carrier, const SchemeSpec&, Rng& rng) override {
    const auto eve = prefixed_wires(carrier.layout(), kEvePrefix);
    if (!eve.empty()) carrier = drop_definite_wires(measure_computational(carrier, eve, rng).post_state, eve);
    carrier = contaminate(carrier, model_.ancillas);
    ++contaminations_;
  }
  void on_hadamard(QuditState& carrier, const SchemeSpec&, Rng&) override {
    if (model_.eve_unitary) carrier = apply_register_operator(carrier, prefixed_wires(carrier.layout(), kEvePrefix), *model_.eve_unitary);
  }
  nlohmann::json log() const override {
    return {{"kind", to_string(AttackKind::contaminate_carrier)},
            {"contaminations", contaminations_},
            {"ancillas_coincide", ancillas_coincide(model_.ancillas)}};
  }

 private:
  AttackModel model_;
  int contaminations_ = 0;
};

}  // namespace

std::unique_ptr<SessionAdversary> make_session_adversary(const AttackModel& model, const SchemeSpec& scheme) {
  switch (model.kind) {
    case AttackKind::passive_intercept: return std::make_unique<PassiveAdversary>();
    case AttackKind::entangle_difference:
      require_difference_scheme(scheme);
      return std::make_unique<DifferenceAdversary>();
    case AttackKind::contaminate_carrier:
      model.ancilla_wires(scheme.dimension());
      return std::make_unique<ContaminationAdversary>(model);
    case AttackKind::insider_b3: break;
  }
  throw std::invalid_argument("insider_b3 is a standalone experiment, not a session adversary");
}

}  // namespace qcarrier
