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

// Acceptance suite: one [PASS]/[FAIL] line per criterion.
// Usage: acceptance <cli-binary> <config-dir> <scratch-dir>

#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <sys/wait.h>

#include "qcarrier/adversary.hpp"
#include "qcarrier/carriers.hpp"
#include "qcarrier/density_matrix.hpp"
#include "qcarrier/modular_codes.hpp"
#include "qcarrier/protocol_engine.hpp"
#include "test_support.hpp"

namespace {

using namespace qcarrier;
using testing::all_schemes;
using testing::max_amplitude_gap;
using testing::subsets_of;

// Criterion body: returns an empty string on success, else the reason.
using Check = std::function<std::string()>;

struct Criterion {
  std::string id;
  std::string title;
  double time_limit_s;  // 0 for none
  Check check;
};

std::string fail(const std::string& what, double value) {
  std::ostringstream s;
  s << what << " (" << value << ")";
  return s.str();
}

std::string ac1_codewords() {
  const double amp = 1 / std::sqrt(3.0);
  const std::vector<std::vector<Digits>> printed{
      {{0, 0, 0}, {1, 1, 1}, {2, 2, 2}}, {{0, 1, 2}, {1, 2, 0}, {2, 0, 1}}, {{0, 2, 1}, {1, 0, 2}, {2, 1, 0}}};
  for (int s = 0; s < 3; ++s) {
    const QuditState word = encode_codeword(CodeSpec(2, 3), s).state;
    QuditState expected = QuditState(word.layout());
    for (const auto& d : printed[static_cast<std::size_t>(s)]) expected.add(d, amp);
    const double gap = max_amplitude_gap(word, expected);
    if (gap >= 1e-12) return fail("codeword s=" + std::to_string(s) + " differs", gap);
  }
  return {};
}

std::string ac2_invariance() {
  for (const auto& scheme : {SchemeSpec::key_distribution(), SchemeSpec::k_n(2, 3), SchemeSpec::k_n(3, 5)}) {
    const CarrierState c = build_carrier(scheme);
    const double f = fidelity(c.state, hadamard_round(c).state);
    if (f < 1 - 1e-10) return fail(scheme.name() + " Fourier round fidelity", f);
  }
  const CarrierState even = hadamard_round(build_carrier(SchemeSpec::two_two(Parity::odd)));
  QuditState printed = QuditState(even.state.layout());
  for (const Digits& d : {Digits{0, 0, 0}, Digits{0, 1, 1}, Digits{1, 0, 1}, Digits{1, 1, 0}}) {
    printed.add(d, 0.5);
  }
  const double gap = max_amplitude_gap(even.state, printed);
  if (even.scheme.parity() != Parity::even || gap >= 1e-12) return fail("(2,2) odd carrier not mapped to even", gap);
  return {};
}

std::string ac3_round_trip() {
  for (const auto& scheme : all_schemes()) {
    const CarrierState carrier = build_carrier(scheme);
    if (carrier.state.backend() != Backend::sparse) return scheme.name() + " carrier is not sparse";
    for (int s = 0; s < scheme.dimension(); ++s) {
      const QuditState message = encode_message(scheme, scheme.parity(), s);
      const Downloaded out = download(upload(tensor(carrier.state, message), scheme, scheme.parity()), scheme);
      const double fm = fidelity(out.message, message);
      const double fc = fidelity(out.carrier.state, carrier.state);
      if (fm < 1 - 1e-12) return fail(scheme.name() + " message fidelity s=" + std::to_string(s), fm);
      if (fc < 1 - 1e-12) return fail(scheme.name() + " carrier fidelity s=" + std::to_string(s), fc);
    }
  }
  return {};
}

std::string ac4_leakage() {
  for (const auto& scheme : all_schemes()) {
    std::vector<int> symbols;
    for (int s = 0; s < scheme.dimension(); ++s) symbols.push_back(s);
    const double d = passive_intercept(scheme, symbols).max_distance();
    if (d >= 1e-10) return fail(scheme.name() + " in-transit marginals differ", d);
  }
  return {};
}

std::string ac5_threshold() {
  for (int k : {2, 3}) {
    const CodeSpec code = CodeSpec::threshold(k);
    const SchemeSpec scheme = SchemeSpec::k_n(k, code.n());
    for (int s = 0; s < code.n(); ++s) {
      const QuditState message = encode_message(scheme, Parity::odd, s);
      const QuditState received = download(upload(tensor(build_carrier(scheme).state, message), scheme, Parity::odd),
                                           scheme).message;
      std::uint64_t seed = 1;
      for (const auto& subset : subsets_of(code.n(), k)) {
        // Several measurement seeds per subset, since outcomes are random.
        for (int trial = 0; trial < 3; ++trial) {
          const int got = authorized_retrieve(scheme, Parity::odd, received, subset, seed++);
          if (got != s) return "KN(" + std::to_string(k) + "," + std::to_string(code.n()) + ") subset misread";
        }
      }
      for (const auto& subset : subsets_of(code.n(), k - 1)) {
        std::vector<int> wires;
        for (int p : subset) wires.push_back(p - 1);
        const double d = trace_distance(partial_trace(encode_codeword(code, 0).state, wires),
                                        partial_trace(encode_codeword(code, s).state, wires));
        if (d >= 1e-10) return fail("(k-1)-subset marginal depends on s", d);
      }
    }
  }
  return {};
}

std::string ac6_difference_and_detection() {
  const SchemeSpec scheme = SchemeSpec::k_n(2, 3);
  std::vector<std::vector<int>> sequences{{}};
  for (int length = 1; length <= 4; ++length) {
    std::vector<std::vector<int>> next;
    for (const auto& seq : sequences) {
      if (static_cast<int>(seq.size()) != length - 1) continue;
      for (int s = 0; s < 3; ++s) {
        next.push_back(seq);
        next.back().push_back(s);
      }
    }
    for (const auto& seq : next) {
      std::vector<int> expected;
      for (std::size_t j = 1; j < seq.size(); ++j) expected.push_back(((seq[0] - seq[j]) % 3 + 3) % 3);
      if (entangle_difference_attack(scheme, seq, false, 7).recovered_differences != expected) {
        return "difference attack misreports a length-" + std::to_string(length) + " sequence";
      }
    }
    sequences.insert(sequences.end(), next.begin(), next.end());
  }
  constexpr std::uint64_t kSeed = 2026;
  const MonteCarloResult mc = contamination_monte_carlo(SchemeSpec::key_distribution(),
                                                        AttackModel::orthogonal_ancillas(2), 10000, 0.25, kSeed);
  if (std::abs(mc.exact - 0.5) >= 1e-12) return fail("exact KD orthogonal detection probability", mc.exact);
  if (std::abs(mc.frequency - mc.exact) > 0.02) return fail("Monte Carlo frequency off by", mc.frequency - mc.exact);
  std::cout << "       Monte Carlo: " << mc.mismatches << "/" << mc.stray_checks << " = " << mc.frequency
            << " vs exact " << mc.exact << " (seed " << kSeed << ")\n";
  return {};
}

std::string ac7_insider() {
  const AttackReport r = insider_b3_attack();
  if (r.density_distances.size() != 3) return "expected three pairwise distances";
  if (r.max_distance() >= 1e-10) return fail("insider marginals differ", r.max_distance());
  return {};
}

std::string ac8_power_sums() {
  for (int p : {3, 5, 7, 11, 13}) {
    for (int k = 1; k <= p - 1; ++k) {
      const int expected = k == p - 1 ? p - 1 : 0;
      if (power_sum(k, p) != expected) return "S_" + std::to_string(k) + "(" + std::to_string(p) + ") wrong";
    }
    for (int m = 3; m <= p - 1; ++m) {
      if (power_sum_by_recursion(m, p) != power_sum(m - 1, p)) return "recursion disagrees at p=" + std::to_string(p);
    }
  }
  return {};
}

std::string ac9_commutation() {
  const SchemeSpec scheme = SchemeSpec::k_n(2, 3);
  for (int s = 0; s < 3; ++s) {
    const QuditState uploaded =
        upload(tensor(build_carrier(scheme).state, encode_message(scheme, Parity::odd, s)), scheme, Parity::odd);
    for (const auto& subset : subsets_of(3, 2)) {
      const std::uint64_t seed = 40u + static_cast<unsigned>(s);
      const CleaningOutcome a = retrieve_then_clean(uploaded, scheme, subset, seed);
      const CleaningOutcome b = clean_then_retrieve(uploaded, scheme, subset, seed);
      if (a.symbol != s || b.symbol != s) return "orderings misread s=" + std::to_string(s);
      const double gap = max_amplitude_gap(a.carrier, b.carrier);
      if (gap >= 1e-12) return fail("final carriers differ", gap);
    }
  }
  return {};
}

std::string read_file(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

std::string ac10_reproducibility(const std::string& cli, const std::filesystem::path& configs,
                                 const std::filesystem::path& scratch) {
  std::filesystem::create_directories(scratch);
  const std::vector<std::string> scenarios{"kn23_clean.toml", "two_two.json", "kd_contamination.toml",
                                           "kd_difference_hadamard.toml"};
  for (const auto& name : scenarios) {
    for (const std::string format : {"json", "csv"}) {
      std::string outputs[2];
      for (int run = 0; run < 2; ++run) {
        const auto out = scratch / (name + "." + format + "." + std::to_string(run));
        const std::string cmd = "\"" + cli + "\" run-session --config \"" + (configs / name).string() +
                                "\" --seed 314 --format " + format + " --out \"" + out.string() + "\"";
        const int rc = std::system(cmd.c_str());
        if (rc == -1) return "could not launch " + cli;
        if (!WIFEXITED(rc) || WEXITSTATUS(rc) == 1) return name + " was rejected by the CLI";
        outputs[run] = read_file(out);
      }
      if (outputs[0].empty()) return name + " produced no transcript";
      if (outputs[0] != outputs[1]) return name + " " + format + " transcripts differ";
    }
  }
  return {};
}

}  // namespace

int main(int argc, char** argv) {
  if (argc != 4) {
    std::cerr << "usage: acceptance <cli-binary> <config-dir> <scratch-dir>\n";
    return 1;
  }
  const std::string cli = argv[1];
  const std::filesystem::path configs = argv[2], scratch = argv[3];

  const std::vector<Criterion> criteria{
      {"AC1", "(2,3) codewords match the printed superpositions", 1.0, ac1_codewords},
      {"AC2", "carrier invariance under the Hadamard round", 5.0, ac2_invariance},
      {"AC3", "upload/download round trip, every scheme and symbol", 30.0, ac3_round_trip},
      {"AC4", "zero in-transit leakage", 0.0, ac4_leakage},
      {"AC5", "threshold recovery and sub-threshold secrecy", 0.0, ac5_threshold},
      {"AC6", "difference attack and contamination detection", 0.0, ac6_difference_and_detection},
      {"AC7", "insider marginal is symbol-independent", 0.0, ac7_insider},
      {"AC8", "power sums vanish except at k = p-1", 1.0, ac8_power_sums},
      {"AC9", "retrieval and cleaning commute", 0.0, ac9_commutation},
      {"AC10", "CLI transcripts are byte-identical across runs",
       0.0, [&] { return ac10_reproducibility(cli, configs, scratch); }},
  };

  int failures = 0;
  for (const auto& c : criteria) {
    const auto start = std::chrono::steady_clock::now();
    std::string reason;
    try {
      reason = c.check();
    } catch (const std::exception& e) {
      reason = std::string("exception: ") + e.what();
    }
    const double elapsed = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (reason.empty() && c.time_limit_s > 0 && elapsed >= c.time_limit_s) {
      reason = fail("exceeded " + std::to_string(c.time_limit_s) + " s", elapsed);
    }
    const bool ok = reason.empty();
    failures += ok ? 0 : 1;
    std::cout << (ok ? "[PASS] " : "[FAIL] ") << c.id << ": " << c.title << " (" << elapsed << " s)";
    if (!ok) std::cout << " -- " << reason;
    std::cout << std::endl;
  }
  std::cout << (criteria.size() - static_cast<std::size_t>(failures)) << "/" << criteria.size()
            << " criteria passed\n";
  return failures == 0 ? 0 : 1;
}
