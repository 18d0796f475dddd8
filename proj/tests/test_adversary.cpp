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

#include <gtest/gtest.h>

#include <cmath>

#include "qcarrier/adversary.hpp"
#include "qcarrier/density_matrix.hpp"
#include "test_support.hpp"

namespace qcarrier {
namespace {

using testing::all_schemes;
using testing::random_vector;

std::vector<std::vector<int>> all_sequences(int d, int length) {
  std::vector<std::vector<int>> out{{}};
  for (int i = 0; i < length; ++i) {
    std::vector<std::vector<int>> next;
    for (const auto& seq : out) {
      for (int s = 0; s < d; ++s) {
        next.push_back(seq);
        next.back().push_back(s);
      }
    }
    out = std::move(next);
  }
  return out;
}

TEST(Passive, KeyDistributionMarginalIsMaximallyMixed) {
  const std::vector<int> symbols{0, 1};
  const AttackReport r = passive_intercept(SchemeSpec::key_distribution(), symbols);
  ASSERT_EQ(r.density_distances.size(), 1u);
  EXPECT_LT(r.density_distances[0], 1e-10);
  EXPECT_LT(r.metrics.at("max_distance_to_code_mixture"), 1e-10);
}

TEST(Passive, CodeCarrierMarginalIsCodeMixture) {
  const std::vector<int> symbols{0, 1, 2};
  const AttackReport r = passive_intercept(SchemeSpec::k_n(2, 3), symbols);
  EXPECT_EQ(r.density_distances.size(), 3u);
  EXPECT_LT(r.max_distance(), 1e-10);
  EXPECT_LT(r.metrics.at("max_distance_to_code_mixture"), 1e-10);
}

TEST(Passive, SingleRoundHasNoDistances) {
  const std::vector<int> one{1};
  const AttackReport r = passive_intercept(SchemeSpec::k_n(2, 3), one);
  EXPECT_TRUE(r.density_distances.empty());
  EXPECT_EQ(r.max_distance(), 0.0);
}

TEST(Passive, ZeroLeakageEveryScheme) {
  for (const auto& scheme : all_schemes()) {
    std::vector<int> symbols;
    for (int s = 0; s < scheme.dimension(); ++s) symbols.push_back(s);
    EXPECT_LT(passive_intercept(scheme, symbols).max_distance(), 1e-10) << scheme.name();
  }
}

TEST(Difference, PrintedExample) {
  const std::vector<int> symbols{1, 0, 2};
  const AttackReport r = entangle_difference_attack(SchemeSpec::k_n(2, 3), symbols, false, 1);
  EXPECT_EQ(r.recovered_differences, (std::vector<int>{1, 2}));
  EXPECT_EQ(r.detection_probability, 0.0);
  EXPECT_DOUBLE_EQ(r.metrics.at("players_correct_fraction"), 1.0);
}

TEST(Difference, EqualSymbolsGiveZeros) {
  const std::vector<int> symbols{2, 2, 2, 2};
  EXPECT_EQ(entangle_difference_attack(SchemeSpec::k_n(2, 3), symbols, false).recovered_differences,
            (std::vector<int>{0, 0, 0}));
}

TEST(Difference, ExhaustiveOverShortSequences) {
  const SchemeSpec scheme = SchemeSpec::k_n(2, 3);
  for (int length = 1; length <= 4; ++length) {
    for (const auto& seq : all_sequences(3, length)) {
      const AttackReport r = entangle_difference_attack(scheme, seq, false, static_cast<std::uint64_t>(length));
      std::vector<int> expected;
      for (std::size_t j = 1; j < seq.size(); ++j) expected.push_back(((seq[0] - seq[j]) % 3 + 3) % 3);
      EXPECT_EQ(r.recovered_differences, expected);
      EXPECT_DOUBLE_EQ(r.metrics.at("players_correct_fraction"), 1.0);
    }
  }
}

TEST(Difference, KeyDistributionAndLargerCode) {
  const std::vector<int> kd{1, 0, 1, 1};
  EXPECT_EQ(entangle_difference_attack(SchemeSpec::key_distribution(), kd, false).recovered_differences,
            (std::vector<int>{1, 0, 0}));
  const std::vector<int> kn{4, 1, 0};
  EXPECT_EQ(entangle_difference_attack(SchemeSpec::k_n(3, 5), kn, false).recovered_differences,
            (std::vector<int>{3, 4}));
}

TEST(Difference, HadamardRoundsExposeTheAttack) {
  const std::vector<int> symbols{1, 0, 1};
  const AttackReport kd = entangle_difference_attack(SchemeSpec::key_distribution(), symbols, true, 3);
  EXPECT_NEAR(kd.detection_probability, 0.5, 1e-12);
  EXPECT_EQ(kd.round_mismatch_probabilities.front(), 0.0);
  const std::vector<int> trits{1, 0, 2};
  EXPECT_GT(entangle_difference_attack(SchemeSpec::k_n(2, 3), trits, true, 3).detection_probability, 0.1);
}

TEST(Difference, RejectsAlternatingSchemes) {
  const std::vector<int> symbols{0, 1};
  EXPECT_THROW(entangle_difference_attack(SchemeSpec::two_two(), symbols, false), std::invalid_argument);
}

TEST(Contamination, EqualAncillasAreInvisible) {
  const AttackReport r = contamination_detection(SchemeSpec::key_distribution(), AttackModel::equal_ancillas(2));
  EXPECT_LT(r.detection_probability, 1e-12);
  EXPECT_LT(r.entanglement_measures.at(0), 1e-10);
}

TEST(Contamination, OrthogonalAncillasOnKeyDistribution) {
  const AttackReport r = contamination_detection(SchemeSpec::key_distribution(), AttackModel::orthogonal_ancillas(2));
  EXPECT_NEAR(r.detection_probability, 0.5, 1e-12);
  EXPECT_NEAR(r.entanglement_measures.at(0), 1.0, 1e-12);
}

TEST(Contamination, OrthogonalAncillasOnCodeCarrier) {
  const AttackReport r = contamination_detection(SchemeSpec::k_n(2, 3), AttackModel::orthogonal_ancillas(3));
  EXPECT_NEAR(r.detection_probability, 2.0 / 3.0, 1e-12);
}

TEST(Contamination, DichotomyOverRandomAncillas) {
  Rng rng(2718);
  for (const auto& scheme : {SchemeSpec::key_distribution(), SchemeSpec::k_n(2, 3)}) {
    const int d = scheme.dimension();
    for (int draw = 0; draw < 20; ++draw) {
      const Eigen::Index size = draw % 2 == 0 ? d : d * d;
      // Coinciding ancillas, with a common random phase.
      const Eigen::VectorXcd base = random_vector(rng, size) * std::polar(1.0, 2 * M_PI * rng.uniform());
      const std::vector<Eigen::VectorXcd> same(static_cast<std::size_t>(d), base);
      EXPECT_TRUE(ancillas_coincide(same));
      EXPECT_LT(contamination_detection(scheme, same).detection_probability, 1e-12) << scheme.name() << " " << draw;
      // Independent ancillas.
      std::vector<Eigen::VectorXcd> different;
      for (int q = 0; q < d; ++q) different.push_back(random_vector(rng, size));
      EXPECT_FALSE(ancillas_coincide(different));
      EXPECT_GT(contamination_detection(scheme, different).detection_probability, 1e-6) << scheme.name() << " " << draw;
    }
  }
}

TEST(Contamination, BranchDependentPhaseIsDetected) {
  // ξ_1 = −ξ_0 leaves Eve unentangled yet flips the carrier's relative
  // phase, which the next stray check sees.
  const Eigen::VectorXcd v = Eigen::VectorXcd::Unit(2, 0);
  const std::vector<Eigen::VectorXcd> flipped{v, -v};
  const AttackReport r = contamination_detection(SchemeSpec::key_distribution(), flipped);
  EXPECT_LT(r.entanglement_measures.at(0), 1e-10);
  EXPECT_NEAR(r.detection_probability, 1.0, 1e-12);
}

TEST(Contamination, EveUnitaryDoesNotHelp) {
  Rng rng(4);
  const Eigen::MatrixXcd g = Eigen::MatrixXcd::NullaryExpr(3, 3, [&] { return testing::random_amplitude(rng); });
  const Eigen::MatrixXcd u = Eigen::HouseholderQR<Eigen::MatrixXcd>(g).householderQ();
  const auto ancillas = AttackModel::orthogonal_ancillas(3);
  const double plain = contamination_detection(SchemeSpec::k_n(2, 3), ancillas).detection_probability;
  const double rotated = contamination_detection(SchemeSpec::k_n(2, 3), ancillas, u).detection_probability;
  EXPECT_NEAR(plain, rotated, 1e-12);
}

TEST(Contamination, RejectsBadAncillas) {
  const std::vector<Eigen::VectorXcd> zeros(2, Eigen::VectorXcd::Zero(2));
  EXPECT_THROW(contamination_detection(SchemeSpec::key_distribution(), zeros), std::invalid_argument);
  const std::vector<Eigen::VectorXcd> wrong_count(3, Eigen::VectorXcd::Unit(2, 0));
  EXPECT_THROW(contamination_detection(SchemeSpec::key_distribution(), wrong_count), std::invalid_argument);
  const std::vector<Eigen::VectorXcd> wrong_size(2, Eigen::VectorXcd::Unit(3, 0));
  EXPECT_THROW(contamination_detection(SchemeSpec::key_distribution(), wrong_size), std::invalid_argument);
}

TEST(Contamination, EqualAncillaSessionHasNoMismatches) {
  const auto mc = contamination_monte_carlo(SchemeSpec::key_distribution(), AttackModel::equal_ancillas(2), 400, 0.25, 8);
  EXPECT_EQ(mc.stray_checks, 100);
  EXPECT_EQ(mc.mismatches, 0);
}

TEST(Contamination, SessionFrequencyTracksExactValue) {
  const auto mc = contamination_monte_carlo(SchemeSpec::k_n(2, 3), AttackModel::orthogonal_ancillas(3), 2000, 0.25, 21);
  EXPECT_NEAR(mc.exact, 2.0 / 3.0, 1e-12);
  EXPECT_NEAR(mc.frequency, mc.exact, 0.05);
}

TEST(SessionAttacks, DifferenceAttackUnderHadamardIsDetected) {
  SessionConfig c;
  c.scheme = SchemeSpec::key_distribution();
  c.rounds = 200;
  c.rng_seed = 17;
  c.adversary = AttackModel::entangle_difference();
  EXPECT_GT(detection_check(run_session(c)).mismatches, 0);
}

TEST(SessionAttacks, DifferenceAttackWithoutHadamardIsSilent) {
  SessionConfig c;
  c.scheme = SchemeSpec::k_n(2, 3);
  c.rounds = 12;
  c.rng_seed = 18;
  c.hadamard_every_round = false;
  c.adversary = AttackModel::entangle_difference();
  const SessionTranscript t = run_session(c);
  EXPECT_EQ(detection_check(t).mismatches, 0);
  const auto& diffs = t.adversary_log.at("differences");
  ASSERT_EQ(diffs.size(), 11u);
  for (std::size_t j = 1; j < t.rounds.size(); ++j) {
    EXPECT_EQ(diffs[j - 1].get<int>(), ((t.rounds[0].symbol_sent - t.rounds[j].symbol_sent) % 3 + 3) % 3);
    EXPECT_EQ(t.rounds[j].retrieved.front(), t.rounds[j].symbol_sent);
  }
}

TEST(SessionAttacks, PassiveSessionLeaksNothing) {
  SessionConfig c;
  c.scheme = SchemeSpec::k_n(2, 3);
  c.rounds = 10;
  c.adversary = AttackModel::passive();
  const SessionTranscript t = run_session(c);
  EXPECT_LT(t.adversary_log.at("max_distance_to_code_mixture").get<double>(), 1e-10);
  EXPECT_EQ(detection_check(t).mismatches, 0);
}

TEST(Insider, MarginalIsSymbolIndependent) {
  const AttackReport r = insider_b3_attack();
  ASSERT_EQ(r.density_distances.size(), 3u);
  EXPECT_LT(r.max_distance(), 1e-10);
  EXPECT_LT(r.metrics.at("full_state_fidelity_0_1"), 1.0 - 1e-6);
  EXPECT_LT(r.metrics.at("full_state_fidelity_1_2"), 1.0 - 1e-6);
}

TEST(Insider, ArbitraryExtraRegister) {
  Rng rng(61);
  for (int draw = 0; draw < 5; ++draw) {
    std::vector<Eigen::VectorXcd> eta;
    for (int j = 0; j < 3; ++j) eta.push_back(random_vector(rng, 9));
    EXPECT_LT(insider_b3_attack(eta).max_distance(), 1e-10);
  }
}

TEST(Helpers, CodewordMeasurementReadsSymbol) {
  const SchemeSpec scheme = SchemeSpec::k_n(3, 5);
  Rng rng(1);
  for (int s = 0; s < 5; ++s) {
    QuditState word = encode_message(scheme, Parity::odd, s);
    const auto wires = message_wires(word.layout(), scheme);
    EXPECT_EQ(measure_codeword(word, wires, scheme, rng), s);
  }
}

TEST(Helpers, ReportJsonHasDocumentedKeys) {
  const auto j = report_to_json(insider_b3_attack());
  for (const char* key : {"kind", "differences", "distances", "detection_probability", "notes"}) {
    EXPECT_TRUE(j.contains(key)) << key;
  }
  EXPECT_EQ(j.at("kind"), "insider_b3");
}

}  // namespace
}  // namespace qcarrier
