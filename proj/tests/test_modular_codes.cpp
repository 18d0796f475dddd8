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

#include <algorithm>
#include <array>
#include <cmath>
#include <set>

#include "qcarrier/density_matrix.hpp"
#include "qcarrier/modular_codes.hpp"
#include "test_support.hpp"

namespace qcarrier {
namespace {

using testing::random_below;
using testing::subsets_of;

// Direct summation with 64-bit integers, no modular shortcuts.
long long brute_power_sum(int k, int p) {
  long long total = 0;
  for (long long j = 1; j < p; ++j) {
    long long term = 1;
    for (int e = 0; e < k; ++e) term = term * j % p;
    total += term;
  }
  return total % p;
}

TEST(Arithmetic, Primes) {
  const std::vector<int> primes{2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47};
  for (int n = 0; n < 50; ++n) {
    EXPECT_EQ(is_prime(n), std::find(primes.begin(), primes.end(), n) != primes.end()) << n;
  }
}

TEST(Arithmetic, PowAndInverse) {
  EXPECT_EQ(pow_mod(0, 0, 5), 1);
  EXPECT_EQ(pow_mod(0, 3, 5), 0);
  EXPECT_EQ(mod_p(-7, 5), 3);
  for (int p : {3, 5, 7, 11, 13}) {
    for (int a = 1; a < p; ++a) EXPECT_EQ(mod_p(static_cast<long long>(a) * inverse_mod(a, p), p), 1);
    EXPECT_THROW(inverse_mod(0, p), std::domain_error);
  }
}

TEST(PowerSums, DirectSumMatchesBruteForce) {
  for (int p : {3, 5, 7, 11, 13, 17, 101}) {
    for (int k = 1; k < p; ++k) EXPECT_EQ(power_sum(k, p), brute_power_sum(k, p)) << "k=" << k << " p=" << p;
  }
}

TEST(PowerSums, KnownRows) {
  const std::vector<int> p3{0, 2}, p5{0, 0, 0, 4}, p7{0, 0, 0, 0, 0, 6};
  auto row = [](int p) {
    std::vector<int> r;
    for (int k = 1; k < p; ++k) r.push_back(power_sum(k, p));
    return r;
  };
  EXPECT_EQ(row(3), p3);
  EXPECT_EQ(row(5), p5);
  EXPECT_EQ(row(7), p7);
}

TEST(PowerSums, VanishExceptLastIndex) {
  for (int p : {3, 5, 7, 11, 13, 17, 19, 23}) {
    for (int k = 1; k < p; ++k) EXPECT_EQ(power_sum(k, p), k == p - 1 ? p - 1 : 0);
  }
}

TEST(PowerSums, RecursionAgreesOnValidityWindow) {
  for (int p : {5, 7, 11, 13, 17, 19, 23}) {
    for (int m = 3; m <= p - 1; ++m) EXPECT_EQ(power_sum_by_recursion(m, p), power_sum(m - 1, p)) << m << "," << p;
    EXPECT_THROW(power_sum_by_recursion(2, p), std::out_of_range);
    EXPECT_THROW(power_sum_by_recursion(p, p), std::out_of_range);
  }
}

TEST(PowerSums, RejectsBadArguments) {
  EXPECT_THROW(power_sum(1, 4), std::invalid_argument);
  EXPECT_THROW(power_sum(0, 5), std::invalid_argument);
}

TEST(CodeSpec, ValidatesParameters) {
  EXPECT_THROW(CodeSpec(2, 4), std::invalid_argument);
  EXPECT_THROW(CodeSpec(4, 5), std::invalid_argument);
  EXPECT_THROW(CodeSpec(1, 3), std::invalid_argument);
  EXPECT_NO_THROW(CodeSpec(3, 5));
  EXPECT_NO_THROW(CodeSpec(2, 5));
}

TEST(CodeSpec, RelationsHoldForThresholdCodes) {
  for (int k : {2, 3, 4, 6, 7}) {
    const CodeSpec spec = CodeSpec::threshold(k);
    const RelationReport report = verify_code_relations(spec);
    EXPECT_TRUE(report.all_pass()) << "k=" << k;
    EXPECT_EQ(dot_mod(spec.special(), spec.special(), spec.n()), spec.n() - 1);
  }
}

TEST(CodeSpec, RelationsFailBelowThreshold) {
  // With n > 2k - 1 the special vector is self-orthogonal rather than
  // e·e = -1.
  const RelationReport report = verify_code_relations(CodeSpec(2, 5));
  EXPECT_FALSE(report.all_pass());
}

TEST(CodeSpec, BasisVectorsArePowers) {
  EXPECT_EQ(basis_vector(0, 5), (std::vector<int>{1, 1, 1, 1, 1}));
  EXPECT_EQ(basis_vector(1, 5), (std::vector<int>{0, 1, 2, 3, 4}));
  EXPECT_EQ(basis_vector(2, 5), (std::vector<int>{0, 1, 4, 4, 1}));
}

TEST(Codewords, TwoThreeMatchPrintedAmplitudes) {
  const CodeSpec spec(2, 3);
  const std::vector<std::vector<Digits>> printed{
      {{0, 0, 0}, {1, 1, 1}, {2, 2, 2}}, {{0, 1, 2}, {1, 2, 0}, {2, 0, 1}}, {{0, 2, 1}, {1, 0, 2}, {2, 1, 0}}};
  for (int s = 0; s < 3; ++s) {
    const QuditState word = encode_codeword(spec, s).state;
    EXPECT_EQ(word.nonzero_count(), 3u);
    for (const auto& d : printed[static_cast<std::size_t>(s)]) {
      EXPECT_LT(std::abs(word.amplitude(d) - 1.0 / std::sqrt(3.0)), 1e-12);
    }
  }
}

TEST(Codewords, CircuitEncodingMatchesDefinition) {
  for (int s = 0; s < 3; ++s) {
    const auto via = encode_via_circuit_23(s);
    EXPECT_LT(testing::max_amplitude_gap(via.state, encode_codeword(CodeSpec(2, 3), s).state), 1e-12);
  }
}

TEST(Codewords, StateResidualsVanishAtThreshold) {
  for (int k : {2, 3}) {
    const auto r = code_state_residuals(CodeSpec::threshold(k));
    EXPECT_LT(r.orthonormality, 1e-12);
    EXPECT_LT(r.fourier_closure, 1e-10);
  }
  // Below threshold the Fourier image leaves the code space.
  EXPECT_GT(code_state_residuals(CodeSpec(2, 5)).fourier_closure, 1e-3);
}

TEST(Codewords, LogicalZEigenphase) {
  for (int k : {2, 3}) {
    const CodeSpec spec = CodeSpec::threshold(k);
    for (int s = 0; s < spec.n(); ++s) {
      const Amplitude phase = check_logical_z(spec, encode_codeword(spec, s).state);
      EXPECT_LT(std::abs(phase - root_of_unity(spec.n(), -s)), 1e-12);
    }
  }
  const std::array<Amplitude, 3> amps{1.0, 1.0, 0.0};
  EXPECT_THROW(check_logical_z(CodeSpec(2, 3), encode_logical(CodeSpec(2, 3), amps)), NotEigenstateError);
}

TEST(Codewords, PairwisePhasesRevealSymbol) {
  const CodeSpec spec(2, 3);
  for (int s = 0; s < 3; ++s) {
    const QuditState word = encode_codeword(spec, s).state;
    EXPECT_LT(std::abs(pairwise_z_phase(word, 0, 1) - root_of_unity(3, s)), 1e-12);
    EXPECT_LT(std::abs(pairwise_z_phase(word, 1, 2) - root_of_unity(3, s)), 1e-12);
    for (int a = 0; a < 3; ++a) {
      for (int b = 0; b < 3; ++b) {
        if (a != b) EXPECT_EQ(retrieve_by_phase_pair(spec, word, a, b), s);
      }
    }
  }
}

TEST(Codewords, SubThresholdMarginalsAreSymbolIndependent) {
  for (int k : {2, 3}) {
    const CodeSpec spec = CodeSpec::threshold(k);
    for (const auto& subset : subsets_of(spec.n(), k - 1)) {
      std::vector<int> wires;
      for (int p : subset) wires.push_back(p - 1);
      const DensityMatrix ref = partial_trace(encode_codeword(spec, 0).state, wires);
      for (int s = 1; s < spec.n(); ++s) {
        EXPECT_LT(trace_distance(ref, partial_trace(encode_codeword(spec, s).state, wires)), 1e-10);
      }
    }
  }
}

// Brute-force oracle: enumerate every polynomial of degree < k over Z_n and
// keep those passing through the shares.
std::set<int> brute_leading_coefficients(const CodeSpec& spec, const std::vector<Share>& shares) {
  std::set<int> out;
  const int n = spec.n(), k = spec.k();
  std::vector<int> coeffs(static_cast<std::size_t>(k), 0);
  long long total = 1;
  for (int i = 0; i < k; ++i) total *= n;
  for (long long idx = 0; idx < total; ++idx) {
    long long rem = idx;
    for (int i = 0; i < k; ++i) {
      coeffs[static_cast<std::size_t>(i)] = static_cast<int>(rem % n);
      rem /= n;
    }
    bool fits = true;
    for (const auto& sh : shares) {
      long long value = 0, power = 1;
      for (int i = 0; i < k; ++i) {
        value += coeffs[static_cast<std::size_t>(i)] * power;
        power = power * sh.position % n;
      }
      fits = fits && value % n == sh.value;
    }
    if (fits) out.insert(coeffs.back());
  }
  return out;
}

TEST(Interpolation, MatchesBruteForceOracle) {
  Rng rng(77);
  for (int k : {2, 3}) {
    const CodeSpec spec = CodeSpec::threshold(k);
    for (int trial = 0; trial < 30; ++trial) {
      std::vector<int> c(static_cast<std::size_t>(k - 1));
      for (auto& v : c) v = random_below(rng, spec.n());
      const int s = random_below(rng, spec.n());
      const auto evals = spec.evaluate(c, s);
      for (const auto& subset : subsets_of(spec.n(), k)) {
        std::vector<Share> shares;
        for (int p : subset) shares.push_back({p - 1, evals[static_cast<std::size_t>(p - 1)]});
        const auto oracle = brute_leading_coefficients(spec, shares);
        ASSERT_EQ(oracle.size(), 1u);
        EXPECT_EQ(retrieve_classical(spec, shares), *oracle.begin());
        EXPECT_EQ(*oracle.begin(), s);
      }
      EXPECT_EQ(spec.decode_branch(evals), s);
    }
  }
}

TEST(Interpolation, ShareErrors) {
  const CodeSpec spec(3, 5);
  const std::vector<Share> two{{0, 1}, {1, 2}};
  EXPECT_THROW(retrieve_classical(spec, two), InsufficientSharesError);
  const std::vector<Share> repeated{{0, 1}, {0, 1}, {2, 3}};
  EXPECT_THROW(retrieve_classical(spec, repeated), std::invalid_argument);
  const std::vector<int> c{1, 2};
  auto evals = spec.evaluate(c, 4);
  std::vector<Share> all;
  for (int j = 0; j < 5; ++j) all.push_back({j, evals[static_cast<std::size_t>(j)]});
  EXPECT_EQ(retrieve_classical(spec, all), 4);
  all[4].value = (all[4].value + 1) % 5;
  EXPECT_THROW(retrieve_classical(spec, all), InconsistentSharesError);
  evals[4] = (evals[4] + 1) % 5;
  EXPECT_FALSE(spec.decode_branch(evals).has_value());
}

TEST(CodeSpec, JsonRoundTrip) {
  const CodeSpec spec(3, 5);
  EXPECT_EQ(code_from_json(code_to_json(spec)), spec);
  EXPECT_EQ(relations_to_json(verify_code_relations(spec)).at("all_pass"), true);
}

}  // namespace
}  // namespace qcarrier
