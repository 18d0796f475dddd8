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

#include <span>
#include <stdexcept>
#include <vector>

#include "json.hpp"
#include "qcarrier/qudit_state.hpp"

namespace qcarrier {

class InsufficientSharesError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class InconsistentSharesError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class NotEigenstateError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// ---------------------------------------------------------------------------
// Arithmetic over Z_p

bool is_prime(int n);

/// Representative of value in [0, p).
int mod_p(long long value, int p);

/// base^exp mod p with 0^0 = 1.
int pow_mod(long long base, long long exp, int p);

/// a^{-1} mod p via a^{p-2}; throws for a ≡ 0.
int inverse_mod(long long a, int p);

/// S_k(p) = Σ_{j=1}^{p-1} j^k mod p by direct summation.
int power_sum(int k, int p);

/// S_{m-1}(p) from the binomial recursion
///   S_{m-1} = -(1/m) Σ_{r=1}^{m-2} C(m,r) S_r,  S_1 = p(p-1)/2,
/// valid for 3 <= m <= p-1.
int power_sum_by_recursion(int m, int p);

/// (e_l)_j = j^l mod n for j = 0..n-1, with 0^0 = 1.
std::vector<int> basis_vector(int l, int n);

int dot_mod(std::span<const int> a, std::span<const int> b, int n);

// ---------------------------------------------------------------------------
// Threshold code

/// (k, n) polynomial code over Z_n: shares are evaluations of
/// P(x) = c_0 + c_1 x + ... + c_{k-2} x^{k-2} + s x^{k-1} at x = 0..n-1.
class CodeSpec {
 public:
  /// n odd prime, 2 <= k <= (n+1)/2.
  CodeSpec(int k, int n);

  /// The canonical (k, 2k-1) code.
  static CodeSpec threshold(int k) { return CodeSpec(k, 2 * k - 1); }

  int k() const { return k_; }
  int n() const { return n_; }
  int dimension() const { return n_; }

  /// e_0 ... e_{k-1}; e_{k-1} is the special vector e.
  const std::vector<std::vector<int>>& basis() const { return basis_; }
  const std::vector<int>& special() const { return basis_.back(); }

  /// Evaluations (P_{c,s}(0), ..., P_{c,s}(n-1)); c has k-1 entries.
  std::vector<int> evaluate(std::span<const int> c, int s) const;

  /// Leading coefficient of the unique degree-(k-1) polynomial through a
  /// full evaluation tuple; nullopt when the tuple is not a codeword branch.
  std::optional<int> decode_branch(std::span<const int> evaluations) const;

  bool operator==(const CodeSpec&) const = default;

 private:
  int k_;
  int n_;
  std::vector<std::vector<int>> basis_;
};

nlohmann::json code_to_json(const CodeSpec& spec);
CodeSpec code_from_json(const nlohmann::json& j);

struct RelationEntry {
  int i;
  int j;
  int value;
  int expected;
  bool pass;
};

struct RelationReport {
  int k;
  int n;
  std::vector<RelationEntry> entries;

  bool all_pass() const;
};

/// Every inner product e_i · e_j mod n against the orthogonality table:
/// 0 except e·e = n - 1.
RelationReport verify_code_relations(const CodeSpec& spec);
nlohmann::json relations_to_json(const RelationReport& report);

struct Codeword {
  int symbol;
  QuditState state;
};

/// |s̄⟩ = n^{-(k-1)/2} Σ_c |P_{c,s}(0), ..., P_{c,s}(n-1)⟩ on wires
/// labelled prefix_1..prefix_n.
Codeword encode_codeword(const CodeSpec& spec, int s, std::string_view prefix = "player");

/// Σ_s amplitudes[s] |s̄⟩
QuditState encode_logical(const CodeSpec& spec, std::span<const Amplitude> amplitudes,
                          std::string_view prefix = "player");

/// (2,3) encoding circuit: Fourier + two CNOTs give (1/√3)Σ|c,c,c⟩, then
/// (I ⊗ X ⊗ X²)^s.
Codeword encode_via_circuit_23(int s);

/// Z^{z_powers[j]} on wire j; z_powers = e.
struct LogicalZ {
  std::vector<int> z_powers;
};

LogicalZ logical_z(const CodeSpec& spec);

/// Eigenphase of the logical Z on a codeword (ω^{-s}); throws
/// NotEigenstateError if the branch phases disagree by more than 1e-10.
Amplitude check_logical_z(const CodeSpec& spec, const QuditState& codeword);

struct CodeStateResiduals {
  double orthonormality;   // max |⟨ā|b̄⟩ − δ_ab|
  double fourier_closure;  // max_s ‖F^{⊗n}|s̄⟩ − n^{-1/2} Σ_x ω^{-sx}|x̄⟩‖
};

/// State-level checks behind the code relations; both residuals vanish
/// when n = 2k - 1.
CodeStateResiduals code_state_residuals(const CodeSpec& spec);

/// Eigenphase of Z_a^{-1} Z_b.
Amplitude pairwise_z_phase(const QuditState& state, int wire_a, int wire_b);

/// k = 2 only: any pair (a, b) recovers s from ω^{s(b-a)}.
int retrieve_by_phase_pair(const CodeSpec& spec, const QuditState& codeword, int wire_a,
                           int wire_b);

struct Share {
  int position;  // evaluation point in Z_n
  int value;
};

/// Lagrange interpolation over Z_n: leading coefficient of the degree-(k-1)
/// polynomial through the shares. Extra shares must agree with it.
int retrieve_classical(const CodeSpec& spec, std::span<const Share> shares);

}  // namespace qcarrier
