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

#include "qcarrier/modular_codes.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <set>
#include <string>

namespace qcarrier {

bool is_prime(int n) {
  if (n < 2) return false;
  for (int f = 2; static_cast<long long>(f) * f <= n; ++f) {
    if (n % f == 0) return false;
  }
  return true;
}

int mod_p(long long value, int p) {
  const long long r = value % p;
  return static_cast<int>(r < 0 ? r + p : r);
}

int pow_mod(long long base, long long exp, int p) {
  if (exp < 0) throw std::invalid_argument("pow_mod: negative exponent");
  long long result = 1 % p;
  long long b = mod_p(base, p);
  while (exp > 0) {
    if (exp & 1) result = result * b % p;
    b = b * b % p;
    exp >>= 1;
  }
  return static_cast<int>(result);
}

int inverse_mod(long long a, int p) {
  if (mod_p(a, p) == 0) throw std::domain_error("inverse_mod: zero has no inverse");
  return pow_mod(a, p - 2, p);
}

namespace {

void require_odd_prime(int p, const char* what) {
  if (p < 3 || !is_prime(p)) {
    throw std::invalid_argument(std::string(what) + ": " + std::to_string(p) +
                                " is not an odd prime");
  }
}

}  // namespace

int power_sum(int k, int p) {
  require_odd_prime(p, "power_sum");
  if (k < 1) throw std::invalid_argument("power_sum: k must be >= 1");
  long long total = 0;
  for (int j = 1; j < p; ++j) total += pow_mod(j, k, p);
  return mod_p(total, p);
}

int power_sum_by_recursion(int m, int p) {
  require_odd_prime(p, "power_sum_by_recursion");
  if (m < 3 || m > p - 1) {
    throw std::out_of_range("power_sum_by_recursion: m = " + std::to_string(m) +
                            " outside the window 3 <= m <= p-1 (m = p makes 1/m vanish)");
  }
  // sums[r] = S_r(p); row = C(mm, ·) mod p.
  std::vector<int> sums(static_cast<std::size_t>(m), 0);
  sums[1] = mod_p(static_cast<long long>(p) * (p - 1) / 2, p);
  std::vector<int> row{1, 1};
  for (int mm = 2; mm <= m; ++mm) {
    std::vector<int> next(static_cast<std::size_t>(mm) + 1, 1);
    for (int r = 1; r < mm; ++r) {
      next[static_cast<std::size_t>(r)] =
          mod_p(row[static_cast<std::size_t>(r) - 1] + row[static_cast<std::size_t>(r)], p);
    }
    row = std::move(next);
    if (mm < 3) continue;
    long long acc = 0;
    for (int r = 1; r <= mm - 2; ++r) {
      acc += static_cast<long long>(row[static_cast<std::size_t>(r)]) * sums[static_cast<std::size_t>(r)];
    }
    sums[static_cast<std::size_t>(mm) - 1] =
        mod_p(-static_cast<long long>(inverse_mod(mm, p)) * mod_p(acc, p), p);
  }
  return sums[static_cast<std::size_t>(m) - 1];
}

std::vector<int> basis_vector(int l, int n) {
  if (n < 2 || !is_prime(n)) throw std::invalid_argument("basis_vector: n must be prime");
  if (l < 0 || l >= n) throw std::out_of_range("basis_vector: l outside [0, n)");
  std::vector<int> e(static_cast<std::size_t>(n));
  for (int j = 0; j < n; ++j) e[static_cast<std::size_t>(j)] = pow_mod(j, l, n);
  return e;
}

int dot_mod(std::span<const int> a, std::span<const int> b, int n) {
  if (a.size() != b.size()) throw std::invalid_argument("dot_mod: length mismatch");
  long long total = 0;
  for (std::size_t i = 0; i < a.size(); ++i) total += static_cast<long long>(a[i]) * b[i] % n;
  return mod_p(total, n);
}

// ---------------------------------------------------------------------------
// CodeSpec

CodeSpec::CodeSpec(int k, int n) : k_(k), n_(n) {
  require_odd_prime(n, "CodeSpec");
  if (k < 2) throw std::invalid_argument("CodeSpec: threshold k must be >= 2");
  if (2 * k > n + 1) {
    throw std::invalid_argument("CodeSpec: k = " + std::to_string(k) + " exceeds (n+1)/2 for n = " +
                                std::to_string(n));
  }
  for (int l = 0; l < k; ++l) basis_.push_back(basis_vector(l, n));
}

std::vector<int> CodeSpec::evaluate(std::span<const int> c, int s) const {
  if (static_cast<int>(c.size()) != k_ - 1) throw std::invalid_argument("CodeSpec::evaluate: need k-1 coefficients");
  std::vector<int> out(static_cast<std::size_t>(n_));
  for (int j = 0; j < n_; ++j) {
    long long v = static_cast<long long>(s) * basis_.back()[static_cast<std::size_t>(j)];
    for (int l = 0; l < k_ - 1; ++l) {
      v += static_cast<long long>(c[static_cast<std::size_t>(l)]) * basis_[static_cast<std::size_t>(l)][static_cast<std::size_t>(j)];
    }
    out[static_cast<std::size_t>(j)] = mod_p(v, n_);
  }
  return out;
}

std::optional<int> CodeSpec::decode_branch(std::span<const int> evaluations) const {
  if (static_cast<int>(evaluations.size()) != n_) {
    throw std::invalid_argument("CodeSpec::decode_branch: need n evaluations");
  }
  std::vector<Share> shares;
  for (int j = 0; j < n_; ++j) shares.push_back({j, evaluations[static_cast<std::size_t>(j)]});
  try {
    return retrieve_classical(*this, shares);
  } catch (const InconsistentSharesError&) {
    return std::nullopt;
  }
}

nlohmann::json code_to_json(const CodeSpec& spec) {
  return {{"k", spec.k()}, {"n", spec.n()}, {"basis", spec.basis()}};
}

CodeSpec code_from_json(const nlohmann::json& j) {
  CodeSpec spec(j.at("k").get<int>(), j.at("n").get<int>());
  if (j.contains("basis") && j.at("basis").get<std::vector<std::vector<int>>>() != spec.basis()) {
    throw std::invalid_argument("code_from_json: basis does not match the canonical construction");
  }
  return spec;
}

bool RelationReport::all_pass() const {
  for (const auto& e : entries) {
    if (!e.pass) return false;
  }
  return true;
}

RelationReport verify_code_relations(const CodeSpec& spec) {
  RelationReport report{spec.k(), spec.n(), {}};
  const int special = spec.k() - 1;
  for (int i = 0; i < spec.k(); ++i) {
    for (int j = 0; j < spec.k(); ++j) {
      const int value = dot_mod(spec.basis()[static_cast<std::size_t>(i)],
                                spec.basis()[static_cast<std::size_t>(j)], spec.n());
      const int expected = (i == special && j == special) ? spec.n() - 1 : 0;
      report.entries.push_back({i, j, value, expected, value == expected});
    }
  }
  return report;
}

nlohmann::json relations_to_json(const RelationReport& report) {
  nlohmann::json rows = nlohmann::json::array();
  for (const auto& e : report.entries) {
    rows.push_back({{"i", e.i}, {"j", e.j}, {"value", e.value}, {"expected", e.expected}, {"pass", e.pass}});
  }
  return {{"k", report.k}, {"n", report.n}, {"relations", rows}, {"all_pass", report.all_pass()}};
}

// ---------------------------------------------------------------------------
// Codewords

Codeword encode_codeword(const CodeSpec& spec, int s, std::string_view prefix) {
  if (s < 0 || s >= spec.n()) throw std::out_of_range("encode_codeword: symbol outside Z_n");
  QuditState state(RegisterLayout::numbered(spec.n(), spec.n(), prefix));
  const double amp = std::pow(static_cast<double>(spec.n()), -0.5 * (spec.k() - 1));
  std::vector<int> c(static_cast<std::size_t>(spec.k() - 1), 0);
  while (true) {
    state.set(spec.evaluate(c, s), amp);
    std::size_t pos = 0;
    while (pos < c.size() && ++c[pos] == spec.n()) c[pos++] = 0;
    if (pos == c.size()) break;
  }
  return {s, std::move(state)};
}

QuditState encode_logical(const CodeSpec& spec, std::span<const Amplitude> amplitudes,
                          std::string_view prefix) {
  if (static_cast<int>(amplitudes.size()) != spec.n()) {
    throw std::invalid_argument("encode_logical: need one amplitude per symbol");
  }
  QuditState out(RegisterLayout::numbered(spec.n(), spec.n(), prefix));
  for (int s = 0; s < spec.n(); ++s) {
    const Amplitude a = amplitudes[static_cast<std::size_t>(s)];
    if (a == Amplitude{}) continue;
    encode_codeword(spec, s, prefix).state.for_each_term([&](const Digits& d, Amplitude v) { out.add(d, a * v); });
  }
  out.normalize();
  return out;
}

Codeword encode_via_circuit_23(int s) {
  if (s < 0 || s > 2) throw std::out_of_range("encode_via_circuit_23: symbol outside Z_3");
  QuditState state = basis_state(RegisterLayout::numbered(3, 3, "player"), {0, 0, 0});
  state = apply_fourier(std::move(state), 0);
  state = apply_cnot(std::move(state), 0, 1);
  state = apply_cnot(std::move(state), 0, 2);
  state = apply_pauli(std::move(state), 1, s, 0);
  state = apply_pauli(std::move(state), 2, 2 * s, 0);
  return {s, std::move(state)};
}

LogicalZ logical_z(const CodeSpec& spec) { return {spec.special()}; }

Amplitude check_logical_z(const CodeSpec& spec, const QuditState& codeword) {
  if (codeword.wire_count() != spec.n() || codeword.dimension() != spec.n()) {
    throw std::invalid_argument("check_logical_z: register does not match the code");
  }
  const auto z = logical_z(spec);
  QuditState rotated = codeword;
  for (int j = 0; j < spec.n(); ++j) rotated = apply_pauli(std::move(rotated), j, 0, z.z_powers[static_cast<std::size_t>(j)]);

  std::optional<Amplitude> phase;
  codeword.for_each_term([&](const Digits& d, Amplitude a) {
    if (std::abs(a) < kPruneEpsilon) return;
    const Amplitude ratio = rotated.amplitude(d) / a;
    if (!phase) {
      phase = ratio;
    } else if (std::abs(ratio - *phase) > 1e-10) {
      throw NotEigenstateError("check_logical_z: branch phases disagree");
    }
  });
  if (!phase) throw std::invalid_argument("check_logical_z: zero state");
  return *phase;
}

Amplitude pairwise_z_phase(const QuditState& state, int wire_a, int wire_b) {
  QuditState rotated = apply_pauli(state, wire_a, 0, -1);
  rotated = apply_pauli(std::move(rotated), wire_b, 0, 1);
  return inner_product(state, rotated) / state.squared_norm();
}

int retrieve_by_phase_pair(const CodeSpec& spec, const QuditState& codeword, int wire_a,
                           int wire_b) {
  if (spec.k() != 2) throw std::invalid_argument("retrieve_by_phase_pair: requires k = 2");
  if (wire_a == wire_b) throw std::invalid_argument("retrieve_by_phase_pair: need two distinct players");
  const Amplitude phase = pairwise_z_phase(codeword, wire_a, wire_b);
  if (std::abs(std::abs(phase) - 1.0) > 1e-10) {
    throw NotEigenstateError("retrieve_by_phase_pair: state is not a pairwise-Z eigenstate");
  }
  const int d = spec.n();
  const double turns = std::arg(phase) / (2.0 * std::numbers::pi) * d;
  const int exponent = mod_p(std::llround(turns), d);
  return mod_p(static_cast<long long>(exponent) * inverse_mod(wire_b - wire_a, d), d);
}

int retrieve_classical(const CodeSpec& spec, std::span<const Share> shares) {
  const int n = spec.n();
  const int k = spec.k();
  if (static_cast<int>(shares.size()) < k) {
    throw InsufficientSharesError("retrieve_classical: " + std::to_string(shares.size()) +
                                  " shares, threshold is " + std::to_string(k));
  }
  std::set<int> positions;
  for (const auto& sh : shares) {
    if (sh.position < 0 || sh.position >= n || sh.value < 0 || sh.value >= n) {
      throw std::out_of_range("retrieve_classical: share outside Z_n");
    }
    if (!positions.insert(sh.position).second) {
      throw std::invalid_argument("retrieve_classical: repeated position");
    }
  }
  const auto basis = shares.first(static_cast<std::size_t>(k));

  // denominators[i] = Π_{j≠i} (x_i − x_j)
  std::vector<int> inv_denominators(basis.size());
  for (std::size_t i = 0; i < basis.size(); ++i) {
    long long den = 1;
    for (std::size_t j = 0; j < basis.size(); ++j) {
      if (i != j) den = den * mod_p(basis[i].position - basis[j].position, n) % n;
    }
    inv_denominators[i] = inverse_mod(den, n);
  }

  long long lead = 0;
  for (std::size_t i = 0; i < basis.size(); ++i) {
    lead += static_cast<long long>(basis[i].value) * inv_denominators[i] % n;
  }

  for (std::size_t extra = basis.size(); extra < shares.size(); ++extra) {
    const int x = shares[extra].position;
    long long value = 0;
    for (std::size_t i = 0; i < basis.size(); ++i) {
      long long term = static_cast<long long>(basis[i].value) * inv_denominators[i] % n;
      for (std::size_t j = 0; j < basis.size(); ++j) {
        if (i != j) term = term * mod_p(x - basis[j].position, n) % n;
      }
      value += term;
    }
    if (mod_p(value, n) != shares[extra].value) {
      throw InconsistentSharesError("retrieve_classical: share at position " + std::to_string(x) +
                                    " disagrees with the interpolating polynomial");
    }
  }
  return mod_p(lead, n);
}

CodeStateResiduals code_state_residuals(const CodeSpec& spec) {
  const int n = spec.n();
  std::vector<QuditState> words;
  for (int s = 0; s < n; ++s) words.push_back(encode_codeword(spec, s).state);
  CodeStateResiduals r{0.0, 0.0};
  for (int a = 0; a < n; ++a) {
    for (int b = 0; b < n; ++b) {
      const Amplitude overlap = inner_product(words[static_cast<std::size_t>(a)], words[static_cast<std::size_t>(b)]);
      r.orthonormality = std::max(r.orthonormality, std::abs(overlap - (a == b ? 1.0 : 0.0)));
    }
  }
  const double scale = 1.0 / std::sqrt(static_cast<double>(n));
  for (int s = 0; s < n; ++s) {
    QuditState f = words[static_cast<std::size_t>(s)];
    for (int w = 0; w < n; ++w) f = apply_fourier(std::move(f), w);
    QuditState expected(f.layout());
    for (int x = 0; x < n; ++x) {
      const Amplitude phase = scale * root_of_unity(n, -static_cast<long long>(s) * x);
      words[static_cast<std::size_t>(x)].for_each_term([&](const Digits& d, Amplitude v) { expected.add(d, phase * v); });
    }
    double gap = 0.0;
    f.for_each_term([&](const Digits& d, Amplitude v) { gap += std::norm(v - expected.amplitude(d)); });
    expected.for_each_term([&](const Digits& d, Amplitude v) {
      if (f.amplitude(d) == Amplitude{}) gap += std::norm(v);
    });
    r.fourier_closure = std::max(r.fourier_closure, std::sqrt(gap));
  }
  return r;
}

}  // namespace qcarrier
