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

#include "qcarrier/qudit_state.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <set>

#include "qcarrier/density_matrix.hpp"

namespace qcarrier {

namespace {

int mod_d(long long value, int d) {
  long long r = value % d;
  return static_cast<int>(r < 0 ? r + d : r);
}

void check_wire(const QuditState& state, int wire, const char* what) {
  if (wire < 0 || wire >= state.wire_count()) {
    throw std::out_of_range(std::string(what) + ": wire " + std::to_string(wire) +
                            " out of range for " + std::to_string(state.wire_count()) +
                            " wires");
  }
}

void check_wires(const QuditState& state, std::span<const int> wires, const char* what) {
  std::set<int> seen;
  for (int w : wires) {
    check_wire(state, w, what);
    if (!seen.insert(w).second) {
      throw std::invalid_argument(std::string(what) + ": repeated wire " + std::to_string(w));
    }
  }
}

Digits gather(const Digits& digits, std::span<const int> wires) {
  Digits out;
  out.reserve(wires.size());
  for (int w : wires) out.push_back(digits[static_cast<std::size_t>(w)]);
  return out;
}

std::vector<int> complement(int wire_count, std::span<const int> wires) {
  std::vector<bool> taken(static_cast<std::size_t>(wire_count), false);
  for (int w : wires) taken[static_cast<std::size_t>(w)] = true;
  std::vector<int> rest;
  for (int w = 0; w < wire_count; ++w) {
    if (!taken[static_cast<std::size_t>(w)]) rest.push_back(w);
  }
  return rest;
}

// Applies a basis permutation with a per-basis phase. `map` rewrites the
// digits in place and returns the phase factor.
template <class Map>
QuditState apply_basis_map(const QuditState& state, Map&& map) {
  QuditState out(state.layout(), state.backend());
  Digits scratch;
  state.for_each_term([&](const Digits& digits, Amplitude amp) {
    scratch = digits;
    const Amplitude phase = map(scratch);
    out.add(scratch, amp * phase);
  });
  return out;
}

}  // namespace

// ---------------------------------------------------------------------------
// RegisterLayout

RegisterLayout::RegisterLayout(int dimension, std::vector<std::string> labels)
    : dimension_(dimension), labels_(std::move(labels)) {
  if (dimension_ < 2) throw std::invalid_argument("RegisterLayout: dimension must be >= 2");
  if (labels_.empty()) throw std::invalid_argument("RegisterLayout: need at least one wire");
  std::set<std::string> unique;
  for (const auto& l : labels_) {
    if (l.empty()) throw std::invalid_argument("RegisterLayout: empty wire label");
    if (!unique.insert(l).second) {
      throw std::invalid_argument("RegisterLayout: duplicate wire label '" + l + "'");
    }
  }
}

RegisterLayout RegisterLayout::numbered(int dimension, int count, std::string_view prefix) {
  std::vector<std::string> labels;
  for (int i = 1; i <= count; ++i) labels.push_back(std::string(prefix) + "_" + std::to_string(i));
  return RegisterLayout(dimension, std::move(labels));
}

const std::string& RegisterLayout::label(int wire) const {
  if (wire < 0 || wire >= wire_count()) throw std::out_of_range("RegisterLayout: bad wire");
  return labels_[static_cast<std::size_t>(wire)];
}

std::optional<int> RegisterLayout::find(std::string_view label) const {
  for (std::size_t i = 0; i < labels_.size(); ++i) {
    if (labels_[i] == label) return static_cast<int>(i);
  }
  return std::nullopt;
}

int RegisterLayout::wire(std::string_view label) const {
  auto w = find(label);
  if (!w) throw std::out_of_range("RegisterLayout: no wire labelled '" + std::string(label) + "'");
  return *w;
}

std::size_t RegisterLayout::total_dimension() const {
  std::size_t total = 1;
  constexpr std::size_t limit = std::size_t{1} << 62;
  for (int i = 0; i < wire_count(); ++i) {
    total *= static_cast<std::size_t>(dimension_);
    if (total > limit) throw std::overflow_error("RegisterLayout: total dimension overflow");
  }
  return total;
}

RegisterLayout RegisterLayout::concat(const RegisterLayout& other) const {
  if (other.dimension_ != dimension_) {
    throw std::invalid_argument("RegisterLayout: dimension mismatch (" + std::to_string(dimension_) +
                                " vs " + std::to_string(other.dimension_) + ")");
  }
  std::vector<std::string> labels = labels_;
  labels.insert(labels.end(), other.labels_.begin(), other.labels_.end());
  return RegisterLayout(dimension_, std::move(labels));
}

RegisterLayout RegisterLayout::select(std::span<const int> wires) const {
  std::vector<std::string> labels;
  for (int w : wires) labels.push_back(label(w));
  return RegisterLayout(dimension_, std::move(labels));
}

// ---------------------------------------------------------------------------
// QuditState

QuditState::QuditState(RegisterLayout layout, Backend backend)
    : layout_(std::move(layout)), backend_(backend) {
  if (backend_ == Backend::dense) {
    const std::size_t total = layout_.total_dimension();
    if (total > kDenseDimensionCap) {
      throw std::length_error("QuditState: dense backend capped at 2^24 amplitudes");
    }
    dense_ = Eigen::VectorXcd::Zero(static_cast<Eigen::Index>(total));
  }
}

void QuditState::check_digits(const Digits& digits) const {
  if (static_cast<int>(digits.size()) != wire_count()) {
    throw std::invalid_argument("QuditState: digit tuple has length " +
                                std::to_string(digits.size()) + ", expected " +
                                std::to_string(wire_count()));
  }
  for (int v : digits) {
    if (v < 0 || v >= dimension()) {
      throw std::out_of_range("QuditState: digit " + std::to_string(v) + " outside [0, " +
                              std::to_string(dimension()) + ")");
    }
  }
}

std::size_t QuditState::encode_index(const Digits& digits) const {
  std::size_t index = 0;
  for (int v : digits) index = index * static_cast<std::size_t>(dimension()) + static_cast<std::size_t>(v);
  return index;
}

void QuditState::decode_index(std::size_t index, Digits& digits) const {
  digits.resize(static_cast<std::size_t>(wire_count()));
  const auto d = static_cast<std::size_t>(dimension());
  for (int w = wire_count() - 1; w >= 0; --w) {
    digits[static_cast<std::size_t>(w)] = static_cast<int>(index % d);
    index /= d;
  }
}

Amplitude QuditState::amplitude(const Digits& digits) const {
  check_digits(digits);
  if (backend_ == Backend::dense) return dense_[static_cast<Eigen::Index>(encode_index(digits))];
  auto it = sparse_.find(digits);
  return it == sparse_.end() ? Amplitude{} : it->second;
}

void QuditState::set(const Digits& digits, Amplitude value) {
  check_digits(digits);
  if (backend_ == Backend::dense) {
    dense_[static_cast<Eigen::Index>(encode_index(digits))] = value;
  } else if (value == Amplitude{}) {
    sparse_.erase(digits);
  } else {
    sparse_[digits] = value;
  }
}

void QuditState::add(const Digits& digits, Amplitude value) {
  if (backend_ == Backend::dense) {
    check_digits(digits);
    dense_[static_cast<Eigen::Index>(encode_index(digits))] += value;
    return;
  }
  check_digits(digits);
  sparse_[digits] += value;
}

std::size_t QuditState::nonzero_count() const {
  if (backend_ == Backend::sparse) {
    return static_cast<std::size_t>(std::count_if(
        sparse_.begin(), sparse_.end(), [](const auto& kv) { return kv.second != Amplitude{}; }));
  }
  return static_cast<std::size_t>((dense_.array() != Amplitude{}).count());
}

double QuditState::squared_norm() const {
  double total = 0.0;
  for_each_term([&](const Digits&, Amplitude a) { total += std::norm(a); });
  return total;
}

double QuditState::norm() const { return std::sqrt(squared_norm()); }

void QuditState::normalize() {
  const double n = norm();
  if (n == 0.0) throw std::domain_error("QuditState: cannot normalize the zero vector");
  if (backend_ == Backend::dense) {
    dense_ /= n;
  } else {
    for (auto& kv : sparse_) kv.second /= n;
  }
}

void QuditState::prune(double epsilon) {
  if (backend_ == Backend::dense) {
    for (Eigen::Index i = 0; i < dense_.size(); ++i) {
      if (std::abs(dense_[i]) < epsilon) dense_[i] = Amplitude{};
    }
    return;
  }
  std::erase_if(sparse_, [epsilon](const auto& kv) { return std::abs(kv.second) < epsilon; });
}

std::vector<std::pair<Digits, Amplitude>> QuditState::terms() const {
  std::vector<std::pair<Digits, Amplitude>> out;
  for_each_term([&](const Digits& d, Amplitude a) {
    if (a != Amplitude{}) out.emplace_back(d, a);
  });
  return out;
}

QuditState QuditState::with_backend(Backend backend) const {
  QuditState out(layout_, backend);
  for_each_term([&](const Digits& d, Amplitude a) { out.set(d, a); });
  return out;
}

QuditState QuditState::relabeled(std::vector<std::string> labels) const {
  RegisterLayout layout(dimension(), std::move(labels));
  if (layout.wire_count() != wire_count()) {
    throw std::invalid_argument("QuditState::relabeled: label count mismatch");
  }
  QuditState out = *this;
  out.layout_ = std::move(layout);
  return out;
}

// ---------------------------------------------------------------------------
// Gates

Amplitude root_of_unity(int d, long long power) {
  const int m = mod_d(power, d);
  if (m == 0) return {1.0, 0.0};
  if (4LL * m == d) return {0.0, 1.0};
  if (2LL * m == d) return {-1.0, 0.0};
  if (4LL * m == 3LL * d) return {0.0, -1.0};
  return std::polar(1.0, 2.0 * std::numbers::pi * m / d);
}

QuditState basis_state(const RegisterLayout& layout, const Digits& digits, Backend backend) {
  QuditState out(layout, backend);
  out.set(digits, 1.0);
  return out;
}

QuditState superposition(const RegisterLayout& layout,
                         std::span<const std::pair<Digits, Amplitude>> branches,
                         Backend backend) {
  QuditState out(layout, backend);
  for (const auto& [digits, amp] : branches) out.add(digits, amp);
  out.normalize();
  return out;
}

QuditState tensor(const QuditState& a, const QuditState& b) {
  const Backend backend =
      (a.backend() == Backend::dense && b.backend() == Backend::dense) ? Backend::dense
                                                                       : Backend::sparse;
  QuditState out(a.layout().concat(b.layout()), backend);
  const auto right = b.terms();
  Digits joined;
  a.for_each_term([&](const Digits& da, Amplitude aa) {
    for (const auto& [db, ab] : right) {
      joined = da;
      joined.insert(joined.end(), db.begin(), db.end());
      out.set(joined, aa * ab);
    }
  });
  return out;
}

QuditState apply_cnot(QuditState state, int control, int target, int power) {
  check_wire(state, control, "apply_cnot");
  check_wire(state, target, "apply_cnot");
  if (control == target) throw std::invalid_argument("apply_cnot: control equals target");
  const int d = state.dimension();
  if (power < 0 || power >= d) throw std::out_of_range("apply_cnot: power outside [0, d)");
  if (power == 0) return state;
  const auto c = static_cast<std::size_t>(control);
  const auto t = static_cast<std::size_t>(target);
  return apply_basis_map(state, [&](Digits& digits) {
    digits[t] = mod_d(digits[t] + static_cast<long long>(power) * digits[c], d);
    return Amplitude{1.0, 0.0};
  });
}

QuditState apply_inverse_cnot(QuditState state, int control, int target, int power) {
  check_wire(state, control, "apply_inverse_cnot");
  check_wire(state, target, "apply_inverse_cnot");
  if (control == target) throw std::invalid_argument("apply_inverse_cnot: control equals target");
  const int d = state.dimension();
  if (power < 0 || power >= d) throw std::out_of_range("apply_inverse_cnot: power outside [0, d)");
  if (power == 0) return state;
  const auto c = static_cast<std::size_t>(control);
  const auto t = static_cast<std::size_t>(target);
  return apply_basis_map(state, [&](Digits& digits) {
    digits[t] = mod_d(digits[t] - static_cast<long long>(power) * digits[c], d);
    return Amplitude{1.0, 0.0};
  });
}

QuditState apply_pauli(QuditState state, int wire, int x_power, int z_power) {
  check_wire(state, wire, "apply_pauli");
  const int d = state.dimension();
  const int x = mod_d(x_power, d);
  const int z = mod_d(z_power, d);
  if (x == 0 && z == 0) return state;
  const auto w = static_cast<std::size_t>(wire);
  return apply_basis_map(state, [&](Digits& digits) {
    digits[w] = mod_d(digits[w] + x, d);
    return root_of_unity(d, static_cast<long long>(z) * digits[w]);
  });
}

QuditState apply_fourier(QuditState state, int wire, bool conjugated) {
  check_wire(state, wire, "apply_fourier");
  const int d = state.dimension();
  const auto w = static_cast<std::size_t>(wire);
  const double scale = 1.0 / std::sqrt(static_cast<double>(d));
  const int sign = conjugated ? -1 : 1;
  QuditState out(state.layout(), state.backend());
  Digits scratch;
  state.for_each_term([&](const Digits& digits, Amplitude amp) {
    scratch = digits;
    const int j = digits[w];
    for (int k = 0; k < d; ++k) {
      scratch[w] = k;
      out.add(scratch, amp * root_of_unity(d, static_cast<long long>(sign) * j * k) * scale);
    }
  });
  out.prune();
  return out;
}

Amplitude inner_product(const QuditState& a, const QuditState& b) {
  if (a.dimension() != b.dimension() || a.wire_count() != b.wire_count()) {
    throw std::invalid_argument("inner_product: layout mismatch");
  }
  Amplitude total{};
  if (a.backend() == Backend::sparse && b.backend() == Backend::sparse &&
      a.nonzero_count() > b.nonzero_count()) {
    b.for_each_term([&](const Digits& d, Amplitude bb) { total += std::conj(a.amplitude(d)) * bb; });
    return total;
  }
  a.for_each_term([&](const Digits& d, Amplitude aa) { total += std::conj(aa) * b.amplitude(d); });
  return total;
}

double fidelity(const QuditState& a, const QuditState& b) {
  return std::min(1.0, std::abs(inner_product(a, b)));
}

// ---------------------------------------------------------------------------
// Measurement and wire surgery

std::map<Digits, double> outcome_distribution(const QuditState& state,
                                              std::span<const int> wires) {
  check_wires(state, wires, "outcome_distribution");
  std::map<Digits, double> dist;
  state.for_each_term(
      [&](const Digits& digits, Amplitude amp) { dist[gather(digits, wires)] += std::norm(amp); });
  return dist;
}

MeasurementResult measure_computational(const QuditState& state, std::span<const int> wires,
                                        Rng& rng) {
  const auto dist = outcome_distribution(state, wires);
  double total = 0.0;
  for (const auto& kv : dist) total += kv.second;
  if (total <= 0.0) throw std::domain_error("measure_computational: zero-norm state");
  const double u = rng.uniform() * total;
  double cumulative = 0.0;
  const Digits* chosen = nullptr;
  double weight = 0.0;
  for (const auto& [outcome, p] : dist) {
    if (p <= 0.0) continue;
    cumulative += p;
    chosen = &outcome;
    weight = p;
    if (u < cumulative) break;
  }
  if (chosen == nullptr) throw std::domain_error("measure_computational: empty distribution");

  QuditState post(state.layout(), state.backend());
  state.for_each_term([&](const Digits& digits, Amplitude amp) {
    if (gather(digits, wires) == *chosen) post.set(digits, amp);
  });
  if (post.squared_norm() == 0.0) {
    throw std::logic_error("measure_computational: zero-norm projection");
  }
  post.normalize();
  return {*chosen, std::move(post), weight / total};
}

MeasurementResult measure_computational(const QuditState& state, std::span<const int> wires,
                                        std::uint64_t rng_seed) {
  Rng rng(rng_seed);
  return measure_computational(state, wires, rng);
}

QuditState drop_definite_wires(const QuditState& state, std::span<const int> wires) {
  check_wires(state, wires, "drop_definite_wires");
  const auto keep = complement(state.wire_count(), wires);
  if (keep.empty()) throw std::invalid_argument("drop_definite_wires: cannot drop every wire");
  std::optional<Digits> value;
  QuditState out(state.layout().select(keep), state.backend());
  state.for_each_term([&](const Digits& digits, Amplitude amp) {
    Digits dropped = gather(digits, wires);
    if (!value) value = dropped;
    if (dropped != *value) {
      throw EntangledCutError("drop_definite_wires: wires are not in a single basis state");
    }
    out.set(gather(digits, keep), amp);
  });
  return out;
}

QuditState permute_wires(const QuditState& state, std::span<const int> order) {
  check_wires(state, order, "permute_wires");
  if (static_cast<int>(order.size()) != state.wire_count()) {
    throw std::invalid_argument("permute_wires: order must list every wire once");
  }
  QuditState out(state.layout().select(order), state.backend());
  state.for_each_term([&](const Digits& digits, Amplitude amp) { out.set(gather(digits, order), amp); });
  return out;
}

ProductFactors split_product(const QuditState& state, std::span<const int> wires,
                             double max_purity_deficit) {
  check_wires(state, wires, "split_product");
  const auto rest_wires = complement(state.wire_count(), wires);
  if (wires.empty() || rest_wires.empty()) {
    throw std::invalid_argument("split_product: both sides of the cut must be nonempty");
  }
  const double norm2 = state.squared_norm();
  const double purity = partial_trace(state, wires).purity() / (norm2 * norm2);
  if (1.0 - purity > max_purity_deficit) {
    throw EntangledCutError("split_product: purity deficit " + std::to_string(1.0 - purity) +
                            " across the cut");
  }

  Digits pivot_rest;
  Digits pivot_factor;
  double best = -1.0;
  state.for_each_term([&](const Digits& digits, Amplitude amp) {
    if (std::abs(amp) > best) {
      best = std::abs(amp);
      pivot_rest = gather(digits, rest_wires);
      pivot_factor = gather(digits, wires);
    }
  });

  QuditState rest(state.layout().select(rest_wires), state.backend());
  QuditState factor(state.layout().select(wires), state.backend());
  state.for_each_term([&](const Digits& digits, Amplitude amp) {
    Digits r = gather(digits, rest_wires);
    Digits f = gather(digits, wires);
    if (f == pivot_factor) rest.set(r, amp);
    if (r == pivot_rest) factor.set(f, amp);
  });
  rest.normalize();
  // Put the global phase of the pivot term on the rest factor.
  const Amplitude pivot_rest_amp = rest.amplitude(pivot_rest);
  QuditState phased(factor.layout(), factor.backend());
  factor.for_each_term([&](const Digits& d, Amplitude a) { phased.set(d, a / pivot_rest_amp); });
  phased.normalize();
  return {std::move(rest), std::move(phased)};
}

// ---------------------------------------------------------------------------
// Serialization

nlohmann::json state_to_json(const QuditState& state) {
  nlohmann::json amps = nlohmann::json::array();
  state.for_each_term([&](const Digits& digits, Amplitude amp) {
    if (amp == Amplitude{}) return;
    amps.push_back({{"digits", digits}, {"re", amp.real()}, {"im", amp.imag()}});
  });
  return {{"dimension", state.dimension()}, {"labels", state.layout().labels()}, {"amplitudes", amps}};
}

QuditState state_from_json(const nlohmann::json& j, Backend backend) {
  RegisterLayout layout(j.at("dimension").get<int>(), j.at("labels").get<std::vector<std::string>>());
  QuditState out(layout, backend);
  for (const auto& entry : j.at("amplitudes")) {
    out.set(entry.at("digits").get<Digits>(),
            Amplitude{entry.at("re").get<double>(), entry.at("im").get<double>()});
  }
  return out;
}

}  // namespace qcarrier
