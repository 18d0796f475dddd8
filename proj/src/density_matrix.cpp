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

#include "qcarrier/density_matrix.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>

namespace qcarrier {

namespace {

std::map<Digits, Eigen::Index> index_of(const std::vector<Digits>& support) {
  std::map<Digits, Eigen::Index> index;
  for (std::size_t i = 0; i < support.size(); ++i) index.emplace(support[i], static_cast<Eigen::Index>(i));
  return index;
}

bool same_shape(const RegisterLayout& a, const RegisterLayout& b) {
  return a.dimension() == b.dimension() && a.wire_count() == b.wire_count();
}

}  // namespace

DensityMatrix::DensityMatrix(RegisterLayout layout, std::vector<Digits> support,
                             Eigen::MatrixXcd entries)
    : layout_(std::move(layout)), support_(std::move(support)), entries_(std::move(entries)) {
  const auto n = static_cast<Eigen::Index>(support_.size());
  if (entries_.rows() != n || entries_.cols() != n) {
    throw std::invalid_argument("DensityMatrix: entries do not match support size");
  }
  if (!std::is_sorted(support_.begin(), support_.end())) {
    throw std::invalid_argument("DensityMatrix: support must be sorted");
  }
  for (const auto& d : support_) {
    if (static_cast<int>(d.size()) != layout_.wire_count()) {
      throw std::invalid_argument("DensityMatrix: support tuple length mismatch");
    }
  }
}

Amplitude DensityMatrix::element(const Digits& row, const Digits& col) const {
  auto r = std::lower_bound(support_.begin(), support_.end(), row);
  auto c = std::lower_bound(support_.begin(), support_.end(), col);
  if (r == support_.end() || *r != row || c == support_.end() || *c != col) return {};
  return entries_(r - support_.begin(), c - support_.begin());
}

double DensityMatrix::trace() const { return entries_.trace().real(); }

double DensityMatrix::purity() const {
  // tr ρ² = Σ |ρ_ij|² for Hermitian ρ
  return entries_.squaredNorm();
}

double DensityMatrix::hermiticity_error() const {
  if (entries_.size() == 0) return 0.0;
  return (entries_ - entries_.adjoint()).cwiseAbs().maxCoeff();
}

double DensityMatrix::min_eigenvalue() const {
  double smallest = 0.0;
  if (entries_.size() > 0) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(entries_, Eigen::EigenvaluesOnly);
    smallest = solver.eigenvalues().minCoeff();
  }
  // Off-support directions contribute zero eigenvalues.
  bool full = false;
  try {
    full = support_.size() == layout_.total_dimension();
  } catch (const std::overflow_error&) {
  }
  return full ? smallest : std::min(smallest, 0.0);
}

double DensityMatrix::entropy(double log_base) const {
  if (entries_.size() == 0) return 0.0;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(entries_, Eigen::EigenvaluesOnly);
  double h = 0.0;
  for (Eigen::Index i = 0; i < solver.eigenvalues().size(); ++i) {
    const double l = solver.eigenvalues()[i];
    if (l > 1e-15) h -= l * std::log(l);
  }
  return h / std::log(log_base);
}

bool DensityMatrix::is_valid(double tolerance, double psd_tolerance) const {
  return std::abs(trace() - 1.0) <= tolerance && hermiticity_error() <= tolerance &&
         min_eigenvalue() >= -psd_tolerance;
}

Eigen::MatrixXcd DensityMatrix::dense() const {
  const std::size_t total = layout_.total_dimension();
  if (total > 4096) throw std::length_error("DensityMatrix::dense: register too large");
  Eigen::MatrixXcd out = Eigen::MatrixXcd::Zero(static_cast<Eigen::Index>(total),
                                                static_cast<Eigen::Index>(total));
  std::vector<Eigen::Index> flat(support_.size());
  for (std::size_t i = 0; i < support_.size(); ++i) {
    std::size_t idx = 0;
    for (int v : support_[i]) idx = idx * static_cast<std::size_t>(layout_.dimension()) + static_cast<std::size_t>(v);
    flat[i] = static_cast<Eigen::Index>(idx);
  }
  for (std::size_t i = 0; i < support_.size(); ++i) {
    for (std::size_t j = 0; j < support_.size(); ++j) {
      out(flat[i], flat[j]) = entries_(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
    }
  }
  return out;
}

Eigen::MatrixXcd DensityMatrix::embedded(const std::vector<Digits>& support) const {
  const auto index = index_of(support);
  const auto n = static_cast<Eigen::Index>(support.size());
  Eigen::MatrixXcd out = Eigen::MatrixXcd::Zero(n, n);
  std::vector<Eigen::Index> where(support_.size());
  for (std::size_t i = 0; i < support_.size(); ++i) {
    auto it = index.find(support_[i]);
    if (it == index.end()) throw std::invalid_argument("DensityMatrix::embedded: support not covered");
    where[i] = it->second;
  }
  for (std::size_t i = 0; i < support_.size(); ++i) {
    for (std::size_t j = 0; j < support_.size(); ++j) {
      out(where[i], where[j]) = entries_(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
    }
  }
  return out;
}

DensityMatrix partial_trace(const QuditState& state, std::span<const int> keep_wires) {
  if (keep_wires.empty()) throw std::invalid_argument("partial_trace: keep_wires is empty");
  std::set<int> seen;
  for (int w : keep_wires) {
    if (w < 0 || w >= state.wire_count()) throw std::out_of_range("partial_trace: wire out of range");
    if (!seen.insert(w).second) throw std::invalid_argument("partial_trace: repeated wire");
  }
  std::vector<int> traced;
  for (int w = 0; w < state.wire_count(); ++w) {
    if (!seen.contains(w)) traced.push_back(w);
  }

  // Group amplitudes by the traced-out digits; each group is one vector
  // in the kept register.
  std::map<Digits, std::vector<std::pair<Digits, Amplitude>>> groups;
  std::set<Digits> support_set;
  state.for_each_term([&](const Digits& digits, Amplitude amp) {
    Digits kept;
    Digits rest;
    for (int w : keep_wires) kept.push_back(digits[static_cast<std::size_t>(w)]);
    for (int w : traced) rest.push_back(digits[static_cast<std::size_t>(w)]);
    support_set.insert(kept);
    groups[std::move(rest)].emplace_back(std::move(kept), amp);
  });
  std::vector<Digits> support(support_set.begin(), support_set.end());
  const auto index = index_of(support);

  const auto n = static_cast<Eigen::Index>(support.size());
  Eigen::MatrixXcd rho = Eigen::MatrixXcd::Zero(n, n);
  std::vector<std::pair<Eigen::Index, Amplitude>> column;
  for (const auto& [rest, entries] : groups) {
    column.clear();
    for (const auto& [kept, amp] : entries) column.emplace_back(index.at(kept), amp);
    for (const auto& [i, a] : column) {
      for (const auto& [j, b] : column) rho(i, j) += a * std::conj(b);
    }
  }
  const double norm2 = state.squared_norm();
  if (norm2 == 0.0) throw std::domain_error("partial_trace: zero-norm state");
  rho /= norm2;
  return DensityMatrix(state.layout().select(keep_wires), std::move(support), std::move(rho));
}

DensityMatrix mixture(std::span<const QuditState> states, std::span<const double> weights) {
  if (states.empty() || states.size() != weights.size()) {
    throw std::invalid_argument("mixture: need one weight per state");
  }
  std::set<Digits> support_set;
  for (const auto& s : states) {
    if (!same_shape(s.layout(), states.front().layout())) throw std::invalid_argument("mixture: layout mismatch");
    s.for_each_term([&](const Digits& d, Amplitude a) {
      if (a != Amplitude{}) support_set.insert(d);
    });
  }
  std::vector<Digits> support(support_set.begin(), support_set.end());
  const auto index = index_of(support);
  const auto n = static_cast<Eigen::Index>(support.size());
  Eigen::MatrixXcd rho = Eigen::MatrixXcd::Zero(n, n);
  for (std::size_t k = 0; k < states.size(); ++k) {
    Eigen::VectorXcd v = Eigen::VectorXcd::Zero(n);
    states[k].for_each_term([&](const Digits& d, Amplitude a) {
      if (a != Amplitude{}) v[index.at(d)] = a;
    });
    rho += weights[k] * v * v.adjoint();
  }
  return DensityMatrix(states.front().layout(), std::move(support), std::move(rho));
}

double trace_distance(const DensityMatrix& rho, const DensityMatrix& sigma) {
  if (!same_shape(rho.layout(), sigma.layout())) {
    throw std::invalid_argument("trace_distance: register mismatch");
  }
  std::vector<Digits> support;
  std::set_union(rho.support().begin(), rho.support().end(), sigma.support().begin(),
                 sigma.support().end(), std::back_inserter(support));
  if (support.empty()) return 0.0;
  const Eigen::MatrixXcd diff = rho.embedded(support) - sigma.embedded(support);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(diff, Eigen::EigenvaluesOnly);
  return std::min(1.0, 0.5 * solver.eigenvalues().cwiseAbs().sum());
}

}  // namespace qcarrier
