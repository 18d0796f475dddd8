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
#include <vector>

#include <Eigen/Dense>

#include "qcarrier/qudit_state.hpp"

namespace qcarrier {

/// Reduced state stored on its support: the basis tuples that carry any
/// weight, plus the matrix of entries between them. Every entry outside
/// the support is zero, so a 5-wire register with 125 occupied basis
/// states costs a 125×125 matrix rather than 3125×3125.
class DensityMatrix {
 public:
  DensityMatrix(RegisterLayout layout, std::vector<Digits> support, Eigen::MatrixXcd entries);

  const RegisterLayout& layout() const { return layout_; }
  const std::vector<Digits>& support() const { return support_; }
  const Eigen::MatrixXcd& entries() const { return entries_; }

  Amplitude element(const Digits& row, const Digits& col) const;

  double trace() const;
  double purity() const;
  double hermiticity_error() const;
  double min_eigenvalue() const;

  /// von Neumann entropy; log base selects the unit (2 = bits, d = dits).
  double entropy(double log_base) const;

  /// trace 1, Hermitian, positive semidefinite.
  bool is_valid(double tolerance = 1e-10, double psd_tolerance = 1e-9) const;

  /// Full d^w × d^w matrix; throws above the dense cap.
  Eigen::MatrixXcd dense() const;

  /// Same operator expressed on a larger (sorted) support.
  Eigen::MatrixXcd embedded(const std::vector<Digits>& support) const;

 private:
  RegisterLayout layout_;
  std::vector<Digits> support_;
  Eigen::MatrixXcd entries_;
};

DensityMatrix partial_trace(const QuditState& state, std::span<const int> keep_wires);

/// Σ_i weights[i] |states[i]⟩⟨states[i]|
DensityMatrix mixture(std::span<const QuditState> states, std::span<const double> weights);

/// ½‖ρ − σ‖₁
double trace_distance(const DensityMatrix& rho, const DensityMatrix& sigma);

}  // namespace qcarrier
