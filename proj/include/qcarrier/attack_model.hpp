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

#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "json.hpp"

namespace qcarrier {

enum class AttackKind { passive_intercept, entangle_difference, contaminate_carrier, insider_b3 };

std::string to_string(AttackKind kind);
AttackKind attack_kind_from_string(std::string_view name);

/// Adversary description. For contaminate_carrier, ancillas[q] is Eve's
/// (possibly unnormalized) ancilla |ξ_q⟩ attached to carrier branch q;
/// every entry lives on the same register of d-level wires.
struct AttackModel {
  AttackKind kind = AttackKind::passive_intercept;
  std::vector<Eigen::VectorXcd> ancillas;
  std::optional<Eigen::MatrixXcd> eve_unitary;

  static AttackModel passive();
  static AttackModel entangle_difference();
  static AttackModel contamination(std::vector<Eigen::VectorXcd> ancillas);
  static AttackModel insider();

  /// ξ_q = |q⟩ on one wire: mutually orthogonal.
  static std::vector<Eigen::VectorXcd> orthogonal_ancillas(int d);
  /// ξ_q = |0⟩ for every q.
  static std::vector<Eigen::VectorXcd> equal_ancillas(int d);

  /// Number of d-level wires in the ancilla register; throws when the
  /// ancilla list is malformed for dimension d.
  int ancilla_wires(int d) const;
};

nlohmann::json attack_model_to_json(const AttackModel& model);

/// Accepts {"kind": ..., "ancillas": "orthogonal" | "equal" | [[[re, im], ...], ...]}.
AttackModel attack_model_from_json(const nlohmann::json& j, int dimension);

}  // namespace qcarrier
