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

#include "qcarrier/attack_model.hpp"

#include <cmath>
#include <stdexcept>

namespace qcarrier {

std::string to_string(AttackKind kind) {
  switch (kind) {
    case AttackKind::passive_intercept: return "passive_intercept";
    case AttackKind::entangle_difference: return "entangle_difference";
    case AttackKind::contaminate_carrier: return "contaminate_carrier";
    case AttackKind::insider_b3: return "insider_b3";
  }
  return "?";
}

AttackKind attack_kind_from_string(std::string_view name) {
  if (name == "passive_intercept" || name == "passive") return AttackKind::passive_intercept;
  if (name == "entangle_difference" || name == "difference") return AttackKind::entangle_difference;
  if (name == "contaminate_carrier" || name == "contamination") return AttackKind::contaminate_carrier;
  if (name == "insider_b3" || name == "insider") return AttackKind::insider_b3;
  throw std::invalid_argument("unknown attack kind '" + std::string(name) + "'");
}

AttackModel AttackModel::passive() { return {AttackKind::passive_intercept, {}, std::nullopt}; }
AttackModel AttackModel::entangle_difference() { return {AttackKind::entangle_difference, {}, std::nullopt}; }
AttackModel AttackModel::insider() { return {AttackKind::insider_b3, {}, std::nullopt}; }

AttackModel AttackModel::contamination(std::vector<Eigen::VectorXcd> ancillas) {
  return {AttackKind::contaminate_carrier, std::move(ancillas), std::nullopt};
}

std::vector<Eigen::VectorXcd> AttackModel::orthogonal_ancillas(int d) {
  std::vector<Eigen::VectorXcd> out;
  for (int q = 0; q < d; ++q) out.push_back(Eigen::VectorXcd::Unit(d, q));
  return out;
}

std::vector<Eigen::VectorXcd> AttackModel::equal_ancillas(int d) {
  return std::vector<Eigen::VectorXcd>(static_cast<std::size_t>(d), Eigen::VectorXcd::Unit(d, 0));
}

int AttackModel::ancilla_wires(int d) const {
  if (kind != AttackKind::contaminate_carrier) return 0;
  if (static_cast<int>(ancillas.size()) != d) {
    throw std::invalid_argument("need one ancilla per carrier branch: got " + std::to_string(ancillas.size()) +
                                ", d = " + std::to_string(d));
  }
  const Eigen::Index size = ancillas.front().size();
  int wires = 0;
  Eigen::Index span = 1;
  while (span < size) {
    span *= d;
    ++wires;
  }
  if (wires == 0 || span != size) throw std::invalid_argument("ancilla length must be a positive power of d");
  double total = 0.0;
  for (const auto& v : ancillas) {
    if (v.size() != size) throw std::invalid_argument("ancillas must share one register");
    if (!v.allFinite()) throw std::invalid_argument("ancilla amplitudes must be finite");
    total += v.squaredNorm();
  }
  if (!(total > 0.0)) throw std::invalid_argument("ancillas are not normalizable");
  if (eve_unitary) {
    const auto& u = *eve_unitary;
    if (u.rows() != size || u.cols() != size) throw std::invalid_argument("eve_unitary must act on the ancilla register");
    if (!(u.adjoint() * u).isIdentity(1e-10)) throw std::invalid_argument("eve_unitary is not unitary");
  }
  return wires;
}

namespace {

nlohmann::json vector_to_json(const Eigen::VectorXcd& v) {
  nlohmann::json out = nlohmann::json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back({v[i].real(), v[i].imag()});
  return out;
}

Eigen::VectorXcd vector_from_json(const nlohmann::json& j) {
  Eigen::VectorXcd v(static_cast<Eigen::Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i) {
    const auto& e = j[i];
    v[static_cast<Eigen::Index>(i)] =
        e.is_array() ? std::complex<double>(e.at(0).get<double>(), e.at(1).get<double>()) : std::complex<double>(e.get<double>(), 0.0);
  }
  return v;
}

}  // namespace

nlohmann::json attack_model_to_json(const AttackModel& model) {
  nlohmann::json j{{"kind", to_string(model.kind)}};
  if (!model.ancillas.empty()) {
    nlohmann::json list = nlohmann::json::array();
    for (const auto& v : model.ancillas) list.push_back(vector_to_json(v));
    j["ancillas"] = list;
  }
  if (model.eve_unitary) {
    nlohmann::json rows = nlohmann::json::array();
    for (Eigen::Index r = 0; r < model.eve_unitary->rows(); ++r) rows.push_back(vector_to_json(model.eve_unitary->row(r).transpose()));
    j["eve_unitary"] = rows;
  }
  return j;
}

AttackModel attack_model_from_json(const nlohmann::json& j, int dimension) {
  if (!j.is_object()) throw std::invalid_argument("adversary must be a table");
  for (const auto& [key, value] : j.items()) {
    if (key != "kind" && key != "ancillas" && key != "eve_unitary") {
      throw std::invalid_argument("unknown adversary key '" + key + "'");
    }
  }
  AttackModel model;
  model.kind = attack_kind_from_string(j.at("kind").get<std::string>());
  if (model.kind == AttackKind::contaminate_carrier) {
    const auto& spec = j.contains("ancillas") ? j.at("ancillas") : nlohmann::json("orthogonal");
    if (spec.is_string()) {
      const auto name = spec.get<std::string>();
      if (name == "orthogonal") model.ancillas = AttackModel::orthogonal_ancillas(dimension);
      else if (name == "equal") model.ancillas = AttackModel::equal_ancillas(dimension);
      else throw std::invalid_argument("unknown ancilla preset '" + name + "'");
    } else {
      for (const auto& v : spec) model.ancillas.push_back(vector_from_json(v));
    }
    if (j.contains("eve_unitary")) {
      const auto& rows = j.at("eve_unitary");
      Eigen::MatrixXcd u(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(rows.size()));
      for (std::size_t r = 0; r < rows.size(); ++r) {
        const Eigen::VectorXcd row = vector_from_json(rows[r]);
        if (row.size() != u.cols()) throw std::invalid_argument("eve_unitary must be square");
        u.row(static_cast<Eigen::Index>(r)) = row.transpose();
      }
      model.eve_unitary = u;
    }
    model.ancilla_wires(dimension);
  } else if (j.contains("ancillas") || j.contains("eve_unitary")) {
    throw std::invalid_argument("ancillas only apply to contaminate_carrier");
  }
  return model;
}

}  // namespace qcarrier
