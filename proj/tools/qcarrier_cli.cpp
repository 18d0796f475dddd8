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

#include <atomic>
#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include "CLI11.hpp"
#include "json.hpp"
#include "qcarrier/adversary.hpp"
#include "qcarrier/carriers.hpp"
#include "qcarrier/density_matrix.hpp"
#include "qcarrier/modular_codes.hpp"
#include "qcarrier/protocol_engine.hpp"

namespace {

using namespace qcarrier;

constexpr int kExitPass = 0;
constexpr int kExitUsage = 1;
constexpr int kExitFailed = 2;
constexpr int kMaxPowerSumPrime = 101;

// Raised for bad input; main maps it to exit 1.
struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct GlobalOptions {
  std::string config_path;
  std::string out_path;
  std::optional<std::uint64_t> seed;
  std::string format;
  int jobs = 1;
};

struct SchemeOptions {
  std::string scheme = "kn";
  int k = 2;
  int n = 0;
  std::string parity = "odd";
};

void init_logging() {
  auto logger = spdlog::stderr_color_mt("qcarrier");
  logger->set_pattern("[%l] %v");
  spdlog::set_default_logger(logger);
  spdlog::set_level(spdlog::level::warn);
  if (const char* env = std::getenv("QCARRIER_LOG")) {
    const std::string name(env);
    const auto level = spdlog::level::from_str(name);
    if (level == spdlog::level::off && name != "off") {
      spdlog::warn("QCARRIER_LOG: unknown level '{}', keeping 'warn'", name);
    } else {
      spdlog::set_level(level);
    }
  }
}

void emit(const GlobalOptions& g, const std::string& text) {
  if (g.out_path.empty()) {
    std::cout << text;
    std::cout.flush();
    return;
  }
  std::ofstream out(g.out_path, std::ios::binary);
  if (!out) throw UsageError("cannot write '" + g.out_path + "'");
  out << text;
  spdlog::info("wrote {}", g.out_path);
}

std::string format_or(const GlobalOptions& g, const std::string& fallback) {
  return g.format.empty() ? fallback : g.format;
}

SessionConfig load_config(const GlobalOptions& g) {
  if (g.config_path.empty()) throw UsageError("--config is required");
  SessionConfig c;
  try {
    c = load_session_config(g.config_path);
  } catch (const std::exception& e) {
    throw UsageError(g.config_path + ": " + e.what());
  }
  if (g.seed) c.rng_seed = *g.seed;
  return c;
}

SchemeSpec scheme_from_options(const SchemeOptions& o) {
  nlohmann::json j{{"variant", o.scheme}, {"parity", o.parity}, {"k", o.k}};
  if (o.n > 0) j["n"] = o.n;
  try {
    return scheme_from_json(j);
  } catch (const std::exception& e) {
    throw UsageError(e.what());
  }
}

// ---------------------------------------------------------------------------
// run-session

nlohmann::json sweep_row(const SessionTranscript& t) {
  nlohmann::json row = transcript_summary(t);
  row.erase("retrieval_subsets");
  row.erase("payload_sent");
  row.erase("payload_retrieved");
  row.erase("adversary");
  return row;
}

int cmd_run_session(const GlobalOptions& g, int sweep) {
  const SessionConfig base = load_config(g);
  const std::string format = format_or(g, "json");
  if (sweep <= 1) {
    spdlog::info("running {} for {} rounds, seed {}", base.scheme.name(), base.rounds, base.rng_seed);
    const SessionTranscript t = run_session(base);
    emit(g, format == "csv" ? transcript_to_csv(t) : transcript_to_jsonl(t));
    const DetectionStats stats = detection_check(t);
    spdlog::info("{} stray rounds, {} mismatches", stats.stray_rounds, stats.mismatches);
    return stats.mismatches > 0 ? kExitFailed : kExitPass;
  }

  // Seeds base, base+1, ...; results are written in seed order whatever
  // the worker count.
  std::vector<SessionTranscript> results(static_cast<std::size_t>(sweep));
  std::vector<std::string> errors(static_cast<std::size_t>(sweep));
  std::atomic<int> next{0};
  auto worker = [&] {
    for (int i = next++; i < sweep; i = next++) {
      SessionConfig c = base;
      c.rng_seed = base.rng_seed + static_cast<std::uint64_t>(i);
      try {
        results[static_cast<std::size_t>(i)] = run_session(c);
      } catch (const std::exception& e) {
        errors[static_cast<std::size_t>(i)] = e.what();
      }
    }
  };
  const int workers = std::max(1, std::min(g.jobs, sweep));
  spdlog::info("sweeping {} seeds on {} workers", sweep, workers);
  std::vector<std::thread> pool;
  for (int w = 0; w < workers; ++w) pool.emplace_back(worker);
  for (auto& t : pool) t.join();
  for (const auto& e : errors) {
    if (!e.empty()) throw std::runtime_error(e);
  }

  std::ostringstream out;
  int flagged = 0;
  if (format == "csv") out << "seed,stray_rounds,mismatches,mismatch_rate,final_carrier_fidelity\n";
  for (const auto& t : results) {
    const DetectionStats stats = detection_check(t);
    flagged += stats.mismatches > 0 ? 1 : 0;
    if (format == "csv") {
      out << t.rng_seed << ',' << stats.stray_rounds << ',' << stats.mismatches << ',' << stats.mismatch_rate << ','
          << std::setprecision(17) << t.final_carrier_fidelity << '\n';
    } else {
      out << sweep_row(t).dump() << '\n';
    }
  }
  emit(g, out.str());
  return flagged > 0 ? kExitFailed : kExitPass;
}

// ---------------------------------------------------------------------------
// verify-code

int cmd_verify_code(const GlobalOptions& g, int k, int n) {
  if (n < 3 || !is_prime(n)) throw UsageError("n must be prime (got " + std::to_string(n) + ")");
  if (k < 2 || 2 * k > n + 1) throw UsageError("k must satisfy 2 <= k <= (n+1)/2");
  const CodeSpec spec(k, n);
  const RelationReport report = verify_code_relations(spec);
  const CodeStateResiduals residuals = code_state_residuals(spec);
  constexpr double kResidualTolerance = 1e-10;
  const bool pass = report.all_pass() && residuals.orthonormality < kResidualTolerance &&
                    residuals.fourier_closure < kResidualTolerance;

  const std::string format = format_or(g, "table");
  std::ostringstream out;
  if (format == "json") {
    nlohmann::json j = relations_to_json(report);
    j["orthonormality_residual"] = residuals.orthonormality;
    j["fourier_closure_residual"] = residuals.fourier_closure;
    j["pass"] = pass;
    out << j.dump(2) << '\n';
  } else if (format == "csv") {
    out << "i,j,value,expected,pass\n";
    for (const auto& e : report.entries) {
      out << e.i << ',' << e.j << ',' << e.value << ',' << e.expected << ',' << (e.pass ? "true" : "false") << '\n';
    }
  } else {
    out << "(" << k << "," << n << ") code: e_i . e_j mod " << n << "\n    ";
    for (int j = 0; j < k; ++j) out << std::setw(4) << "e" + std::to_string(j);
    out << '\n';
    for (int i = 0; i < k; ++i) {
      out << std::setw(4) << "e" + std::to_string(i);
      for (int j = 0; j < k; ++j) {
        for (const auto& e : report.entries) {
          if (e.i == i && e.j == j) out << std::setw(3) << e.value << (e.pass ? ' ' : '!');
        }
      }
      out << '\n';
    }
    out << "orthonormality residual  " << std::scientific << residuals.orthonormality << '\n'
        << "fourier closure residual " << residuals.fourier_closure << '\n'
        << (pass ? "PASS" : "FAIL") << '\n';
  }
  emit(g, out.str());
  return pass ? kExitPass : kExitFailed;
}

// ---------------------------------------------------------------------------
// verify-carrier

int cmd_verify_carrier(const GlobalOptions& g, const SchemeSpec& scheme) {
  constexpr double kTolerance = 1e-10;
  const CarrierState carrier = build_carrier(scheme);
  const CarrierState after = hadamard_round(carrier);
  const CarrierState expected = build_carrier(after.scheme);
  const double hadamard_fidelity = fidelity(after.state, expected.state);

  double worst_message = 1.0, worst_carrier = 1.0;
  std::vector<int> symbols;
  for (int s = 0; s < scheme.dimension(); ++s) {
    symbols.push_back(s);
    const QuditState message = encode_message(scheme, scheme.parity(), s);
    const Downloaded out = download(upload(tensor(carrier.state, message), scheme, scheme.parity()), scheme);
    worst_message = std::min(worst_message, fidelity(out.message, message));
    worst_carrier = std::min(worst_carrier, fidelity(out.carrier.state, carrier.state));
  }
  const double leakage = passive_intercept(scheme, symbols).max_distance();
  const bool pass = hadamard_fidelity >= 1 - kTolerance && worst_message >= 1 - kTolerance &&
                    worst_carrier >= 1 - kTolerance && leakage < kTolerance;

  nlohmann::json j{{"scheme", scheme.name()},
                   {"hadamard_target", after.scheme.name()},
                   {"hadamard_fidelity", hadamard_fidelity},
                   {"min_message_fidelity", worst_message},
                   {"min_carrier_fidelity", worst_carrier},
                   {"max_transit_distance", leakage},
                   {"pass", pass}};
  std::ostringstream out;
  if (format_or(g, "json") == "csv") {
    out << "scheme,hadamard_target,hadamard_fidelity,min_message_fidelity,min_carrier_fidelity,max_transit_distance,pass\n"
        << scheme.name() << ',' << after.scheme.name() << ',' << std::setprecision(17) << hadamard_fidelity << ','
        << worst_message << ',' << worst_carrier << ',' << leakage << ',' << (pass ? "true" : "false") << '\n';
  } else {
    out << j.dump(2) << '\n';
  }
  emit(g, out.str());
  return pass ? kExitPass : kExitFailed;
}

// ---------------------------------------------------------------------------
// attack

struct AttackOptions {
  std::string kind;
  std::vector<int> symbols;  // empty selects (1, 0, d-1)
  bool hadamard = false;
  std::string ancillas = "orthogonal";
  int monte_carlo_rounds = 0;
};

int cmd_attack(const GlobalOptions& g, const SchemeOptions& so, AttackOptions ao) {
  SchemeSpec scheme = SchemeSpec::key_distribution();
  std::uint64_t seed = g.seed.value_or(0);
  std::optional<AttackModel> model;
  double stray_fraction = kDefaultStrayFraction;
  if (!g.config_path.empty()) {
    const SessionConfig c = load_config(g);
    scheme = c.scheme;
    seed = c.rng_seed;
    model = c.adversary;
    stray_fraction = c.stray_fraction;
    ao.hadamard = c.hadamard_every_round;
    if (!c.payload.empty()) ao.symbols = c.payload;
    if (ao.kind.empty() && model) ao.kind = to_string(model->kind);
  } else {
    scheme = scheme_from_options(so);
  }
  if (ao.kind.empty()) throw UsageError("--kind is required without an adversary in the config");

  AttackKind kind;
  try {
    kind = attack_kind_from_string(ao.kind);
  } catch (const std::exception& e) {
    throw UsageError(e.what());
  }
  if (ao.symbols.empty()) ao.symbols = {1, 0, scheme.dimension() - 1};
  for (int s : ao.symbols) {
    if (s < 0 || s >= scheme.dimension()) throw UsageError("symbol " + std::to_string(s) + " outside Z_d");
  }

  AttackReport report;
  nlohmann::json extra;
  try {
    switch (kind) {
      case AttackKind::passive_intercept: report = passive_intercept(scheme, ao.symbols); break;
      case AttackKind::entangle_difference:
        report = entangle_difference_attack(scheme, ao.symbols, ao.hadamard, seed);
        break;
      case AttackKind::contaminate_carrier: {
        std::vector<Eigen::VectorXcd> ancillas;
        std::optional<Eigen::MatrixXcd> unitary;
        if (model && model->kind == AttackKind::contaminate_carrier) {
          ancillas = model->ancillas;
          unitary = model->eve_unitary;
        } else {
          ancillas = attack_model_from_json(nlohmann::json{{"kind", "contaminate_carrier"}, {"ancillas", ao.ancillas}},
                                            scheme.dimension())
                         .ancillas;
        }
        report = contamination_detection(scheme, ancillas, unitary);
        if (ao.monte_carlo_rounds > 0) {
          const MonteCarloResult mc =
              contamination_monte_carlo(scheme, ancillas, ao.monte_carlo_rounds, stray_fraction, seed);
          extra = {{"rounds", mc.rounds},       {"stray_checks", mc.stray_checks}, {"mismatches", mc.mismatches},
                   {"frequency", mc.frequency}, {"exact", mc.exact},               {"seed", seed}};
        }
        break;
      }
      case AttackKind::insider_b3: report = insider_b3_attack(); break;
    }
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }

  nlohmann::json j = report_to_json(report);
  if (!extra.is_null()) j["monte_carlo"] = extra;
  std::ostringstream out;
  if (format_or(g, "json") == "csv") {
    out << "metric,value\n"
        << "detection_probability," << std::setprecision(17) << report.detection_probability << '\n'
        << "max_distance," << report.max_distance() << '\n';
    for (const auto& [name, value] : report.metrics) out << name << ',' << value << '\n';
  } else {
    out << j.dump(2) << '\n';
  }
  emit(g, out.str());
  return kExitPass;
}

// ---------------------------------------------------------------------------
// power-sums

int cmd_power_sums(const GlobalOptions& g, int p_max) {
  if (p_max < 3 || p_max > kMaxPowerSumPrime) {
    throw UsageError("--p-max must lie in [3, " + std::to_string(kMaxPowerSumPrime) + "]");
  }
  bool pass = true;
  nlohmann::json rows = nlohmann::json::array();
  std::ostringstream table, csv;
  csv << "p,k,direct,recursive,expected,pass\n";
  for (int p = 3; p <= p_max; ++p) {
    if (!is_prime(p)) continue;
    nlohmann::json direct = nlohmann::json::array(), recursive = nlohmann::json::array();
    table << "p=" << std::setw(3) << p << " :";
    for (int k = 1; k <= p - 1; ++k) {
      const int value = power_sum(k, p);
      const int expected = k == p - 1 ? p - 1 : 0;
      // The recursion yields S_{m-1} for 3 <= m <= p - 1.
      std::optional<int> rec;
      if (k + 1 >= 3 && k + 1 <= p - 1) rec = power_sum_by_recursion(k + 1, p);
      const bool ok = value == expected && (!rec || *rec == value);
      pass = pass && ok;
      direct.push_back(value);
      recursive.push_back(rec ? nlohmann::json(*rec) : nlohmann::json(nullptr));
      table << ' ' << value << (k == p - 1 ? "*" : "") << (ok ? "" : "!");
      csv << p << ',' << k << ',' << value << ',' << (rec ? std::to_string(*rec) : "") << ',' << expected << ','
          << (ok ? "true" : "false") << '\n';
    }
    table << '\n';
    rows.push_back({{"p", p}, {"direct", direct}, {"recursive", recursive}});
  }
  const std::string format = format_or(g, "table");
  if (format == "json") {
    emit(g, nlohmann::json{{"rows", rows}, {"pass", pass}}.dump(2) + "\n");
  } else if (format == "csv") {
    emit(g, csv.str());
  } else {
    table << "(* marks k = p-1, where S_k(p) = -1 mod p)\n" << (pass ? "PASS" : "FAIL") << '\n';
    emit(g, table.str());
  }
  return pass ? kExitPass : kExitFailed;
}

}  // namespace

int main(int argc, char** argv) {
  init_logging();

  CLI::App app{"Quantum carrier protocol simulator"};
  app.require_subcommand(1);
  app.fallthrough();

  GlobalOptions g;
  std::uint64_t seed = 0;
  auto* seed_opt = app.add_option("--seed", seed, "Override the config seed");
  app.add_option("--config", g.config_path, "Session config (TOML or JSON)");
  app.add_option("--out", g.out_path, "Output file (default stdout)");
  app.add_option("--format", g.format, "Output format")->check(CLI::IsMember({"json", "csv", "table"}));
  app.add_option("--jobs", g.jobs, "Worker threads for sweeps")->check(CLI::PositiveNumber);

  int sweep = 1;
  auto* run = app.add_subcommand("run-session", "Run a carrier session and write its transcript");
  run->add_option("--sweep", sweep, "Run this many consecutive seeds and report summaries")
      ->check(CLI::PositiveNumber);

  int code_k = 2, code_n = 3;
  auto* code = app.add_subcommand("verify-code", "Check the polynomial code relations and code states");
  code->add_option("--k", code_k, "Threshold k")->required();
  code->add_option("--n", code_n, "Number of players (prime)")->required();

  SchemeOptions so;
  auto add_scheme_flags = [&](CLI::App* sub) {
    sub->add_option("--scheme", so.scheme, "kd | two_two | nn | kn");
    sub->add_option("--k", so.k, "Threshold k for kn");
    sub->add_option("--n", so.n, "Player count for nn / kn");
    sub->add_option("--parity", so.parity, "odd | even")->check(CLI::IsMember({"odd", "even"}));
  };
  auto* carrier = app.add_subcommand("verify-carrier", "Check carrier invariance, round trip and leakage");
  add_scheme_flags(carrier);

  AttackOptions ao;
  auto* attack = app.add_subcommand("attack", "Run an eavesdropping experiment");
  add_scheme_flags(attack);
  attack->add_option("--kind", ao.kind, "passive | difference | contamination | insider");
  attack->add_option("--symbols", ao.symbols, "Symbol sequence sent through the carrier")->delimiter(',');
  attack->add_flag("--hadamard", ao.hadamard, "Insert Hadamard rounds between symbols");
  attack->add_option("--ancillas", ao.ancillas, "orthogonal | equal")
      ->check(CLI::IsMember({"orthogonal", "equal"}));
  attack->add_option("--monte-carlo", ao.monte_carlo_rounds, "Also run a seeded session of this many rounds")
      ->check(CLI::NonNegativeNumber);

  int p_max = 13;
  auto* sums = app.add_subcommand("power-sums", "Tabulate S_k(p) mod p for primes up to p-max");
  sums->add_option("--p-max", p_max, "Largest prime considered (<= 101)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitPass : kExitUsage;
  }
  if (*seed_opt) g.seed = seed;

  try {
    if (*run) return cmd_run_session(g, sweep);
    if (*code) return cmd_verify_code(g, code_k, code_n);
    if (*carrier) {
      if (!g.config_path.empty()) return cmd_verify_carrier(g, load_config(g).scheme);
      return cmd_verify_carrier(g, scheme_from_options(so));
    }
    if (*attack) return cmd_attack(g, so, ao);
    if (*sums) return cmd_power_sums(g, p_max);
  } catch (const UsageError& e) {
    spdlog::error("{}", e.what());
    return kExitUsage;
  } catch (const std::exception& e) {
    spdlog::error("{}", e.what());
    return kExitUsage;
  }
  return kExitUsage;
}
