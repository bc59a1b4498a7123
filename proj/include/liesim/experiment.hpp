#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace liesim::cli {

enum class Case { qho, coupled_qho, anharmonic, spin, custom };

// Experiment description loaded from a JSON document. Field names match the
// JSON keys; see README for the schema. For coupled_qho, dimension D is per
// mode. r_list entries of 0 mean "use the solved segment count".
struct ExperimentConfig {
  Case kind = Case::qho;
  int M = 2;          // coupled_qho modes
  int q = 4;          // anharmonic power
  double J = 0.5;     // spin magnitude
  double t = 1.0;
  double epsilon = 1e-3;
  std::vector<int> p_list;
  std::vector<std::int64_t> r_list{0};
  std::vector<std::int64_t> m_prime_list;
  int D = 0;          // 0 = budgets only, no evolution
  std::uint64_t seed = 1;
  std::string output_dir = "out";
  int workers = 1;
  std::int64_t evolution_r_cap = 1'000'000;
  // custom case:
  std::string algebra_file;
  std::vector<std::string> x_labels;
  double y = 1.0;

  static ExperimentConfig from_json_text(const std::string& text);
  std::string to_json_text() const;  // canonical (sorted keys)
  // FNV-1a of the canonical form, hex; output_dir and workers are pinned to
  // defaults first since they cannot change any computed value.
  std::string hash() const;
  std::vector<std::string> validate() const;
};

struct RunResult {
  int exit_code = 0;  // 0 ok, 1 validation, 2 bound violation, 3 divergent budget
  int violations = 0;
  int divergent = 0;
  std::vector<std::string> files;
  std::vector<std::string> errors;
};

// Budget sweep over (m', p) plus certification rows where the case has
// matrices, D covers the support assumption, and r stays under the cap.
// Writes budgets.csv and evolution.csv under output_dir; rows are sorted by
// grid position regardless of worker count.
RunResult run(const ExperimentConfig& config);

// Structure-aware vs structure-blind segment counts for the anharmonic case;
// writes compare.csv with the ratio column.
RunResult compare_bounds(const ExperimentConfig& config);

// Writes schedule.csv for the case split at p_list[0], r_list[0].
RunResult schedule_export(const ExperimentConfig& config);

}  // namespace liesim::cli
