#include <CLI11.hpp>
#include <fstream>
#include <iostream>
#include <json.hpp>
#include <sstream>
#include <string>

#include "liesim/experiment.hpp"

namespace {

void print_error(const std::string& message) {
  nlohmann::json j;
  j["error"] = message;
  std::cerr << j.dump() << '\n';
}

int dispatch(const std::string& config_path, int workers_override,
             const std::string& output_override,
             liesim::cli::RunResult (*op)(const liesim::cli::ExperimentConfig&)) {
  liesim::cli::ExperimentConfig config;
  try {
    std::ifstream in(config_path);
    if (!in) {
      print_error("cannot open config: " + config_path);
      return 1;
    }
    std::stringstream buf;
    buf << in.rdbuf();
    config = liesim::cli::ExperimentConfig::from_json_text(buf.str());
  } catch (const std::exception& e) {
    print_error(e.what());
    return 1;
  }
  if (workers_override > 0) config.workers = workers_override;
  if (!output_override.empty()) config.output_dir = output_override;

  liesim::cli::RunResult result;
  try {
    result = op(config);
  } catch (const std::exception& e) {
    print_error(e.what());
    return 1;
  }
  for (const auto& err : result.errors) print_error(err);
  for (const auto& file : result.files) std::cout << file << '\n';
  if (result.violations > 0)
    std::cout << "bound violations: " << result.violations << '\n';
  if (result.divergent > 0)
    std::cout << "divergent budgets: " << result.divergent << '\n';
  return result.exit_code;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"product-formula error budgets and schedule evaluation"};
  app.require_subcommand(1);

  std::string config_path;
  int workers = 0;
  std::string output_dir;

  auto add_common = [&](CLI::App* cmd) {
    cmd->add_option("--config", config_path, "JSON experiment description")
        ->required()
        ->check(CLI::ExistingFile);
    cmd->add_option("--workers", workers, "override the worker count");
    cmd->add_option("--output-dir", output_dir, "override the output directory");
  };

  CLI::App* run_cmd = app.add_subcommand("run", "budget sweep plus schedule certification");
  CLI::App* compare_cmd =
      app.add_subcommand("compare-bounds", "structure-aware vs naive segment counts");
  CLI::App* export_cmd = app.add_subcommand("schedule-export", "write one schedule as CSV");
  add_common(run_cmd);
  add_common(compare_cmd);
  add_common(export_cmd);

  CLI11_PARSE(app, argc, argv);

  if (run_cmd->parsed()) return dispatch(config_path, workers, output_dir, liesim::cli::run);
  if (compare_cmd->parsed())
    return dispatch(config_path, workers, output_dir, liesim::cli::compare_bounds);
  return dispatch(config_path, workers, output_dir, liesim::cli::schedule_export);
}
