// Command-line front end: scenario execution, dataset validation and the
// reference detectors.

#include <atomic>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <mutex>
#include <thread>
#include <vector>

#include "CLI11.hpp"
#include "cpsgen/oracle.hpp"
#include "cpsgen/runner.hpp"

namespace {

namespace fs = std::filesystem;
using namespace cpsgen;

int cmd_run(const std::vector<std::string>& scenarios, const std::string& out,
            std::int64_t seed_override, unsigned jobs) {
  struct Job {
    std::string scenario;
    std::string out_dir;
  };
  std::vector<Job> queue;
  if (scenarios.size() == 1) {
    queue.push_back({scenarios[0], out});
  } else {
    for (const auto& path : scenarios) {
      queue.push_back({path, out + "/" + fs::path(path).stem().string()});
    }
  }

  std::atomic<std::size_t> next{0};
  std::atomic<int> failures{0};
  std::mutex io;
  const auto worker = [&] {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= queue.size()) return;
      const Job& job = queue[i];
      try {
        scenario::ScenarioConfig cfg = scenario::parse_scenario(job.scenario);
        if (seed_override >= 0) cfg.seed = static_cast<std::uint64_t>(seed_override);
        dataset::Manifest m = runner::run_scenario(cfg, job.out_dir);
        std::lock_guard<std::mutex> lock(io);
        std::cout << job.scenario << " -> " << job.out_dir << " (seed " << m.seed
                  << ", " << m.catalog.size() << " attacks, hash "
                  << m.config_hash << ")\n";
      } catch (const std::exception& e) {
        std::lock_guard<std::mutex> lock(io);
        std::cerr << job.scenario << ": " << e.what() << "\n";
        failures.fetch_add(1);
      }
    }
  };

  const unsigned n = std::max(1u, std::min<unsigned>(jobs, queue.size()));
  std::vector<std::thread> pool;
  for (unsigned i = 0; i < n; ++i) pool.emplace_back(worker);
  for (auto& th : pool) th.join();
  return failures.load() == 0 ? 0 : 1;
}

int cmd_validate(const std::string& dir) {
  runner::ValidationReport rep = runner::validate_dataset(dir);
  if (rep.ok()) {
    std::cout << "all checks passed\n";
    std::cout << "train: " << runner::balance_summary(rep.train_balance) << "\n";
    std::cout << "test:  " << runner::balance_summary(rep.test_balance) << "\n";
    return 0;
  }
  for (const auto& v : rep.violations) std::cerr << "violation: " << v << "\n";
  return 1;
}

int cmd_report(const std::string& dir) {
  dataset::RunView view = dataset::load_run_view(dir);
  const auto balance =
      dataset::balance_report(view.records, view.manifest.sample_period);
  std::cout << "dataset " << dir << " (seed " << view.manifest.seed << ")\n";
  std::cout << runner::balance_summary(balance) << "\n";
  std::cout << "attacks in catalog: " << view.manifest.catalog.size() << "\n";
  for (const auto& a : view.manifest.catalog) {
    std::printf("  id=%d %s %s %s [%g,%g]%s\n", a.id, attacks::to_string(a.kind),
                attacks::to_string(a.point), attacks::to_string(a.action),
                a.t_start, a.t_end, a.zero_day ? " zero-day" : "");
  }
  std::cout << "mode schedule:";
  for (const auto& [t, mode] : view.manifest.mode_schedule) {
    std::printf(" %s@%g", mode.c_str(), t);
  }
  std::cout << "\n";
  return 0;
}

int cmd_classify(const std::string& dir, double tol_m, double tol_a,
                 std::size_t window, const std::string& out_csv) {
  dataset::RunView view = dataset::load_run_view(dir);
  scenario::ScenarioConfig cfg = scenario::parse_scenario_text(
      view.manifest.scenario_text, dir + "/manifest.json#scenario_text");
  if (tol_m < 0.0) tol_m = oracle::default_tol_m(cfg.plant_params);
  if (tol_a < 0.0) tol_a = oracle::kDefaultTolA;

  const auto verdicts = oracle::classify_records(
      view.records, cfg.plant_params, cfg.controller, tol_m, tol_a, window);
  std::string csv = "t_begin,t_end,verdict,model_residual,control_residual\n";
  for (const auto& v : verdicts) {
    char line[160];
    std::snprintf(line, sizeof(line), "%.9g,%.9g,%s,%.9g,%.9g\n", v.t_begin,
                  v.t_end, oracle::to_string(v.verdict), v.model_residual,
                  v.control_residual);
    csv += line;
  }
  if (out_csv.empty()) {
    std::cout << csv;
  } else {
    dataset::write_text_file(out_csv, csv);
    std::cout << "wrote " << verdicts.size() << " window verdicts to "
              << out_csv << "\n";
  }
  return 0;
}

int cmd_plan(const std::string& grid_file, int limit) {
  scenario::ScenarioConfig cfg = scenario::parse_scenario(grid_file);
  if (!cfg.attack_plan) {
    std::cerr << grid_file << ": no [attack_plan] section\n";
    return 1;
  }
  attacks::AttackGrid grid = *cfg.attack_plan;
  if (limit > 0) grid.limit = limit;
  const auto plan = attacks::plan_attacks(grid, cfg.duration,
                                          cfg.controller.sample_period, cfg.seed);
  for (const auto& a : plan) {
    std::printf("id=%-3d %-14s %-20s %-7s %-12s mag=%-8g window=[%g,%g]%s\n",
                a.id, attacks::to_string(a.kind), attacks::to_string(a.point),
                attacks::to_string(a.action), attacks::to_string(a.waveform.kind),
                a.waveform.magnitude, a.t_start, a.t_end,
                a.zero_day ? " zero-day" : "");
  }
  return 0;
}

int cmd_matrix(const std::string& legit, const std::string& compromised,
               const std::string& spoofed, const std::string& out_path) {
  const auto matrix = oracle::ids_decision_matrix(
      dataset::load_run_view(legit), dataset::load_run_view(compromised),
      dataset::load_run_view(spoofed));
  std::string text = "true_state,PHY,PHY_NET,PHY_NET_HOST\n";
  const char* rows[2] = {"Normal", "Attack"};
  for (int r = 0; r < 2; ++r) {
    text += rows[r];
    for (int c = 0; c < 3; ++c) {
      text += ",";
      text += oracle::to_string(matrix[r][c]);
    }
    text += "\n";
  }
  if (out_path.empty()) {
    std::cout << text;
  } else {
    dataset::write_text_file(out_path, text);
    std::cout << "wrote " << out_path << "\n";
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"deterministic CPS security dataset generator"};
  app.require_subcommand(1);

  std::vector<std::string> scenarios;
  std::string out_dir;
  std::int64_t seed = -1;
  unsigned jobs = 1;
  auto* run = app.add_subcommand("run", "simulate scenarios and emit datasets");
  run->add_option("scenario", scenarios, "scenario file(s)")->required();
  run->add_option("--out", out_dir, "output directory")->required();
  run->add_option("--seed", seed, "override the scenario seed");
  run->add_option("--jobs", jobs, "parallel scenario executions");

  std::string dir;
  auto* validate = app.add_subcommand("validate", "check a dataset directory");
  validate->add_option("dir", dir, "dataset directory")->required();

  std::string report_dir;
  auto* report = app.add_subcommand("report", "print dataset statistics");
  report->add_option("dir", report_dir, "dataset directory")->required();

  std::string classify_dir, classify_out;
  double tol_m = -1.0, tol_a = -1.0;
  std::size_t window = 20;
  auto* classify =
      app.add_subcommand("classify", "model-based trace verdict per window");
  classify->add_option("dir", classify_dir, "dataset directory")->required();
  classify->add_option("--tol-m", tol_m, "plant-model tolerance");
  classify->add_option("--tol-a", tol_a, "control-law tolerance");
  classify->add_option("--window", window, "samples per window");
  classify->add_option("--out", classify_out, "verdict CSV path");

  std::string grid_file;
  int plan_limit = 0;
  auto* plan = app.add_subcommand("plan", "preview a planned attack grid");
  plan->add_option("grid", grid_file, "scenario file with [attack_plan]")
      ->required();
  plan->add_option("--limit", plan_limit, "override the plan limit");

  std::string legit, compromised, spoofed, matrix_out;
  auto* matrix =
      app.add_subcommand("matrix", "detector decision matrix for a scenario trio");
  matrix->add_option("legit", legit, "legit-operator dataset dir")->required();
  matrix->add_option("compromised", compromised, "compromised-HMI dataset dir")
      ->required();
  matrix->add_option("spoofed", spoofed, "spoofed-command dataset dir")
      ->required();
  matrix->add_option("--out", matrix_out, "report file path");

  CLI11_PARSE(app, argc, argv);

  try {
    if (run->parsed()) return cmd_run(scenarios, out_dir, seed, jobs);
    if (validate->parsed()) return cmd_validate(dir);
    if (report->parsed()) return cmd_report(report_dir);
    if (classify->parsed()) {
      return cmd_classify(classify_dir, tol_m, tol_a, window, classify_out);
    }
    if (plan->parsed()) return cmd_plan(grid_file, plan_limit);
    if (matrix->parsed()) return cmd_matrix(legit, compromised, spoofed, matrix_out);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
