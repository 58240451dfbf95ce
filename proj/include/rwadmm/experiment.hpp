#ifndef RWADMM_EXPERIMENT_HPP
#define RWADMM_EXPERIMENT_HPP

#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "rwadmm/simulator.hpp"

namespace rwadmm {

// Invalid spec input; carries a file:line diagnostic.
class SpecError : public std::runtime_error {
 public:
  SpecError(std::string file, int line, const std::string& what)
      : std::runtime_error(line > 0 ? file + ":" + std::to_string(line) + ": " + what
                                    : file + ": " + what),
        file_(std::move(file)),
        line_(line) {}

  const std::string& file() const { return file_; }
  int line() const { return line_; }

 private:
  std::string file_;
  int line_;
};

// Parsed experiment description: one shared (network, problem) instance and a
// list of run sections whose gridable keys (walks, rho, tau, alpha) expand
// into the cartesian product, crossed with the seed list.
struct ExperimentSpec {
  std::string name;
  std::vector<std::uint64_t> seeds{1};
  std::vector<double> thresholds{1e-1, 1e-2, 1e-3, 1e-4};

  int n_agents = 0;
  double density = 0.0;
  std::uint64_t network_seed = 1;

  LossFamily loss = LossFamily::least_squares;
  int samples_per_agent = 30;
  int dimension = 2;
  std::uint64_t data_seed = 2;

  struct RunSection {
    std::string name;
    int line = 0;
    Algorithm algorithm = Algorithm::pw_admm;
    std::vector<int> walks{1};
    std::vector<double> rho{1.0};
    std::vector<double> tau{0.0};
    std::vector<double> alpha{0.01};
    long max_events = 100000;
    double max_sim_time = 0.0;
    double delay_lo = 1e-5;
    double delay_hi = 1e-4;
    double compute_time = 0.0;
    long stride = 0;
    bool allow_self_loop = true;
    double round_cost = 0.0;
    RunConfig::InitMode init = RunConfig::InitMode::zeros;
    bool check_descent = false;
  };
  std::vector<RunSection> runs;
};

ExperimentSpec parse_spec_file(const std::filesystem::path& path);
ExperimentSpec parse_spec_text(std::string_view text, const std::string& origin);

struct PlannedRun {
  std::string name;   // unique; trace file is <name>.csv
  std::string group;  // name without the seed suffix, used for medians
  RunConfig config;
};

std::vector<PlannedRun> expand_runs(const ExperimentSpec& spec);

// First sampled record at or below the threshold, if any.
std::optional<TraceRecord> first_crossing(const MetricsTrace& trace, double threshold);

struct ExperimentResult {
  std::filesystem::path out_dir;
  std::vector<std::filesystem::path> trace_files;
  std::filesystem::path summary_file;
};

// Runs every planned run (optionally on `jobs` worker threads), writes one
// trace CSV per run plus network.csv/dataset.csv exports, then summary.csv.
// Output is byte-deterministic for a given spec, independent of `jobs`.
ExperimentResult run_experiment(const std::filesystem::path& spec_file,
                                const std::filesystem::path& out_dir = {},
                                int jobs = 1);

// Scans *.csv metric traces in `dir` (other CSVs are ignored; malformed
// traces are skipped with a warning) and writes <dir>/summary.csv with
// cost/time-to-threshold columns per run plus per-group median rows.
// Thresholds default to the ones recorded in the traces.
std::filesystem::path summarize_directory(const std::filesystem::path& dir,
                                          std::vector<double> thresholds = {});

std::vector<std::string> preset_names();
std::string preset_description(const std::string& name);
std::string preset_text(const std::string& name);

// $RWADMM_OUT_DIR if set, else "runs"
std::filesystem::path default_output_root();

}  // namespace rwadmm

#endif  // RWADMM_EXPERIMENT_HPP
