// Command-line front end: run experiment specs, summarize trace directories,
// and print the bundled preset specs.
#include <cstdio>
#include <fstream>
#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "rwadmm/experiment.hpp"

namespace {

int cmd_run(const std::string& spec, const std::string& out, int jobs) {
  const auto result = rwadmm::run_experiment(spec, out, jobs);
  std::cout << "wrote " << result.trace_files.size() << " trace(s) to "
            << result.out_dir.string() << "\n"
            << "summary: " << result.summary_file.string() << "\n";
  return 0;
}

int cmd_summarize(const std::string& dir) {
  const auto summary = rwadmm::summarize_directory(dir);
  std::cout << "summary: " << summary.string() << "\n";
  return 0;
}

int cmd_presets(const std::string& name, const std::string& out) {
  if (name.empty()) {
    for (const auto& p : rwadmm::preset_names())
      std::cout << p << "  -  " << rwadmm::preset_description(p) << "\n";
    return 0;
  }
  const std::string text = rwadmm::preset_text(name);
  if (out.empty()) {
    std::cout << text;
    return 0;
  }
  std::ofstream file(out, std::ios::binary);
  if (!file || !(file << text).flush())
    throw std::runtime_error("cannot write " + out);
  std::cout << "wrote " << out << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"random-walk ADMM experiment runner"};
  app.require_subcommand(1);

  std::string spec_path, out_dir;
  int jobs = 1;
  auto* run = app.add_subcommand("run", "run every run section of a spec file");
  run->add_option("spec", spec_path, "experiment spec file")->required();
  run->add_option("-o,--out", out_dir, "output directory (default: runs/<name>)");
  run->add_option("-j,--jobs", jobs, "worker threads")->check(CLI::PositiveNumber);

  std::string sum_dir;
  auto* summarize =
      app.add_subcommand("summarize", "rebuild summary.csv from a trace directory");
  summarize->add_option("dir", sum_dir, "directory of trace CSVs")->required();

  std::string preset_name, preset_out;
  auto* presets = app.add_subcommand("presets", "list presets or print one");
  presets->add_option("name", preset_name, "preset to print");
  presets->add_option("-o,--out", preset_out, "write the spec here instead of stdout");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    if (run->parsed()) return cmd_run(spec_path, out_dir, jobs);
    if (summarize->parsed()) return cmd_summarize(sum_dir);
    return cmd_presets(preset_name, preset_out);
  } catch (const rwadmm::SpecError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}
