#include "rwadmm/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <map>
#include <mutex>
#include <sstream>
#include <thread>

namespace rwadmm {

namespace fs = std::filesystem;

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r'))
    s.remove_suffix(1);
  return s;
}

std::vector<std::string> split_ws(std::string_view s) {
  std::vector<std::string> out;
  std::size_t i = 0;
  while (i < s.size()) {
    while (i < s.size() && (s[i] == ' ' || s[i] == '\t')) ++i;
    std::size_t j = i;
    while (j < s.size() && s[j] != ' ' && s[j] != '\t') ++j;
    if (j > i) out.emplace_back(s.substr(i, j - i));
    i = j;
  }
  return out;
}

struct RawEntry {
  std::string key;
  std::string value;
  int line = 0;
};

struct RawSection {
  std::string name;
  int line = 0;
  std::vector<RawEntry> entries;
};

std::vector<RawSection> parse_sections(std::string_view text, const std::string& origin) {
  std::vector<RawSection> sections;
  int lineno = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const auto nl = text.find('\n', pos);
    std::string_view line =
        (nl == std::string_view::npos) ? text.substr(pos) : text.substr(pos, nl - pos);
    pos = (nl == std::string_view::npos) ? text.size() + 1 : nl + 1;
    ++lineno;

    line = trim(line);
    if (line.empty() || line.front() == '#' || line.front() == ';') continue;

    if (line.front() == '[') {
      if (line.back() != ']')
        throw SpecError(origin, lineno, "unterminated section header");
      sections.push_back({std::string(trim(line.substr(1, line.size() - 2))), lineno, {}});
      continue;
    }

    const auto eq = line.find('=');
    if (eq == std::string_view::npos)
      throw SpecError(origin, lineno, "expected 'key = value'");
    if (sections.empty())
      throw SpecError(origin, lineno, "key outside of any section");
    const std::string key{trim(line.substr(0, eq))};
    const std::string value{trim(line.substr(eq + 1))};
    if (key.empty()) throw SpecError(origin, lineno, "empty key");
    for (const auto& e : sections.back().entries)
      if (e.key == key)
        throw SpecError(origin, lineno,
                        "duplicate key '" + key + "' (first at line " +
                            std::to_string(e.line) + ")");
    sections.back().entries.push_back({key, value, lineno});
  }
  return sections;
}

// Typed access to one section's entries; tracks which keys were consumed so
// unknown keys can be reported with their line numbers.
class SectionReader {
 public:
  SectionReader(const RawSection& section, const std::string& origin)
      : section_(section), origin_(origin), used_(section.entries.size(), false) {}

  const RawEntry* find(const std::string& key) {
    for (std::size_t i = 0; i < section_.entries.size(); ++i) {
      if (section_.entries[i].key == key) {
        used_[i] = true;
        return &section_.entries[i];
      }
    }
    return nullptr;
  }

  template <typename T, typename Parser>
  T single(const std::string& key, T fallback, Parser parse) {
    const RawEntry* e = find(key);
    if (!e) return fallback;
    const auto items = split_ws(e->value);
    if (items.size() != 1)
      throw SpecError(origin_, e->line, "'" + key + "' takes a single value");
    return parse(items.front(), e->line);
  }

  template <typename T, typename Parser>
  std::vector<T> list(const std::string& key, std::vector<T> fallback, Parser parse) {
    const RawEntry* e = find(key);
    if (!e) return fallback;
    const auto items = split_ws(e->value);
    if (items.empty()) throw SpecError(origin_, e->line, "'" + key + "' has no values");
    std::vector<T> out;
    for (const auto& item : items) out.push_back(parse(item, e->line));
    for (std::size_t i = 0; i < out.size(); ++i)
      for (std::size_t j = i + 1; j < out.size(); ++j)
        if (out[i] == out[j])
          throw SpecError(origin_, e->line, "'" + key + "' lists a value twice");
    return out;
  }

  void reject_unused() const {
    for (std::size_t i = 0; i < section_.entries.size(); ++i)
      if (!used_[i])
        throw SpecError(origin_, section_.entries[i].line,
                        "unknown key '" + section_.entries[i].key + "' in section [" +
                            section_.name + "]");
  }

 private:
  const RawSection& section_;
  const std::string& origin_;
  std::vector<bool> used_;
};

long parse_long_v(const std::string& s, const std::string& origin, int line) {
  long v = 0;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc{} || res.ptr != s.data() + s.size())
    throw SpecError(origin, line, "expected an integer, got '" + s + "'");
  return v;
}

std::uint64_t parse_u64_v(const std::string& s, const std::string& origin, int line) {
  std::uint64_t v = 0;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc{} || res.ptr != s.data() + s.size())
    throw SpecError(origin, line, "expected a nonnegative integer, got '" + s + "'");
  return v;
}

double parse_double_v(const std::string& s, const std::string& origin, int line) {
  double v = 0.0;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc{} || res.ptr != s.data() + s.size())
    throw SpecError(origin, line, "expected a number, got '" + s + "'");
  return v;
}

bool parse_bool_v(const std::string& s, const std::string& origin, int line) {
  if (s == "true" || s == "1") return true;
  if (s == "false" || s == "0") return false;
  throw SpecError(origin, line, "expected true/false, got '" + s + "'");
}

bool valid_name(std::string_view name) {
  if (name.empty()) return false;
  for (char c : name)
    if (!std::isalnum(static_cast<unsigned char>(c)) && c != '_' && c != '-')
      return false;
  return true;
}

void read_run_keys(SectionReader& r, const std::string& origin,
                   ExperimentSpec::RunSection& run, bool allow_algorithm) {
  const auto as_long = [&](const std::string& s, int line) {
    return parse_long_v(s, origin, line);
  };
  const auto as_int = [&](const std::string& s, int line) {
    return static_cast<int>(parse_long_v(s, origin, line));
  };
  const auto as_double = [&](const std::string& s, int line) {
    return parse_double_v(s, origin, line);
  };
  const auto as_bool = [&](const std::string& s, int line) {
    return parse_bool_v(s, origin, line);
  };

  if (allow_algorithm) {
    if (const RawEntry* e = r.find("algorithm")) {
      try {
        run.algorithm = algorithm_from_string(split_ws(e->value).size() == 1
                                                  ? split_ws(e->value).front()
                                                  : e->value);
      } catch (const std::invalid_argument& ex) {
        throw SpecError(origin, e->line, ex.what());
      }
    } else {
      throw SpecError(origin, run.line, "[run:" + run.name + "] needs an algorithm");
    }
  }

  run.walks = r.list("walks", run.walks, as_int);
  run.rho = r.list("rho", run.rho, as_double);
  run.tau = r.list("tau", run.tau, as_double);
  run.alpha = r.list("alpha", run.alpha, as_double);
  run.max_events = r.single("max_events", run.max_events, as_long);
  run.max_sim_time = r.single("max_sim_time", run.max_sim_time, as_double);
  run.delay_lo = r.single("delay_lo", run.delay_lo, as_double);
  run.delay_hi = r.single("delay_hi", run.delay_hi, as_double);
  run.compute_time = r.single("compute_time", run.compute_time, as_double);
  run.stride = r.single("stride", run.stride, as_long);
  run.allow_self_loop = r.single("allow_self_loop", run.allow_self_loop, as_bool);
  run.round_cost = r.single("round_cost", run.round_cost, as_double);
  run.check_descent = r.single("check_descent", run.check_descent, as_bool);
  if (const RawEntry* e = r.find("init")) {
    const auto items = split_ws(e->value);
    if (items.size() != 1 ||
        (items.front() != "zeros" && items.front() != "dual_consistent"))
      throw SpecError(origin, e->line, "init must be zeros or dual_consistent");
    run.init = items.front() == "zeros" ? RunConfig::InitMode::zeros
                                        : RunConfig::InitMode::dual_consistent;
  }
}

std::string format_compact(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%g", v);
  return buf;
}

std::string threshold_label(double t) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.0e", t);
  return buf;
}

}  // namespace

ExperimentSpec parse_spec_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw SpecError(path.string(), 0, "cannot open spec file");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_spec_text(ss.str(), path.string());
}

ExperimentSpec parse_spec_text(std::string_view text, const std::string& origin) {
  const auto sections = parse_sections(text, origin);

  ExperimentSpec spec;
  spec.name = fs::path(origin).stem().string();

  ExperimentSpec::RunSection defaults;
  bool saw_network = false;
  bool saw_problem = false;

  for (const auto& section : sections) {
    if (section.name == "experiment") {
      SectionReader r(section, origin);
      if (const RawEntry* e = r.find("name")) {
        const auto items = split_ws(e->value);
        if (items.size() != 1 || !valid_name(items.front()))
          throw SpecError(origin, e->line,
                          "experiment name must be one token of [A-Za-z0-9_-]");
        spec.name = items.front();
      }
      spec.seeds = r.list("seeds", spec.seeds, [&](const std::string& s, int line) {
        return parse_u64_v(s, origin, line);
      });
      spec.thresholds =
          r.list("thresholds", spec.thresholds, [&](const std::string& s, int line) {
            const double v = parse_double_v(s, origin, line);
            if (!(v > 0.0))
              throw SpecError(origin, line, "thresholds must be positive");
            return v;
          });
      r.reject_unused();
    } else if (section.name == "network") {
      saw_network = true;
      SectionReader r(section, origin);
      spec.n_agents = r.single("agents", 0, [&](const std::string& s, int line) {
        return static_cast<int>(parse_long_v(s, origin, line));
      });
      spec.density = r.single("density", 0.0, [&](const std::string& s, int line) {
        return parse_double_v(s, origin, line);
      });
      spec.network_seed =
          r.single("seed", spec.network_seed, [&](const std::string& s, int line) {
            return parse_u64_v(s, origin, line);
          });
      r.reject_unused();
      if (spec.n_agents < 1)
        throw SpecError(origin, section.line, "[network] needs agents >= 1");
      if (!(spec.density > 0.0) || spec.density > 1.0)
        throw SpecError(origin, section.line, "[network] needs density in (0, 1]");
    } else if (section.name == "problem") {
      saw_problem = true;
      SectionReader r(section, origin);
      if (const RawEntry* e = r.find("loss")) {
        try {
          spec.loss = loss_family_from_string(split_ws(e->value).size() == 1
                                                  ? split_ws(e->value).front()
                                                  : e->value);
        } catch (const std::invalid_argument& ex) {
          throw SpecError(origin, e->line, ex.what());
        }
      } else {
        throw SpecError(origin, section.line, "[problem] needs a loss");
      }
      spec.samples_per_agent =
          r.single("samples", spec.samples_per_agent, [&](const std::string& s, int line) {
            return static_cast<int>(parse_long_v(s, origin, line));
          });
      spec.dimension = r.single("dim", spec.dimension, [&](const std::string& s, int line) {
        return static_cast<int>(parse_long_v(s, origin, line));
      });
      spec.data_seed = r.single("seed", spec.data_seed, [&](const std::string& s, int line) {
        return parse_u64_v(s, origin, line);
      });
      r.reject_unused();
      if (spec.samples_per_agent < 1 || spec.dimension < 1)
        throw SpecError(origin, section.line, "[problem] sizes must be positive");
    } else if (section.name == "defaults") {
      SectionReader r(section, origin);
      defaults.line = section.line;
      read_run_keys(r, origin, defaults, /*allow_algorithm=*/false);
      r.reject_unused();
    } else if (section.name.rfind("run:", 0) == 0) {
      ExperimentSpec::RunSection run = defaults;
      run.name = section.name.substr(4);
      run.line = section.line;
      if (!valid_name(run.name) || run.name == "network" || run.name == "dataset" ||
          run.name == "summary")
        throw SpecError(origin, section.line,
                        "bad run name '" + run.name + "'");
      for (const auto& prev : spec.runs)
        if (prev.name == run.name)
          throw SpecError(origin, section.line, "duplicate run '" + run.name + "'");
      SectionReader r(section, origin);
      read_run_keys(r, origin, run, /*allow_algorithm=*/true);
      r.reject_unused();
      spec.runs.push_back(std::move(run));
    } else {
      throw SpecError(origin, section.line, "unknown section [" + section.name + "]");
    }
  }

  if (!saw_network) throw SpecError(origin, 0, "missing [network] section");
  if (!saw_problem) throw SpecError(origin, 0, "missing [problem] section");
  if (spec.runs.empty()) throw SpecError(origin, 0, "no [run:...] sections");

  // Static checks that do not need the instance built.
  for (const auto& run : spec.runs) {
    for (int m : run.walks) {
      if (m < 1 || m > spec.n_agents)
        throw SpecError(origin, run.line,
                        "walks must lie in [1, agents] in run '" + run.name + "'");
      if (run.algorithm == Algorithm::w_admm && m != 1)
        throw SpecError(origin, run.line, "w_admm runs use exactly one walk");
    }
    if (run.algorithm == Algorithm::ipw_admm && spec.n_agents < 2)
      throw SpecError(origin, run.line, "ipw_admm needs at least two agents");
    for (double rho : run.rho)
      if (!(rho > 0.0))
        throw SpecError(origin, run.line, "rho must be positive in run '" + run.name + "'");
    for (double tau : run.tau)
      if (tau < 0.0)
        throw SpecError(origin, run.line,
                        "tau must be nonnegative in run '" + run.name + "'");
    if (!(run.delay_lo >= 0.0) || !(run.delay_hi > run.delay_lo))
      throw SpecError(origin, run.line,
                      "need 0 <= delay_lo < delay_hi in run '" + run.name + "'");
    if (run.max_events < 0)
      throw SpecError(origin, run.line, "max_events must be nonnegative");
  }
  if (edge_count_for_density(spec.n_agents, spec.density) < spec.n_agents - 1)
    throw SpecError(origin, 0, "network density too low for a connected graph");
  return spec;
}

std::vector<PlannedRun> expand_runs(const ExperimentSpec& spec) {
  std::vector<PlannedRun> planned;
  for (const auto& run : spec.runs) {
    for (int walks : run.walks) {
      for (double rho : run.rho) {
        for (double tau : run.tau) {
          for (double alpha : run.alpha) {
            std::string group = run.name;
            if (run.walks.size() > 1) group += "_m" + std::to_string(walks);
            if (run.rho.size() > 1) group += "_rho" + format_compact(rho);
            if (run.tau.size() > 1) group += "_tau" + format_compact(tau);
            if (run.alpha.size() > 1) group += "_alpha" + format_compact(alpha);
            for (std::uint64_t seed : spec.seeds) {
              PlannedRun p;
              p.group = group;
              p.name = group + "_s" + std::to_string(seed);
              p.config.algorithm = run.algorithm;
              p.config.n_walks = walks;
              p.config.rho = rho;
              p.config.tau = tau;
              p.config.alpha = alpha;
              p.config.seed = seed;
              p.config.max_events = run.max_events;
              p.config.max_sim_time = run.max_sim_time;
              p.config.delay_lo = run.delay_lo;
              p.config.delay_hi = run.delay_hi;
              p.config.compute_time = run.compute_time;
              p.config.sample_stride = run.stride;
              p.config.allow_self_loop = run.allow_self_loop;
              p.config.round_cost_override = run.round_cost;
              p.config.init = run.init;
              p.config.check_descent = run.check_descent;
              planned.push_back(std::move(p));
            }
          }
        }
      }
    }
  }
  return planned;
}

std::optional<TraceRecord> first_crossing(const MetricsTrace& trace, double threshold) {
  for (const auto& r : trace.records)
    if (r.accuracy <= threshold) return r;
  return std::nullopt;
}

namespace {

struct SummaryRow {
  std::string run, group, algorithm, walks, seed;
  std::vector<double> cost;  // +inf when the threshold is never reached
  std::vector<double> time;
};

std::optional<double> median_or_unreached(std::vector<double> values) {
  if (values.empty()) return std::nullopt;
  std::sort(values.begin(), values.end());
  const std::size_t n = values.size();
  if (n % 2 == 1) {
    const double m = values[n / 2];
    return std::isinf(m) ? std::nullopt : std::optional<double>(m);
  }
  const double a = values[n / 2 - 1];
  const double b = values[n / 2];
  if (std::isinf(a) || std::isinf(b)) return std::nullopt;
  return 0.5 * (a + b);
}

std::string build_summary_csv(const std::vector<SummaryRow>& rows,
                              const std::vector<double>& thresholds) {
  std::string out = "run,algorithm,walks,seed";
  for (double t : thresholds) out += ",cost_to_" + threshold_label(t);
  for (double t : thresholds) out += ",time_to_" + threshold_label(t);
  out += '\n';

  const auto cell = [](double v) { return std::isinf(v) ? std::string() : format_g17(v); };
  const auto emit = [&](const std::string& run, const std::string& algorithm,
                        const std::string& walks, const std::string& seed,
                        const std::vector<double>& cost, const std::vector<double>& time) {
    out += run + ',' + algorithm + ',' + walks + ',' + seed;
    for (double v : cost) out += ',' + cell(v);
    for (double v : time) out += ',' + cell(v);
    out += '\n';
  };

  for (const auto& r : rows) emit(r.run, r.algorithm, r.walks, r.seed, r.cost, r.time);

  // per-group medians across seeds, groups in first-appearance order
  std::vector<std::string> group_order;
  std::map<std::string, std::vector<const SummaryRow*>> groups;
  for (const auto& r : rows) {
    auto& members = groups[r.group];
    if (members.empty()) group_order.push_back(r.group);
    members.push_back(&r);
  }
  for (const auto& g : group_order) {
    const auto& members = groups[g];
    std::vector<double> cost(thresholds.size()), time(thresholds.size());
    for (std::size_t t = 0; t < thresholds.size(); ++t) {
      std::vector<double> c, w;
      for (const auto* m : members) {
        c.push_back(m->cost[t]);
        w.push_back(m->time[t]);
      }
      const auto mc = median_or_unreached(std::move(c));
      const auto mw = median_or_unreached(std::move(w));
      cost[t] = mc ? *mc : std::numeric_limits<double>::infinity();
      time[t] = mw ? *mw : std::numeric_limits<double>::infinity();
    }
    emit(g, members.front()->algorithm, members.front()->walks, "median", cost, time);
  }
  return out;
}

SummaryRow summary_row_for(const std::string& stem, const MetricsTrace& trace,
                           const std::vector<double>& thresholds) {
  SummaryRow row;
  const std::string* v;
  row.run = (v = trace.find_meta("run")) ? *v : stem;
  row.algorithm = (v = trace.find_meta("algorithm")) ? *v : "?";
  row.walks = (v = trace.find_meta("n_walks")) ? *v : "";
  row.seed = (v = trace.find_meta("seed")) ? *v : "";
  row.group = (v = trace.find_meta("group"))
                  ? *v
                  : row.algorithm + (row.walks.empty() ? "" : "_m" + row.walks);
  for (double t : thresholds) {
    const auto hit = first_crossing(trace, t);
    row.cost.push_back(hit ? hit->comm_units
                           : std::numeric_limits<double>::infinity());
    row.time.push_back(hit ? hit->sim_time_s
                           : std::numeric_limits<double>::infinity());
  }
  return row;
}

}  // namespace

fs::path summarize_directory(const fs::path& dir, std::vector<double> thresholds) {
  if (!fs::is_directory(dir))
    throw SpecError(dir.string(), 0, "not a directory");

  std::vector<fs::path> files;
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (!entry.is_regular_file()) continue;
    const auto& p = entry.path();
    if (p.extension() == ".csv" && p.filename() != "summary.csv") files.push_back(p);
  }
  std::sort(files.begin(), files.end());

  std::vector<std::pair<std::string, MetricsTrace>> traces;
  for (const auto& file : files) {
    std::ifstream in(file, std::ios::binary);
    if (!in) {
      std::cerr << "summarize: skipping unreadable " << file.string() << "\n";
      continue;
    }
    std::ostringstream ss;
    ss << in.rdbuf();
    const std::string text = ss.str();
    const auto first_line = std::string_view(text).substr(0, text.find('\n'));
    if (trim(first_line) != kTraceHeader) continue;  // some other CSV, not a trace
    try {
      traces.emplace_back(file.stem().string(), trace_from_csv(text, file.string()));
    } catch (const std::runtime_error& e) {
      std::cerr << "summarize: skipping malformed trace: " << e.what() << "\n";
    }
  }
  if (traces.empty())
    throw SpecError(dir.string(), 0, "no metric traces found");

  if (thresholds.empty()) {
    for (const auto& [stem, trace] : traces) {
      if (const std::string* v = trace.find_meta("thresholds")) {
        for (const auto& tok : split_ws(*v)) {
          double t = 0.0;
          const auto res = std::from_chars(tok.data(), tok.data() + tok.size(), t);
          if (res.ec == std::errc{} && t > 0.0) thresholds.push_back(t);
        }
        if (!thresholds.empty()) break;
      }
    }
    if (thresholds.empty()) thresholds = {1e-1, 1e-2, 1e-3, 1e-4};
  }

  std::vector<SummaryRow> rows;
  rows.reserve(traces.size());
  for (const auto& [stem, trace] : traces)
    rows.push_back(summary_row_for(stem, trace, thresholds));

  const fs::path out = dir / "summary.csv";
  write_file_atomic(out, build_summary_csv(rows, thresholds));
  return out;
}

ExperimentResult run_experiment(const fs::path& spec_file, const fs::path& out_dir,
                                int jobs) {
  const ExperimentSpec spec = parse_spec_file(spec_file);
  const auto planned = expand_runs(spec);
  if (jobs < 1) throw SpecError(spec_file.string(), 0, "jobs must be at least 1");

  ExperimentResult result;
  result.out_dir = out_dir.empty() ? default_output_root() / spec.name : out_dir;
  fs::create_directories(result.out_dir);

  const Network net = generate_network(spec.n_agents, spec.density, spec.network_seed);
  const ConsensusProblem problem =
      spec.loss == LossFamily::least_squares
          ? synthesize_least_squares(spec.n_agents, spec.samples_per_agent,
                                     spec.dimension, spec.data_seed)
          : synthesize_logistic(spec.n_agents, spec.samples_per_agent, spec.dimension,
                                spec.data_seed);

  save_edges_csv(net, result.out_dir / "network.csv");
  save_datasets_csv(problem, result.out_dir / "dataset.csv");

  std::string thresholds_meta;
  for (double t : spec.thresholds) {
    if (!thresholds_meta.empty()) thresholds_meta += ' ';
    thresholds_meta += format_g17(t);
  }

  std::vector<MetricsTrace> traces(planned.size());
  std::atomic<std::size_t> cursor{0};
  std::mutex error_mutex;
  std::exception_ptr error;

  const auto worker = [&] {
    for (;;) {
      const std::size_t k = cursor.fetch_add(1);
      if (k >= planned.size()) return;
      try {
        RunResult r = run(planned[k].config, net, problem);
        traces[k] = std::move(r.trace);
      } catch (...) {
        const std::lock_guard<std::mutex> lock(error_mutex);
        if (!error) error = std::current_exception();
        return;
      }
    }
  };

  const int workers =
      std::min<int>(jobs, static_cast<int>(std::max<std::size_t>(planned.size(), 1)));
  if (workers <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (int w = 0; w < workers; ++w) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  if (error) std::rethrow_exception(error);

  for (std::size_t k = 0; k < planned.size(); ++k) {
    MetricsTrace& trace = traces[k];
    trace.set_meta("run", planned[k].name);
    trace.set_meta("group", planned[k].group);
    trace.set_meta("density", format_g17(spec.density));
    trace.set_meta("network_seed", std::to_string(spec.network_seed));
    trace.set_meta("data_seed", std::to_string(spec.data_seed));
    trace.set_meta("samples_per_agent", std::to_string(spec.samples_per_agent));
    trace.set_meta("thresholds", thresholds_meta);
    const fs::path file = result.out_dir / (planned[k].name + ".csv");
    write_trace_csv(trace, file);
    result.trace_files.push_back(file);
  }

  result.summary_file = summarize_directory(result.out_dir, spec.thresholds);
  return result;
}

namespace {

struct Preset {
  const char* name;
  const char* description;
  const char* text;
};

constexpr Preset kPresets[] = {
    {"fig2_ls",
     "least-squares consensus, 50 agents: walk algorithms vs gossip baselines",
     R"(# Least-squares consensus on a 50-agent network.
# Walk-based ADMM variants against synchronous baselines.
# Multi-walk runs are only stable when rho stays near or below the local
# gradient Lipschitz constant (about 1.2 here); pair a small rho with a
# larger proximal weight tau.

[experiment]
name = fig2_ls
seeds = 1 2 3 4 5 6 7 8 9 10

[network]
agents = 50
density = 0.3
seed = 101

[problem]
loss = least_squares
samples = 30
dim = 2
seed = 202

[defaults]
max_events = 100000
stride = 50

[run:w_admm]
algorithm = w_admm
walks = 1
rho = 1
tau = 3

[run:pw_admm]
algorithm = pw_admm
walks = 10
rho = 1
tau = 3

[run:ipw_admm]
algorithm = ipw_admm
walks = 10
rho = 1
tau = 3

[run:sync_admm]
algorithm = sync_admm
rho = 1
max_events = 2000

[run:dgd]
algorithm = dgd
alpha = 0.01
max_events = 5000

[run:extra]
algorithm = extra
alpha = 0.05
max_events = 5000
)"},
    {"fig3_m_sweep",
     "walk-count sweep on 100 agents: communication cost vs convergence time",
     R"(# How the number of parallel walks trades communication for time.

[experiment]
name = fig3_m_sweep
seeds = 1 2 3 4 5 6 7 8 9 10

[network]
agents = 100
density = 0.3
seed = 101

[problem]
loss = least_squares
samples = 30
dim = 2
seed = 202

[defaults]
max_events = 200000
stride = 100
rho = 1
tau = 3

[run:pw_admm]
algorithm = pw_admm
walks = 1 10 30

[run:ipw_admm]
algorithm = ipw_admm
walks = 1 10 30
)"},
    {"fig4_logistic",
     "logistic regression, 50 agents: walk algorithms vs gossip baselines",
     R"(# Logistic regression on a 50-agent network.

[experiment]
name = fig4_logistic
seeds = 1 2 3 4 5 6 7 8 9 10

[network]
agents = 50
density = 0.3
seed = 101

[problem]
loss = logistic
samples = 30
dim = 2
seed = 202

[defaults]
max_events = 100000
stride = 50

[run:w_admm]
algorithm = w_admm
walks = 1
rho = 1
tau = 3

[run:pw_admm]
algorithm = pw_admm
walks = 10
rho = 1
tau = 3

[run:ipw_admm]
algorithm = ipw_admm
walks = 10
rho = 1
tau = 3

[run:sync_admm]
algorithm = sync_admm
rho = 1
max_events = 2000

[run:dgd]
algorithm = dgd
alpha = 0.01
max_events = 5000

[run:extra]
algorithm = extra
alpha = 0.01
max_events = 5000
)"},
};

const Preset* find_preset(const std::string& name) {
  for (const auto& p : kPresets)
    if (name == p.name) return &p;
  return nullptr;
}

}  // namespace

std::vector<std::string> preset_names() {
  std::vector<std::string> names;
  for (const auto& p : kPresets) names.emplace_back(p.name);
  return names;
}

std::string preset_description(const std::string& name) {
  const Preset* p = find_preset(name);
  if (!p) throw SpecError(name, 0, "unknown preset");
  return p->description;
}

std::string preset_text(const std::string& name) {
  const Preset* p = find_preset(name);
  if (!p) throw SpecError(name, 0, "unknown preset");
  return p->text;
}

fs::path default_output_root() {
  if (const char* env = std::getenv("RWADMM_OUT_DIR"); env && *env) return env;
  return "runs";
}

}  // namespace rwadmm
