#include <algorithm>
#include <atomic>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <map>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "rbp/errors.hpp"
#include "rbp/experiment.hpp"

namespace rbp {

namespace {

std::string trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return std::string(s.substr(first, last - first + 1));
}

[[noreturn]] void fail(std::string_view origin, std::size_t line, const std::string& msg) {
  std::ostringstream os;
  os << origin << ":" << line << ": " << msg;
  throw ConfigError(os.str());
}

double parse_double(std::string_view origin, std::size_t line, const std::string& value) {
  double out = 0.0;
  const char* begin = value.data();
  const char* end = begin + value.size();
  const auto [ptr, ec] = std::from_chars(begin, end, out);
  if (ec != std::errc() || ptr != end) fail(origin, line, "expected a number, got '" + value + "'");
  return out;
}

std::uint64_t parse_u64(std::string_view origin, std::size_t line, const std::string& value) {
  std::uint64_t out = 0;
  const char* begin = value.data();
  const char* end = begin + value.size();
  const auto [ptr, ec] = std::from_chars(begin, end, out);
  if (ec != std::errc() || ptr != end) {
    fail(origin, line, "expected a nonnegative integer, got '" + value + "'");
  }
  return out;
}

bool parse_bool(std::string_view origin, std::size_t line, const std::string& value) {
  if (value == "true" || value == "1") return true;
  if (value == "false" || value == "0") return false;
  fail(origin, line, "expected true/false, got '" + value + "'");
}

bool valid_name(const std::string& name) {
  if (name.empty()) return false;
  for (char c : name) {
    if (!std::isalnum(static_cast<unsigned char>(c)) && c != '_' && c != '-' && c != '.') {
      return false;
    }
  }
  return true;
}

// Raw per-run key set; the ForgettingState is assembled once the section is
// complete so key order inside a section does not matter.
struct RunDraft {
  std::string name;
  std::size_t line = 0;
  TrainerConfig config;
  ForgettingMode forgetting_mode = ForgettingMode::startup;
  double tau_f = 100.0;
  double lambda1_0 = 0.5;
  double lambda_min = 0.1;
  double fixed_lambda = 0.98;
};

void finish_run(std::string_view origin, RunDraft& draft, ExperimentSpec& spec) {
  try {
    draft.config.forgetting = make_forgetting(draft.forgetting_mode, draft.tau_f,
                                              draft.lambda1_0, draft.lambda_min,
                                              draft.fixed_lambda);
    draft.config.validate();
  } catch (const std::invalid_argument& err) {
    fail(origin, draft.line, std::string("run '") + draft.name + "': " + err.what());
  }
  spec.runs.push_back({draft.name, draft.config});
}

std::string mode_name(ForgettingMode mode) {
  switch (mode) {
    case ForgettingMode::fixed: return "fixed";
    case ForgettingMode::startup: return "startup";
    case ForgettingMode::adaptive: return "adaptive";
    case ForgettingMode::combined: return "combined";
  }
  return "startup";
}

std::string strategy_name(RateStrategyKind kind) {
  switch (kind) {
    case RateStrategyKind::fixed: return "fixed";
    case RateStrategyKind::decayed: return "decayed";
    case RateStrategyKind::optimized: return "optimized";
  }
  return "optimized";
}

}  // namespace

std::string format_g17(double value) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", value);
  return buf;
}

ExperimentSpec parse_config_text(std::string_view text, std::string_view origin) {
  ExperimentSpec spec;
  bool have_name = false;
  bool in_run = false;
  RunDraft draft;

  std::istringstream stream{std::string(text)};
  std::string raw;
  std::size_t lineno = 0;
  while (std::getline(stream, raw)) {
    ++lineno;
    const auto hash = raw.find('#');
    if (hash != std::string::npos) raw.erase(hash);
    const std::string line = trim(raw);
    if (line.empty()) continue;

    if (line.front() == '[') {
      if (line.back() != ']') fail(origin, lineno, "unterminated section header");
      const std::string inner = trim(line.substr(1, line.size() - 2));
      if (inner.size() < 4 || inner.substr(0, 4) != "run ") {
        fail(origin, lineno, "expected [run NAME], got '" + line + "'");
      }
      if (in_run) finish_run(origin, draft, spec);
      draft = RunDraft{};
      draft.name = trim(inner.substr(4));
      draft.line = lineno;
      if (!valid_name(draft.name)) {
        fail(origin, lineno, "run name must be nonempty [A-Za-z0-9_.-]");
      }
      for (const auto& existing : spec.runs) {
        if (existing.name == draft.name) {
          fail(origin, lineno, "duplicate run name '" + draft.name + "'");
        }
      }
      in_run = true;
      continue;
    }

    const auto eq = line.find('=');
    if (eq == std::string::npos) fail(origin, lineno, "expected key = value, got '" + line + "'");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty()) fail(origin, lineno, "empty key");
    if (value.empty()) fail(origin, lineno, "empty value for key '" + key + "'");

    if (!in_run) {
      if (key == "name") {
        if (!valid_name(value)) fail(origin, lineno, "experiment name must be [A-Za-z0-9_.-]");
        spec.name = value;
        have_name = true;
      } else if (key == "output") {
        spec.output_path = value;
      } else if (key == "emit_weights") {
        spec.emit_weights = parse_bool(origin, lineno, value);
      } else {
        fail(origin, lineno, "unknown global key '" + key + "'");
      }
      continue;
    }

    TrainerConfig& cfg = draft.config;
    if (key == "in") {
      cfg.network.in_dim = parse_u64(origin, lineno, value);
    } else if (key == "hidden") {
      cfg.network.hidden_dim = parse_u64(origin, lineno, value);
    } else if (key == "out") {
      cfg.network.out_dim = parse_u64(origin, lineno, value);
    } else if (key == "shape_factor") {
      cfg.network.shape_factor = parse_double(origin, lineno, value);
    } else if (key == "output_activation") {
      if (value == "nonlinear") {
        cfg.network.output_activation = OutputActivation::nonlinear;
      } else if (value == "linear") {
        cfg.network.output_activation = OutputActivation::linear;
      } else {
        fail(origin, lineno, "output_activation must be nonlinear or linear");
      }
    } else if (key == "strategy") {
      if (value == "fixed") {
        cfg.rate.kind = RateStrategyKind::fixed;
      } else if (value == "decayed") {
        cfg.rate.kind = RateStrategyKind::decayed;
      } else if (value == "optimized") {
        cfg.rate.kind = RateStrategyKind::optimized;
      } else {
        fail(origin, lineno, "strategy must be fixed, decayed or optimized");
      }
    } else if (key == "eta") {
      cfg.rate.eta = parse_double(origin, lineno, value);
    } else if (key == "eta0") {
      cfg.rate.eta0 = parse_double(origin, lineno, value);
    } else if (key == "beta") {
      cfg.rate.beta = parse_double(origin, lineno, value);
    } else if (key == "forgetting") {
      if (value == "fixed") {
        draft.forgetting_mode = ForgettingMode::fixed;
      } else if (value == "startup") {
        draft.forgetting_mode = ForgettingMode::startup;
      } else if (value == "adaptive") {
        draft.forgetting_mode = ForgettingMode::adaptive;
      } else if (value == "combined") {
        draft.forgetting_mode = ForgettingMode::combined;
      } else {
        fail(origin, lineno, "forgetting must be fixed, startup, adaptive or combined");
      }
    } else if (key == "lambda") {
      draft.fixed_lambda = parse_double(origin, lineno, value);
    } else if (key == "lambda1_0") {
      draft.lambda1_0 = parse_double(origin, lineno, value);
    } else if (key == "tau_f") {
      draft.tau_f = parse_double(origin, lineno, value);
    } else if (key == "lambda_min") {
      draft.lambda_min = parse_double(origin, lineno, value);
    } else if (key == "steps") {
      cfg.steps = parse_u64(origin, lineno, value);
      if (cfg.steps == 0) fail(origin, lineno, "steps must be >= 1");
    } else if (key == "seed") {
      cfg.seed = parse_u64(origin, lineno, value);
    } else if (key == "noise_power") {
      cfg.noise_power = parse_double(origin, lineno, value);
    } else if (key == "init_scale") {
      cfg.init_scale = parse_double(origin, lineno, value);
    } else if (key == "clamp_eta_nonnegative") {
      cfg.clamp_eta_nonnegative = parse_bool(origin, lineno, value);
    } else if (key == "eta_guard") {
      cfg.eta_guard = parse_double(origin, lineno, value);
    } else {
      fail(origin, lineno, "unknown run key '" + key + "'");
    }
  }

  if (in_run) finish_run(origin, draft, spec);
  if (!have_name) fail(origin, lineno, "missing required global key 'name'");
  if (spec.runs.empty()) fail(origin, lineno, "configuration declares no [run] sections");
  return spec;
}

ExperimentSpec parse_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open configuration file '" + path.string() + "'");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse_config_text(buffer.str(), path.string());
}

std::string serialize_config(const ExperimentSpec& spec) {
  std::ostringstream os;
  os << "name = " << spec.name << "\n";
  os << "output = " << spec.output_path << "\n";
  os << "emit_weights = " << (spec.emit_weights ? "true" : "false") << "\n";
  for (const auto& run : spec.runs) {
    const TrainerConfig& cfg = run.config;
    os << "\n[run " << run.name << "]\n";
    os << "in = " << cfg.network.in_dim << "\n";
    os << "hidden = " << cfg.network.hidden_dim << "\n";
    os << "out = " << cfg.network.out_dim << "\n";
    os << "shape_factor = " << format_g17(cfg.network.shape_factor) << "\n";
    os << "output_activation = "
       << (cfg.network.output_activation == OutputActivation::nonlinear ? "nonlinear" : "linear")
       << "\n";
    os << "strategy = " << strategy_name(cfg.rate.kind) << "\n";
    os << "eta = " << format_g17(cfg.rate.eta) << "\n";
    os << "eta0 = " << format_g17(cfg.rate.eta0) << "\n";
    os << "beta = " << format_g17(cfg.rate.beta) << "\n";
    os << "forgetting = " << mode_name(cfg.forgetting.mode) << "\n";
    os << "lambda = " << format_g17(cfg.forgetting.fixed_lambda) << "\n";
    os << "lambda1_0 = " << format_g17(cfg.forgetting.lambda1) << "\n";
    os << "tau_f = " << format_g17(cfg.forgetting.tau_f) << "\n";
    os << "lambda_min = " << format_g17(cfg.forgetting.lambda_min) << "\n";
    os << "steps = " << cfg.steps << "\n";
    os << "seed = " << cfg.seed << "\n";
    os << "noise_power = " << format_g17(cfg.noise_power) << "\n";
    os << "init_scale = " << format_g17(cfg.init_scale) << "\n";
    os << "clamp_eta_nonnegative = " << (cfg.clamp_eta_nonnegative ? "true" : "false") << "\n";
    os << "eta_guard = " << format_g17(cfg.eta_guard) << "\n";
  }
  return os.str();
}

void write_run_csv(std::ostream& out, const std::vector<StepRecord>& records,
                   std::size_t out_dim) {
  out << "t,eta,lambda";
  for (std::size_t i = 1; i <= out_dim; ++i) out << ",e" << i;
  out << ",e2,rmse,clamped\n";
  for (const StepRecord& rec : records) {
    out << rec.t << ',' << format_g17(rec.eta) << ',' << format_g17(rec.lambda);
    for (double ei : rec.e) out << ',' << format_g17(ei);
    out << ',' << format_g17(rec.e2) << ',' << format_g17(rec.rmse) << ','
        << (rec.clamped ? 1 : 0) << '\n';
  }
}

void write_summary_csv(std::ostream& out, const std::vector<RunSummary>& summaries) {
  out << "name,final_rmse,min_eta,max_eta,mean_eta,clamp_count,diverged\n";
  for (const RunSummary& s : summaries) {
    out << s.name << ',' << format_g17(s.final_rmse) << ',' << format_g17(s.min_eta) << ','
        << format_g17(s.max_eta) << ',' << format_g17(s.mean_eta) << ',' << s.clamp_count << ','
        << (s.diverged ? 1 : 0) << '\n';
  }
}

namespace {

RunSummary summarize_records(std::string name, const std::vector<StepRecord>& records,
                             bool diverged) {
  RunSummary s;
  s.name = std::move(name);
  s.diverged = diverged;
  if (records.empty()) {
    s.final_rmse = std::numeric_limits<double>::quiet_NaN();
    return s;
  }
  s.final_rmse = records.back().rmse;
  s.min_eta = records.front().eta;
  s.max_eta = records.front().eta;
  double sum = 0.0;
  for (const StepRecord& rec : records) {
    s.min_eta = std::min(s.min_eta, rec.eta);
    s.max_eta = std::max(s.max_eta, rec.eta);
    sum += rec.eta;
    if (rec.clamped) ++s.clamp_count;
  }
  s.mean_eta = sum / static_cast<double>(records.size());
  return s;
}

bool summary_less(const RunSummary& a, const RunSummary& b) {
  if (a.diverged != b.diverged) return !a.diverged;
  const double fa = std::isnan(a.final_rmse) ? std::numeric_limits<double>::infinity()
                                             : a.final_rmse;
  const double fb = std::isnan(b.final_rmse) ? std::numeric_limits<double>::infinity()
                                             : b.final_rmse;
  if (fa != fb) return fa < fb;
  return a.name < b.name;
}

void write_weights_json(const std::filesystem::path& path, const NamedTrainerConfig& run,
                        const NetworkState& net) {
  nlohmann::json doc;
  doc["run"] = run.name;
  doc["in_dim"] = run.config.network.in_dim;
  doc["hidden_dim"] = run.config.network.hidden_dim;
  doc["out_dim"] = run.config.network.out_dim;
  doc["shape_factor"] = run.config.network.shape_factor;
  doc["output_activation"] =
      run.config.network.output_activation == OutputActivation::nonlinear ? "nonlinear"
                                                                          : "linear";
  auto matrix_rows = [](const Matrix& m) {
    std::vector<std::vector<double>> rows(m.rows(), std::vector<double>(m.cols()));
    for (std::size_t i = 0; i < m.rows(); ++i) {
      for (std::size_t j = 0; j < m.cols(); ++j) rows[i][j] = m(i, j);
    }
    return rows;
  };
  doc["w"] = matrix_rows(net.w);
  doc["v"] = matrix_rows(net.v);
  std::ofstream out(path, std::ios::binary);
  out << doc.dump(2) << "\n";
}

}  // namespace

ExperimentResult run_experiment(const ExperimentSpec& spec) {
  if (spec.runs.empty()) throw std::invalid_argument("run_experiment: spec has no runs");
  if (!valid_name(spec.name)) throw std::invalid_argument("run_experiment: invalid spec name");
  for (std::size_t i = 0; i < spec.runs.size(); ++i) {
    for (std::size_t j = i + 1; j < spec.runs.size(); ++j) {
      if (spec.runs[i].name == spec.runs[j].name) {
        throw std::invalid_argument("run_experiment: duplicate run name '" +
                                    spec.runs[i].name + "'");
      }
    }
  }

  const std::filesystem::path out_dir(spec.output_path);
  std::filesystem::create_directories(out_dir);

  ExperimentResult result;
  result.summaries.resize(spec.runs.size());
  result.csv_paths.resize(spec.runs.size());

  // Runs share nothing mutable; each worker owns disjoint slots and files.
  std::atomic<std::size_t> cursor{0};
  auto worker = [&]() {
    for (;;) {
      const std::size_t i = cursor.fetch_add(1);
      if (i >= spec.runs.size()) return;
      const NamedTrainerConfig& run = spec.runs[i];
      RunSummary summary;
      std::vector<StepRecord> records;
      try {
        RunResult rr = run_identification_result(run.config);
        records = std::move(rr.records);
        summary = summarize_records(run.name, records, rr.diverged);
        if (spec.emit_weights && !rr.diverged) {
          write_weights_json(out_dir / (spec.name + "_" + run.name + ".weights.json"), run,
                             rr.final_net);
        }
      } catch (const std::exception& err) {
        summary = summarize_records(run.name, records, true);
        summary.message = err.what();
      }
      const auto csv_path = out_dir / (spec.name + "_" + run.name + ".csv");
      std::ofstream out(csv_path, std::ios::binary);
      write_run_csv(out, records, run.config.network.out_dim);
      result.csv_paths[i] = csv_path;
      result.summaries[i] = std::move(summary);
    }
  };

  const std::size_t workers =
      std::max<std::size_t>(1, std::min<std::size_t>(spec.runs.size(),
                                                     std::thread::hardware_concurrency()));
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (std::size_t i = 0; i < workers; ++i) pool.emplace_back(worker);
  for (auto& th : pool) th.join();

  std::sort(result.summaries.begin(), result.summaries.end(), summary_less);
  result.summary_path = out_dir / (spec.name + "_summary.csv");
  std::ofstream sum_out(result.summary_path, std::ios::binary);
  write_summary_csv(sum_out, result.summaries);

  for (const RunSummary& s : result.summaries) {
    if (s.diverged) result.exit_status = 1;
  }
  return result;
}

std::vector<RunSummary> summarize(const std::vector<std::filesystem::path>& csv_paths) {
  std::vector<RunSummary> summaries;
  summaries.reserve(csv_paths.size());
  for (const auto& path : csv_paths) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open CSV file '" + path.string() + "'");
    const std::string origin = path.string();

    std::string line;
    std::size_t lineno = 1;
    if (!std::getline(in, line)) fail(origin, lineno, "empty CSV");
    if (!line.empty() && line.back() == '\r') line.pop_back();
    std::vector<std::string> header;
    {
      std::istringstream hs(line);
      std::string col;
      while (std::getline(hs, col, ',')) header.push_back(col);
    }
    if (header.size() < 7 || header[0] != "t" || header[1] != "eta" || header[2] != "lambda" ||
        header[header.size() - 3] != "e2" || header[header.size() - 2] != "rmse" ||
        header.back() != "clamped") {
      fail(origin, lineno, "unexpected CSV header '" + line + "'");
    }
    const std::size_t columns = header.size();

    std::vector<StepRecord> records;
    while (std::getline(in, line)) {
      ++lineno;
      if (!line.empty() && line.back() == '\r') line.pop_back();
      if (line.empty()) continue;
      std::vector<std::string> fields;
      std::istringstream ls(line);
      std::string field;
      while (std::getline(ls, field, ',')) fields.push_back(field);
      if (fields.size() != columns) {
        fail(origin, lineno, "expected " + std::to_string(columns) + " fields, got " +
                                 std::to_string(fields.size()));
      }
      StepRecord rec;
      rec.t = parse_u64(origin, lineno, fields[0]);
      rec.eta = parse_double(origin, lineno, fields[1]);
      rec.lambda = parse_double(origin, lineno, fields[2]);
      rec.e.resize(columns - 6);
      for (std::size_t i = 0; i < rec.e.size(); ++i) {
        rec.e[i] = parse_double(origin, lineno, fields[3 + i]);
      }
      rec.e2 = parse_double(origin, lineno, fields[columns - 3]);
      rec.rmse = parse_double(origin, lineno, fields[columns - 2]);
      const std::string& cl = fields[columns - 1];
      if (cl != "0" && cl != "1") fail(origin, lineno, "clamped must be 0 or 1");
      rec.clamped = cl == "1";
      records.push_back(std::move(rec));
    }
    summaries.push_back(summarize_records(path.stem().string(), records, false));
  }
  std::sort(summaries.begin(), summaries.end(), summary_less);
  return summaries;
}

}  // namespace rbp
