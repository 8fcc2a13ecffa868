#include "irsnoma/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <cctype>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <mutex>
#include <sstream>
#include <thread>
#include <tuple>

#include "irsnoma/svg_plot.hpp"

namespace irsnoma {

namespace {

std::string trim(const std::string& s) {
  std::size_t begin = s.find_first_not_of(" \t\r\n");
  if (begin == std::string::npos) return "";
  std::size_t end = s.find_last_not_of(" \t\r\n");
  return s.substr(begin, end - begin + 1);
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, sep)) out.push_back(trim(item));
  if (out.empty()) out.push_back("");
  return out;
}

double parse_double(const std::string& value, int line) {
  std::size_t used = 0;
  double parsed = 0.0;
  try {
    parsed = std::stod(value, &used);
  } catch (const std::exception&) {
    throw ConfigError("line " + std::to_string(line) + ": expected a number, got '" + value + "'");
  }
  if (used != value.size()) {
    throw ConfigError("line " + std::to_string(line) + ": trailing characters in number '" + value + "'");
  }
  return parsed;
}

long long parse_int(const std::string& value, int line) {
  std::size_t used = 0;
  long long parsed = 0;
  try {
    parsed = std::stoll(value, &used);
  } catch (const std::exception&) {
    throw ConfigError("line " + std::to_string(line) + ": expected an integer, got '" + value + "'");
  }
  if (used != value.size()) {
    throw ConfigError("line " + std::to_string(line) + ": trailing characters in integer '" + value + "'");
  }
  return parsed;
}

std::vector<int> parse_int_list(const std::string& value, int line, int min_value) {
  std::vector<int> out;
  for (const auto& item : split(value, ',')) {
    const long long v = parse_int(item, line);
    if (v < min_value) {
      throw ConfigError("line " + std::to_string(line) + ": value " + item +
                        " below minimum " + std::to_string(min_value));
    }
    out.push_back(static_cast<int>(v));
  }
  return out;
}

std::string fmt_g17(double v) {
  char buf[48];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::string dc_status_name(DcStatus s) {
  switch (s) {
    case DcStatus::RankOne: return "rank_one";
    case DcStatus::PenaltyNotZero: return "penalty_not_zero";
    case DcStatus::SubproblemInfeasible: return "subproblem_infeasible";
  }
  return "unknown";
}

std::string phase_outcome_name(PhaseStepOutcome o) {
  switch (o) {
    case PhaseStepOutcome::NotRun: return "not_run";
    case PhaseStepOutcome::RankOne: return "rank_one";
    case PhaseStepOutcome::SdpInfeasible: return "sdp_infeasible";
    case PhaseStepOutcome::RandomizationFailed: return "randomization_failed";
    case PhaseStepOutcome::NotCertified: return "not_certified";
  }
  return "unknown";
}

double power_db(double linear) { return 10.0 * std::log10(linear); }

}  // namespace

ExperimentConfig parse_config(const std::string& text) {
  ExperimentConfig cfg;
  bool have_m = false, have_n = false, have_k = false;

  std::stringstream ss(text);
  std::string raw;
  int line = 0;
  while (std::getline(ss, raw)) {
    ++line;
    const std::size_t hash = raw.find('#');
    if (hash != std::string::npos) raw.erase(hash);
    const std::string stripped = trim(raw);
    if (stripped.empty()) continue;
    const std::size_t eq = stripped.find('=');
    if (eq == std::string::npos) {
      throw ConfigError("line " + std::to_string(line) + ": expected 'key = value'");
    }
    const std::string key = trim(stripped.substr(0, eq));
    const std::string value = trim(stripped.substr(eq + 1));
    if (value.empty()) {
      throw ConfigError("line " + std::to_string(line) + ": empty value for '" + key + "'");
    }

    if (key == "m") {
      cfg.m_values = parse_int_list(value, line, 1);
      have_m = true;
    } else if (key == "n") {
      cfg.n_values = parse_int_list(value, line, 0);
      have_n = true;
    } else if (key == "k") {
      cfg.k_values = parse_int_list(value, line, 1);
      have_k = true;
    } else if (key == "r_min") {
      cfg.r_min.clear();
      for (const auto& item : split(value, ',')) {
        const double v = parse_double(item, line);
        if (v < 0.0) throw ConfigError("line " + std::to_string(line) + ": r_min must be >= 0");
        cfg.r_min.push_back(v);
      }
    } else if (key == "sigma2") {
      cfg.sigma2 = parse_double(value, line);
      if (!(cfg.sigma2 > 0.0)) throw ConfigError("line " + std::to_string(line) + ": sigma2 must be > 0");
    } else if (key == "rho") {
      cfg.dc.rho = parse_double(value, line);
      if (!(cfg.dc.rho > 0.0)) throw ConfigError("line " + std::to_string(line) + ": rho must be > 0");
    } else if (key == "penalty_tol") {
      cfg.dc.penalty_tol = parse_double(value, line);
    } else if (key == "objective_stall_tol") {
      cfg.dc.objective_stall_tol = parse_double(value, line);
    } else if (key == "max_dc_iterations") {
      cfg.dc.max_dc_iterations = static_cast<int>(parse_int(value, line));
    } else if (key == "solver_tol") {
      cfg.solver.tol = parse_double(value, line);
      if (!(cfg.solver.tol > 0.0)) throw ConfigError("line " + std::to_string(line) + ": solver_tol must be > 0");
    } else if (key == "max_solver_iterations") {
      cfg.solver.max_iterations = static_cast<int>(parse_int(value, line));
    } else if (key == "infeasibility_tol") {
      cfg.solver.infeasibility_tol = parse_double(value, line);
    } else if (key == "epsilon") {
      cfg.epsilon = parse_double(value, line);
      if (!(cfg.epsilon > 0.0)) throw ConfigError("line " + std::to_string(line) + ": epsilon must be > 0");
    } else if (key == "max_outer_iterations") {
      cfg.max_outer_iterations = static_cast<int>(parse_int(value, line));
    } else if (key == "randomization_samples") {
      cfg.randomization_samples = static_cast<int>(parse_int(value, line));
      if (cfg.randomization_samples < 0) {
        throw ConfigError("line " + std::to_string(line) + ": randomization_samples must be >= 0");
      }
    } else if (key == "methods") {
      cfg.methods.clear();
      for (const auto& item : split(value, ',')) {
        const auto method = method_from_name(item);
        if (!method) {
          throw ConfigError("line " + std::to_string(line) + ": unknown method '" + item + "'");
        }
        cfg.methods.push_back(*method);
      }
    } else if (key == "realizations") {
      cfg.realizations = static_cast<int>(parse_int(value, line));
    } else if (key == "master_seed") {
      cfg.master_seed = static_cast<std::uint64_t>(parse_int(value, line));
    } else if (key == "out_dir") {
      cfg.out_dir = value;
    } else if (key == "bs_position" || key == "irs_position") {
      const auto parts = split(value, ',');
      if (parts.size() != 3) {
        throw ConfigError("line " + std::to_string(line) + ": " + key + " needs 'x,y,z'");
      }
      Vec3 p{parse_double(parts[0], line), parse_double(parts[1], line), parse_double(parts[2], line)};
      (key == "bs_position" ? cfg.bs : cfg.irs) = p;
    } else if (key == "user_region") {
      const auto parts = split(value, ',');
      if (parts.size() != 4) {
        throw ConfigError("line " + std::to_string(line) + ": user_region needs 'xmin,xmax,ymin,ymax'");
      }
      cfg.region_x_min = parse_double(parts[0], line);
      cfg.region_x_max = parse_double(parts[1], line);
      cfg.region_y_min = parse_double(parts[2], line);
      cfg.region_y_max = parse_double(parts[3], line);
    } else if (key == "t0_db") {
      cfg.path_loss.t0_db = parse_double(value, line);
    } else if (key == "d0") {
      cfg.path_loss.d0 = parse_double(value, line);
    } else if (key == "alpha_bu") {
      cfg.path_loss.alpha_bu = parse_double(value, line);
    } else if (key == "alpha_bi") {
      cfg.path_loss.alpha_bi = parse_double(value, line);
    } else if (key == "alpha_iu") {
      cfg.path_loss.alpha_iu = parse_double(value, line);
    } else if (key == "figure") {
      if (value.size() != 1 || value[0] < 'a' || value[0] > 'd') {
        throw ConfigError("line " + std::to_string(line) + ": figure must be one of a, b, c, d");
      }
      cfg.figure = value[0];
    } else {
      throw ConfigError("line " + std::to_string(line) + ": unknown key '" + key + "'");
    }
  }

  if (!have_m || !have_n || !have_k) {
    throw ConfigError("field 'm'/'n'/'k': all three dimensions are required");
  }
  if (cfg.realizations < 1) throw ConfigError("field 'realizations': must be >= 1");
  if (cfg.methods.empty()) throw ConfigError("field 'methods': list must be non-empty");
  if (cfg.r_min.empty()) throw ConfigError("field 'r_min': list must be non-empty");
  if (!(cfg.region_x_min < cfg.region_x_max) || !(cfg.region_y_min < cfg.region_y_max)) {
    throw ConfigError("field 'user_region': need xmin < xmax and ymin < ymax");
  }
  if (!(cfg.path_loss.d0 > 0.0)) throw ConfigError("field 'd0': must be > 0");
  if (cfg.path_loss.alpha_bu < 0.0 || cfg.path_loss.alpha_bi < 0.0 ||
      cfg.path_loss.alpha_iu < 0.0) {
    throw ConfigError("field 'alpha_*': exponents must be >= 0");
  }
  if (cfg.r_min.size() > 1) {
    for (int k : cfg.k_values) {
      if (static_cast<int>(cfg.r_min.size()) != k) {
        throw ConfigError("field 'r_min': per-user list must match k");
      }
    }
  }
  return cfg;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw ConfigError("cannot open config file '" + path + "'");
  std::stringstream buffer;
  buffer << is.rdbuf();
  return parse_config(buffer.str());
}

ExperimentConfig figure_preset(char name, ScalePreset scale) {
  ExperimentConfig cfg;
  cfg.figure = name;
  const bool paper = scale == ScalePreset::Paper;
  switch (name) {
    case 'a':
      cfg.m_values = {paper ? 5 : 3};
      cfg.n_values = {paper ? 20 : 8};
      cfg.k_values = {paper ? 6 : 4};
      cfg.realizations = 1;
      cfg.methods = {Method::AlternatingDC, Method::AlternatingSDR};
      break;
    case 'b':
      cfg.m_values = paper ? std::vector<int>{3, 4, 5, 6, 7} : std::vector<int>{3, 4, 5, 6};
      cfg.n_values = {paper ? 15 : 8};
      cfg.k_values = {paper ? 6 : 4};
      cfg.realizations = paper ? 50 : 20;
      cfg.methods = paper ? std::vector<Method>{Method::AlternatingDC, Method::AlternatingSDR,
                                                Method::RandomPhase}
                          : std::vector<Method>{Method::AlternatingDC, Method::RandomPhase,
                                                Method::NoIrs};
      break;
    case 'c':
      cfg.m_values = {paper ? 5 : 3};
      cfg.n_values = paper ? std::vector<int>{5, 10, 15, 20, 25, 30}
                           : std::vector<int>{4, 8, 12, 16};
      cfg.k_values = {paper ? 6 : 4};
      cfg.realizations = paper ? 50 : 20;
      cfg.methods = paper ? std::vector<Method>{Method::AlternatingDC, Method::AlternatingSDR,
                                                Method::RandomPhase}
                          : std::vector<Method>{Method::AlternatingDC, Method::RandomPhase,
                                                Method::NoIrs};
      break;
    case 'd':
      cfg.m_values = {paper ? 5 : 3};
      cfg.n_values = {paper ? 10 : 6};
      cfg.k_values = paper ? std::vector<int>{2, 3, 4, 5, 6} : std::vector<int>{2, 3, 4};
      cfg.realizations = paper ? 50 : 20;
      cfg.methods = {Method::AlternatingDC, Method::NoIrs};
      break;
    default:
      throw InvalidInputError("figure_preset: unknown figure name");
  }
  cfg.out_dir = std::string("results/figure_") + name + (paper ? "_paper" : "_desk");
  return cfg;
}

namespace {

struct SweepPoint {
  int m = 0;
  int n = 0;
  int k = 0;
};

QosSpec qos_for(const ExperimentConfig& cfg, int users) {
  QosSpec q;
  if (cfg.r_min.size() == 1) {
    q = QosSpec::uniform_rate(users, cfg.r_min[0]);
  } else {
    if (static_cast<int>(cfg.r_min.size()) != users) {
      throw ConfigError("field 'r_min': per-user list must match k");
    }
    q.r_min = cfg.r_min;
    for (double r : cfg.r_min) q.gamma_min.push_back(gamma_from_rate(r));
  }
  return q;
}

AlgorithmConfig algorithm_config(const ExperimentConfig& cfg, Method method, int users) {
  AlgorithmConfig algo;
  algo.epsilon = cfg.epsilon;
  algo.max_outer_iterations = cfg.max_outer_iterations;
  algo.method = method;
  algo.dc = cfg.dc;
  algo.solver = cfg.solver;
  algo.randomization_samples = cfg.randomization_samples;
  algo.qos = qos_for(cfg, users);
  return algo;
}

std::string make_run_id(const SweepPoint& point, Method method, int realization) {
  char buf[96];
  std::snprintf(buf, sizeof(buf), "m%dn%dk%d-%s-r%03d", point.m, point.n, point.k,
                method_name(method).c_str(), realization);
  return buf;
}

}  // namespace

std::string results_csv_header() {
  return "run_id,master_seed,realization_seed,m,n,k,method,final_power_linear,"
         "final_power_db,outer_iterations,status";
}

std::string result_row_csv(const ResultRow& row) {
  std::ostringstream os;
  os << row.run_id << ',' << row.master_seed << ',' << row.realization_seed << ','
     << row.m << ',' << row.n << ',' << row.k << ',' << row.method << ','
     << fmt_g17(row.final_power_linear) << ',' << fmt_g17(row.final_power_db) << ','
     << row.outer_iterations << ',' << row.status;
  return os.str();
}

std::vector<ResultRow> parse_results_csv(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw InvalidInputError("parse_results_csv: cannot open " + path);
  std::string line;
  if (!std::getline(is, line) || trim(line) != results_csv_header()) {
    throw InvalidInputError("parse_results_csv: bad header in " + path);
  }
  std::vector<ResultRow> rows;
  while (std::getline(is, line)) {
    if (trim(line).empty()) continue;
    const auto parts = split(line, ',');
    if (parts.size() != 11) {
      throw InvalidInputError("parse_results_csv: bad row '" + line + "'");
    }
    ResultRow row;
    row.run_id = parts[0];
    row.master_seed = static_cast<std::uint64_t>(std::stoull(parts[1]));
    row.realization_seed = static_cast<std::uint64_t>(std::stoull(parts[2]));
    row.m = std::stoi(parts[3]);
    row.n = std::stoi(parts[4]);
    row.k = std::stoi(parts[5]);
    row.method = parts[6];
    row.final_power_linear = std::strtod(parts[7].c_str(), nullptr);
    row.final_power_db = std::strtod(parts[8].c_str(), nullptr);
    row.outer_iterations = std::stoi(parts[9]);
    row.status = parts[10];
    rows.push_back(std::move(row));
  }
  return rows;
}

void write_trace_file(const std::string& path, const ResultRow& row,
                      const RunTrace& trace) {
  std::ofstream os(path);
  if (!os) throw InvalidInputError("write_trace_file: cannot open " + path);
  os << "run_id " << row.run_id << '\n';
  os << "method " << row.method << '\n';
  os << "m " << row.m << '\n';
  os << "n " << row.n << '\n';
  os << "k " << row.k << '\n';
  os << "master_seed " << row.master_seed << '\n';
  os << "realization_seed " << row.realization_seed << '\n';
  os << "channel_digest " << row.channel_digest << '\n';
  os << "status " << row.status << '\n';
  os << "final_power_linear " << fmt_g17(row.final_power_linear) << '\n';
  os << "final_power_db " << fmt_g17(row.final_power_db) << '\n';
  os << "qos_ok " << (trace.qos_ok ? 1 : 0) << '\n';
  os << "qos_margin " << fmt_g17(trace.qos_margin) << '\n';
  os << "wall_ms " << fmt_g17(row.wall_ms) << '\n';
  os << "outer_iterations " << trace.iterations.size() << '\n';
  os << "columns iter power_linear power_db bf_status bf_iters bf_penalty_ratio "
        "bf_factor_residual phase_outcome phase_iters phase_penalty_ratio "
        "phase_factor_residual wall_ms\n";
  for (const auto& it : trace.iterations) {
    os << "row " << it.index << ' ' << fmt_g17(it.power) << ' '
       << fmt_g17(power_db(it.power)) << ' ' << dc_status_name(it.bf_status) << ' '
       << it.bf_iterations << ' ' << fmt_g17(it.bf_penalty_ratio) << ' '
       << fmt_g17(it.bf_factor_residual) << ' ' << phase_outcome_name(it.phase_outcome)
       << ' ' << it.phase_iterations << ' ' << fmt_g17(it.phase_penalty_ratio) << ' '
       << fmt_g17(it.phase_factor_residual) << ' ' << fmt_g17(it.wall_ms) << '\n';
  }
  os << "theta";
  for (double t : trace.final_theta.theta) os << ' ' << fmt_g17(t);
  os << '\n';
}

ParsedTrace parse_trace_file(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw InvalidInputError("parse_trace_file: cannot open " + path);
  ParsedTrace parsed;
  std::string line;
  while (std::getline(is, line)) {
    if (trim(line).empty()) continue;
    const std::size_t space = line.find(' ');
    const std::string key = space == std::string::npos ? line : line.substr(0, space);
    const std::string rest = space == std::string::npos ? "" : trim(line.substr(space + 1));
    if (key == "row") {
      std::stringstream ss(rest);
      std::vector<double> numbers(3, 0.0);
      ss >> numbers[0] >> numbers[1] >> numbers[2];
      parsed.iteration_table.push_back(std::move(numbers));
    } else {
      parsed.fields[key] = rest;
    }
  }
  return parsed;
}

ExperimentResult run_experiment(const ExperimentConfig& cfg, int jobs) {
  if (cfg.m_values.empty() || cfg.n_values.empty() || cfg.k_values.empty()) {
    throw ConfigError("field 'm'/'n'/'k': sweep lists must be non-empty");
  }
  if (cfg.realizations < 1) throw ConfigError("field 'realizations': must be >= 1");

  std::vector<SweepPoint> points;
  for (int m : cfg.m_values) {
    for (int n : cfg.n_values) {
      for (int k : cfg.k_values) points.push_back({m, n, k});
    }
  }

  struct Task {
    SweepPoint point;
    Method method;
    int realization;
  };
  std::vector<Task> tasks;
  for (const auto& point : points) {
    for (Method method : cfg.methods) {
      for (int r = 0; r < cfg.realizations; ++r) tasks.push_back({point, method, r});
    }
  }

  namespace fs = std::filesystem;
  fs::create_directories(cfg.out_dir);
  fs::create_directories(cfg.out_dir + "/traces");

  ExperimentResult result;
  result.config = cfg;
  result.rows.resize(tasks.size());
  result.traces.resize(tasks.size());

  std::ofstream partial(cfg.out_dir + "/results.partial.csv");
  partial << results_csv_header() << '\n';
  std::mutex io_mutex;
  std::atomic<std::size_t> next_task{0};

  auto worker = [&]() {
    for (;;) {
      const std::size_t index = next_task.fetch_add(1);
      if (index >= tasks.size()) return;
      const Task& task = tasks[index];
      const auto start = std::chrono::steady_clock::now();

      const std::uint64_t realization_seed =
          cfg.master_seed + static_cast<std::uint64_t>(task.realization);
      Rng channel_rng = Rng::derived(realization_seed, 0);
      NetworkGeometry geometry;
      geometry.bs = cfg.bs;
      geometry.irs = cfg.irs;
      geometry.users.reserve(static_cast<std::size_t>(task.point.k));
      for (int u = 0; u < task.point.k; ++u) {
        const double x = channel_rng.uniform(cfg.region_x_min, cfg.region_x_max);
        const double y = channel_rng.uniform(cfg.region_y_min, cfg.region_y_max);
        geometry.users.push_back({x, y, 0.0});
      }
      ChannelRealization channels = sample_channels(geometry, cfg.path_loss,
                                                    task.point.m, task.point.n,
                                                    channel_rng);
      channels.sigma2 = cfg.sigma2;
      channels = reorder_users(channels, order_users(channels));

      const AlgorithmConfig algo = algorithm_config(cfg, task.method, task.point.k);
      // Every method at this realization uses the same stream, so they all
      // start from the same phase draw and differ only in what they do
      // with it.
      Rng method_rng = Rng::derived(realization_seed, 1);
      RunTrace trace = run_method(channels, algo, method_rng);

      ResultRow row;
      row.run_id = make_run_id(task.point, task.method, task.realization);
      row.master_seed = cfg.master_seed;
      row.realization_seed = realization_seed;
      row.m = task.point.m;
      row.n = task.point.n;
      row.k = task.point.k;
      row.method = method_name(task.method);
      row.final_power_linear = trace.final_power;
      row.final_power_db = power_db(trace.final_power);
      row.outer_iterations = static_cast<int>(trace.iterations.size());
      row.status = run_status_name(trace.status);
      row.channel_digest = channel_digest(channels);
      row.wall_ms = std::chrono::duration<double, std::milli>(
                        std::chrono::steady_clock::now() - start)
                        .count();

      {
        std::lock_guard<std::mutex> lock(io_mutex);
        partial << result_row_csv(row) << '\n';
        partial.flush();
        write_trace_file(cfg.out_dir + "/traces/" + row.run_id + ".txt", row, trace);
      }
      result.rows[index] = std::move(row);
      result.traces[index] = std::move(trace);
    }
  };

  const int worker_count = std::max(1, std::min(jobs, 64));
  if (worker_count == 1) {
    worker();
  } else {
    std::vector<std::thread> threads;
    threads.reserve(static_cast<std::size_t>(worker_count));
    for (int i = 0; i < worker_count; ++i) threads.emplace_back(worker);
    for (auto& t : threads) t.join();
  }
  return result;
}

namespace {

struct GroupStats {
  int count = 0;
  int solved = 0;
  double mean_linear = 0.0;
  double mean_db = 0.0;
  double std_db = 0.0;
};

GroupStats stats_for(const std::vector<const ResultRow*>& rows) {
  GroupStats stats;
  stats.count = static_cast<int>(rows.size());
  std::vector<double> dbs;
  double linear_sum = 0.0;
  for (const auto* row : rows) {
    if (!std::isfinite(row->final_power_linear)) continue;
    ++stats.solved;
    linear_sum += row->final_power_linear;
    dbs.push_back(row->final_power_db);
  }
  if (stats.solved == 0) {
    stats.mean_linear = stats.mean_db = stats.std_db =
        std::numeric_limits<double>::quiet_NaN();
    return stats;
  }
  stats.mean_linear = linear_sum / stats.solved;
  double db_sum = 0.0;
  for (double v : dbs) db_sum += v;
  stats.mean_db = db_sum / stats.solved;
  double var = 0.0;
  for (double v : dbs) var += (v - stats.mean_db) * (v - stats.mean_db);
  stats.std_db = stats.solved > 1 ? std::sqrt(var / (stats.solved - 1)) : 0.0;
  return stats;
}

}  // namespace

std::vector<std::string> emit_outputs(const ExperimentResult& result,
                                      const std::string& out_dir) {
  if (result.rows.empty()) {
    throw InvalidInputError("emit_outputs: no rows to write");
  }
  namespace fs = std::filesystem;
  fs::create_directories(out_dir);
  std::vector<std::string> written;

  const std::string results_path = out_dir + "/results.csv";
  {
    std::ofstream os(results_path);
    if (!os) throw InvalidInputError("emit_outputs: cannot write " + results_path);
    os << results_csv_header() << '\n';
    for (const auto& row : result.rows) os << result_row_csv(row) << '\n';
  }
  written.push_back(results_path);

  // Group rows by sweep point and method, preserving first-seen order.
  std::vector<std::tuple<int, int, int, std::string>> keys;
  std::map<std::tuple<int, int, int, std::string>, std::vector<const ResultRow*>> groups;
  for (const auto& row : result.rows) {
    const auto key = std::make_tuple(row.m, row.n, row.k, row.method);
    if (groups.find(key) == groups.end()) keys.push_back(key);
    groups[key].push_back(&row);
  }

  const std::string summary_path = out_dir + "/summary.csv";
  {
    std::ofstream os(summary_path);
    os << "m,n,k,method,runs,solved,mean_power_linear,mean_power_db,std_power_db\n";
    for (const auto& key : keys) {
      const GroupStats stats = stats_for(groups[key]);
      os << std::get<0>(key) << ',' << std::get<1>(key) << ',' << std::get<2>(key)
         << ',' << std::get<3>(key) << ',' << stats.count << ',' << stats.solved << ','
         << fmt_g17(stats.mean_linear) << ',' << fmt_g17(stats.mean_db) << ','
         << fmt_g17(stats.std_db) << '\n';
    }
  }
  written.push_back(summary_path);

  const auto& cfg = result.config;
  const char figure = cfg.figure.value_or(
      cfg.m_values.size() > 1   ? 'b'
      : cfg.n_values.size() > 1 ? 'c'
      : cfg.k_values.size() > 1 ? 'd'
                                : 'a');

  std::vector<PlotSeries> series;
  std::string x_label;
  if (figure == 'a') {
    // Convergence of the first realization of each method.
    x_label = "outer iteration";
    for (Method method : cfg.methods) {
      PlotSeries s;
      s.label = method_name(method);
      for (std::size_t i = 0; i < result.rows.size(); ++i) {
        if (result.rows[i].method != method_name(method)) continue;
        if (result.rows[i].realization_seed != cfg.master_seed) continue;
        for (const auto& it : result.traces[i].iterations) {
          if (!std::isfinite(it.power)) continue;
          s.x.push_back(it.index);
          s.y.push_back(power_db(it.power));
        }
        break;
      }
      series.push_back(std::move(s));
    }
  } else {
    const int axis = figure == 'b' ? 0 : figure == 'c' ? 1 : 2;
    x_label = axis == 0 ? "BS antennas" : axis == 1 ? "IRS elements" : "users";
    for (Method method : cfg.methods) {
      PlotSeries s;
      s.label = method_name(method);
      for (const auto& key : keys) {
        if (std::get<3>(key) != method_name(method)) continue;
        const GroupStats stats = stats_for(groups[key]);
        if (stats.solved == 0) continue;
        const int x = axis == 0   ? std::get<0>(key)
                      : axis == 1 ? std::get<1>(key)
                                  : std::get<2>(key);
        s.x.push_back(x);
        s.y.push_back(stats.mean_db);
      }
      series.push_back(std::move(s));
    }
  }
  const std::string plot_path = out_dir + "/figure_" + figure + ".svg";
  if (write_line_plot_svg(plot_path, "transmit power", x_label, "power (dB)", series)) {
    written.push_back(plot_path);
  }
  return written;
}

}  // namespace irsnoma
