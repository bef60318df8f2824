#include "pocs/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <fstream>
#include <limits>
#include <map>
#include <sstream>
#include <thread>

#include "pocs/io.hpp"

namespace pocs {

std::string to_string(ExperimentMode mode) {
  switch (mode) {
    case ExperimentMode::pocs_nonuniform: return "pocs-nonuniform";
    case ExperimentMode::pocs_uniform: return "pocs-uniform";
    case ExperimentMode::linear_cs: return "linear-cs";
    case ExperimentMode::dithered_nonuniform: return "dithered-nonuniform";
    case ExperimentMode::dithered_uniform: return "dithered-uniform";
    case ExperimentMode::noisy: return "noisy";
    case ExperimentMode::lowrank: return "lowrank";
  }
  return "unknown";
}

ExperimentMode experiment_mode_from_string(const std::string& s) {
  for (auto mode : {ExperimentMode::pocs_nonuniform, ExperimentMode::pocs_uniform, ExperimentMode::linear_cs,
                    ExperimentMode::dithered_nonuniform, ExperimentMode::dithered_uniform, ExperimentMode::noisy,
                    ExperimentMode::lowrank}) {
    if (to_string(mode) == s) return mode;
  }
  throw ParameterError("unknown experiment mode '" + s + "'");
}

bool is_uniform(ExperimentMode mode) {
  return mode == ExperimentMode::pocs_uniform || mode == ExperimentMode::dithered_uniform;
}

void ExperimentConfig::validate() const {
  if (trials < 1) throw ParameterError("trials must be >= 1");
  if (m_list.empty()) throw ParameterError("m_list must be nonempty");
  for (std::size_t i = 0; i < m_list.size(); ++i) {
    if (m_list[i] < 1) throw ParameterError("every m must be >= 1");
    if (i > 0 && m_list[i] <= m_list[i - 1]) throw ParameterError("m_list must be strictly ascending");
  }
  if (!(threshold > 0.0)) throw ParameterError("threshold must be positive");
  if (mode == ExperimentMode::lowrank) {
    if (n1 < 1 || n2 < 1 || r < 1 || r > std::min(n1, n2)) throw ParameterError("need 1 <= r <= min(n1, n2)");
  } else if (n < 1 || s < 1 || s > n) {
    throw ParameterError("need 1 <= s <= n");
  }
  if (!(rho > 0.0) || !std::isfinite(rho)) throw ParameterError("rho must be positive");
  if (!(tau0 >= 0.0) || !std::isfinite(tau0)) throw ParameterError("tau0 must be >= 0");
  solver.validate();
}

std::vector<std::string> ExperimentConfig::describe() const {
  std::string ms;
  for (std::size_t i = 0; i < m_list.size(); ++i) ms += (i ? "," : "") + std::to_string(m_list[i]);
  return {
      "mode = " + to_string(mode),
      "n = " + std::to_string(n),
      "s = " + std::to_string(s),
      "n1 = " + std::to_string(n1),
      "n2 = " + std::to_string(n2),
      "r = " + std::to_string(r),
      "m_list = " + ms,
      "trials = " + std::to_string(trials),
      "threshold = " + format_double(threshold),
      "rho = " + format_double(rho),
      "tau0 = " + format_double(tau0),
      std::string("noise = ") + (noise == NoiseModel::disk ? "disk" : "phase-jitter"),
      "master_seed = " + std::to_string(master_seed),
      "penalty = " + format_double(solver.penalty),
      "over_relax = " + format_double(solver.over_relax),
      "abs_tol = " + format_double(solver.abs_tol),
      "rel_tol = " + format_double(solver.rel_tol),
      "max_iter = " + std::to_string(solver.max_iter),
  };
}

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

template <class T>
T parse_number(const std::string& key, const std::string& value) {
  std::istringstream ss(value);
  T out{};
  ss >> out;
  if (!ss || !(ss >> std::ws).eof()) throw ParameterError("config key '" + key + "': bad value '" + value + "'");
  return out;
}

}  // namespace

ExperimentConfig parse_config(std::istream& is) {
  ExperimentConfig cfg;
  std::string line;
  int lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ParameterError("config line " + std::to_string(lineno) + ": expected key = value");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key == "n") cfg.n = parse_number<int>(key, value);
    else if (key == "s") cfg.s = parse_number<int>(key, value);
    else if (key == "n1") cfg.n1 = parse_number<int>(key, value);
    else if (key == "n2") cfg.n2 = parse_number<int>(key, value);
    else if (key == "r") cfg.r = parse_number<int>(key, value);
    else if (key == "trials") cfg.trials = parse_number<int>(key, value);
    else if (key == "threshold") cfg.threshold = parse_number<double>(key, value);
    else if (key == "rho") cfg.rho = parse_number<double>(key, value);
    else if (key == "tau0") cfg.tau0 = parse_number<double>(key, value);
    else if (key == "master_seed" || key == "seed") cfg.master_seed = parse_number<std::uint64_t>(key, value);
    else if (key == "penalty") cfg.solver.penalty = parse_number<double>(key, value);
    else if (key == "over_relax") cfg.solver.over_relax = parse_number<double>(key, value);
    else if (key == "abs_tol") cfg.solver.abs_tol = parse_number<double>(key, value);
    else if (key == "rel_tol") cfg.solver.rel_tol = parse_number<double>(key, value);
    else if (key == "max_iter") cfg.solver.max_iter = parse_number<int>(key, value);
    else if (key == "mode") cfg.mode = experiment_mode_from_string(value);
    else if (key == "noise") {
      if (value == "disk") cfg.noise = NoiseModel::disk;
      else if (value == "phase-jitter") cfg.noise = NoiseModel::phase_jitter;
      else throw ParameterError("config key 'noise': expected disk or phase-jitter");
    } else if (key == "m_list") {
      cfg.m_list.clear();
      std::string item;
      std::istringstream ss(value);
      while (std::getline(ss, item, ',')) {
        item = trim(item);
        if (!item.empty()) cfg.m_list.push_back(parse_number<int>(key, item));
      }
    } else {
      throw ParameterError("config line " + std::to_string(lineno) + ": unknown key '" + key + "'");
    }
  }
  cfg.validate();
  return cfg;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream is(path);
  if (!is) throw IoError("cannot open config '" + path.string() + "'");
  return parse_config(is);
}

std::uint64_t trial_seed(std::uint64_t master, int m, int trial_index) {
  return mix_seed(master, static_cast<std::uint64_t>(m), static_cast<std::uint64_t>(trial_index));
}

SharedEnsemble draw_shared_ensemble(const ExperimentConfig& cfg, int m) {
  Rng rng(mix_seed(cfg.master_seed, static_cast<std::uint64_t>(m), kSharedEnsembleStream));
  SharedEnsemble out;
  if (cfg.mode == ExperimentMode::dithered_uniform) {
    auto dens = draw_dithered_ensemble(m, cfg.n, cfg.rho, rng);
    out.ens = std::move(dens.base);
    out.dither = std::move(dens.dither);
  } else {
    out.ens = draw_ensemble(m, cfg.n, rng);
  }
  return out;
}

namespace {

struct TrialResult {
  double error;
  int iterations;
};

TrialResult execute_trial(const ExperimentConfig& cfg, int m, Rng& rng, const SharedEnsemble* shared) {
  const auto& opts = cfg.solver;
  switch (cfg.mode) {
    case ExperimentMode::pocs_nonuniform:
    case ExperimentMode::pocs_uniform: {
      const SensingEnsemble ens = shared ? shared->ens : draw_ensemble(m, cfg.n, rng);
      const auto x = gen_sparse_signal(cfg.n, cfg.s, Field::complex, rng);
      const auto out = recover_sparse(ens, measure_phases(ens, x), Field::complex, opts, x, cfg.threshold);
      return {out.direction_error, out.report.iterations};
    }
    case ExperimentMode::linear_cs: {
      const auto ens = draw_ensemble(m, cfg.n, rng);
      const auto x = gen_sparse_signal(cfg.n, cfg.s, Field::complex, rng);
      const auto out = recover_linear_cs(ens, ens.phi * x, opts, x, cfg.threshold);
      return {*out.full_error, out.report.iterations};
    }
    case ExperimentMode::dithered_nonuniform:
    case ExperimentMode::dithered_uniform: {
      DitheredEnsemble dens;
      if (shared) {
        dens.base = shared->ens;
        dens.dither = shared->dither;
        dens.rho = cfg.rho;
      } else {
        dens = draw_dithered_ensemble(m, cfg.n, cfg.rho, rng);
      }
      const auto x = gen_sparse_signal(cfg.n, cfg.s, Field::complex, rng);
      const auto out = recover_full_dithered(dens, measure_phases_dithered(dens, x), opts, x, cfg.threshold);
      return {*out.full_error, out.report.iterations};
    }
    case ExperimentMode::noisy: {
      const auto ens = draw_ensemble(m, cfg.n, rng);
      const auto x = gen_sparse_signal(cfg.n, cfg.s, Field::complex, rng);
      const auto noisy = corrupt_phases(measure_phases(ens, x), cfg.tau0, cfg.noise, rng);
      const auto out = recover_noisy(ens, noisy, cfg.tau0, opts, x, cfg.threshold);
      return {*out.full_error, out.report.iterations};
    }
    case ExperimentMode::lowrank: {
      const auto map = draw_lowrank_map(m, cfg.n1, cfg.n2, rng);
      const auto x = gen_lowrank_signal(cfg.n1, cfg.n2, cfg.r, rng);
      const auto out = recover_lowrank(map, measure_lowrank_phases(map, x), opts, x, cfg.threshold);
      return {out.direction_error, out.report.iterations};
    }
  }
  throw ParameterError("unhandled experiment mode");
}

}  // namespace

TrialRecord run_trial(const ExperimentConfig& cfg, int m, int trial_index, const SharedEnsemble* shared) {
  if (is_uniform(cfg.mode) != (shared != nullptr)) {
    throw ParameterError("a shared ensemble must be supplied exactly for the uniform modes");
  }
  if (shared && shared->ens.m() != m) throw DimensionError("shared ensemble was drawn for a different m");
  TrialRecord rec;
  rec.m = m;
  rec.trial_index = trial_index;
  rec.seed = trial_seed(cfg.master_seed, m, trial_index);
  Rng rng(rec.seed);
  const auto start = std::chrono::steady_clock::now();
  try {
    const auto res = execute_trial(cfg, m, rng, shared);
    rec.error = std::isnan(res.error) ? std::numeric_limits<double>::infinity() : res.error;
    rec.iterations = res.iterations;
  } catch (const std::exception&) {
    rec.error = std::numeric_limits<double>::infinity();
  }
  rec.wall_time = std::chrono::steady_clock::now() - start;
  rec.success = rec.error < cfg.threshold;
  return rec;
}

std::vector<TrialRecord> run_trials(const ExperimentConfig& cfg, unsigned threads) {
  cfg.validate();
  std::map<int, SharedEnsemble> shared;
  if (is_uniform(cfg.mode)) {
    for (int m : cfg.m_list) shared.emplace(m, draw_shared_ensemble(cfg, m));
  }
  const std::size_t per_m = static_cast<std::size_t>(cfg.trials);
  std::vector<TrialRecord> records(cfg.m_list.size() * per_m);
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t task = next++; task < records.size(); task = next++) {
      const int m = cfg.m_list[task / per_m];
      const int index = static_cast<int>(task % per_m);
      const SharedEnsemble* sh = shared.empty() ? nullptr : &shared.at(m);
      records[task] = run_trial(cfg, m, index, sh);
    }
  };
  threads = std::max(1u, threads);
  if (threads == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (unsigned t = 0; t < threads; ++t) pool.emplace_back(worker);
  }
  return records;
}

SuccessCurve aggregate(std::span<const TrialRecord> records) {
  std::map<int, std::vector<const TrialRecord*>> by_m;
  for (const auto& r : records) by_m[r.m].push_back(&r);
  SuccessCurve curve;
  for (auto& [m, recs] : by_m) {
    CurveRow row;
    row.m = m;
    row.trials = static_cast<int>(recs.size());
    double err_sum = 0.0;
    std::vector<int> iters;
    for (const auto* r : recs) {
      row.successes += r->success ? 1 : 0;
      err_sum += r->error;
      iters.push_back(r->iterations);
    }
    row.rate = static_cast<double>(row.successes) / row.trials;
    row.mean_error = err_sum / row.trials;
    std::sort(iters.begin(), iters.end());
    const auto mid = iters.size() / 2;
    row.median_iterations = iters.size() % 2 ? iters[mid] : 0.5 * (iters[mid - 1] + iters[mid]);
    curve.rows.push_back(row);
  }
  return curve;
}

SuccessCurve run_curve(const ExperimentConfig& cfg, unsigned threads) {
  const auto records = run_trials(cfg, threads);
  return aggregate(records);
}

const CurveRow* SuccessCurve::find(int m) const {
  for (const auto& r : rows)
    if (r.m == m) return &r;
  return nullptr;
}

void write_results_csv(const SuccessCurve& curve, std::ostream& os, std::span<const std::string> comments) {
  for (const auto& c : comments) os << "# " << c << '\n';
  os << "m,trials,successes,rate,mean_error,median_iters\n";
  for (const auto& r : curve.rows) {
    os << r.m << ',' << r.trials << ',' << r.successes << ',' << format_double(r.rate) << ','
       << format_double(r.mean_error) << ',' << format_double(r.median_iterations) << '\n';
  }
}

void write_results_csv(const SuccessCurve& curve, const std::filesystem::path& path,
                       std::span<const std::string> comments) {
  std::ofstream os(path);
  if (!os) throw IoError("cannot open '" + path.string() + "' for writing");
  write_results_csv(curve, os, comments);
  os.flush();
  if (!os) throw IoError("write to '" + path.string() + "' failed");
}

SuccessCurve read_results_csv(std::istream& is) {
  SuccessCurve curve;
  std::string line;
  bool header_seen = false;
  while (std::getline(is, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    if (!header_seen) {
      if (line != "m,trials,successes,rate,mean_error,median_iters") throw IoError("unexpected results header '" + line + "'");
      header_seen = true;
      continue;
    }
    std::istringstream ss(line);
    std::string f[6];
    for (auto& field : f) {
      if (!std::getline(ss, field, ',')) throw IoError("short results row '" + line + "'");
    }
    CurveRow r;
    try {
      r.m = std::stoi(f[0]);
      r.trials = std::stoi(f[1]);
      r.successes = std::stoi(f[2]);
      r.rate = std::stod(f[3]);
      r.mean_error = std::stod(f[4]);
      r.median_iterations = std::stod(f[5]);
    } catch (const std::exception&) {
      throw IoError("malformed results row '" + line + "'");
    }
    curve.rows.push_back(r);
  }
  if (!header_seen) throw IoError("results file has no header");
  return curve;
}

SuccessCurve read_results_csv(const std::filesystem::path& path) {
  std::ifstream is(path);
  if (!is) throw IoError("cannot open '" + path.string() + "' for reading");
  return read_results_csv(is);
}

}  // namespace pocs
