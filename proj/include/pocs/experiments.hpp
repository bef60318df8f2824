#pragma once

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "pocs/recovery.hpp"
#include "pocs/sensing.hpp"
#include "pocs/solvers.hpp"

namespace pocs {

enum class ExperimentMode {
  pocs_nonuniform,      // fresh Phi and x per trial, direction error
  pocs_uniform,         // one Phi per m shared by all trials
  linear_cs,            // full measurements Phi x, full error
  dithered_nonuniform,  // fresh (Phi, dither) per trial, full error
  dithered_uniform,     // one (Phi, dither) per m
  noisy,                // bounded phase corruption, error against the scaled truth
  lowrank,              // nuclear-norm pipeline, direction error
};

std::string to_string(ExperimentMode mode);
ExperimentMode experiment_mode_from_string(const std::string& s);
bool is_uniform(ExperimentMode mode);

struct ExperimentConfig {
  int n = 80;
  int s = 3;
  // low-rank shape and rank
  int n1 = 8;
  int n2 = 8;
  int r = 1;
  std::vector<int> m_list{6, 12, 18, 24, 30, 36, 42, 48};
  int trials = 100;
  ExperimentMode mode = ExperimentMode::pocs_nonuniform;
  double threshold = kSuccessThreshold;
  double rho = 1.0 / 3.0;
  double tau0 = 0.0;
  NoiseModel noise = NoiseModel::disk;
  std::uint64_t master_seed = 1;
  SolverOptions solver;

  /// Throws ParameterError on an invalid configuration.
  void validate() const;
  /// One "key = value" line per field, in the config file syntax.
  std::vector<std::string> describe() const;
};

/// Flat "key = value" text with '#' comments. Keys: n, s, n1, n2, r, m_list
/// (comma separated), trials, mode, threshold, rho, tau0, noise (disk |
/// phase-jitter), master_seed, penalty, over_relax, abs_tol, rel_tol, max_iter.
ExperimentConfig parse_config(std::istream& is);
ExperimentConfig load_config(const std::filesystem::path& path);

/// Stream id used to draw the per-m shared ensemble of the uniform modes.
inline constexpr std::uint64_t kSharedEnsembleStream = 0xF1CED0005EEDULL;

/// Seed of trial `trial_index` at measurement count m: mix_seed(master, m, trial_index).
std::uint64_t trial_seed(std::uint64_t master, int m, int trial_index);

/// The "drawn beforehand" ensemble of the uniform modes, seeded with
/// mix_seed(master, m, kSharedEnsembleStream). dither is empty for pocs-uniform.
struct SharedEnsemble {
  SensingEnsemble ens;
  ComplexVector dither;
};

SharedEnsemble draw_shared_ensemble(const ExperimentConfig& cfg, int m);

struct TrialRecord {
  int m = 0;
  int trial_index = 0;
  std::uint64_t seed = 0;
  bool success = false;
  double error = 0.0;
  int iterations = 0;
  std::chrono::duration<double> wall_time{};
};

/// One Monte Carlo trial, deterministic in (master_seed, m, trial_index).
/// `shared` must be given exactly for the uniform modes. Failures inside the
/// pipeline come back as unsuccessful records with infinite error.
TrialRecord run_trial(const ExperimentConfig& cfg, int m, int trial_index, const SharedEnsemble* shared = nullptr);

struct CurveRow {
  int m = 0;
  int trials = 0;
  int successes = 0;
  double rate = 0.0;
  double mean_error = 0.0;
  double median_iterations = 0.0;
};

struct SuccessCurve {
  std::vector<CurveRow> rows;

  const CurveRow* find(int m) const;
};

/// All trials of the sweep, ordered by (m, trial_index) regardless of how
/// many worker threads ran them.
std::vector<TrialRecord> run_trials(const ExperimentConfig& cfg, unsigned threads = 1);

SuccessCurve aggregate(std::span<const TrialRecord> records);

SuccessCurve run_curve(const ExperimentConfig& cfg, unsigned threads = 1);

/// Header "m,trials,successes,rate,mean_error,median_iters" then one row per m.
/// Each comment line is written first, prefixed by "# ".
void write_results_csv(const SuccessCurve& curve, const std::filesystem::path& path,
                       std::span<const std::string> comments = {});
void write_results_csv(const SuccessCurve& curve, std::ostream& os, std::span<const std::string> comments = {});
SuccessCurve read_results_csv(const std::filesystem::path& path);
SuccessCurve read_results_csv(std::istream& is);

struct LabeledCurve {
  std::string label;
  SuccessCurve curve;
  int s = 1;
};

/// Static SVG line chart of success rate against m/s, one polyline per curve,
/// with axis labels and a legend. All curves must share s.
void emit_plot(std::span<const LabeledCurve> curves, const std::filesystem::path& path);
std::string render_plot(std::span<const LabeledCurve> curves);

}  // namespace pocs
