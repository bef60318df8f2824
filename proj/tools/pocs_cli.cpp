// pocs: phase-only compressive sensing experiments, recovery and diagnostics.
//
//   pocs experiment --config <path> --out <csv> [--plot <svg>] [--seed <int>] [--threads <int>]
//   pocs recover --matrix <complex-csv> --phases <complex-csv> --mode <real|complex|dithered|noisy|lowrank>
//                [--rho <f>] [--tau0 <f>] [--n1 <int>] --out <complex-csv>
//   pocs diagnose --probe <ric|l1|spe|nearvanish|kappa> [probe flags] --out <csv>
//
// Exit codes: 0 success, 1 usage error, 2 I/O error, 3 numerical failure.

#include <cmath>
#include <fstream>
#include <iostream>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>

#include "pocs/diagnostics.hpp"
#include "pocs/experiments.hpp"
#include "pocs/io.hpp"
#include "pocs/recovery.hpp"

namespace {

enum ExitCode { kOk = 0, kUsage = 1, kIo = 2, kNumerical = 3 };

struct NumericalFailure : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct ExperimentArgs {
  std::string config;
  std::string out;
  std::string plot;
  std::uint64_t seed = 0;
  bool seed_set = false;
  unsigned threads = 0;
};

struct RecoverArgs {
  std::string matrix;
  std::string phases;
  std::string mode;
  double rho = 1.0 / 3.0;
  double tau0 = 0.0;
  int n1 = 0;
  std::string out;
};

struct DiagnoseArgs {
  std::string probe;
  int n = 20;
  int s = 2;
  int m = 400;
  int order = 8;
  long long samples = 10000;
  int trials = 10;
  int pairs = 20;
  double eta = 0.1;
  double t_hat = pocs::kComplexTHat;
  std::uint64_t seed = 1;
  std::string out;
};

int cmd_experiment(const ExperimentArgs& args) {
  auto cfg = pocs::load_config(args.config);
  if (args.seed_set) cfg.master_seed = args.seed;
  const unsigned threads = args.threads ? args.threads : std::max(1u, std::thread::hardware_concurrency());
  const auto curve = pocs::run_curve(cfg, threads);
  const auto comments = cfg.describe();
  pocs::write_results_csv(curve, args.out, comments);
  if (!args.plot.empty()) {
    const pocs::LabeledCurve labeled{pocs::to_string(cfg.mode), curve, cfg.mode == pocs::ExperimentMode::lowrank ? cfg.r : cfg.s};
    pocs::emit_plot(std::span(&labeled, 1), args.plot);
  }
  for (const auto& r : curve.rows) {
    std::cout << "m=" << r.m << " rate=" << r.rate << " mean_error=" << r.mean_error << '\n';
  }
  return kOk;
}

void require_solver_ok(pocs::SolverStatus status) {
  if (status == pocs::SolverStatus::infeasible || status == pocs::SolverStatus::numerical_error) {
    throw NumericalFailure("solver finished with status " + pocs::to_string(status));
  }
  if (status == pocs::SolverStatus::max_iter) std::cerr << "warning: solver hit the iteration limit\n";
}

int cmd_recover(const RecoverArgs& args) {
  const pocs::ComplexMatrix phi = pocs::load_complex_csv(args.matrix);
  const pocs::PhaseObservation obs = pocs::load_observation(args.phases);
  const pocs::SolverOptions opts;

  if (args.mode == "lowrank") {
    if (args.n1 < 1 || phi.cols() % args.n1 != 0) {
      throw pocs::ParameterError("--n1 must divide the number of matrix columns for lowrank mode");
    }
    // Row k holds atom k flattened row-major.
    const auto n2 = phi.cols() / args.n1;
    pocs::LowRankMap map;
    for (Eigen::Index k = 0; k < phi.rows(); ++k) {
      pocs::ComplexMatrix atom(args.n1, n2);
      for (int i = 0; i < args.n1; ++i)
        for (Eigen::Index j = 0; j < n2; ++j) atom(i, j) = phi(k, i * n2 + j);
      map.atoms.push_back(std::move(atom));
    }
    const auto out = pocs::recover_lowrank(map, obs, opts);
    require_solver_ok(out.report.status);
    pocs::save_complex_csv(args.out, out.xhat);
    return kOk;
  }

  const pocs::SensingEnsemble ens{phi};
  pocs::SparseOutcome out;
  if (args.mode == "real") {
    out = pocs::recover_sparse(ens, obs, pocs::Field::real, opts);
  } else if (args.mode == "complex") {
    out = pocs::recover_sparse(ens, obs, pocs::Field::complex, opts);
  } else if (args.mode == "noisy") {
    out = pocs::recover_noisy(ens, obs, args.tau0 > 0.0 ? args.tau0 : obs.noise_bound, opts);
  } else if (args.mode == "dithered") {
    // The matrix file holds the extended ensemble [Phi, dither / rho].
    if (phi.cols() < 2) throw pocs::ParameterError("dithered mode needs the extended matrix [Phi, dither/rho]");
    pocs::DitheredEnsemble dens;
    dens.base.phi = phi.leftCols(phi.cols() - 1);
    dens.dither = phi.col(phi.cols() - 1) * args.rho;
    dens.rho = args.rho;
    out = pocs::recover_full_dithered(dens, obs, opts);
    if (out.flag == pocs::OutcomeFlag::degenerate_scale) throw NumericalFailure("degenerate dither scale");
  } else {
    throw pocs::ParameterError("unknown mode '" + args.mode + "'");
  }
  require_solver_ok(out.report.status);
  pocs::save_complex_csv(args.out, out.xhat);
  return kOk;
}

int cmd_diagnose(const DiagnoseArgs& a) {
  std::ofstream os(a.out);
  if (!os) throw pocs::IoError("cannot open '" + a.out + "' for writing");
  os << "probe,parameters,value,samples,seed\n";
  auto row = [&](const std::string& params, double value, long long samples) {
    os << a.probe << ',' << params << ',' << pocs::format_double(value) << ',' << samples << ',' << a.seed << '\n';
  };
  const std::string base = "n=" + std::to_string(a.n) + ";s=" + std::to_string(a.s) + ";m=" + std::to_string(a.m);
  pocs::Rng rng(a.seed);

  if (a.probe == "kappa") {
    row("", pocs::estimate_kappa(a.samples, rng), a.samples);
  } else if (a.probe == "ric") {
    for (int t = 0; t < a.trials; ++t) {
      const auto ens = pocs::draw_ensemble(a.m, a.n, rng);
      const auto x = pocs::gen_sparse_signal(a.n, a.s, pocs::Field::complex, rng);
      const auto sys = pocs::build_complex(pocs::measure_phases(ens, x), ens, a.t_hat);
      const auto candidates = pocs::signal_adjacent_supports(x, a.order, 100, rng);
      const auto est = pocs::estimate_ric_sampled(sys.a, a.order, a.samples, rng, candidates);
      row(base + ";order=" + std::to_string(a.order) + ";that=" + pocs::format_double(a.t_hat) +
              ";trial=" + std::to_string(t),
          est.delta, est.samples);
    }
  } else if (a.probe == "l1") {
    for (int t = 0; t < a.trials; ++t) {
      const auto ens = pocs::draw_ensemble(a.m, a.n, rng);
      const auto w = pocs::gen_sparse_signal(a.n, a.s, pocs::Field::complex, rng);
      row(base + ";trial=" + std::to_string(t), pocs::l1_concentration(ens, w), a.m);
    }
  } else if (a.probe == "spe") {
    for (int t = 0; t < a.trials; ++t) {
      const auto ens = pocs::draw_ensemble(a.m, a.n, rng);
      std::vector<std::pair<pocs::ComplexVector, pocs::ComplexVector>> pairs;
      for (int p = 0; p < a.pairs; ++p) {
        auto u = pocs::gen_sparse_signal(a.n, a.s, pocs::Field::complex, rng);
        auto v = pocs::gen_sparse_signal(a.n, a.s, pocs::Field::complex, rng);
        pairs.emplace_back(std::move(u), std::move(v));
      }
      const auto rep = pocs::spe_deviation(ens, pairs);
      row(base + ";pairs=" + std::to_string(a.pairs) + ";trial=" + std::to_string(t), rep.deviation, rep.pair_count);
    }
  } else if (a.probe == "nearvanish") {
    for (int t = 0; t < a.trials; ++t) {
      const auto ens = pocs::draw_ensemble(a.m, a.n, rng);
      const auto x = pocs::gen_sparse_signal(a.n, a.s, pocs::Field::complex, rng);
      const int count = pocs::count_near_vanishing(ens, x, a.eta);
      row(base + ";eta=" + pocs::format_double(a.eta) + ";trial=" + std::to_string(t),
          static_cast<double>(count) / a.m, a.m);
    }
  } else {
    throw pocs::ParameterError("unknown probe '" + a.probe + "'");
  }
  os.flush();
  if (!os) throw pocs::IoError("write to '" + a.out + "' failed");
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Phase-only compressive sensing toolkit"};
  app.require_subcommand(1);

  ExperimentArgs ex;
  auto* exp = app.add_subcommand("experiment", "Run a Monte Carlo success-rate sweep");
  exp->add_option("--config", ex.config, "Experiment config (key = value)")->required();
  exp->add_option("--out", ex.out, "Results CSV")->required();
  exp->add_option("--plot", ex.plot, "Optional SVG plot");
  auto* seed_opt = exp->add_option("--seed", ex.seed, "Override master_seed");
  exp->add_option("--threads", ex.threads, "Worker threads (default: hardware concurrency)");

  RecoverArgs rc;
  auto* rec = app.add_subcommand("recover", "Recover a signal from phase-only measurements");
  rec->add_option("--matrix", rc.matrix, "Sensing matrix (complex CSV)")->required();
  rec->add_option("--phases", rc.phases, "Observed phases (complex CSV)")->required();
  rec->add_option("--mode", rc.mode, "real|complex|dithered|noisy|lowrank")
      ->required()
      ->check(CLI::IsMember({"real", "complex", "dithered", "noisy", "lowrank"}));
  rec->add_option("--rho", rc.rho, "Dither scale (dithered mode)");
  rec->add_option("--tau0", rc.tau0, "Noise bound (noisy mode; default: value in the phases header)");
  rec->add_option("--n1", rc.n1, "Row count of each atom (lowrank mode)");
  rec->add_option("--out", rc.out, "Recovered signal (complex CSV)")->required();

  DiagnoseArgs dg;
  auto* diag = app.add_subcommand("diagnose", "Empirical probes of the reformulation's properties");
  diag->add_option("--probe", dg.probe, "ric|l1|spe|nearvanish|kappa")
      ->required()
      ->check(CLI::IsMember({"ric", "l1", "spe", "nearvanish", "kappa"}));
  diag->add_option("--n", dg.n, "Ambient dimension");
  diag->add_option("--s", dg.s, "Sparsity");
  diag->add_option("--m", dg.m, "Measurement count");
  diag->add_option("--order", dg.order, "RIC order");
  diag->add_option("--samples", dg.samples, "Samples (ric supports, kappa draws)");
  diag->add_option("--trials", dg.trials, "Independent repetitions");
  diag->add_option("--pairs", dg.pairs, "Vector pairs per ensemble (spe)");
  diag->add_option("--eta", dg.eta, "Near-vanishing threshold");
  diag->add_option("--that", dg.t_hat, "Phase-row scaling for the ric probe");
  diag->add_option("--seed", dg.seed, "Seed");
  diag->add_option("--out", dg.out, "Output CSV")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kUsage;
  }
  ex.seed_set = seed_opt->count() > 0;

  try {
    if (*exp) return cmd_experiment(ex);
    if (*rec) return cmd_recover(rc);
    if (*diag) return cmd_diagnose(dg);
  } catch (const pocs::IoError& e) {
    std::cerr << "I/O error: " << e.what() << '\n';
    return kIo;
  } catch (const NumericalFailure& e) {
    std::cerr << "numerical failure: " << e.what() << '\n';
    return kNumerical;
  } catch (const pocs::NumericalError& e) {
    std::cerr << "numerical failure: " << e.what() << '\n';
    return kNumerical;
  } catch (const std::invalid_argument& e) {
    std::cerr << "usage error: " << e.what() << '\n';
    return kUsage;
  }
  return kUsage;
}
