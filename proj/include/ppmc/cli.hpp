#pragma once

#include <chrono>
#include <exception>
#include <iostream>
#include <memory>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>

#include "ppmc/io.hpp"
#include "ppmc/models/ball.hpp"
#include "ppmc/models/gmm.hpp"
#include "ppmc/models/survey.hpp"
#include "ppmc/samplers.hpp"
#include "ppmc/summary.hpp"

namespace ppmc {

struct RunConfig {
  std::string model;    // survey | ball | gmm
  std::string variant;  // stochastic | deterministic | blackbox
  std::string sampler;  // hmc | sghmc | mhmc
  double step_size = 0.01;
  int n_leapfrog = 10;
  double friction = 1.0;
  double mass = 1.0;
  int n_draws = 0;  // 0 = sampler default (10 mhmc, 1 sghmc)
  int chains = 1;
  int samples = 1000;
  int burnin = 100;
  int thin = 1;
  std::uint64_t seed = 0;
  std::string data_path;
  std::string out_path = "samples.csv";
  std::vector<double> init;  // empty = zeros
  // model-specific knobs
  double ball_vw = 8.0;
  double ball_vs = 10.0;
  double ball_distance = 8.0;
  bool ball_angle_prior = false;
  int gmm_components = 2;
  double stay_prob = 0.9;  // blackbox Markov coin source
};

struct CompareConfig {
  std::string a_path;
  std::string b_path;
  bool relabel_pairs = false;
};

inline void attach_run_options(CLI::App& app, RunConfig& cfg) {
  app.add_option("--model", cfg.model, "Model: survey | ball | gmm")
      ->required()
      ->check(CLI::IsMember({"survey", "ball", "gmm"}));
  app.add_option("--variant", cfg.variant,
                 "Variant: stochastic | deterministic | blackbox")
      ->required()
      ->check(CLI::IsMember({"stochastic", "deterministic", "blackbox"}));
  app.add_option("--sampler", cfg.sampler, "Sampler: hmc | sghmc | mhmc")
      ->required()
      ->check(CLI::IsMember({"hmc", "sghmc", "mhmc"}));
  app.add_option("--step-size", cfg.step_size, "Leapfrog step size")
      ->check(CLI::PositiveNumber);
  app.add_option("--n-leapfrog", cfg.n_leapfrog,
                 "Leapfrog steps per trajectory (inner steps per momentum "
                 "resampling for sghmc/mhmc)")
      ->check(CLI::PositiveNumber);
  app.add_option("--friction", cfg.friction, "sgHMC friction coefficient")
      ->check(CLI::NonNegativeNumber);
  app.add_option("--mass", cfg.mass, "Scalar mass")
      ->check(CLI::PositiveNumber);
  app.add_option("--n-draws", cfg.n_draws,
                 "Gradient-estimator draws per step (0 = sampler default)")
      ->check(CLI::NonNegativeNumber);
  app.add_option("--chains", cfg.chains, "Number of chains")
      ->check(CLI::PositiveNumber);
  app.add_option("--samples", cfg.samples, "Kept samples per chain")
      ->check(CLI::PositiveNumber);
  app.add_option("--burnin", cfg.burnin, "Discarded initial steps")
      ->check(CLI::NonNegativeNumber);
  app.add_option("--thin", cfg.thin, "Keep every thin-th state")
      ->check(CLI::PositiveNumber);
  app.add_option("--seed", cfg.seed, "Random seed");
  app.add_option("--data-path", cfg.data_path,
                 "Single-column CSV: true/false answers (survey) or reals (gmm)");
  app.add_option("--out-path", cfg.out_path, "Samples CSV output path");
  app.add_option("--init", cfg.init, "Initial parameter vector (default zeros)");
  app.add_option("--ball-vw", cfg.ball_vw, "Ball: weak-throw speed");
  app.add_option("--ball-vs", cfg.ball_vs, "Ball: strong-throw speed");
  app.add_option("--ball-distance", cfg.ball_distance,
                 "Ball: distance to the basket");
  app.add_flag("--ball-angle-prior", cfg.ball_angle_prior,
               "Ball: add the Normal(pi/4, pi/8) prior on the release angle");
  app.add_option("--gmm-components", cfg.gmm_components,
                 "GMM: number of components")
      ->check(CLI::PositiveNumber);
  app.add_option("--stay-prob", cfg.stay_prob,
                 "Blackbox survey: Markov coin stay probability");
}

inline void attach_compare_options(CLI::App& app, CompareConfig& cfg) {
  app.add_option("--a", cfg.a_path, "First samples CSV")->required();
  app.add_option("--b", cfg.b_path, "Second samples CSV")->required();
  app.add_flag("--relabel-pairs", cfg.relabel_pairs,
               "Sort per-sample (mu, log sigma) pairs by mu before comparing "
               "(breaks mixture label switching)");
}

/// Cross-field validation of a parsed run config. Throws DomainError with
/// a usage-style message.
inline void validate(const RunConfig& cfg) {
  const bool deterministic = cfg.variant == "deterministic";
  if (cfg.sampler == "hmc" && !deterministic)
    throw DomainError("hmc requires deterministic variant");
  if (cfg.sampler != "hmc" && deterministic)
    throw DomainError("deterministic variant requires the hmc sampler");
  if (cfg.variant == "blackbox" && cfg.model != "survey")
    throw DomainError("blackbox variant exists only for the survey model");
  if (cfg.sampler == "mhmc" && cfg.model == "ball")
    throw DomainError("mhmc requires a marginalization model (survey or gmm); "
                      "ball is a nondeterminism model, use sghmc");
  if (cfg.sampler == "sghmc" && cfg.model != "ball")
    throw DomainError("sghmc requires a nondeterminism model (ball); "
                      "use mhmc for survey/gmm");
  if (cfg.model != "ball" && cfg.data_path.empty())
    throw DomainError("missing --data-path for " + cfg.model);
  if (!(cfg.stay_prob >= 0.0 && cfg.stay_prob <= 1.0))
    throw DomainError("--stay-prob outside [0,1]");
}

/// Parses and validates `run` arguments; test hook for the CLI surface.
inline RunConfig parse_run_config(const std::vector<std::string>& args) {
  RunConfig cfg;
  CLI::App app{"run"};
  attach_run_options(app, cfg);
  // CLI11 wants reversed argv without the program name
  std::vector<std::string> reversed(args.rbegin(), args.rend());
  app.parse(std::move(reversed));
  validate(cfg);
  return cfg;
}

inline std::unique_ptr<Model> build_model(const RunConfig& cfg) {
  if (cfg.model == "survey") {
    SurveyData data{load_bool_column(cfg.data_path)};
    if (cfg.variant == "deterministic")
      return std::make_unique<SurveyDeterministicModel>(std::move(data));
    if (cfg.variant == "blackbox")
      return std::make_unique<SurveyBlackboxModel>(
          std::move(data), markov_coin_source(cfg.stay_prob));
    return std::make_unique<SurveyStochasticModel>(std::move(data));
  }
  if (cfg.model == "ball") {
    const BallParams params{cfg.ball_vw, cfg.ball_vs, cfg.ball_distance,
                            cfg.ball_angle_prior};
    if (cfg.variant == "deterministic")
      return std::make_unique<BallDeterministicModel>(params);
    return std::make_unique<BallStochasticModel>(params);
  }
  GmmData data{load_real_column(cfg.data_path), cfg.gmm_components};
  if (cfg.variant == "deterministic")
    return std::make_unique<GmmDeterministicModel>(std::move(data));
  return std::make_unique<GmmStochasticModel>(std::move(data));
}

inline SamplerKind sampler_kind(const std::string& name) {
  if (name == "hmc") return SamplerKind::Hmc;
  if (name == "sghmc") return SamplerKind::Sghmc;
  if (name == "mhmc") return SamplerKind::Mhmc;
  throw DomainError("unknown sampler: " + name);
}

/// Runs all chains (one worker thread each, distinct stream ids) and
/// returns the batches ordered by chain id.
inline std::vector<SampleBatch> run_chains(const Model& model,
                                           const RunConfig& cfg) {
  const SamplerKind kind = sampler_kind(cfg.sampler);
  const SamplerSettings settings{cfg.step_size, cfg.n_leapfrog, cfg.friction,
                                 cfg.mass, cfg.n_draws};
  const RunOptions opts{cfg.samples, cfg.burnin, cfg.thin};
  ParamVector init = cfg.init;
  if (init.empty()) init.assign(model.dimension(), 0.0);
  if (init.size() != model.dimension())
    throw DomainError("--init has length " + std::to_string(init.size()) +
                      ", model dimension is " +
                      std::to_string(model.dimension()));

  std::vector<SampleBatch> batches(cfg.chains);
  std::vector<std::exception_ptr> failures(cfg.chains);
  std::vector<std::thread> workers;
  workers.reserve(cfg.chains);
  for (int c = 0; c < cfg.chains; ++c) {
    workers.emplace_back([&, c] {
      try {
        batches[c] = run_chain(model, kind, settings, init, opts,
                               RngStream(cfg.seed, static_cast<std::uint64_t>(c)));
      } catch (...) {
        failures[c] = std::current_exception();
      }
    });
  }
  for (std::thread& w : workers) w.join();
  for (const std::exception_ptr& e : failures)
    if (e) std::rethrow_exception(e);
  return batches;
}

/// Summary file written next to the samples CSV.
inline std::string summary_path_for(const std::string& out_path) {
  const std::size_t dot = out_path.find_last_of('.');
  const std::size_t slash = out_path.find_last_of("/\\");
  const bool has_ext = dot != std::string::npos &&
                       (slash == std::string::npos || dot > slash);
  return (has_ext ? out_path.substr(0, dot) : out_path) + ".summary.json";
}

inline int run_command(const RunConfig& cfg, std::ostream& log = std::cout) {
  const auto t0 = std::chrono::steady_clock::now();
  const std::unique_ptr<Model> model = build_model(cfg);
  const std::vector<SampleBatch> batches = run_chains(*model, cfg);
  PosteriorSummary summary = summarize(batches);
  summary.seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
          .count();

  write_samples_csv(cfg.out_path, batches);
  const std::string doc = render_summary_json(cfg.model, cfg.variant,
                                              cfg.sampler, cfg.seed, summary);
  {
    std::ofstream out(summary_path_for(cfg.out_path), std::ios::binary);
    if (!out)
      throw DomainError("cannot open file for writing: " +
                        summary_path_for(cfg.out_path));
    out << doc;
  }
  log << doc;
  return 0;
}

inline int compare_command(const CompareConfig& cfg,
                           std::ostream& log = std::cout) {
  std::vector<SampleBatch> a = read_samples_csv(cfg.a_path);
  std::vector<SampleBatch> b = read_samples_csv(cfg.b_path);
  if (cfg.relabel_pairs) {
    for (SampleBatch& batch : a) sort_component_pairs(batch);
    for (SampleBatch& batch : b) sort_component_pairs(batch);
  }
  const CompareReport report = compare_runs(summarize(a), summarize(b));
  for (std::size_t d = 0; d < report.dims.size(); ++d) {
    const DimComparison& c = report.dims[d];
    log << "x" << d << ": |" << c.mean_a << " - " << c.mean_b
        << "| = " << c.delta << (c.pass ? " <= " : " > ") << c.threshold
        << (c.pass ? "  pass" : "  FAIL") << "\n";
  }
  log << (report.all_pass ? "consistent\n" : "inconsistent\n");
  return report.all_pass ? 0 : 1;
}

}  // namespace ppmc
