#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "ppmc/estimators.hpp"
#include "ppmc/model.hpp"
#include "ppmc/rng.hpp"

namespace ppmc {

struct HmcConfig {
  double step_size = 0.01;
  int n_leapfrog = 10;
  double mass = 1.0;
};

struct SghmcConfig {
  double step_size = 0.01;
  int n_leapfrog = 10;  // inner steps between momentum resamplings
  double friction = 1.0;
  double mass = 1.0;
  EstimatorConfig estimator;
};

/// Position, momentum and step counter of one chain.
struct ChainState {
  ParamVector x;
  std::vector<double> r;
  long iter = 0;
};

struct SampleBatch {
  std::size_t dimension = 0;
  std::vector<ParamVector> samples;
  std::vector<double> logps;
  std::optional<double> accept_rate;  // HMC only
  std::uint64_t seed = 0;
  std::uint64_t chain_id = 0;
  std::size_t divergences = 0;
};

using GradFn = std::function<std::vector<double>(const ParamVector&)>;
using EstimatorFn =
    std::function<GradientEstimate(const ParamVector&, RngStream&)>;

namespace detail {

inline bool all_finite(const std::vector<double>& v) {
  for (double x : v)
    if (!std::isfinite(x)) return false;
  return true;
}

inline void check_positive(double eps, int n_leapfrog, double mass) {
  if (!(eps > 0.0)) throw DomainError("sampler: step_size <= 0");
  if (n_leapfrog < 1) throw DomainError("sampler: n_leapfrog < 1");
  if (!(mass > 0.0)) throw DomainError("sampler: mass <= 0");
}

}  // namespace detail

/// Exact-gradient closure over a deterministic model.
inline GradFn make_exact_gradfn(const Model& model) {
  return [&model](const ParamVector& x) { return evaluate(model, x).grad; };
}

/// L steps of the leapfrog integrator for potential U(x) = -log p~(x):
/// half-step momentum, alternating full steps, half-step momentum.
/// Time-reversible and second-order accurate in eps.
inline ChainState leapfrog(const GradFn& grad_logp, ChainState state,
                           double eps, int n_steps, double mass = 1.0) {
  detail::check_positive(eps, n_steps, mass);
  ParamVector& x = state.x;
  std::vector<double>& r = state.r;
  const std::size_t dim = x.size();

  auto bump_momentum = [&](double scale) {
    const std::vector<double> g = grad_logp(x);
    for (std::size_t i = 0; i < dim; ++i) r[i] += scale * eps * g[i];
  };

  bump_momentum(0.5);
  for (int l = 0; l < n_steps; ++l) {
    for (std::size_t i = 0; i < dim; ++i) x[i] += eps * r[i] / mass;
    if (!detail::all_finite(x))
      throw DivergentTrajectory("leapfrog: non-finite position");
    if (l + 1 < n_steps) bump_momentum(1.0);
  }
  bump_momentum(0.5);
  if (!detail::all_finite(r))
    throw DivergentTrajectory("leapfrog: non-finite momentum");
  return state;
}

struct HmcStepResult {
  ChainState state;
  bool accepted = false;
  bool diverged = false;
  double logp = 0.0;  // exact log-density at the returned position
};

/// One Metropolis-corrected HMC transition. A divergent trajectory or an
/// impossible proposal counts as a rejection, never as a failure.
/// `current_logp` lets the caller avoid re-evaluating the current state.
inline HmcStepResult hmc_step(const Model& model, ChainState state,
                              const HmcConfig& cfg, RngStream& rng,
                              std::optional<double> current_logp = std::nullopt) {
  if (model.is_stochastic())
    throw ModeMismatch("hmc_step: model is stochastic; use sghmc/mhmc");
  detail::check_positive(cfg.step_size, cfg.n_leapfrog, cfg.mass);

  const std::size_t dim = model.dimension();
  state.r.resize(dim);
  const double mom_sd = std::sqrt(cfg.mass);
  for (std::size_t i = 0; i < dim; ++i)
    state.r[i] = sample_normal(rng, 0.0, mom_sd);

  const double logp0 =
      current_logp ? *current_logp : evaluate(model, state.x).logp;
  double kin0 = 0.0;
  for (double ri : state.r) kin0 += ri * ri;
  kin0 /= 2.0 * cfg.mass;

  HmcStepResult result;
  result.logp = logp0;
  try {
    ChainState proposal = leapfrog(make_exact_gradfn(model), state,
                                   cfg.step_size, cfg.n_leapfrog, cfg.mass);
    const double logp1 = evaluate(model, proposal.x).logp;
    double kin1 = 0.0;
    for (double ri : proposal.r) kin1 += ri * ri;
    kin1 /= 2.0 * cfg.mass;

    const double neg_dh = (logp1 - kin1) - (logp0 - kin0);
    if (rng.uniform() < std::exp(neg_dh)) {
      state = std::move(proposal);
      result.accepted = true;
      result.logp = logp1;
    }
  } catch (const DivergentTrajectory&) {
    result.diverged = true;
  } catch (const EvaluationImpossible&) {
    result.diverged = true;
  }

  state.iter += 1;
  result.state = std::move(state);
  return result;
}

/// The per-step sgHMC kernel with the noise passed in explicitly:
///   r <- r + eps*g - eps*C*(r/mass) + noise,  x <- x + eps*(r/mass).
inline void sghmc_update(ParamVector& x, std::vector<double>& r,
                         const std::vector<double>& grad, double eps,
                         double friction, double mass,
                         const std::vector<double>& noise) {
  for (std::size_t i = 0; i < x.size(); ++i) {
    r[i] += eps * grad[i] - eps * friction * (r[i] / mass) + noise[i];
    x[i] += eps * r[i] / mass;
  }
}

struct SghmcStepResult {
  ChainState state;
  bool diverged = false;
  double logp_estimate = 0.0;  // from the last estimator call of the step
};

/// One sgHMC transition: resample momentum, then n_leapfrog inner steps of
/// the friction-damped update with gradient noise balanced by injected
/// N(0, 2*C*eps) noise. No Metropolis correction. On a non-finite state
/// the position reverts to the step's start and momentum is reset.
inline SghmcStepResult sghmc_step(const Model& model, ChainState state,
                                  const SghmcConfig& cfg,
                                  const EstimatorFn& estimator,
                                  RngStream& rng) {
  detail::check_positive(cfg.step_size, cfg.n_leapfrog, cfg.mass);
  if (cfg.friction < 0.0) throw DomainError("sghmc: friction < 0");

  const std::size_t dim = model.dimension();
  const double eps = cfg.step_size;
  const double noise_sd = std::sqrt(2.0 * cfg.friction * eps);
  const double mom_sd = std::sqrt(cfg.mass);

  state.r.resize(dim);
  for (std::size_t i = 0; i < dim; ++i)
    state.r[i] = sample_normal(rng, 0.0, mom_sd);

  SghmcStepResult result;
  const ParamVector snapshot = state.x;
  std::vector<double> noise(dim);
  try {
    for (int l = 0; l < cfg.n_leapfrog; ++l) {
      const GradientEstimate est = estimator(state.x, rng);
      for (std::size_t i = 0; i < dim; ++i)
        noise[i] = sample_normal(rng, 0.0, noise_sd);
      sghmc_update(state.x, state.r, est.grad, eps, cfg.friction, cfg.mass,
                   noise);
      result.logp_estimate = est.logp;
      if (!detail::all_finite(state.x) || !detail::all_finite(state.r))
        throw DivergentTrajectory("sghmc: non-finite state");
    }
  } catch (const DivergentTrajectory&) {
    result.diverged = true;
  } catch (const EvaluationImpossible&) {
    result.diverged = true;
  }
  if (result.diverged) {
    state.x = snapshot;
    for (std::size_t i = 0; i < dim; ++i)
      state.r[i] = sample_normal(rng, 0.0, mom_sd);
  }

  state.iter += 1;
  result.state = std::move(state);
  return result;
}

enum class SamplerKind { Hmc, Sghmc, Mhmc };

inline const char* to_string(SamplerKind k) {
  switch (k) {
    case SamplerKind::Hmc: return "hmc";
    case SamplerKind::Sghmc: return "sghmc";
    case SamplerKind::Mhmc: return "mhmc";
  }
  return "?";
}

/// Superset of the per-sampler tuning knobs; unused fields are ignored by
/// the sampler that does not need them.
struct SamplerSettings {
  double step_size = 0.01;
  int n_leapfrog = 10;
  double friction = 1.0;
  double mass = 1.0;
  int n_draws = 0;  // 0 = sampler default (10 for mhmc, 1 for sghmc)
};

struct RunOptions {
  int n_samples = 1000;
  int burnin = 0;
  int thin = 1;
};

namespace detail {

inline EstimatorFn make_estimator(const Model& model, SamplerKind kind,
                                  int n_draws) {
  if (kind == SamplerKind::Mhmc) {
    const EstimatorConfig cfg{n_draws > 0 ? n_draws : 10,
                              SemanticsMode::Marginalization};
    return [&model, cfg](const ParamVector& x, RngStream& rng) {
      return marginalization_gradient(model, x, cfg, rng);
    };
  }
  const EstimatorConfig cfg{n_draws > 0 ? n_draws : 1,
                            SemanticsMode::Nondeterminism};
  return [&model, cfg](const ParamVector& x, RngStream& rng) {
    return nondeterminism_gradient(model, x, cfg, rng);
  };
}

}  // namespace detail

/// Runs one chain: burnin steps discarded, then every thin-th state kept
/// until n_samples rows are collected. HMC pairs with deterministic
/// models and the exact gradient; sgHMC with the prior-draw estimator;
/// MHMC (sgHMC driven by the importance-weighted gradient) with
/// marginalization models. Aborts if more than half the steps diverge.
inline SampleBatch run_chain(const Model& model, SamplerKind kind,
                             const SamplerSettings& settings,
                             const ParamVector& init, const RunOptions& opts,
                             RngStream rng) {
  if (opts.n_samples < 1) throw DomainError("run_chain: n_samples < 1");
  if (opts.burnin < 0) throw DomainError("run_chain: burnin < 0");
  if (opts.thin < 1) throw DomainError("run_chain: thin < 1");
  if (init.size() != model.dimension())
    throw DomainError("run_chain: init dimension mismatch");

  const SemanticsMode semantics = model.semantics();
  if (kind == SamplerKind::Hmc && semantics != SemanticsMode::Deterministic)
    throw ModeMismatch("run_chain: hmc requires a deterministic model");
  if (kind == SamplerKind::Mhmc && semantics != SemanticsMode::Marginalization)
    throw ModeMismatch("run_chain: mhmc requires a marginalization model");
  if (kind == SamplerKind::Sghmc && semantics != SemanticsMode::Nondeterminism)
    throw ModeMismatch("run_chain: sghmc requires a nondeterminism model");

  SampleBatch batch;
  batch.dimension = model.dimension();
  batch.seed = rng.seed();
  batch.chain_id = rng.stream_id();
  batch.samples.reserve(opts.n_samples);
  batch.logps.reserve(opts.n_samples);

  ChainState state{init, std::vector<double>(model.dimension(), 0.0), 0};
  const long total = opts.burnin + static_cast<long>(opts.n_samples) * opts.thin;
  long accepts = 0;

  HmcConfig hmc_cfg;
  SghmcConfig sg_cfg;
  EstimatorFn estimator;
  std::optional<double> current_logp;
  if (kind == SamplerKind::Hmc) {
    hmc_cfg = HmcConfig{settings.step_size, settings.n_leapfrog, settings.mass};
  } else {
    sg_cfg.step_size = settings.step_size;
    sg_cfg.n_leapfrog = settings.n_leapfrog;
    sg_cfg.friction = settings.friction;
    sg_cfg.mass = settings.mass;
    estimator = detail::make_estimator(model, kind, settings.n_draws);
  }

  double last_logp = 0.0;
  for (long step = 0; step < total; ++step) {
    if (kind == SamplerKind::Hmc) {
      HmcStepResult res = hmc_step(model, std::move(state), hmc_cfg, rng,
                                   current_logp);
      state = std::move(res.state);
      current_logp = res.logp;
      last_logp = res.logp;
      accepts += res.accepted ? 1 : 0;
      batch.divergences += res.diverged ? 1 : 0;
    } else {
      SghmcStepResult res =
          sghmc_step(model, std::move(state), sg_cfg, estimator, rng);
      state = std::move(res.state);
      if (!res.diverged) last_logp = res.logp_estimate;
      batch.divergences += res.diverged ? 1 : 0;
    }

    if (step >= 20 && batch.divergences * 2 > static_cast<std::size_t>(step + 1))
      throw SamplingError("run_chain: " + std::to_string(batch.divergences) +
                          " of " + std::to_string(step + 1) +
                          " steps divergent; aborting");

    const long post = step - opts.burnin;
    if (post >= 0 && post % opts.thin == opts.thin - 1) {
      batch.samples.push_back(state.x);
      batch.logps.push_back(last_logp);
    }
  }

  if (kind == SamplerKind::Hmc)
    batch.accept_rate = static_cast<double>(accepts) / static_cast<double>(total);
  return batch;
}

}  // namespace ppmc
