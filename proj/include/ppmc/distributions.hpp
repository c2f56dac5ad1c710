#pragma once

#include <cmath>
#include <numbers>

#include "ppmc/errors.hpp"
#include "ppmc/rng.hpp"
#include "ppmc/tape.hpp"

namespace ppmc {

inline constexpr double kHalfLog2Pi = 0.9189385332046727;  // log(2*pi)/2

/// log N(x; mu, sigma^2), differentiable in mu and sigma.
inline Var normal_logpdf(const Var& mu, const Var& sigma, double x) {
  if (!(sigma.value() > 0.0)) throw DomainError("normal_logpdf: sigma <= 0");
  const Var z = (Var(x) - mu) / sigma;
  return -log(sigma) - kHalfLog2Pi - 0.5 * z * z;
}

/// log P(flip = y | theta). An impossible outcome (probability exactly 0)
/// aborts the evaluation instead of producing -inf on the tape.
inline Var flip_logp(const Var& theta, bool y) {
  const double t = theta.value();
  if (y) {
    if (t <= 0.0)
      throw EvaluationImpossible("flip_logp: outcome true has probability 0");
    return log(theta);
  }
  if (t >= 1.0)
    throw EvaluationImpossible("flip_logp: outcome false has probability 0");
  return log(Var(1.0) - theta);
}

/// log Beta(theta; alpha, beta) with fixed shape parameters.
inline Var beta_logpdf(double alpha, double beta, const Var& theta) {
  if (!(alpha > 0.0 && beta > 0.0))
    throw DomainError("beta_logpdf: alpha, beta must be > 0");
  const double t = theta.value();
  if (!(t > 0.0 && t < 1.0))
    throw DomainError("beta_logpdf: theta outside (0,1)");
  const double log_beta_fn =
      std::lgamma(alpha) + std::lgamma(beta) - std::lgamma(alpha + beta);
  return (alpha - 1.0) * log(theta) + (beta - 1.0) * log(Var(1.0) - theta) -
         log_beta_fn;
}

}  // namespace ppmc
