#pragma once

#include <numbers>

#include "ppmc/distributions.hpp"
#include "ppmc/model.hpp"

namespace ppmc {

inline constexpr double kGravity = 9.80655;

/// Throw-at-a-basket setup: the player throws with one of two velocities,
/// equally likely, and we infer the release angle that hits distance L in
/// expectation. The model parameter is sigm^-1(sin 2*alpha).
struct BallParams {
  double vw;        // weak-throw speed
  double vs;        // strong-throw speed
  double distance;  // distance to the basket (L)
  // optional Normal(pi/4, pi/8) prior on the release angle itself; off by
  // default, matching the likelihood-only parameterization
  bool angle_prior = false;
};

namespace detail {

inline void check_ball(const BallParams& p) {
  if (!(p.vw > 0.0 && p.vs > 0.0 && p.distance > 0.0))
    throw DomainError("ball: velocities and distance must be > 0");
}

// log N(alpha; pi/4, pi/8) with alpha = asin(sin 2 alpha)/2
inline Var angle_prior_logp(const Var& sin_2alpha) {
  const Var alpha = 0.5 * asin(sin_2alpha);
  return normal_logpdf(alpha, std::numbers::pi / 8.0, std::numbers::pi / 4.0);
}

}  // namespace detail

/// Velocity is a nondeterministic choice: the posterior over the angle
/// must hold in expectation over both throws, not for any single one.
class BallStochasticModel : public EnumerableModel {
 public:
  explicit BallStochasticModel(BallParams params) : params_(params) {
    detail::check_ball(params_);
  }

  std::size_t dimension() const override { return 1; }
  SemanticsMode semantics() const override {
    return SemanticsMode::Nondeterminism;
  }

  Var observe(Tape&, std::span<const Var> x, RngStream* rng) const override {
    const Var sin_2alpha = sigm(x[0]);
    const double v = sample_bernoulli(*rng, 0.5) ? params_.vs : params_.vw;
    const Var d = (v * v / kGravity) * sin_2alpha;
    Var ll = normal_logpdf(d, 1.0, params_.distance);
    if (params_.angle_prior) ll += detail::angle_prior_logp(sin_2alpha);
    return ll;
  }

  std::uint64_t outcome_count() const override { return 2; }
  double outcome_weight(std::uint64_t) const override { return 0.5; }

  Var observe_outcome(Tape&, std::span<const Var> x,
                      std::uint64_t k) const override {
    const Var sin_2alpha = sigm(x[0]);
    const double v = k == 0 ? params_.vw : params_.vs;
    const Var d = (v * v / kGravity) * sin_2alpha;
    Var ll = normal_logpdf(d, 1.0, params_.distance);
    if (params_.angle_prior) ll += detail::angle_prior_logp(sin_2alpha);
    return ll;
  }

  const BallParams& params() const { return params_; }

 private:
  BallParams params_;
};

/// Weighted sum of log-probabilities over the two throws: the exponential
/// of the average log-density, which is the nondeterminism target.
class BallDeterministicModel : public Model {
 public:
  explicit BallDeterministicModel(BallParams params) : params_(params) {
    detail::check_ball(params_);
  }

  std::size_t dimension() const override { return 1; }
  SemanticsMode semantics() const override {
    return SemanticsMode::Deterministic;
  }

  Var observe(Tape&, std::span<const Var> x, RngStream*) const override {
    const Var sin_2alpha = sigm(x[0]);
    const Var dw = (params_.vw * params_.vw / kGravity) * sin_2alpha;
    const Var ds = (params_.vs * params_.vs / kGravity) * sin_2alpha;
    Var ll = 0.5 * normal_logpdf(dw, 1.0, params_.distance) +
             0.5 * normal_logpdf(ds, 1.0, params_.distance);
    if (params_.angle_prior) ll += detail::angle_prior_logp(sin_2alpha);
    return ll;
  }

  const BallParams& params() const { return params_; }

 private:
  BallParams params_;
};

/// Angle maximizing the deterministic ball density, in sin(2 alpha) terms:
/// the stationary point of the two-throw quadratic.
inline double ball_optimal_sin_2alpha(const BallParams& p) {
  const double vw2 = p.vw * p.vw, vs2 = p.vs * p.vs;
  return kGravity * p.distance * (vw2 + vs2) / (vw2 * vw2 + vs2 * vs2);
}

}  // namespace ppmc
