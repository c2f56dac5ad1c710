#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <vector>

#include "ppmc/distributions.hpp"
#include "ppmc/oracles.hpp"

using namespace ppmc;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

TEST_CASE("normal_logpdf: pinned values") {
  REQUIRE_THAT(normal_logpdf(Var(0.0), Var(1.0), 0.0).value(),
               WithinAbs(-0.9189385332, 1e-10));
  REQUIRE_THAT(normal_logpdf(Var(1.0), Var(2.0), 1.0).value(),
               WithinAbs(-1.6120857137, 1e-10));
  REQUIRE_THROWS_AS(normal_logpdf(Var(0.0), Var(0.0), 1.0), DomainError);
  REQUIRE_THROWS_AS(normal_logpdf(Var(0.0), Var(-1.0), 1.0), DomainError);
}

TEST_CASE("normal_logpdf: dlogp/dmu = (x - mu)/sigma^2") {
  Tape tape;
  Var mu = tape.input(0.0);
  Var lp = normal_logpdf(mu, Var(1.0), 2.0);
  REQUIRE_THAT(tape.gradient(lp, std::vector<Var>{mu})[0], WithinAbs(2.0, 1e-12));
}

TEST_CASE("flip_logp: values, gradient, impossible outcomes") {
  REQUIRE_THAT(flip_logp(Var(0.5), true).value(), WithinAbs(-0.6931472, 1e-7));
  REQUIRE_THAT(flip_logp(Var(0.25), false).value(), WithinAbs(-0.2876821, 1e-7));

  Tape tape;
  Var theta = tape.input(0.5);
  Var lp = flip_logp(theta, true);
  REQUIRE_THAT(tape.gradient(lp, std::vector<Var>{theta})[0],
               WithinAbs(2.0, 1e-12));

  REQUIRE_THROWS_AS(flip_logp(Var(0.0), true), EvaluationImpossible);
  REQUIRE_THROWS_AS(flip_logp(Var(1.0), false), EvaluationImpossible);
  // endpoint with the matching outcome having probability 1 is fine
  REQUIRE(flip_logp(Var(1.0), true).value() == 0.0);
}

TEST_CASE("flip_logp: outcome probabilities sum to 1") {
  for (double theta : {0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9}) {
    const double p_true = std::exp(flip_logp(Var(theta), true).value());
    const double p_false = std::exp(flip_logp(Var(theta), false).value());
    REQUIRE_THAT(p_true + p_false, WithinAbs(1.0, 1e-15));
  }
}

TEST_CASE("beta_logpdf: pinned values and domain") {
  REQUIRE_THAT(beta_logpdf(1.0, 1.0, Var(0.3)).value(), WithinAbs(0.0, 1e-12));
  // Beta(2,1) density is 2*theta; at theta = 0.5 the log-density is 0
  REQUIRE_THAT(beta_logpdf(2.0, 1.0, Var(0.5)).value(), WithinAbs(0.0, 1e-12));

  Tape tape;
  Var theta = tape.input(0.5);
  Var lp = beta_logpdf(2.0, 2.0, theta);
  REQUIRE_THAT(tape.gradient(lp, std::vector<Var>{theta})[0],
               WithinAbs(0.0, 1e-12));  // symmetric mode

  REQUIRE_THROWS_AS(beta_logpdf(0.0, 1.0, Var(0.5)), DomainError);
  REQUIRE_THROWS_AS(beta_logpdf(1.0, -1.0, Var(0.5)), DomainError);
  REQUIRE_THROWS_AS(beta_logpdf(1.0, 1.0, Var(0.0)), DomainError);
  REQUIRE_THROWS_AS(beta_logpdf(1.0, 1.0, Var(1.0)), DomainError);
}

TEST_CASE("logpdf gradients match finite differences at interior points") {
  RngStream rng(2024);
  for (int rep = 0; rep < 20; ++rep) {
    const double mu0 = sample_normal(rng, 0.0, 1.0);
    const double log_sigma0 = sample_normal(rng, 0.0, 0.5);
    const double x = sample_normal(rng, 0.0, 2.0);

    auto f = [&](const ParamVector& p) {
      return normal_logpdf(Var(p[0]), exp(Var(p[1])), x).value();
    };
    const auto fd = finite_diff_grad(f, {mu0, log_sigma0});
    Tape tape;
    Var mu = tape.input(mu0);
    Var ls = tape.input(log_sigma0);
    auto ad = tape.gradient(normal_logpdf(mu, exp(ls), x),
                            std::vector<Var>{mu, ls});
    for (int i = 0; i < 2; ++i)
      REQUIRE_THAT(ad[i], WithinAbs(fd[i], 1e-6 * std::max(1.0, std::abs(fd[i]))));
  }

  for (double theta0 : {0.12, 0.43, 0.77}) {
    auto f_true = [&](const ParamVector& p) {
      return flip_logp(Var(p[0]), true).value();
    };
    auto f_beta = [&](const ParamVector& p) {
      return beta_logpdf(2.5, 1.7, Var(p[0])).value();
    };
    Tape tape;
    Var t1 = tape.input(theta0);
    REQUIRE_THAT(tape.gradient(flip_logp(t1, true), std::vector<Var>{t1})[0],
                 WithinRel(finite_diff_grad(f_true, {theta0})[0], 1e-6));
    Var t2 = tape.input(theta0);
    REQUIRE_THAT(tape.gradient(beta_logpdf(2.5, 1.7, t2), std::vector<Var>{t2})[0],
                 WithinRel(finite_diff_grad(f_beta, {theta0})[0], 1e-6));
  }
}

TEST_CASE("normal_logpdf integrates to 1 over mu +/- 10 sigma") {
  const double mu = 0.7, sigma = 1.3;
  const Grid1D grid{mu - 10 * sigma, mu + 10 * sigma, 20001};
  auto [mean, normalizer] = grid_posterior_mean(
      [&](double x) { return normal_logpdf(Var(mu), Var(sigma), x).value(); },
      grid);
  // the normalizer is max-shifted; undo the shift with the peak density
  const double integral =
      normalizer * std::exp(normal_logpdf(Var(mu), Var(sigma), mu).value());
  REQUIRE_THAT(integral, WithinAbs(1.0, 1e-6));
  REQUIRE_THAT(mean, WithinAbs(mu, 1e-9));
}
