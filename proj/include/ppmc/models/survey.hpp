#pragma once

#include <cmath>
#include <utility>
#include <vector>

#include "ppmc/distributions.hpp"
#include "ppmc/model.hpp"
#include "ppmc/models/coin_source.hpp"

namespace ppmc {

/// Boolean answers to a single yes/no survey question.
struct SurveyData {
  std::vector<bool> y;
};

namespace detail {
inline void check_survey(const SurveyData& data) {
  if (data.y.empty()) throw DomainError("survey: empty answer vector");
}
}  // namespace detail

/// Randomized-response survey with a privacy coin: on heads the respondent
/// answers honestly with satisfaction probability theta = sigm(x[0]), on
/// tails they answer a fair coin. The privacy coins are nuisance draws,
/// marginalized during inference.
class SurveyStochasticModel : public EnumerableModel {
 public:
  explicit SurveyStochasticModel(SurveyData data) : data_(std::move(data)) {
    detail::check_survey(data_);
  }

  std::size_t dimension() const override { return 1; }
  SemanticsMode semantics() const override {
    return SemanticsMode::Marginalization;
  }

  Var observe(Tape&, std::span<const Var> x, RngStream* rng) const override {
    const Var theta = sigm(x[0]);
    Var ll = 0.0;
    for (bool answer : data_.y) {
      const bool honest = sample_bernoulli(*rng, 0.5);
      ll += flip_logp(honest ? theta : Var(0.5), answer);
    }
    return ll;
  }

  // One outcome per vector of privacy-coin results; bit i of k set means
  // respondent i answered honestly.
  std::uint64_t outcome_count() const override {
    return std::uint64_t{1} << data_.y.size();
  }

  double outcome_weight(std::uint64_t) const override {
    return std::ldexp(1.0, -static_cast<int>(data_.y.size()));
  }

  Var observe_outcome(Tape&, std::span<const Var> x,
                      std::uint64_t k) const override {
    const Var theta = sigm(x[0]);
    Var ll = 0.0;
    for (std::size_t i = 0; i < data_.y.size(); ++i) {
      const bool honest = (k >> i) & 1;
      ll += flip_logp(honest ? theta : Var(0.5), data_.y[i]);
    }
    return ll;
  }

  const SurveyData& data() const { return data_; }

 private:
  SurveyData data_;
};

/// The same survey with the privacy coin marginalized out in the program
/// itself: each answer contributes a two-branch mixture term.
class SurveyDeterministicModel : public Model {
 public:
  explicit SurveyDeterministicModel(SurveyData data) : data_(std::move(data)) {
    detail::check_survey(data_);
  }

  std::size_t dimension() const override { return 1; }
  SemanticsMode semantics() const override {
    return SemanticsMode::Deterministic;
  }

  Var observe(Tape&, std::span<const Var> x, RngStream*) const override {
    static const double log_half = std::log(0.5);
    const Var theta = sigm(x[0]);
    Var ll = 0.0;
    for (bool answer : data_.y) {
      ll += log_sum_exp(flip_logp(theta, answer) + log_half,
                        flip_logp(Var(0.5), answer) + log_half);
    }
    return ll;
  }

  const SurveyData& data() const { return data_; }

 private:
  SurveyData data_;
};

/// Survey variant whose privacy coin comes from a black-box source with
/// unknown (possibly correlated) flip distribution. No deterministic
/// equivalent exists; only the stochastic form can be written.
class SurveyBlackboxModel : public Model {
 public:
  SurveyBlackboxModel(SurveyData data, CoinSourceFactory coins)
      : data_(std::move(data)), coins_(std::move(coins)) {
    detail::check_survey(data_);
  }

  std::size_t dimension() const override { return 1; }
  SemanticsMode semantics() const override {
    return SemanticsMode::Marginalization;
  }

  Var observe(Tape&, std::span<const Var> x, RngStream* rng) const override {
    const Var theta = sigm(x[0]);
    CoinSource source = coins_();
    Var ll = 0.0;
    for (bool answer : data_.y)
      ll += flip_logp(source(*rng) ? theta : Var(0.5), answer);
    return ll;
  }

  const SurveyData& data() const { return data_; }

 private:
  SurveyData data_;
  CoinSourceFactory coins_;
};

}  // namespace ppmc
