#pragma once

#include <utility>
#include <vector>

#include "ppmc/distributions.hpp"
#include "ppmc/model.hpp"

namespace ppmc {

/// Observations for a K-component 1-D Gaussian mixture. Parameters are
/// interleaved per component: x[2j] = mu_j, x[2j+1] = log sigma_j.
struct GmmData {
  std::vector<double> data;
  int n_comp = 1;
};

namespace detail {

inline void check_gmm(const GmmData& d) {
  if (d.data.empty()) throw DomainError("gmm: empty data");
  if (d.n_comp < 1) throw DomainError("gmm: n_comp < 1");
}

struct GmmComponents {
  std::vector<Var> mu, sigma;
};

inline GmmComponents gmm_components(std::span<const Var> x, int n_comp) {
  GmmComponents c;
  c.mu.reserve(n_comp);
  c.sigma.reserve(n_comp);
  for (int j = 0; j < n_comp; ++j) {
    c.mu.push_back(x[2 * j]);
    c.sigma.push_back(exp(x[2 * j + 1]));
  }
  return c;
}

}  // namespace detail

/// Component assignments are nuisance draws: each data point is scored
/// against a uniformly random component, and inference marginalizes over
/// the assignments.
class GmmStochasticModel : public EnumerableModel {
 public:
  explicit GmmStochasticModel(GmmData data) : data_(std::move(data)) {
    detail::check_gmm(data_);
  }

  std::size_t dimension() const override {
    return 2 * static_cast<std::size_t>(data_.n_comp);
  }
  SemanticsMode semantics() const override {
    return SemanticsMode::Marginalization;
  }

  Var observe(Tape&, std::span<const Var> x, RngStream* rng) const override {
    const auto c = detail::gmm_components(x, data_.n_comp);
    Var ll = 0.0;
    for (double d : data_.data) {
      const auto j = static_cast<std::size_t>(
          sample_uniform_int(*rng, data_.n_comp));
      ll += normal_logpdf(c.mu[j], c.sigma[j], d);
    }
    return ll;
  }

  // One outcome per assignment vector, encoded base-K; all K^n outcomes
  // are equally likely under the uniform assignment prior.
  std::uint64_t outcome_count() const override {
    std::uint64_t count = 1;
    const auto k = static_cast<std::uint64_t>(data_.n_comp);
    for (std::size_t i = 0; i < data_.data.size(); ++i) {
      if (count > (std::uint64_t{1} << 62) / k)
        throw DomainError("gmm: outcome count overflows");
      count *= k;
    }
    return count;
  }

  double outcome_weight(std::uint64_t) const override {
    return 1.0 / static_cast<double>(outcome_count());
  }

  Var observe_outcome(Tape&, std::span<const Var> x,
                      std::uint64_t k) const override {
    const auto c = detail::gmm_components(x, data_.n_comp);
    const auto base = static_cast<std::uint64_t>(data_.n_comp);
    Var ll = 0.0;
    for (double d : data_.data) {
      const auto j = static_cast<std::size_t>(k % base);
      k /= base;
      ll += normal_logpdf(c.mu[j], c.sigma[j], d);
    }
    return ll;
  }

  const GmmData& data() const { return data_; }

 private:
  GmmData data_;
};

/// Mixture likelihood with the assignments summed out per data point.
/// Components enter the log-sum-exp unweighted, so the value is offset
/// from the stochastic model's marginal by n*log K: constant in x, hence
/// irrelevant to gradients and posteriors.
class GmmDeterministicModel : public Model {
 public:
  explicit GmmDeterministicModel(GmmData data) : data_(std::move(data)) {
    detail::check_gmm(data_);
  }

  std::size_t dimension() const override {
    return 2 * static_cast<std::size_t>(data_.n_comp);
  }
  SemanticsMode semantics() const override {
    return SemanticsMode::Deterministic;
  }

  Var observe(Tape&, std::span<const Var> x, RngStream*) const override {
    const auto c = detail::gmm_components(x, data_.n_comp);
    Var ll = 0.0;
    for (double d : data_.data) {
      Var l = normal_logpdf(c.mu[0], c.sigma[0], d);
      for (int j = 1; j < data_.n_comp; ++j)
        l = log_sum_exp(l, normal_logpdf(c.mu[j], c.sigma[j], d));
      ll += l;
    }
    return ll;
  }

  const GmmData& data() const { return data_; }

 private:
  GmmData data_;
};

}  // namespace ppmc
