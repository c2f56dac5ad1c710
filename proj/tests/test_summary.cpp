#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <vector>

#include "ppmc/rng.hpp"
#include "ppmc/summary.hpp"

using namespace ppmc;
using Catch::Matchers::WithinAbs;

namespace {

SampleBatch batch_from(const std::vector<double>& values) {
  SampleBatch batch;
  batch.dimension = 1;
  for (double v : values) {
    batch.samples.push_back({v});
    batch.logps.push_back(0.0);
  }
  return batch;
}

}  // namespace

TEST_CASE("summarize: constant samples") {
  const SampleBatch batch = batch_from(std::vector<double>(100, 3.25));
  const PosteriorSummary s = summarize(batch);
  REQUIRE(s.mean[0] == 3.25);
  REQUIRE(s.sd[0] == 0.0);
  REQUIRE(s.ess[0] == 100.0);
  REQUIRE(s.mcse[0] == 0.0);
}

TEST_CASE("summarize: iid noise has ess near n") {
  RngStream rng(88);
  const int n = 10000;
  std::vector<double> values(n);
  for (double& v : values) v = sample_normal(rng, 0.0, 1.0);
  const PosteriorSummary s = summarize(batch_from(values));
  REQUIRE(s.ess[0] > 0.5 * n);
  REQUIRE(s.ess[0] <= 1.5 * n);
  REQUIRE_THAT(s.mcse[0], WithinAbs(s.sd[0] / std::sqrt(s.ess[0]), 1e-12));
}

TEST_CASE("summarize: AR(1) autocorrelation shrinks ess") {
  RngStream rng(89);
  const int n = 10000;
  const double rho = 0.9;
  std::vector<double> values(n);
  double x = 0.0;
  for (double& v : values) {
    x = rho * x + sample_normal(rng, 0.0, std::sqrt(1.0 - rho * rho));
    v = x;
  }
  const PosteriorSummary s = summarize(batch_from(values));
  // inflation factor (1+rho)/(1-rho) = 19
  REQUIRE(s.ess[0] < 0.2 * n);
}

TEST_CASE("summarize: too few samples is an error") {
  const SampleBatch batch = batch_from({1, 2, 3, 4, 5, 6, 7, 8, 9});
  REQUIRE_THROWS_AS(summarize(batch), DomainError);
}

TEST_CASE("summarize: pools chains and sums their ess") {
  RngStream rng(90);
  std::vector<double> a(2000), b(2000);
  for (double& v : a) v = sample_normal(rng, 0.0, 1.0);
  for (double& v : b) v = sample_normal(rng, 2.0, 1.0);
  std::vector<SampleBatch> chains{batch_from(a), batch_from(b)};
  chains[0].divergences = 2;
  chains[1].divergences = 3;
  const PosteriorSummary s = summarize(chains);
  REQUIRE(s.n_kept == 4000);
  REQUIRE_THAT(s.mean[0], WithinAbs(1.0, 0.1));
  REQUIRE(s.divergences == 5);
}

TEST_CASE("compare_runs: identical batches pass with zero deltas") {
  RngStream rng(91);
  std::vector<double> values(500);
  for (double& v : values) v = sample_normal(rng, 0.0, 1.0);
  const SampleBatch batch = batch_from(values);
  const CompareReport report = compare_runs(batch, batch);
  REQUIRE(report.all_pass);
  REQUIRE(report.dims.size() == 1);
  REQUIRE(report.dims[0].delta == 0.0);
}

TEST_CASE("compare_runs: separated means fail") {
  RngStream rng(92);
  std::vector<double> a(20000), b(20000);
  for (double& v : a) v = sample_normal(rng, 0.0, 1.0);
  for (double& v : b) v = sample_normal(rng, 1.0, 1.0);
  const CompareReport report =
      compare_runs(batch_from(a), batch_from(b));
  REQUIRE_FALSE(report.all_pass);
  REQUIRE_FALSE(report.dims[0].pass);
}

TEST_CASE("compare_runs: dimension mismatch") {
  SampleBatch a = batch_from(std::vector<double>(20, 0.0));
  SampleBatch b;
  b.dimension = 2;
  for (int i = 0; i < 20; ++i) {
    b.samples.push_back({0.0, 1.0});
    b.logps.push_back(0.0);
  }
  REQUIRE_THROWS_AS(compare_runs(a, b), DomainError);
}

TEST_CASE("sort_component_pairs orders pairs by the leading value") {
  SampleBatch batch;
  batch.dimension = 4;
  batch.samples.push_back({2.0, 0.5, -1.0, 0.25});
  batch.samples.push_back({-3.0, 0.1, -4.0, 0.2});
  batch.logps = {0.0, 0.0};
  sort_component_pairs(batch);
  REQUIRE(batch.samples[0] == ParamVector{-1.0, 0.25, 2.0, 0.5});
  REQUIRE(batch.samples[1] == ParamVector{-4.0, 0.2, -3.0, 0.1});

  SampleBatch odd;
  odd.dimension = 3;
  REQUIRE_THROWS_AS(sort_component_pairs(odd), DomainError);
}
