#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "ppmc/errors.hpp"
#include "ppmc/samplers.hpp"

namespace ppmc {

/// Per-dimension posterior diagnostics of one run (possibly pooled over
/// several chains). mcse = sd / sqrt(ess).
struct PosteriorSummary {
  std::vector<double> mean, sd, ess, mcse;
  std::size_t n_kept = 0;
  std::size_t divergences = 0;
  std::optional<double> accept_rate;
  double seconds = 0.0;
};

namespace detail {

struct DimStats {
  double mean, sd, ess;
};

/// Batch-means ESS with ~sqrt(n) batches: the long-run variance is
/// estimated from the spread of batch means, and ess = n * s^2 / (b * s_bm^2),
/// clamped to [1, n]. Constant chains get ess = n by convention.
inline DimStats batch_means_stats(std::span<const double> v) {
  const std::size_t n = v.size();
  double mean = 0.0;
  for (double x : v) mean += x;
  mean /= static_cast<double>(n);
  double s2 = 0.0;
  for (double x : v) s2 += (x - mean) * (x - mean);
  s2 /= static_cast<double>(n - 1);
  if (s2 == 0.0) return {mean, 0.0, static_cast<double>(n)};

  const auto a = static_cast<std::size_t>(std::floor(std::sqrt(n)));  // batches
  const std::size_t b = n / a;                                        // batch size
  double s2_bm = 0.0;
  double used_mean = 0.0;
  for (std::size_t j = 0; j < a * b; ++j) used_mean += v[j];
  used_mean /= static_cast<double>(a * b);
  for (std::size_t j = 0; j < a; ++j) {
    double bm = 0.0;
    for (std::size_t i = 0; i < b; ++i) bm += v[j * b + i];
    bm /= static_cast<double>(b);
    s2_bm += (bm - used_mean) * (bm - used_mean);
  }
  s2_bm /= static_cast<double>(a - 1);

  double ess = static_cast<double>(n);
  if (s2_bm > 0.0)
    ess = static_cast<double>(n) * s2 / (static_cast<double>(b) * s2_bm);
  ess = std::clamp(ess, 1.0, static_cast<double>(n));
  return {mean, std::sqrt(s2), ess};
}

}  // namespace detail

/// Summary of several chains of the same model: means and sds pooled over
/// all kept samples, ESS computed per chain (batches never straddle a
/// chain boundary) and summed.
inline PosteriorSummary summarize(std::span<const SampleBatch> chains) {
  if (chains.empty()) throw DomainError("summarize: no chains");
  const std::size_t dim = chains[0].dimension;
  std::size_t total = 0;
  for (const SampleBatch& c : chains) {
    if (c.dimension != dim) throw DomainError("summarize: dimension mismatch");
    if (c.samples.size() < 10)
      throw DomainError("summarize: fewer than 10 kept samples");
    total += c.samples.size();
  }

  PosteriorSummary s;
  s.n_kept = total;
  s.mean.resize(dim);
  s.sd.resize(dim);
  s.ess.resize(dim);
  s.mcse.resize(dim);

  std::vector<double> column;
  column.reserve(total);
  for (std::size_t d = 0; d < dim; ++d) {
    column.clear();
    double ess_total = 0.0;
    for (const SampleBatch& c : chains) {
      const std::size_t offset = column.size();
      for (const ParamVector& row : c.samples) column.push_back(row[d]);
      ess_total += detail::batch_means_stats(
                       std::span<const double>(column).subspan(offset))
                       .ess;
    }
    double mean = 0.0;
    for (double x : column) mean += x;
    mean /= static_cast<double>(total);
    double s2 = 0.0;
    for (double x : column) s2 += (x - mean) * (x - mean);
    s2 = total > 1 ? s2 / static_cast<double>(total - 1) : 0.0;

    s.mean[d] = mean;
    s.sd[d] = std::sqrt(s2);
    s.ess[d] = std::min(ess_total, static_cast<double>(total));
    s.mcse[d] = s.sd[d] == 0.0 ? 0.0 : s.sd[d] / std::sqrt(s.ess[d]);
  }

  double accept_num = 0.0, accept_den = 0.0;
  for (const SampleBatch& c : chains) {
    s.divergences += c.divergences;
    if (c.accept_rate) {
      accept_num += *c.accept_rate * static_cast<double>(c.samples.size());
      accept_den += static_cast<double>(c.samples.size());
    }
  }
  if (accept_den > 0.0) s.accept_rate = accept_num / accept_den;
  return s;
}

inline PosteriorSummary summarize(const SampleBatch& batch) {
  return summarize(std::span<const SampleBatch>(&batch, 1));
}

struct DimComparison {
  double mean_a, mean_b, delta, threshold;
  bool pass;
};

struct CompareReport {
  std::vector<DimComparison> dims;
  bool all_pass = true;
};

/// Consistency check between two runs: per dimension, the difference of
/// means must stay within 3 joint Monte Carlo standard errors.
inline CompareReport compare_runs(const PosteriorSummary& a,
                                  const PosteriorSummary& b) {
  if (a.mean.size() != b.mean.size())
    throw DomainError("compare_runs: dimension mismatch");
  CompareReport report;
  for (std::size_t d = 0; d < a.mean.size(); ++d) {
    DimComparison c{};
    c.mean_a = a.mean[d];
    c.mean_b = b.mean[d];
    c.delta = std::abs(a.mean[d] - b.mean[d]);
    c.threshold =
        3.0 * std::sqrt(a.mcse[d] * a.mcse[d] + b.mcse[d] * b.mcse[d]);
    c.pass = c.delta <= c.threshold;
    report.all_pass = report.all_pass && c.pass;
    report.dims.push_back(c);
  }
  return report;
}

inline CompareReport compare_runs(const SampleBatch& a, const SampleBatch& b) {
  return compare_runs(summarize(a), summarize(b));
}

/// Breaks label-switching symmetry in mixture samples: treats each row as
/// consecutive (mu, log sigma) pairs and sorts the pairs by mu.
inline void sort_component_pairs(SampleBatch& batch) {
  if (batch.dimension % 2 != 0)
    throw DomainError("sort_component_pairs: odd dimension");
  const std::size_t k = batch.dimension / 2;
  std::vector<std::pair<double, double>> pairs(k);
  for (ParamVector& row : batch.samples) {
    for (std::size_t j = 0; j < k; ++j) pairs[j] = {row[2 * j], row[2 * j + 1]};
    std::sort(pairs.begin(), pairs.end());
    for (std::size_t j = 0; j < k; ++j) {
      row[2 * j] = pairs[j].first;
      row[2 * j + 1] = pairs[j].second;
    }
  }
}

}  // namespace ppmc
