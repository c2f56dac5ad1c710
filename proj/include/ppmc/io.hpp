#pragma once

#include <algorithm>
#include <cctype>
#include <charconv>
#include <fstream>
#include <map>
#include <span>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "ppmc/errors.hpp"
#include "ppmc/samplers.hpp"
#include "ppmc/summary.hpp"

namespace ppmc {

namespace detail {

/// Shortest decimal representation that round-trips to the same double.
inline std::string format_double(double v) {
  char buf[32];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, ptr);
}

inline std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.back() == '\r' || std::isspace(static_cast<unsigned char>(s.back()))))
    s.remove_suffix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front())))
    s.remove_prefix(1);
  return s;
}

inline bool parse_double(std::string_view s, double& out) {
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
  return ec == std::errc{} && ptr == s.data() + s.size();
}

inline std::vector<std::string_view> split_csv(std::string_view line) {
  std::vector<std::string_view> fields;
  std::size_t start = 0;
  while (true) {
    const std::size_t comma = line.find(',', start);
    if (comma == std::string_view::npos) {
      fields.push_back(trim(line.substr(start)));
      return fields;
    }
    fields.push_back(trim(line.substr(start, comma - start)));
    start = comma + 1;
  }
}

inline std::ifstream open_for_read(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DomainError("cannot open file: " + path);
  return in;
}

}  // namespace detail

/// Single real column, one value per line; optional header, LF or CRLF.
inline std::vector<double> load_real_column(const std::string& path) {
  std::ifstream in = detail::open_for_read(path);
  std::vector<double> values;
  std::string line;
  bool first = true;
  while (std::getline(in, line)) {
    const std::string_view field = detail::trim(line);
    if (field.empty()) continue;
    double v;
    if (!detail::parse_double(field, v)) {
      if (first) {
        first = false;
        continue;  // header
      }
      throw DomainError(path + ": cannot parse '" + std::string(field) +
                        "' as a real number");
    }
    first = false;
    values.push_back(v);
  }
  return values;
}

/// Single boolean column of true/false literals (case-insensitive).
inline std::vector<bool> load_bool_column(const std::string& path) {
  std::ifstream in = detail::open_for_read(path);
  std::vector<bool> values;
  std::string line;
  bool first = true;
  while (std::getline(in, line)) {
    std::string field{detail::trim(line)};
    if (field.empty()) continue;
    std::transform(field.begin(), field.end(), field.begin(),
                   [](unsigned char c) { return std::tolower(c); });
    if (field == "true") {
      values.push_back(true);
    } else if (field == "false") {
      values.push_back(false);
    } else if (first) {
      // header
    } else {
      throw DomainError(path + ": expected true/false, found '" + field + "'");
    }
    first = false;
  }
  return values;
}

/// Kept samples of all chains: header `chain,iter,logp,x0,...`, one row per
/// kept sample, full double precision.
inline void write_samples_csv(std::ostream& out,
                              std::span<const SampleBatch> chains) {
  if (chains.empty()) throw DomainError("write_samples_csv: no chains");
  out << "chain,iter,logp";
  for (std::size_t d = 0; d < chains[0].dimension; ++d) out << ",x" << d;
  out << "\n";
  for (const SampleBatch& chain : chains) {
    for (std::size_t i = 0; i < chain.samples.size(); ++i) {
      out << chain.chain_id << ',' << i << ','
          << detail::format_double(chain.logps[i]);
      for (double v : chain.samples[i]) out << ',' << detail::format_double(v);
      out << "\n";
    }
  }
}

inline void write_samples_csv(const std::string& path,
                              std::span<const SampleBatch> chains) {
  std::ofstream out(path, std::ios::binary);  // LF line endings everywhere
  if (!out) throw DomainError("cannot open file for writing: " + path);
  write_samples_csv(out, chains);
}

/// Reads a samples CSV back into per-chain batches (ordered by chain id).
inline std::vector<SampleBatch> read_samples_csv(const std::string& path) {
  std::ifstream in = detail::open_for_read(path);
  std::string line;
  if (!std::getline(in, line))
    throw DomainError(path + ": empty samples file");
  const auto header = detail::split_csv(line);
  if (header.size() < 4 || header[0] != "chain" || header[1] != "iter" ||
      header[2] != "logp")
    throw DomainError(path + ": not a samples CSV (bad header)");
  const std::size_t dim = header.size() - 3;

  std::map<std::uint64_t, SampleBatch> by_chain;
  while (std::getline(in, line)) {
    if (detail::trim(line).empty()) continue;
    const auto fields = detail::split_csv(line);
    if (fields.size() != dim + 3)
      throw DomainError(path + ": row with wrong field count");
    double chain_id_raw, logp;
    if (!detail::parse_double(fields[0], chain_id_raw) ||
        !detail::parse_double(fields[2], logp))
      throw DomainError(path + ": unparsable row");
    const auto chain_id = static_cast<std::uint64_t>(chain_id_raw);
    SampleBatch& batch = by_chain[chain_id];
    batch.dimension = dim;
    batch.chain_id = chain_id;
    ParamVector row(dim);
    for (std::size_t d = 0; d < dim; ++d) {
      if (!detail::parse_double(fields[3 + d], row[d]))
        throw DomainError(path + ": unparsable row");
    }
    batch.samples.push_back(std::move(row));
    batch.logps.push_back(logp);
  }
  std::vector<SampleBatch> chains;
  chains.reserve(by_chain.size());
  for (auto& [id, batch] : by_chain) chains.push_back(std::move(batch));
  return chains;
}

/// The run summary document: one JSON object with the run identity and the
/// posterior diagnostics.
inline std::string render_summary_json(const std::string& model,
                                       const std::string& variant,
                                       const std::string& sampler,
                                       std::uint64_t seed,
                                       const PosteriorSummary& s) {
  nlohmann::json doc;
  doc["model"] = model;
  doc["variant"] = variant;
  doc["sampler"] = sampler;
  doc["seed"] = seed;
  doc["mean"] = s.mean;
  doc["sd"] = s.sd;
  doc["ess"] = s.ess;
  doc["mcse"] = s.mcse;
  doc["divergences"] = s.divergences;
  if (s.accept_rate)
    doc["accept_rate"] = *s.accept_rate;
  else
    doc["accept_rate"] = nullptr;
  doc["seconds"] = s.seconds;
  return doc.dump(2) + "\n";
}

}  // namespace ppmc
