#pragma once

// Randomized verification campaigns and their reports.

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "lpw/dyadic_core.hpp"
#include "lpw/lattice.hpp"
#include "lpw/walsh.hpp"

namespace lpw {

using Json = nlohmann::ordered_json;

/// splitmix64 of (master, index); trial t always uses derive_seed(seed, t).
std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index) noexcept;

struct FunctionPolicy {
  enum class Kind { gaussian_cells, rademacher_cells, sparse_spectrum, spike, mixed };
  Kind kind = Kind::mixed;
  unsigned sparsity = 1;

  /// gaussian | rademacher | sparse:k | spike | mixed
  static FunctionPolicy parse(const std::string& text);
  std::string to_string() const;
  /// The concrete policy used by trial t; mixed rotates through the others.
  FunctionPolicy for_trial(std::size_t t) const;
};

enum class FamilyPolicy { dyadic, misaligned, singletons, random, mixed };
FamilyPolicy parse_family_policy(const std::string& text);
std::string to_string(FamilyPolicy policy);

DyadicFunction random_function(std::uint64_t seed, unsigned resolution, FunctionPolicy policy);
LatticeFunction random_lattice_function(std::uint64_t seed, unsigned resolution, std::size_t dim,
                                        double q, FunctionPolicy policy);

/// Sorted, pairwise disjoint intervals inside [0, 2^N).
std::vector<IntInterval> random_interval_family(std::uint64_t seed, unsigned resolution,
                                                std::size_t count, FamilyPolicy policy);

struct ExperimentConfig {
  std::string command;
  unsigned resolution = 8;
  std::size_t trials = 100;
  std::uint64_t seed = 1;
  double p = 2.0;
  double q = 2.0;
  std::size_t dim = 1;
  std::size_t count = 4;
  FamilyPolicy family = FamilyPolicy::random;
  FunctionPolicy function;
  RadMode rad;
  double lambda = 1.0;
  WalshIndex a = 0;
  WalshIndex b = 1;
  bool report_only = false;

  Json to_json() const;
};

struct TrialRecord {
  std::size_t index = 0;
  std::uint64_t seed = 0;
  double lhs = 0.0;
  double rhs = 0.0;
  double ratio = 0.0;
  Json extra = Json::object();
};

struct RatioSummary {
  double max = 0.0;
  double mean = 0.0;
  double p99 = 0.0;
  double min = 0.0;
  /// Index of the last trial that raised the running maximum.
  std::size_t running_max_last_change = 0;
  /// The running maximum did not move over the final 90% of trials.
  bool stable = false;
  bool finite = true;

  static RatioSummary of(const std::vector<TrialRecord>& trials);
};

struct AssertedBound {
  std::string name;
  double worst = 0.0;
  double bound = 0.0;
  std::size_t failures = 0;
  bool passed() const { return failures == 0; }
};

struct Report {
  ExperimentConfig config;
  std::vector<TrialRecord> trials;
  std::optional<RatioSummary> summary;
  std::vector<AssertedBound> asserted;
  Json payload = Json::object();

  bool passed() const;
  /// The summary object, including config echo and a timestamp field.
  Json summary_json() const;
};

/// json: one line per trial, then the summary line. csv: header plus one summary row.
void write_report(const Report& report, const std::string& format, std::ostream& out);

/// Drops the "timestamp" field from every line of a JSON-lines report.
std::string strip_timestamps(const std::string& jsonl);

Report run_scalar_lpr(const ExperimentConfig& cfg);
Report run_vector_lpr(const ExperimentConfig& cfg);
Report run_pointwise(const ExperimentConfig& cfg);
Report run_lemma_square(const ExperimentConfig& cfg);
Report run_weak11(const ExperimentConfig& cfg);
Report run_adjointness(const ExperimentConfig& cfg);
Report run_decompose(const ExperimentConfig& cfg);
Report run_czd(const ExperimentConfig& cfg);
Report run_verify_identities(const ExperimentConfig& cfg);

/// Dispatches on cfg.command.
Report run_command(const ExperimentConfig& cfg);

}  // namespace lpw
