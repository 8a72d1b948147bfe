#pragma once

// Ground truth for the miner and the rule analyses.
//
// oracle_mine enumerates every pattern over the database's items and counts
// support by scanning all sequences with contains(); it shares nothing with
// the id-list machinery. generate() writes patient/medical tables with rules
// planted at chosen probabilities and records the realized counts, so that
// mined confidences can be checked exactly.

#include <cstddef>
#include <cstdint>
#include <istream>
#include <optional>
#include <ostream>
#include <random>
#include <string>
#include <string_view>
#include <vector>

#include "seqmine/ingest.hpp"
#include "seqmine/miner.hpp"

namespace seqmine {

struct OracleLimits {
  std::size_t max_items = 8;
  std::size_t max_len = 4;
};

/// Exhaustive frequent pattern enumeration. Throws LimitError past `limits`.
FrequentPatternSet oracle_mine(const SequenceDatabase& db, std::size_t min_sup, std::size_t max_len,
                               std::size_t max_elems, const OracleLimits& limits = {});

struct Cohort {
  std::optional<int> yob_min;
  std::optional<int> yob_max;
  std::optional<Gender> gender;

  bool matches(int yob, Gender g) const;
};

/// A patient in the cohort who carries `trigger` (codes in order) gets
/// `consequence` at a later date with `probability`. Non-carriers are first
/// given the trigger with `trigger_rate`. Rules apply in config order, so a
/// consequence planted by one rule can make a patient carry the next rule's
/// trigger.
struct PlantedRule {
  std::vector<std::string> trigger;
  std::string consequence;
  double probability = 0.0;
  double trigger_rate = 0.0;
  Cohort cohort;
};

struct GenConfig {
  std::size_t n_patients = 1000;
  int yob_min = 1930;
  int yob_max = 2005;
  double gender_split = 0.5;          // fraction female
  std::size_t background_items = 50;  // noise codes event_000 ...
  double background_rate = 5.0;       // mean noise events per patient (Poisson)
  std::vector<PlantedRule> planted_rules;
  std::uint64_t seed = 1;

  /// Throws InputError listing every invalid field.
  void validate() const;
};

/// Flat `key = value` text; `rule = A > B => C | p=0.3 | trigger_rate=0.5 |
/// yob=1943-1944 | gender=female` lines add planted rules. '#' starts a
/// comment line.
GenConfig parse_gen_config(std::istream& in);

struct ManifestEntry {
  std::vector<std::string> trigger;
  std::string consequence;
  std::size_t cohort_n = 0;
  std::size_t carriers = 0;
  std::size_t firings = 0;

  double realized_ratio() const { return carriers ? static_cast<double>(firings) / static_cast<double>(carriers) : 0.0; }
  friend bool operator==(const ManifestEntry&, const ManifestEntry&) = default;
};

using Manifest = std::vector<ManifestEntry>;

void write_manifest(std::ostream& out, const Manifest& manifest);
Manifest read_manifest(std::istream& in);

struct GeneratedData {
  std::string patients_csv;
  std::string medical_csv;
  Manifest manifest;
};

/// Deterministic in (config, config.seed).
GeneratedData generate(const GenConfig& config);

/// Name of the i-th noise code.
std::string background_code(std::size_t i);

/// Deterministic sampling on top of mt19937_64. The std distributions are
/// implementation-defined, which would make generated files differ between
/// standard libraries.
class PortableRng {
 public:
  explicit PortableRng(std::uint64_t seed) : engine_(seed) {}
  /// Uniform in [0, 1) with 53 random bits.
  double uniform01();
  bool bernoulli(double p) { return uniform01() < p; }
  /// Uniform integer in [lo, hi].
  std::uint64_t uniform(std::uint64_t lo, std::uint64_t hi);
  std::uint64_t poisson(double mean);

 private:
  std::mt19937_64 engine_;
};

}  // namespace seqmine
