// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any
// hard failure.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <unistd.h>

#include "helpers.hpp"
#include "seqmine/cli.hpp"
#include "seqmine/ingest.hpp"
#include "seqmine/kernels.hpp"
#include "seqmine/miner.hpp"
#include "seqmine/rules.hpp"
#include "seqmine/testkit.hpp"

using namespace seqmine;

namespace {

namespace fs = std::filesystem;
using Clock = std::chrono::steady_clock;

struct Outcome {
  bool pass = false;
  std::string detail;
  bool soft = false;  // a FAIL that does not fail the run
};

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

std::string fmt(double v, int digits = 4) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

GenConfig gen_config(const std::string& text) {
  std::istringstream in(text);
  return parse_gen_config(in);
}

SequenceDatabase ingest(const GeneratedData& data) {
  std::istringstream p(data.patients_csv), m(data.medical_csv);
  return build_sequences(parse_patient_table(p), parse_medical_table(m)).db;
}

RuleSet mine_rules(const SequenceDatabase& db, std::size_t min_sup, std::size_t max_len) {
  MinerConfig mc;
  mc.min_sup = MinSupport::absolute(min_sup);
  mc.max_pattern_length = max_len;
  mc.max_elements = max_len;
  return induce_rules(mine(db, mc), Ratio{1, 100});
}

std::vector<kernels::Backend> backends() {
  std::vector<kernels::Backend> out;
  for (auto b : {kernels::Backend::scalar, kernels::Backend::avx2}) {
    if (kernels::supported(b)) out.push_back(b);
  }
  return out;
}

const test::RandomDbShape kShape{25, 6, 5, 3};
constexpr std::size_t kDatabases = 200;

Outcome oracle_equivalence() {
  const auto start = Clock::now();
  std::mt19937_64 rng(20240611);
  const auto saved = kernels::active();
  std::size_t comparisons = 0, patterns = 0;
  for (std::size_t round = 0; round < kDatabases; ++round) {
    const SequenceDatabase db = test::random_db(rng, kShape);
    const FrequentPatternSet all = oracle_mine(db, 1, 4, 4);
    for (std::size_t min_sup : {1u, 2u, 3u}) {
      std::vector<SupportedPattern> expected;
      for (const SupportedPattern& p : all.patterns()) {
        if (p.support >= min_sup) expected.push_back(p);
      }
      for (auto backend : backends()) {
        kernels::select(backend);
        const FrequentPatternSet got = mine(db, test::config(min_sup, 4, 4));
        ++comparisons;
        const auto g = got.patterns();
        const bool same = g.size() == expected.size() &&
                          std::equal(g.begin(), g.end(), expected.begin(), [](const auto& a, const auto& b) {
                            return a.pattern == b.pattern && a.support == b.support;
                          });
        if (!same) {
          kernels::select(saved);
          return {false, "database " + std::to_string(round) + ", min_sup " + std::to_string(min_sup) + ", " +
                             std::string(kernels::name(backend)) + " kernels: " + std::to_string(g.size()) +
                             " patterns vs oracle " + std::to_string(expected.size())};
        }
        patterns += g.size();
      }
    }
  }
  kernels::select(saved);
  const double secs = seconds_since(start);
  return {secs < 60.0, std::to_string(kDatabases) + " databases, " + std::to_string(comparisons) +
                           " comparisons, " + std::to_string(patterns) + " patterns identical in " + fmt(secs, 2) +
                           " s (limit 60 s)"};
}

Outcome confidence_exactness() {
  std::mt19937_64 rng(77);
  std::size_t rules = 0;
  for (std::size_t round = 0; round < kDatabases; ++round) {
    const SequenceDatabase db = test::random_db(rng, kShape);
    const FrequentPatternSet verified = oracle_mine(db, 1, 4, 4);
    if (mine(db, test::config(1, 4, 4)) != verified) return {false, "mined set differs from oracle"};
    const RuleSet set = induce_rules(verified, Ratio{1, 1000000});
    for (const Rule& r : set.rules) {
      ++rules;
      const std::size_t xy = support(db, r.full_pattern());
      const std::size_t x = support(db, r.antecedent);
      // a/b == c/d exactly as rationals
      const bool rational = r.support * x == xy * r.antecedent_support;
      const double expected = static_cast<double>(xy) / static_cast<double>(x);
      if (!rational || std::abs(r.confidence - expected) > 1e-12) {
        return {false, "rule " + std::to_string(rules) + " in database " + std::to_string(round) + ": " +
                           std::to_string(r.support) + "/" + std::to_string(r.antecedent_support) + " vs oracle " +
                           std::to_string(xy) + "/" + std::to_string(x)};
      }
    }
  }
  return {true, std::to_string(rules) + " rules over " + std::to_string(kDatabases) +
                    " oracle-verified pattern sets match oracle ratios"};
}

constexpr const char* kDepression = "Depressive disorder NEC";
constexpr const char* kHypertension = "Essential hypertension";

Outcome repeat_chain_recovery() {
  const auto start = Clock::now();
  const std::string d = kDepression;
  const double planted[] = {0.343, 0.527, 0.604, 0.700};
  std::string text = "n_patients = 20000\nseed = 11\nbackground_items = 50\nbackground_rate = 5\n";
  text += "rule = => " + d + " | p=1.0\n";
  std::string trigger = d;
  for (double p : planted) {
    text += "rule = " + trigger + " => " + d + " | p=" + fmt(p, 3) + "\n";
    trigger += " > " + d;
  }
  const GeneratedData data = generate(gen_config(text));
  const SequenceDatabase db = ingest(data);
  const RuleSet rules = mine_rules(db, 100, 5);
  const auto id = db.symbols().find(d);
  if (!id) return {false, "planted code missing from database"};
  const auto chains = repeat_chains(rules);
  const auto chain = std::find_if(chains.begin(), chains.end(), [&](const RepeatChain& c) { return c.item == *id; });
  if (chain == chains.end() || chain->chain.size() != 4) return {false, "repeat chain for the planted code not found"};

  bool ok = true;
  std::string detail;
  for (std::size_t n = 1; n <= 4; ++n) {
    const RepeatStep& s = chain->chain[n - 1];
    const ManifestEntry& m = data.manifest[n];
    const bool exact = s.repetitions == n && s.confidence == m.realized_ratio() && s.support == m.firings &&
                       s.antecedent_support == m.carriers;
    const bool near = std::abs(s.confidence - planted[n - 1]) <= 0.02;
    ok = ok && exact && near;
    const double sigma = std::sqrt(planted[n - 1] * (1.0 - planted[n - 1]) / static_cast<double>(m.carriers));
    detail += (n > 1 ? ", " : "") + std::to_string(n) + "x " + fmt(s.confidence);
    if (!exact) detail += " (manifest " + fmt(m.realized_ratio()) + ")";
    detail += " vs " + fmt(planted[n - 1], 3);
    if (!near) detail += " [outside 0.02, " + fmt(std::abs(s.confidence - planted[n - 1]) / sigma, 2) + " sigma]";
  }
  const double secs = seconds_since(start);
  ok = ok && secs < 120.0;
  return {ok, detail + "; " + fmt(secs, 1) + " s (limit 120 s)"};
}

Outcome yob_recovery() {
  const std::string h = kHypertension;
  const GeneratedData data = generate(gen_config(
      "n_patients = 20000\nseed = 12\nyob_min = 1943\nyob_max = 1944\nbackground_items = 40\nbackground_rate = 4\n"
      "rule = => " + h + " | p=0.117 | yob=1943\n"
      "rule = => " + h + " | p=0.110 | yob=1944\n"));
  const SequenceDatabase db = ingest(data);
  const RuleSet rules = mine_rules(db, 50, 3);
  const auto id = db.symbols().find(h);
  if (!id) return {false, "planted code missing from database"};
  const auto profile = yob_profile(rules, db.symbols(), *id);
  if (profile.size() != 2 || profile[0].year != 1943 || profile[1].year != 1944) {
    return {false, "expected yob 1943 and 1944 in the profile, got " + std::to_string(profile.size()) + " points"};
  }
  bool ok = true;
  std::string detail;
  for (std::size_t i = 0; i < 2; ++i) {
    const ManifestEntry& m = data.manifest[i];
    const bool exact = profile[i].confidence == m.realized_ratio() && profile[i].antecedent_support == m.cohort_n;
    ok = ok && exact;
    detail += (i ? ", " : "") + std::to_string(profile[i].year) + ": " + fmt(profile[i].confidence) + " over " +
              std::to_string(profile[i].antecedent_support) + (exact ? " = manifest" : " != manifest " + fmt(m.realized_ratio()));
  }
  return {ok, detail};
}

Outcome gender_delta() {
  const std::string h = kHypertension;
  const GeneratedData data = generate(gen_config(
      "n_patients = 40000\nseed = 13\nbackground_items = 40\nbackground_rate = 4\n"
      "rule = " + h + " => " + h + " | trigger_rate=1.0 | p=0.174 | gender=female\n"
      "rule = " + h + " => " + h + " | trigger_rate=1.0 | p=0.158 | gender=male\n"));
  const SequenceDatabase db = ingest(data);
  const RuleSet rules = mine_rules(db, 100, 3);
  const auto id = db.symbols().find(h);
  const auto female = db.symbols().find("gender:female");
  if (!id || !female) return {false, "planted code or gender item missing"};
  const Pattern base{EventSet{*id}};
  const auto deltas = gender_deltas(rules, db.symbols());
  const auto it = std::find_if(deltas.begin(), deltas.end(), [&](const GenderDelta& g) {
    return g.gender_item == *female && g.base.antecedent == base && g.base.consequent == EventSet{*id};
  });
  if (it == deltas.end()) return {false, "no female delta reported for the planted rule"};
  const ManifestEntry& f = data.manifest[0];
  const ManifestEntry& m = data.manifest[1];
  const double expected =
      confidence(f.firings, f.carriers) - confidence(f.firings + m.firings, f.carriers + m.carriers);
  const bool ok = it->delta > 0.0 && it->delta == expected;
  return {ok, "female " + fmt(it->gendered.confidence) + " vs base " + fmt(it->base.confidence) + ", delta " +
                  fmt(it->delta) + (it->delta == expected ? " = manifest delta" : " != manifest " + fmt(expected))};
}

// Removes one item; a singleton element disappears with it.
Pattern delete_item(const Pattern& p, std::size_t element, std::size_t item) {
  std::vector<EventSet> out;
  for (std::size_t e = 0; e < p.element_count(); ++e) {
    const EventSet& set = p.elements()[e];
    if (e != element) {
      out.push_back(set);
    } else if (set.size() > 1) {
      std::vector<ItemId> ids(set.items().begin(), set.items().end());
      ids.erase(ids.begin() + static_cast<std::ptrdiff_t>(item));
      out.emplace_back(std::move(ids));
    }
  }
  return Pattern(std::move(out));
}

Outcome anti_monotonicity() {
  std::mt19937_64 rng(31337);
  std::size_t pairs = 0, nonzero = 0;
  while (pairs < 1000) {
    const SequenceDatabase db = test::random_db(rng, kShape);
    for (int k = 0; k < 10 && pairs < 1000; ++k) {
      const Pattern p = test::random_pattern(rng, kShape.items, 4, 3);
      if (cardinality(p) < 2) continue;
      const std::size_t e = std::uniform_int_distribution<std::size_t>(0, p.element_count() - 1)(rng);
      const std::size_t i = std::uniform_int_distribution<std::size_t>(0, p.elements()[e].size() - 1)(rng);
      const Pattern sub = delete_item(p, e, i);
      const std::size_t sup = support(db, p), sub_sup = support(db, sub);
      ++pairs;
      nonzero += sup > 0;
      if (sub_sup < sup) return {false, "support rose from " + std::to_string(sub_sup) + " to " + std::to_string(sup)};
    }
  }
  return {true, std::to_string(pairs) + " pairs, " + std::to_string(nonzero) + " with nonzero support"};
}

std::string slurp(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

// gen -> ingest -> mine -> rules through the command-line entry point.
std::string pipeline(const fs::path& dir, const fs::path& config, unsigned threads) {
  fs::create_directories(dir);
  std::ostringstream out, err;
  const auto step = [&](std::vector<std::string> args) {
    if (cli::run(args, out, err) != 0) throw std::runtime_error(args[0] + " failed: " + err.str());
  };
  step({"gen", config.string(), (dir / "gen").string()});
  step({"ingest", (dir / "gen" / "patients.csv").string(), (dir / "gen" / "medical.csv").string(),
        (dir / "db.seqdb").string()});
  step({"mine", (dir / "db.seqdb").string(), (dir / "db.freq").string(), "--min-sup", "0.01", "--threads",
        std::to_string(threads)});
  step({"rules", (dir / "db.freq").string(), (dir / "db.rules").string()});
  return slurp(dir / "db.rules");
}

Outcome determinism() {
  const fs::path root = fs::temp_directory_path() / ("seqmine_acceptance_" + std::to_string(::getpid()));
  fs::remove_all(root);
  fs::create_directories(root);
  const fs::path config = root / "gen.conf";
  std::ofstream(config) << "n_patients = 3000\nseed = 99\nbackground_items = 30\nbackground_rate = 6\n"
                           "rule = => X | p=0.3\nrule = X => Y | p=0.5\nrule = Y > X => Z | p=0.4 | gender=male\n";
  Outcome result;
  try {
    const std::string a = pipeline(root / "a", config, 1);
    const std::string b = pipeline(root / "b", config, 1);
    const std::string c = pipeline(root / "c", config, 4);
    const std::size_t lines = static_cast<std::size_t>(std::count(a.begin(), a.end(), '\n'));
    result.pass = a == b && a == c && lines > 2;
    result.detail = std::to_string(lines) + "-line rules file; repeat run " + (a == b ? "identical" : "differs") +
                    ", threads 1 vs 4 " + (a == c ? "identical" : "differs");
  } catch (const std::exception& e) {
    result = {false, e.what()};
  }
  fs::remove_all(root);
  return result;
}

Outcome throughput() {
  const GeneratedData data =
      generate(gen_config("n_patients = 100000\nseed = 21\nbackground_items = 100\nbackground_rate = 20\n"));
  const SequenceDatabase db = ingest(data);
  MinerConfig mc;
  mc.min_sup = MinSupport::relative(Ratio{1, 100});
  mc.max_pattern_length = 5;
  const auto start = Clock::now();
  const FrequentPatternSet set = mine(db, mc);
  const double secs = seconds_since(start);
  std::string detail = fmt(secs, 1) + " s for " + std::to_string(db.size()) + " patients, " +
                       std::to_string(set.size()) + " patterns, " + std::string(kernels::name(kernels::active())) +
                       " kernels (budget 60 s)";
  if (secs < 60.0) return {true, detail};
  // Over budget but inside 3x is recorded rather than failed.
  return {false, detail, secs < 180.0};
}

}  // namespace

int main() {
  kernels::select(kernels::detect());
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
      {"oracle equivalence", oracle_equivalence},
      {"confidence exactness", confidence_exactness},
      {"repeat-chain recovery", repeat_chain_recovery},
      {"yob rule recovery", yob_recovery},
      {"gender delta recovery", gender_delta},
      {"anti-monotonicity", anti_monotonicity},
      {"determinism", determinism},
      {"desk-scale throughput", throughput},
  };
  int hard_failures = 0;
  for (const auto& [name, run] : criteria) {
    Outcome o;
    try {
      o = run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    std::cout << (o.pass ? "PASS" : o.soft ? "FAIL (soft)" : "FAIL") << "  " << name << ": " << o.detail
              << std::endl;
    hard_failures += !o.pass && !o.soft;
  }
  return hard_failures ? 1 : 0;
}
