#pragma once

// Sequential rules X -> Y from a frequent pattern set, and the rule-shape
// analyses run over them: repeat chains (A -> A, A,A -> A, ...), confidence
// shifts caused by a gender item in the antecedent, and year-of-birth profiles.

#include <cstddef>
#include <istream>
#include <ostream>
#include <vector>

#include "seqmine/miner.hpp"
#include "seqmine/model.hpp"
#include "seqmine/text.hpp"

namespace seqmine {

struct Rule {
  Pattern antecedent;
  EventSet consequent;
  std::size_t support = 0;             // sup(X -> Y)
  std::size_t antecedent_support = 0;  // sup(X)
  double confidence = 0.0;             // support / antecedent_support

  /// X followed by Y as one pattern.
  Pattern full_pattern() const;
  friend bool operator==(const Rule&, const Rule&) = default;
};

/// Confidence descending (compared exactly on the integer supports), then
/// pattern order of the full pattern.
bool rule_order(const Rule& a, const Rule& b);

struct RuleSet {
  std::vector<Rule> rules;
  Ratio min_conf{1, 10};
};

/// Rules from every pattern with at least two elements: X is all elements but
/// the last, Y the last. Keeps rules with confidence >= min_conf. Throws
/// ConsistencyError if some X is missing from the set.
RuleSet induce_rules(const FrequentPatternSet& patterns, Ratio min_conf = Ratio{1, 10});

struct RepeatStep {
  std::size_t repetitions = 0;  // n in (A)^n -> (A)
  double confidence = 0.0;
  std::size_t support = 0;
  std::size_t antecedent_support = 0;
};

struct RepeatChain {
  ItemId item;
  std::vector<RepeatStep> chain;  // ascending n
};

/// For every item A with some rule (A)x n -> (A), the (n, confidence) steps.
/// Items ascend by id.
std::vector<RepeatChain> repeat_chains(const RuleSet& rules);

struct GenderDelta {
  Rule base;
  Rule gendered;
  ItemId gender_item;
  double delta = 0.0;  // gendered.confidence - base.confidence
};

/// Pairs each rule whose antecedent holds exactly one gender:* item with the
/// rule obtained by removing that item, when both are present. Sorted by
/// |delta| descending.
std::vector<GenderDelta> gender_deltas(const RuleSet& rules, const SymbolTable& symbols);

struct YobPoint {
  int year = 0;
  double confidence = 0.0;
  std::size_t support = 0;
  std::size_t antecedent_support = 0;
};

/// Rules (yob:<year>) -> (consequent_item), by ascending year.
std::vector<YobPoint> yob_profile(const RuleSet& rules, const SymbolTable& symbols, ItemId consequent_item);

/// `#rules v1`: confidence, support, antecedent, consequent per line.
void write_rules(std::ostream& out, const RuleSet& rules, const SymbolTable& symbols);

struct RulesFile {
  SymbolTable symbols;
  RuleSet rules;
};
/// Rules keep the file's order. sup(X) is recovered as
/// round(support / confidence). Throws FormatError.
RulesFile read_rules(std::istream& in);

/// Labeled text sections: repeat chains, gender deltas, yob profiles (with
/// absolute and relative differences between consecutive years).
void write_report(std::ostream& out, const RuleSet& rules, const SymbolTable& symbols);

}  // namespace seqmine
