#pragma once

// Vertical id-list frequent sequence mining.
//
// The database is turned into one id-list per item: the (sid, eid) positions
// where the item occurs. A pattern's id-list holds the positions at which some
// embedding of the pattern ends, so
//   * an S-extension P -> (x) keeps x's positions that follow a position of P
//     in the same sequence (temporal_join_s), and
//   * an I-extension that adds x to P's last element keeps positions shared
//     by P and x (temporal_join_i).
// The number of distinct sids in the id-list is the pattern's support.
// Patterns are enumerated depth-first, one equivalence class per shared
// prefix, and an extension is only tried if it was frequent for the parent
// class (support is anti-monotone), so infrequent branches are cut early.

#include <cstddef>
#include <cstdint>
#include <istream>
#include <map>
#include <ostream>
#include <span>
#include <string_view>
#include <variant>
#include <vector>

#include "seqmine/kernels.hpp"
#include "seqmine/model.hpp"
#include "seqmine/text.hpp"

namespace seqmine {

/// Sorted, duplicate-free (sid, eid) list with its distinct sid count.
class IdList {
 public:
  struct Entry {
    std::uint32_t sid;
    std::uint32_t eid;
    friend bool operator==(const Entry&, const Entry&) = default;
  };

  IdList() = default;
  /// Throws InputError unless `entries` is strictly ascending by (sid, eid).
  explicit IdList(std::span<const Entry> entries);
  IdList(std::initializer_list<Entry> entries) : IdList(std::span<const Entry>(entries.begin(), entries.size())) {}

  /// Adopts kernel output as-is; `keys` must already be canonical and hold
  /// `sids` distinct sids.
  static IdList from_canonical_keys(std::span<const kernels::Key> keys, std::size_t sids);

  /// Appends; the entry must sort after every existing one.
  void push_back(std::uint32_t sid, std::uint32_t eid);

  std::span<const kernels::Key> keys() const { return keys_; }
  std::size_t size() const { return keys_.size(); }
  bool empty() const { return keys_.empty(); }
  std::size_t distinct_sids() const { return sids_; }
  Entry operator[](std::size_t i) const { return {kernels::key_sid(keys_[i]), kernels::key_eid(keys_[i])}; }
  std::vector<Entry> entries() const;

  friend bool operator==(const IdList&, const IdList&) = default;

 private:
  friend IdList temporal_join_s(const IdList&, const IdList&, std::size_t);
  friend IdList temporal_join_i(const IdList&, const IdList&);

  std::vector<kernels::Key> keys_;
  std::size_t sids_ = 0;
};

/// Item -> positions. Only items that occur are present.
std::map<ItemId, IdList> verticalize(const SequenceDatabase& db);

/// Positions of `atom` that come strictly after some position of `prefix` in
/// the same sequence. With min_sids > 0 a result that cannot reach min_sids
/// distinct sids comes back empty.
IdList temporal_join_s(const IdList& prefix, const IdList& atom, std::size_t min_sids = 0);

/// Positions present in both lists.
IdList temporal_join_i(const IdList& prefix, const IdList& atom);

/// Minimum support, absolute or relative to |D|.
class MinSupport {
 public:
  static MinSupport absolute(std::size_t count);
  /// Fraction in (0, 1].
  static MinSupport relative(Ratio fraction);
  /// "12" is absolute; anything with a decimal point is a fraction.
  static MinSupport parse(std::string_view text);

  bool is_relative() const { return std::holds_alternative<Ratio>(value_); }
  /// ceil(fraction * db_size) for a fraction, never below 1.
  std::size_t resolve(std::size_t db_size) const;
  std::string describe() const;

 private:
  explicit MinSupport(std::variant<std::size_t, Ratio> v) : value_(v) {}
  std::variant<std::size_t, Ratio> value_;
};

struct MinerConfig {
  MinSupport min_sup = MinSupport::relative(Ratio{1, 1000});
  std::size_t max_pattern_length = 5;  // cardinality cap
  std::size_t max_elements = 5;
  /// Whether listings include patterns made only of yob:/gender: items. Such
  /// patterns are always mined and kept in the set, since rules need their
  /// supports as antecedents.
  bool emit_demographic_only_patterns = false;
  /// 0 picks std::thread::hardware_concurrency().
  unsigned threads = 0;
};

/// Frequent patterns sorted by (cardinality, pattern order).
class FrequentPatternSet {
 public:
  FrequentPatternSet() = default;
  /// Sorts `patterns` into listing order.
  FrequentPatternSet(std::vector<SupportedPattern> patterns, std::size_t db_size, std::size_t min_sup);

  std::span<const SupportedPattern> patterns() const { return patterns_; }
  std::size_t size() const { return patterns_.size(); }
  std::size_t db_size() const { return db_size_; }
  std::size_t min_sup() const { return min_sup_; }

  /// Linear-time lookup index; build once and reuse.
  std::unordered_map<Pattern, std::size_t, PatternHash> support_index() const;

  friend bool operator==(const FrequentPatternSet&, const FrequentPatternSet&) = default;

 private:
  std::vector<SupportedPattern> patterns_;
  std::size_t db_size_ = 0;
  std::size_t min_sup_ = 1;
};

/// True iff every item in the pattern is a demographic (yob:/gender:) symbol.
bool is_demographic_only(const Pattern& pattern, const SymbolTable& symbols);
bool is_demographic_symbol(std::string_view symbol);

/// Every pattern within the caps whose support reaches the resolved minimum.
/// Throws InputError on an empty database or on zero caps.
FrequentPatternSet mine(const SequenceDatabase& db, const MinerConfig& config);

/// Element rendering shared by the text formats: "a,b|c".
std::string render_pattern(const Pattern& pattern, const SymbolTable& symbols);
/// Inverse of render_pattern, interning symbols as needed.
Pattern parse_pattern(std::string_view text, SymbolTable& symbols);

/// A rendered pattern split into unescaped item names, one vector per element.
using PatternNames = std::vector<std::vector<std::string>>;
PatternNames split_pattern(std::string_view text);
/// Adds every element of `names` to `order`.
void record_pattern(const PatternNames& names, SymbolOrder& order);
/// Looks up each name; every one must already be present in `symbols`.
Pattern resolve_pattern(const PatternNames& names, const SymbolTable& symbols);

/// Patterns meant for display: everything, or everything but the
/// demographic-only patterns.
std::vector<SupportedPattern> listing(const FrequentPatternSet& set, const SymbolTable& symbols,
                                      bool emit_demographic_only);

/// `#freq v1` writer. Every pattern is written, demographic-only ones
/// included, so the file stays prefix-closed for rule induction.
void write_freq(std::ostream& out, const FrequentPatternSet& set, const SymbolTable& symbols);

struct FreqFile {
  SymbolTable symbols;
  FrequentPatternSet patterns;
};
/// Throws FormatError with a line number on malformed input.
FreqFile read_freq(std::istream& in);

}  // namespace seqmine
