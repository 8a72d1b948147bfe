#pragma once

// Items, events, sequences and patterns, plus the containment, support and
// confidence semantics the rest of the library is built on.

#include <compare>
#include <cstddef>
#include <cstdint>
#include <deque>
#include <functional>
#include <initializer_list>
#include <memory>
#include <optional>
#include <shared_mutex>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "seqmine/error.hpp"

namespace seqmine {

struct ItemId {
  std::uint32_t value = 0;

  friend constexpr auto operator<=>(ItemId, ItemId) = default;
};

/// Append-only string <-> ItemId table. Ids are dense and start at 0.
///
/// Lookups take a shared lock and interning an unseen name takes an exclusive
/// one, so readers may run concurrently with the (single) ingestion writer.
class SymbolTable {
 public:
  SymbolTable() = default;
  SymbolTable(const SymbolTable& other);
  SymbolTable& operator=(const SymbolTable& other);
  SymbolTable(SymbolTable&& other) noexcept;
  SymbolTable& operator=(SymbolTable&& other) noexcept;
  ~SymbolTable() = default;

  /// Returns the id for `name` (whitespace-trimmed), allocating the next id
  /// if the name is new. Throws InputError for an empty name.
  ItemId intern(std::string_view name);

  std::optional<ItemId> find(std::string_view name) const;
  const std::string& name(ItemId id) const;
  std::size_t size() const;

  friend bool operator==(const SymbolTable& a, const SymbolTable& b);

 private:
  mutable std::unique_ptr<std::shared_mutex> mutex_ = std::make_unique<std::shared_mutex>();
  std::deque<std::string> names_;  // deque: references survive growth
  std::unordered_map<std::string, ItemId> ids_;
};

/// Rebuilds a symbol table from text in which every element or basket lists
/// its items in ascending id order. Ids follow a topological order of those
/// listings, ties broken by first appearance, so re-reading a written file
/// reproduces its item order (and, for files whose first-appearance order is
/// already consistent, the original ids).
class SymbolOrder {
 public:
  /// Records one element's item names in written order. Names are trimmed;
  /// throws InputError on an empty one.
  void add_group(std::span<const std::string> names);
  SymbolTable build() const;

 private:
  std::size_t slot(const std::string& name);

  std::unordered_map<std::string, std::size_t> index_;
  std::vector<std::string> names_;
  std::vector<std::vector<std::size_t>> successors_;
};

/// A non-empty set of items, stored as a strictly ascending id list.
class EventSet {
 public:
  /// Sorts and deduplicates. Throws InputError if `items` is empty.
  explicit EventSet(std::vector<ItemId> items);
  EventSet(std::initializer_list<ItemId> items) : EventSet(std::vector<ItemId>(items)) {}

  std::span<const ItemId> items() const { return items_; }
  std::size_t size() const { return items_.size(); }
  ItemId back() const { return items_.back(); }
  bool contains(ItemId item) const;
  /// True iff every item of `other` is in this set.
  bool includes(const EventSet& other) const;

  /// Copy with `item` added; `item` must be greater than every current item.
  EventSet with_appended(ItemId item) const;

  friend bool operator==(const EventSet&, const EventSet&) = default;
  friend auto operator<=>(const EventSet& a, const EventSet& b) { return a.items_ <=> b.items_; }

 private:
  std::vector<ItemId> items_;
};

struct Event {
  std::uint32_t eid = 0;
  EventSet basket;

  friend bool operator==(const Event&, const Event&) = default;
};

/// One patient's time-ordered baskets. eids are strictly increasing; eid 0
/// holds the demographic basket when the sequence came from ingestion.
class Sequence {
 public:
  Sequence(std::uint32_t sid, std::vector<Event> events);

  std::uint32_t sid() const { return sid_; }
  std::span<const Event> events() const { return events_; }
  std::size_t size() const { return events_.size(); }

  friend bool operator==(const Sequence&, const Sequence&) = default;

 private:
  std::uint32_t sid_;
  std::vector<Event> events_;
};

class SequenceDatabase {
 public:
  SequenceDatabase() = default;
  /// Sorts sequences by sid. Throws InputError on duplicate sids or on items
  /// missing from `symbols`.
  SequenceDatabase(SymbolTable symbols, std::vector<Sequence> sequences);

  const SymbolTable& symbols() const { return symbols_; }
  std::span<const Sequence> sequences() const { return sequences_; }
  std::size_t size() const { return sequences_.size(); }
  bool empty() const { return sequences_.empty(); }

  friend bool operator==(const SequenceDatabase&, const SequenceDatabase&) = default;

 private:
  SymbolTable symbols_;
  std::vector<Sequence> sequences_;
};

/// An ordered list of itemsets. The empty pattern is representable but the
/// miner never produces it.
///
/// Ordering is by element count, then element-wise by item-id lists.
class Pattern {
 public:
  Pattern() = default;
  explicit Pattern(std::vector<EventSet> elements) : elements_(std::move(elements)) {}
  Pattern(std::initializer_list<EventSet> elements) : elements_(elements) {}

  std::span<const EventSet> elements() const { return elements_; }
  std::size_t element_count() const { return elements_.size(); }
  bool empty() const { return elements_.empty(); }
  const EventSet& back() const { return elements_.back(); }

  /// Pattern with `item` added to the last element (I-extension).
  Pattern i_extended(ItemId item) const;
  /// Pattern with a new trailing element {item} (S-extension).
  Pattern s_extended(ItemId item) const;
  /// All elements but the last.
  Pattern without_last_element() const;

  friend bool operator==(const Pattern&, const Pattern&) = default;
  friend std::strong_ordering operator<=>(const Pattern& a, const Pattern& b);

 private:
  std::vector<EventSet> elements_;
};

struct PatternHash {
  std::size_t operator()(const Pattern& p) const noexcept;
};

struct SupportedPattern {
  Pattern pattern;
  std::size_t support = 0;
  /// support / |D|, computed once from the integer counts.
  double relative_support = 0.0;

  friend bool operator==(const SupportedPattern&, const SupportedPattern&) = default;
};

/// Sum of element sizes.
std::size_t cardinality(const Pattern& pattern);

/// Subsequence test: the pattern's elements map, in order, onto strictly
/// increasing events of `seq` with set inclusion at each. Greedy earliest
/// match is exact for this relation.
bool contains(const Sequence& seq, const Pattern& pattern);

/// Number of sequences containing `pattern` (each sequence counted once).
std::size_t support(const SequenceDatabase& db, const Pattern& pattern);

/// sup(X -> Y) / sup(X), divided once from integer supports.
double confidence(std::size_t rule_support, std::size_t antecedent_support);

/// Cardinality-then-pattern order used by frequent pattern listings.
bool listing_order(const Pattern& a, const Pattern& b);

}  // namespace seqmine

template <>
struct std::hash<seqmine::ItemId> {
  std::size_t operator()(seqmine::ItemId id) const noexcept { return std::hash<std::uint32_t>{}(id.value); }
};
