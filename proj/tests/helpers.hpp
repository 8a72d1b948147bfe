#pragma once

#include <random>
#include <string>
#include <vector>

#include "seqmine/miner.hpp"
#include "seqmine/model.hpp"

namespace seqmine::test {

using Baskets = std::vector<std::vector<std::string>>;

// Sequence i gets sid i and eids 0, 1, 2, ...
inline SequenceDatabase make_db(const std::vector<Baskets>& seqs) {
  SymbolTable symbols;
  std::vector<Sequence> out;
  for (std::size_t s = 0; s < seqs.size(); ++s) {
    std::vector<Event> events;
    for (std::size_t e = 0; e < seqs[s].size(); ++e) {
      std::vector<ItemId> items;
      for (const std::string& name : seqs[s][e]) items.push_back(symbols.intern(name));
      events.push_back({static_cast<std::uint32_t>(e), EventSet(items)});
    }
    out.emplace_back(static_cast<std::uint32_t>(s), std::move(events));
  }
  return SequenceDatabase(std::move(symbols), std::move(out));
}

// Pattern over symbols already present in `symbols`.
inline Pattern pat(const SymbolTable& symbols, const Baskets& elements) {
  std::vector<EventSet> out;
  for (const auto& e : elements) {
    std::vector<ItemId> items;
    for (const std::string& name : e) {
      auto id = symbols.find(name);
      items.push_back(id ? *id : ItemId{static_cast<std::uint32_t>(symbols.size() + 1000)});
    }
    out.emplace_back(items);
  }
  return Pattern(std::move(out));
}

struct RandomDbShape {
  std::size_t max_sequences = 25;
  std::size_t items = 6;
  std::size_t max_baskets = 5;
  std::size_t max_basket_items = 3;
};

inline SequenceDatabase random_db(std::mt19937_64& rng, const RandomDbShape& shape = {}) {
  auto pick = [&](std::size_t lo, std::size_t hi) {
    return std::uniform_int_distribution<std::size_t>(lo, hi)(rng);
  };
  SymbolTable symbols;
  for (std::size_t i = 0; i < shape.items; ++i) symbols.intern(std::string(1, static_cast<char>('A' + i)));
  std::vector<Sequence> seqs;
  const std::size_t n = pick(1, shape.max_sequences);
  for (std::size_t s = 0; s < n; ++s) {
    std::vector<Event> events;
    const std::size_t baskets = pick(0, shape.max_baskets);
    std::uint32_t eid = 0;
    for (std::size_t b = 0; b < baskets; ++b) {
      std::vector<ItemId> items;
      const std::size_t k = pick(1, shape.max_basket_items);
      for (std::size_t i = 0; i < k; ++i) items.push_back(ItemId{static_cast<std::uint32_t>(pick(0, shape.items - 1))});
      eid += static_cast<std::uint32_t>(pick(1, 3));
      events.push_back({eid, EventSet(items)});
    }
    seqs.emplace_back(static_cast<std::uint32_t>(s), std::move(events));
  }
  return SequenceDatabase(std::move(symbols), std::move(seqs));
}

// Random pattern over the first `items` ids.
inline Pattern random_pattern(std::mt19937_64& rng, std::size_t items, std::size_t max_elements,
                              std::size_t max_element_size) {
  auto pick = [&](std::size_t lo, std::size_t hi) {
    return std::uniform_int_distribution<std::size_t>(lo, hi)(rng);
  };
  std::vector<EventSet> elements;
  const std::size_t n = pick(1, max_elements);
  for (std::size_t e = 0; e < n; ++e) {
    std::vector<ItemId> ids;
    const std::size_t k = pick(1, max_element_size);
    for (std::size_t i = 0; i < k; ++i) ids.push_back(ItemId{static_cast<std::uint32_t>(pick(0, items - 1))});
    elements.emplace_back(ids);
  }
  return Pattern(std::move(elements));
}

inline MinerConfig config(std::size_t min_sup, std::size_t max_len, std::size_t max_elems = 5, unsigned threads = 1) {
  MinerConfig c;
  c.min_sup = MinSupport::absolute(min_sup);
  c.max_pattern_length = max_len;
  c.max_elements = max_elems;
  c.threads = threads;
  return c;
}

}  // namespace seqmine::test
