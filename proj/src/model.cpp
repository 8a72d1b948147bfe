#include "seqmine/model.hpp"

#include <algorithm>
#include <mutex>
#include <queue>

#include "seqmine/text.hpp"

namespace seqmine {

SymbolTable::SymbolTable(const SymbolTable& other) {
  std::shared_lock lock(*other.mutex_);
  names_ = other.names_;
  ids_ = other.ids_;
}

SymbolTable& SymbolTable::operator=(const SymbolTable& other) {
  if (this != &other) {
    SymbolTable copy(other);
    *this = std::move(copy);
  }
  return *this;
}

SymbolTable::SymbolTable(SymbolTable&& other) noexcept
    : names_(std::move(other.names_)), ids_(std::move(other.ids_)) {}

SymbolTable& SymbolTable::operator=(SymbolTable&& other) noexcept {
  names_ = std::move(other.names_);
  ids_ = std::move(other.ids_);
  return *this;
}

std::size_t SymbolOrder::slot(const std::string& name) {
  const auto [it, fresh] = index_.emplace(name, names_.size());
  if (fresh) {
    names_.push_back(name);
    successors_.emplace_back();
  }
  return it->second;
}

void SymbolOrder::add_group(std::span<const std::string> names) {
  std::optional<std::size_t> prev;
  for (const std::string& raw : names) {
    const std::string_view name = trim(raw);
    if (name.empty()) throw InputError("empty item symbol");
    const std::size_t cur = slot(std::string(name));
    if (prev && *prev != cur) successors_[*prev].push_back(cur);
    prev = cur;
  }
}

SymbolTable SymbolOrder::build() const {
  const std::size_t n = names_.size();
  std::vector<std::size_t> indegree(n, 0);
  for (const auto& succ : successors_) {
    for (std::size_t v : succ) ++indegree[v];
  }
  std::priority_queue<std::size_t, std::vector<std::size_t>, std::greater<>> ready;
  for (std::size_t v = 0; v < n; ++v) {
    if (indegree[v] == 0) ready.push(v);
  }
  SymbolTable table;
  std::vector<bool> done(n, false);
  std::size_t next_unsorted = 0;  // cycles (hand-edited files) fall back to first appearance
  for (std::size_t emitted = 0; emitted < n; ++emitted) {
    std::size_t v;
    if (!ready.empty()) {
      v = ready.top();
      ready.pop();
    } else {
      while (done[next_unsorted]) ++next_unsorted;
      v = next_unsorted;
    }
    if (done[v]) {
      --emitted;
      continue;
    }
    done[v] = true;
    table.intern(names_[v]);
    for (std::size_t w : successors_[v]) {
      if (--indegree[w] == 0 && !done[w]) ready.push(w);
    }
  }
  return table;
}

ItemId SymbolTable::intern(std::string_view raw) {
  const std::string_view name = trim(raw);
  if (name.empty()) throw InputError("empty item symbol");
  std::string key(name);
  {
    std::shared_lock lock(*mutex_);
    if (auto it = ids_.find(key); it != ids_.end()) return it->second;
  }
  std::unique_lock lock(*mutex_);
  if (auto it = ids_.find(key); it != ids_.end()) return it->second;
  const ItemId id{static_cast<std::uint32_t>(names_.size())};
  names_.push_back(key);
  ids_.emplace(std::move(key), id);
  return id;
}

std::optional<ItemId> SymbolTable::find(std::string_view name) const {
  std::shared_lock lock(*mutex_);
  if (auto it = ids_.find(std::string(trim(name))); it != ids_.end()) return it->second;
  return std::nullopt;
}

const std::string& SymbolTable::name(ItemId id) const {
  std::shared_lock lock(*mutex_);
  if (id.value >= names_.size()) throw InputError("unknown item id " + std::to_string(id.value));
  return names_[id.value];
}

std::size_t SymbolTable::size() const {
  std::shared_lock lock(*mutex_);
  return names_.size();
}

bool operator==(const SymbolTable& a, const SymbolTable& b) {
  if (&a == &b) return true;
  std::shared_lock la(*a.mutex_);
  std::shared_lock lb(*b.mutex_);
  return a.names_ == b.names_;
}

EventSet::EventSet(std::vector<ItemId> items) : items_(std::move(items)) {
  if (items_.empty()) throw InputError("event set must be non-empty");
  std::sort(items_.begin(), items_.end());
  items_.erase(std::unique(items_.begin(), items_.end()), items_.end());
}

bool EventSet::contains(ItemId item) const {
  return std::binary_search(items_.begin(), items_.end(), item);
}

bool EventSet::includes(const EventSet& other) const {
  return std::includes(items_.begin(), items_.end(), other.items_.begin(), other.items_.end());
}

EventSet EventSet::with_appended(ItemId item) const {
  if (item <= items_.back()) throw InputError("I-extension item must exceed the element's last item");
  EventSet out = *this;
  out.items_.push_back(item);
  return out;
}

Sequence::Sequence(std::uint32_t sid, std::vector<Event> events) : sid_(sid), events_(std::move(events)) {
  for (std::size_t i = 1; i < events_.size(); ++i) {
    if (events_[i].eid <= events_[i - 1].eid) {
      throw InputError("sequence " + std::to_string(sid) + ": eids must be strictly increasing");
    }
  }
}

SequenceDatabase::SequenceDatabase(SymbolTable symbols, std::vector<Sequence> sequences)
    : symbols_(std::move(symbols)), sequences_(std::move(sequences)) {
  std::sort(sequences_.begin(), sequences_.end(),
            [](const Sequence& a, const Sequence& b) { return a.sid() < b.sid(); });
  const std::size_t n_symbols = symbols_.size();
  for (std::size_t i = 0; i < sequences_.size(); ++i) {
    if (i > 0 && sequences_[i].sid() == sequences_[i - 1].sid()) {
      throw InputError("duplicate sid " + std::to_string(sequences_[i].sid()));
    }
    for (const Event& e : sequences_[i].events()) {
      for (ItemId item : e.basket.items()) {
        if (item.value >= n_symbols) throw InputError("item id " + std::to_string(item.value) + " not in symbol table");
      }
    }
  }
}

Pattern Pattern::i_extended(ItemId item) const {
  Pattern out = *this;
  out.elements_.back() = out.elements_.back().with_appended(item);
  return out;
}

Pattern Pattern::s_extended(ItemId item) const {
  Pattern out = *this;
  out.elements_.push_back(EventSet{item});
  return out;
}

Pattern Pattern::without_last_element() const {
  Pattern out = *this;
  if (!out.elements_.empty()) out.elements_.pop_back();
  return out;
}

std::strong_ordering operator<=>(const Pattern& a, const Pattern& b) {
  if (auto c = a.elements_.size() <=> b.elements_.size(); c != 0) return c;
  return a.elements_ <=> b.elements_;
}

std::size_t PatternHash::operator()(const Pattern& p) const noexcept {
  std::size_t h = 0xcbf29ce484222325ULL;
  auto mix = [&h](std::uint64_t v) { h = (h ^ v) * 0x100000001b3ULL; };
  for (const EventSet& e : p.elements()) {
    for (ItemId item : e.items()) mix(item.value);
    mix(0xffffffffULL);
  }
  return h;
}

std::size_t cardinality(const Pattern& pattern) {
  std::size_t k = 0;
  for (const EventSet& e : pattern.elements()) k += e.size();
  return k;
}

bool contains(const Sequence& seq, const Pattern& pattern) {
  const auto events = seq.events();
  std::size_t pos = 0;
  for (const EventSet& element : pattern.elements()) {
    while (pos < events.size() && !events[pos].basket.includes(element)) ++pos;
    if (pos == events.size()) return false;
    ++pos;
  }
  return true;
}

std::size_t support(const SequenceDatabase& db, const Pattern& pattern) {
  return static_cast<std::size_t>(std::count_if(db.sequences().begin(), db.sequences().end(),
                                                [&](const Sequence& s) { return contains(s, pattern); }));
}

double confidence(std::size_t rule_support, std::size_t antecedent_support) {
  if (antecedent_support == 0) throw InputError("confidence with zero antecedent support");
  return static_cast<double>(rule_support) / static_cast<double>(antecedent_support);
}

bool listing_order(const Pattern& a, const Pattern& b) {
  const std::size_t ka = cardinality(a);
  const std::size_t kb = cardinality(b);
  if (ka != kb) return ka < kb;
  return a < b;
}

}  // namespace seqmine
