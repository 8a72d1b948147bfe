#include "seqmine/miner.hpp"

#include <algorithm>
#include <atomic>
#include <string>
#include <thread>

namespace seqmine {

using kernels::Key;

IdList::IdList(std::span<const Entry> entries) {
  keys_.reserve(entries.size());
  for (const Entry& e : entries) push_back(e.sid, e.eid);
}

void IdList::push_back(std::uint32_t sid, std::uint32_t eid) {
  if (sid > kernels::kMaxSid) throw InputError("sid " + std::to_string(sid) + " exceeds the id-list limit");
  const Key k = kernels::make_key(sid, eid);
  if (!keys_.empty() && k <= keys_.back()) throw InputError("id-list entries must be strictly ascending");
  if (keys_.empty() || kernels::key_sid(keys_.back()) != sid) ++sids_;
  keys_.push_back(k);
}

IdList IdList::from_canonical_keys(std::span<const Key> keys, std::size_t sids) {
  IdList out;
  out.keys_.assign(keys.begin(), keys.end());
  out.sids_ = sids;
  return out;
}

std::vector<IdList::Entry> IdList::entries() const {
  std::vector<Entry> out;
  out.reserve(keys_.size());
  for (std::size_t i = 0; i < keys_.size(); ++i) out.push_back((*this)[i]);
  return out;
}

std::map<ItemId, IdList> verticalize(const SequenceDatabase& db) {
  std::map<ItemId, IdList> lists;
  for (const Sequence& s : db.sequences()) {
    for (const Event& e : s.events()) {
      for (ItemId item : e.basket.items()) lists[item].push_back(s.sid(), e.eid);
    }
  }
  return lists;
}

IdList temporal_join_s(const IdList& prefix, const IdList& atom, std::size_t min_sids) {
  IdList out;
  out.keys_.resize(atom.size());
  const auto r = kernels::table().s_join(prefix.keys_, prefix.sids_, atom.keys_, min_sids, out.keys_.data());
  out.keys_.resize(r.size);
  out.sids_ = r.sids;
  return out;
}

IdList temporal_join_i(const IdList& prefix, const IdList& atom) {
  IdList out;
  out.keys_.resize(std::min(prefix.size(), atom.size()));
  const auto r = kernels::table().intersect(prefix.keys_, atom.keys_, out.keys_.data());
  out.keys_.resize(r.size);
  out.sids_ = r.sids;
  return out;
}

MinSupport MinSupport::absolute(std::size_t count) {
  if (count == 0) throw InputError("minimum support must be at least 1");
  return MinSupport(count);
}

MinSupport MinSupport::relative(Ratio fraction) {
  if (fraction.num == 0 || fraction.num > fraction.den) {
    throw InputError("relative minimum support must lie in (0, 1]");
  }
  return MinSupport(fraction);
}

MinSupport MinSupport::parse(std::string_view text) {
  if (trim(text).find('.') != std::string_view::npos) return relative(Ratio::parse_decimal(text));
  return absolute(parse_uint(text, "minimum support"));
}

std::size_t MinSupport::resolve(std::size_t db_size) const {
  if (const auto* count = std::get_if<std::size_t>(&value_)) return *count;
  const Ratio& r = std::get<Ratio>(value_);
  return std::max<std::size_t>(1, r.ceil_times(db_size));
}

std::string MinSupport::describe() const {
  if (const auto* count = std::get_if<std::size_t>(&value_)) return std::to_string(*count);
  const Ratio& r = std::get<Ratio>(value_);
  return std::to_string(r.num) + "/" + std::to_string(r.den);
}

FrequentPatternSet::FrequentPatternSet(std::vector<SupportedPattern> patterns, std::size_t db_size,
                                       std::size_t min_sup)
    : patterns_(std::move(patterns)), db_size_(db_size), min_sup_(min_sup) {
  std::vector<std::pair<std::size_t, std::size_t>> order;  // (cardinality, index)
  order.reserve(patterns_.size());
  for (std::size_t i = 0; i < patterns_.size(); ++i) order.emplace_back(cardinality(patterns_[i].pattern), i);
  std::sort(order.begin(), order.end(), [this](const auto& a, const auto& b) {
    if (a.first != b.first) return a.first < b.first;
    return patterns_[a.second].pattern < patterns_[b.second].pattern;
  });
  std::vector<SupportedPattern> sorted;
  sorted.reserve(patterns_.size());
  for (const auto& [k, i] : order) sorted.push_back(std::move(patterns_[i]));
  patterns_ = std::move(sorted);
}

std::unordered_map<Pattern, std::size_t, PatternHash> FrequentPatternSet::support_index() const {
  std::unordered_map<Pattern, std::size_t, PatternHash> index;
  index.reserve(patterns_.size());
  for (const SupportedPattern& p : patterns_) index.emplace(p.pattern, p.support);
  return index;
}

bool is_demographic_symbol(std::string_view symbol) {
  return symbol.starts_with("yob:") || symbol.starts_with("gender:");
}

bool is_demographic_only(const Pattern& pattern, const SymbolTable& symbols) {
  for (const EventSet& e : pattern.elements()) {
    for (ItemId item : e.items()) {
      if (!is_demographic_symbol(symbols.name(item))) return false;
    }
  }
  return true;
}

namespace {

struct Extension {
  ItemId item;
  IdList ids;
};

// last[item][sid] = 1 + the item's last eid in sid, or 0 if absent. Lets a
// class count each candidate's support with one lookup per prefix sequence
// before paying for the join. Empty when the tables would be too large.
using LastEidTables = std::vector<std::vector<std::uint32_t>>;

LastEidTables build_last_eid_tables(const SequenceDatabase& db, const std::vector<IdList>& atoms,
                                    std::span<const ItemId> frequent) {
  constexpr std::size_t kBudgetBytes = std::size_t{512} << 20;
  std::uint64_t max_sid = 0, max_eid = 0;
  for (const Sequence& s : db.sequences()) {
    max_sid = std::max<std::uint64_t>(max_sid, s.sid());
    if (!s.events().empty()) max_eid = std::max<std::uint64_t>(max_eid, s.events().back().eid);
  }
  const std::uint64_t width = max_sid + 1;
  if (max_sid >= kernels::kMaxSid || max_eid + 1 >= kernels::kMaxSid) return {};
  if (width * frequent.size() * sizeof(std::uint32_t) > kBudgetBytes) return {};

  LastEidTables tables(atoms.size());
  for (ItemId item : frequent) {
    auto& t = tables[item.value];
    t.assign(width, 0);
    for (Key k : atoms[item.value].keys()) t[kernels::key_sid(k)] = kernels::key_eid(k) + 1;
  }
  return tables;
}

class ClassMiner {
 public:
  ClassMiner(const std::vector<IdList>& atoms, const LastEidTables& last, std::size_t min_sup,
             const MinerConfig& config, double db_size, std::vector<SupportedPattern>& out)
      : atoms_(atoms), last_(last), min_sup_(min_sup), config_(config), db_size_(db_size), out_(out) {}

  void run(ItemId root, std::span<const ItemId> frequent_items) {
    const Pattern p{EventSet{root}};
    emit(p, atoms_[root.value]);
    std::vector<ItemId> i_cands;
    for (ItemId x : frequent_items) {
      if (x > root) i_cands.push_back(x);
    }
    expand(p, atoms_[root.value], 1, frequent_items, i_cands);
  }

 private:
  void emit(const Pattern& p, const IdList& ids) {
    out_.push_back({p, ids.distinct_sids(), static_cast<double>(ids.distinct_sids()) / db_size_});
  }

  // Class of `p`: try every candidate extension, keep the frequent ones, then
  // recurse. s_cands/i_cands are the items whose extension was frequent for
  // the parent class; anything else cannot be frequent here.
  void expand(const Pattern& p, const IdList& ids, std::size_t card, std::span<const ItemId> s_cands,
              std::span<const ItemId> i_cands) {
    if (card >= config_.max_pattern_length) return;
    const auto& k = kernels::table();

    // One entry per sid of `ids`: the sid, 0, and 1 + its first eid.
    std::vector<std::uint32_t> run_sid, run_zero, run_first;
    if (!last_.empty()) {
      run_sid.reserve(ids.distinct_sids());
      run_first.reserve(ids.distinct_sids());
      for (Key key : ids.keys()) {
        if (run_sid.empty() || run_sid.back() != kernels::key_sid(key)) {
          run_sid.push_back(kernels::key_sid(key));
          run_first.push_back(kernels::key_eid(key) + 1);
        }
      }
      run_zero.assign(run_sid.size(), 0);
    }
    // Sequences holding both the prefix and x bound the I-extension's support;
    // sequences where x occurs after the prefix's first match give the
    // S-extension's support exactly.
    auto i_bound = [&](ItemId x) {
      return k.count_above(run_sid.data(), run_zero.data(), run_sid.size(), last_[x.value].data());
    };
    auto s_support = [&](ItemId x) {
      return k.count_above(run_sid.data(), run_first.data(), run_sid.size(), last_[x.value].data());
    };

    std::vector<Extension> i_freq;
    for (ItemId x : i_cands) {
      if (!last_.empty() && i_bound(x) < min_sup_) continue;
      const IdList& atom = atoms_[x.value];
      scratch_.resize(std::min(ids.size(), atom.size()));
      const auto r = k.intersect(ids.keys(), atom.keys(), scratch_.data());
      if (r.sids >= min_sup_) i_freq.push_back({x, IdList::from_canonical_keys({scratch_.data(), r.size}, r.sids)});
    }

    std::vector<Extension> s_freq;
    if (p.element_count() < config_.max_elements) {
      for (ItemId x : s_cands) {
        const IdList& atom = atoms_[x.value];
        if (atom.distinct_sids() < min_sup_) continue;
        if (!last_.empty() && s_support(x) < min_sup_) continue;
        scratch_.resize(atom.size());
        const auto r = k.s_join(ids.keys(), ids.distinct_sids(), atom.keys(), min_sup_, scratch_.data());
        if (r.sids >= min_sup_) s_freq.push_back({x, IdList::from_canonical_keys({scratch_.data(), r.size}, r.sids)});
      }
    }

    std::vector<ItemId> s_items;
    s_items.reserve(s_freq.size());
    for (const Extension& e : s_freq) s_items.push_back(e.item);

    std::vector<ItemId> next_i;
    for (std::size_t n = 0; n < i_freq.size(); ++n) {
      const Pattern child = p.i_extended(i_freq[n].item);
      emit(child, i_freq[n].ids);
      next_i.clear();
      for (std::size_t m = n + 1; m < i_freq.size(); ++m) next_i.push_back(i_freq[m].item);
      expand(child, i_freq[n].ids, card + 1, s_items, next_i);
    }
    for (std::size_t n = 0; n < s_freq.size(); ++n) {
      const Pattern child = p.s_extended(s_freq[n].item);
      emit(child, s_freq[n].ids);
      next_i.assign(s_items.begin() + static_cast<std::ptrdiff_t>(n) + 1, s_items.end());
      expand(child, s_freq[n].ids, card + 1, s_items, next_i);
    }
  }

  const std::vector<IdList>& atoms_;
  const LastEidTables& last_;
  std::size_t min_sup_;
  const MinerConfig& config_;
  double db_size_;
  std::vector<SupportedPattern>& out_;
  std::vector<Key> scratch_;
};

}  // namespace

FrequentPatternSet mine(const SequenceDatabase& db, const MinerConfig& config) {
  if (db.empty()) throw InputError("cannot mine an empty database");
  if (config.max_pattern_length == 0 || config.max_elements == 0) {
    throw InputError("max_pattern_length and max_elements must be at least 1");
  }
  const std::size_t min_sup = config.min_sup.resolve(db.size());

  std::vector<IdList> atoms(db.symbols().size());
  for (auto& [item, ids] : verticalize(db)) atoms[item.value] = std::move(ids);
  std::vector<ItemId> frequent;
  for (std::uint32_t i = 0; i < atoms.size(); ++i) {
    if (atoms[i].distinct_sids() >= min_sup) frequent.push_back(ItemId{i});
  }

  const LastEidTables last = build_last_eid_tables(db, atoms, frequent);

  // One task per top-level class; results merge in class order, then sort.
  std::vector<std::vector<SupportedPattern>> per_class(frequent.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t c = next++; c < frequent.size(); c = next++) {
      ClassMiner(atoms, last, min_sup, config, static_cast<double>(db.size()), per_class[c]).run(frequent[c], frequent);
    }
  };
  unsigned threads = config.threads ? config.threads : std::max(1u, std::thread::hardware_concurrency());
  threads = static_cast<unsigned>(std::min<std::size_t>(threads, std::max<std::size_t>(1, frequent.size())));
  if (threads <= 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (unsigned t = 0; t < threads; ++t) pool.emplace_back(worker);
  }

  std::vector<SupportedPattern> all;
  for (auto& v : per_class) std::move(v.begin(), v.end(), std::back_inserter(all));
  return FrequentPatternSet(std::move(all), db.size(), min_sup);
}

std::string render_pattern(const Pattern& pattern, const SymbolTable& symbols) {
  std::string out;
  bool first_element = true;
  for (const EventSet& e : pattern.elements()) {
    if (!first_element) out += '|';
    first_element = false;
    bool first_item = true;
    for (ItemId item : e.items()) {
      if (!first_item) out += ',';
      first_item = false;
      out += escape_item(symbols.name(item));
    }
  }
  return out;
}

Pattern parse_pattern(std::string_view text, SymbolTable& symbols) {
  std::vector<EventSet> elements;
  for (std::string_view element : split_raw(text, '|')) {
    std::vector<ItemId> items;
    for (const std::string& name : split_escaped(element, ',')) items.push_back(symbols.intern(name));
    elements.emplace_back(std::move(items));
  }
  return Pattern(std::move(elements));
}

PatternNames split_pattern(std::string_view text) {
  PatternNames out;
  for (std::string_view element : split_raw(text, '|')) out.push_back(split_escaped(element, ','));
  return out;
}

void record_pattern(const PatternNames& names, SymbolOrder& order) {
  for (const auto& element : names) order.add_group(element);
}

Pattern resolve_pattern(const PatternNames& names, const SymbolTable& symbols) {
  std::vector<EventSet> elements;
  for (const auto& element : names) {
    std::vector<ItemId> items;
    for (const std::string& name : element) {
      const auto id = symbols.find(name);
      if (!id) throw InputError("unknown item symbol '" + name + "'");
      items.push_back(*id);
    }
    elements.emplace_back(std::move(items));
  }
  return Pattern(std::move(elements));
}

std::vector<SupportedPattern> listing(const FrequentPatternSet& set, const SymbolTable& symbols,
                                      bool emit_demographic_only) {
  std::vector<SupportedPattern> out;
  for (const SupportedPattern& p : set.patterns()) {
    if (emit_demographic_only || !is_demographic_only(p.pattern, symbols)) out.push_back(p);
  }
  return out;
}

void write_freq(std::ostream& out, const FrequentPatternSet& set, const SymbolTable& symbols) {
  out << "#freq v1\n";
  out << "#db_size\t" << set.db_size() << '\n';
  out << "#min_sup\t" << set.min_sup() << '\n';
  for (const SupportedPattern& p : set.patterns()) {
    out << p.support << '\t' << format_double(p.relative_support) << '\t' << render_pattern(p.pattern, symbols)
        << '\n';
  }
}

FreqFile read_freq(std::istream& in) {
  FreqFile file;
  std::string line;
  std::size_t line_no = 0;
  if (!std::getline(in, line) || trim(line) != "#freq v1") throw FormatError("expected '#freq v1' header", 1);
  ++line_no;
  std::optional<std::size_t> db_size;
  std::size_t min_sup = 1;
  std::vector<SupportedPattern> patterns;
  std::vector<PatternNames> names;
  SymbolOrder order;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto fields = split_raw(line, '\t');
    try {
      if (line.starts_with('#')) {
        if (fields.size() == 2 && fields[0] == "#db_size") db_size = parse_uint(fields[1], "db_size");
        if (fields.size() == 2 && fields[0] == "#min_sup") min_sup = parse_uint(fields[1], "min_sup");
        continue;
      }
      if (fields.size() != 3) throw FormatError("expected 3 tab-separated fields", line_no);
      if (!db_size || *db_size == 0) throw FormatError("pattern line before a positive '#db_size'", line_no);
      SupportedPattern p;
      p.support = parse_uint(fields[0], "support");
      if (p.support > *db_size) throw FormatError("support exceeds db_size", line_no);
      names.push_back(split_pattern(fields[2]));
      record_pattern(names.back(), order);
      p.relative_support = static_cast<double>(p.support) / static_cast<double>(*db_size);
      patterns.push_back(std::move(p));
    } catch (const FormatError&) {
      throw;
    } catch (const Error& e) {
      throw FormatError(e.what(), line_no);
    }
  }
  if (!db_size) throw FormatError("missing '#db_size' line");
  file.symbols = order.build();
  for (std::size_t i = 0; i < patterns.size(); ++i) patterns[i].pattern = resolve_pattern(names[i], file.symbols);
  file.patterns = FrequentPatternSet(std::move(patterns), *db_size, min_sup);
  return file;
}

}  // namespace seqmine
