#include "seqmine/rules.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <map>
#include <optional>
#include <string>
#include <unordered_map>

namespace seqmine {

Pattern Rule::full_pattern() const {
  std::vector<EventSet> elements(antecedent.elements().begin(), antecedent.elements().end());
  elements.push_back(consequent);
  return Pattern(std::move(elements));
}

bool rule_order(const Rule& a, const Rule& b) {
  const auto lhs = static_cast<unsigned __int128>(a.support) * b.antecedent_support;
  const auto rhs = static_cast<unsigned __int128>(b.support) * a.antecedent_support;
  if (lhs != rhs) return lhs > rhs;
  return a.full_pattern() < b.full_pattern();
}

RuleSet induce_rules(const FrequentPatternSet& patterns, Ratio min_conf) {
  if (min_conf.num == 0 || min_conf.num > min_conf.den) throw InputError("min_conf must lie in (0, 1]");
  const auto index = patterns.support_index();
  RuleSet out;
  out.min_conf = min_conf;
  for (const SupportedPattern& p : patterns.patterns()) {
    if (p.pattern.element_count() < 2) continue;
    Pattern antecedent = p.pattern.without_last_element();
    const auto it = index.find(antecedent);
    if (it == index.end()) {
      throw ConsistencyError("pattern set is not prefix-closed: antecedent of a pattern with support " +
                             std::to_string(p.support) + " is missing");
    }
    if (it->second < p.support) throw ConsistencyError("antecedent support below pattern support");
    if (!min_conf.le_fraction(p.support, it->second)) continue;
    out.rules.push_back(
        {std::move(antecedent), p.pattern.back(), p.support, it->second, confidence(p.support, it->second)});
  }
  std::sort(out.rules.begin(), out.rules.end(), rule_order);
  return out;
}

std::vector<RepeatChain> repeat_chains(const RuleSet& rules) {
  std::map<ItemId, std::vector<RepeatStep>> chains;
  for (const Rule& r : rules.rules) {
    if (r.consequent.size() != 1) continue;
    const EventSet& single = r.consequent;
    const auto elems = r.antecedent.elements();
    if (std::all_of(elems.begin(), elems.end(), [&](const EventSet& e) { return e == single; })) {
      chains[single.back()].push_back({elems.size(), r.confidence, r.support, r.antecedent_support});
    }
  }
  std::vector<RepeatChain> out;
  for (auto& [item, steps] : chains) {
    std::sort(steps.begin(), steps.end(),
              [](const RepeatStep& a, const RepeatStep& b) { return a.repetitions < b.repetitions; });
    out.push_back({item, std::move(steps)});
  }
  return out;
}

namespace {

bool is_gender(ItemId item, const SymbolTable& symbols) { return symbols.name(item).starts_with("gender:"); }

// Antecedent with its single gender item removed, or nullopt when there is
// not exactly one (in the first element) or nothing would remain.
std::optional<std::pair<Pattern, ItemId>> strip_gender(const Pattern& antecedent, const SymbolTable& symbols) {
  std::optional<ItemId> found;
  std::size_t found_in = 0;
  const auto elems = antecedent.elements();
  for (std::size_t e = 0; e < elems.size(); ++e) {
    for (ItemId item : elems[e].items()) {
      if (!is_gender(item, symbols)) continue;
      if (found) return std::nullopt;
      found = item;
      found_in = e;
    }
  }
  if (!found || found_in != 0) return std::nullopt;

  std::vector<EventSet> stripped;
  std::vector<ItemId> rest;
  for (ItemId item : elems[0].items()) {
    if (item != *found) rest.push_back(item);
  }
  if (!rest.empty()) stripped.emplace_back(std::move(rest));
  stripped.insert(stripped.end(), elems.begin() + 1, elems.end());
  if (stripped.empty()) return std::nullopt;
  return std::pair{Pattern(std::move(stripped)), *found};
}

}  // namespace

std::vector<GenderDelta> gender_deltas(const RuleSet& rules, const SymbolTable& symbols) {
  std::unordered_map<Pattern, const Rule*, PatternHash> by_pattern;
  by_pattern.reserve(rules.rules.size());
  for (const Rule& r : rules.rules) by_pattern.emplace(r.full_pattern(), &r);

  std::vector<GenderDelta> out;
  for (const Rule& r : rules.rules) {
    auto stripped = strip_gender(r.antecedent, symbols);
    if (!stripped) continue;
    Rule probe{std::move(stripped->first), r.consequent};
    const auto it = by_pattern.find(probe.full_pattern());
    if (it == by_pattern.end()) continue;
    out.push_back({*it->second, r, stripped->second, r.confidence - it->second->confidence});
  }
  std::stable_sort(out.begin(), out.end(), [](const GenderDelta& a, const GenderDelta& b) {
    return std::abs(a.delta) > std::abs(b.delta);
  });
  return out;
}

std::vector<YobPoint> yob_profile(const RuleSet& rules, const SymbolTable& symbols, ItemId consequent_item) {
  std::vector<YobPoint> out;
  for (const Rule& r : rules.rules) {
    if (r.consequent != EventSet{consequent_item} || r.antecedent.element_count() != 1) continue;
    const EventSet& e = r.antecedent.elements()[0];
    if (e.size() != 1) continue;
    const std::string& name = symbols.name(e.back());
    if (!name.starts_with("yob:")) continue;
    int year = 0;
    try {
      year = static_cast<int>(parse_uint(std::string_view(name).substr(4), "year"));
    } catch (const InputError&) {
      continue;
    }
    out.push_back({year, r.confidence, r.support, r.antecedent_support});
  }
  std::sort(out.begin(), out.end(), [](const YobPoint& a, const YobPoint& b) { return a.year < b.year; });
  return out;
}

void write_rules(std::ostream& out, const RuleSet& rules, const SymbolTable& symbols) {
  out << "#rules v1\n";
  out << "#min_conf\t" << rules.min_conf.num << '/' << rules.min_conf.den << '\n';
  for (const Rule& r : rules.rules) {
    out << format_double(r.confidence) << '\t' << r.support << '\t' << render_pattern(r.antecedent, symbols) << '\t'
        << render_pattern(Pattern{r.consequent}, symbols) << '\n';
  }
}

RulesFile read_rules(std::istream& in) {
  RulesFile file;
  std::string line;
  std::size_t line_no = 1;
  if (!std::getline(in, line) || trim(line) != "#rules v1") throw FormatError("expected '#rules v1' header", 1);
  SymbolOrder order;
  std::vector<std::pair<PatternNames, PatternNames>> names;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    try {
      const auto fields = split_raw(line, '\t');
      if (line.starts_with('#')) {
        if (fields.size() == 2 && fields[0] == "#min_conf") {
          const auto slash = fields[1].find('/');
          if (slash == std::string_view::npos) throw FormatError("malformed #min_conf", line_no);
          file.rules.min_conf = Ratio{parse_uint(fields[1].substr(0, slash), "min_conf"),
                                      parse_uint(fields[1].substr(slash + 1), "min_conf")};
        }
        continue;
      }
      if (fields.size() != 4) throw FormatError("expected 4 tab-separated fields", line_no);
      PatternNames antecedent = split_pattern(fields[2]);
      PatternNames consequent = split_pattern(fields[3]);
      if (consequent.size() != 1) throw FormatError("consequent must be a single element", line_no);
      record_pattern(antecedent, order);
      record_pattern(consequent, order);
      names.emplace_back(std::move(antecedent), std::move(consequent));
      Rule r{Pattern{}, EventSet{ItemId{0}}};
      r.support = parse_uint(fields[1], "support");
      double conf = 0.0;
      const std::string conf_text(trim(fields[0]));
      const auto res = std::from_chars(conf_text.data(), conf_text.data() + conf_text.size(), conf);
      if (res.ec != std::errc{} || !(conf > 0.0) || conf > 1.0) throw FormatError("bad confidence", line_no);
      r.antecedent_support = static_cast<std::size_t>(std::llround(static_cast<double>(r.support) / conf));
      r.confidence = confidence(r.support, r.antecedent_support);
      file.rules.rules.push_back(std::move(r));
    } catch (const FormatError&) {
      throw;
    } catch (const Error& e) {
      throw FormatError(e.what(), line_no);
    }
  }
  file.symbols = order.build();
  for (std::size_t i = 0; i < names.size(); ++i) {
    Rule& r = file.rules.rules[i];
    r.antecedent = resolve_pattern(names[i].first, file.symbols);
    r.consequent = resolve_pattern(names[i].second, file.symbols).back();
  }
  return file;
}

void write_report(std::ostream& out, const RuleSet& rules, const SymbolTable& symbols) {
  out << "#report v1\n";
  out << "[repeat_chains]\n";
  out << "#item\tn\tconfidence\tsupport\tantecedent_support\n";
  for (const RepeatChain& c : repeat_chains(rules)) {
    for (const RepeatStep& s : c.chain) {
      out << escape_item(symbols.name(c.item)) << '\t' << s.repetitions << '\t' << format_double(s.confidence)
          << '\t' << s.support << '\t' << s.antecedent_support << '\n';
    }
  }

  out << "[gender_deltas]\n";
  out << "#gender\tdelta\tgendered_confidence\tbase_confidence\tgendered_antecedent\tconsequent\n";
  for (const GenderDelta& d : gender_deltas(rules, symbols)) {
    out << escape_item(symbols.name(d.gender_item)) << '\t' << format_double(d.delta) << '\t'
        << format_double(d.gendered.confidence) << '\t' << format_double(d.base.confidence) << '\t'
        << render_pattern(d.gendered.antecedent, symbols) << '\t' << render_pattern(Pattern{d.gendered.consequent}, symbols)
        << '\n';
  }

  out << "[yob_profiles]\n";
  out << "#consequent\tyear\tconfidence\tabs_change\trel_change\n";
  std::vector<ItemId> consequents;
  for (const Rule& r : rules.rules) {
    if (r.consequent.size() == 1) consequents.push_back(r.consequent.back());
  }
  std::sort(consequents.begin(), consequents.end());
  consequents.erase(std::unique(consequents.begin(), consequents.end()), consequents.end());
  for (ItemId c : consequents) {
    const auto profile = yob_profile(rules, symbols, c);
    for (std::size_t i = 0; i < profile.size(); ++i) {
      out << escape_item(symbols.name(c)) << '\t' << profile[i].year << '\t' << format_double(profile[i].confidence);
      // Older cohort (previous row) minus this one, absolute and relative to this one.
      if (i > 0) {
        const double abs_change = profile[i - 1].confidence - profile[i].confidence;
        out << '\t' << format_double(abs_change) << '\t' << format_double(abs_change / profile[i].confidence);
      } else {
        out << "\t-\t-";
      }
      out << '\n';
    }
  }
}

}  // namespace seqmine
