#include "seqmine/testkit.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>

#include "seqmine/text.hpp"

namespace seqmine {

// ---------------------------------------------------------------------------
// Oracle

namespace {

class Enumerator {
 public:
  Enumerator(const SequenceDatabase& db, std::vector<ItemId> items, std::size_t min_sup, std::size_t max_len,
             std::size_t max_elems)
      : db_(db), items_(std::move(items)), min_sup_(min_sup), max_len_(max_len), max_elems_(max_elems) {}

  std::vector<SupportedPattern> run() {
    for (ItemId x : items_) visit(Pattern{EventSet{x}}, 1);
    return std::move(found_);
  }

 private:
  // Every canonical pattern is reached exactly once: items are only ever
  // appended to the last element in ascending order, or start a new element.
  void visit(const Pattern& p, std::size_t card) {
    const std::size_t sup = support(db_, p);
    if (sup >= min_sup_) {
      found_.push_back({p, sup, static_cast<double>(sup) / static_cast<double>(db_.size())});
    }
    if (card == max_len_) return;
    for (ItemId x : items_) {
      if (x > p.back().back()) visit(p.i_extended(x), card + 1);
    }
    if (p.element_count() < max_elems_) {
      for (ItemId x : items_) visit(p.s_extended(x), card + 1);
    }
  }

  const SequenceDatabase& db_;
  std::vector<ItemId> items_;
  std::size_t min_sup_, max_len_, max_elems_;
  std::vector<SupportedPattern> found_;
};

}  // namespace

FrequentPatternSet oracle_mine(const SequenceDatabase& db, std::size_t min_sup, std::size_t max_len,
                               std::size_t max_elems, const OracleLimits& limits) {
  if (db.empty()) throw InputError("cannot mine an empty database");
  if (min_sup == 0 || max_len == 0 || max_elems == 0) throw InputError("oracle parameters must be at least 1");
  std::set<ItemId> present;
  for (const Sequence& s : db.sequences()) {
    for (const Event& e : s.events()) present.insert(e.basket.items().begin(), e.basket.items().end());
  }
  if (present.size() > limits.max_items || max_len > limits.max_len) {
    throw LimitError("oracle limited to " + std::to_string(limits.max_items) + " items and length " +
                     std::to_string(limits.max_len) + " (got " + std::to_string(present.size()) + " items, length " +
                     std::to_string(max_len) + ")");
  }
  Enumerator e(db, std::vector<ItemId>(present.begin(), present.end()), min_sup, max_len, max_elems);
  return FrequentPatternSet(e.run(), db.size(), min_sup);
}

// ---------------------------------------------------------------------------
// Sampling

double PortableRng::uniform01() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

std::uint64_t PortableRng::uniform(std::uint64_t lo, std::uint64_t hi) {
  const std::uint64_t span = hi - lo;
  if (span == UINT64_MAX) return engine_();
  const std::uint64_t range = span + 1;
  const std::uint64_t limit = UINT64_MAX - UINT64_MAX % range;
  std::uint64_t v;
  do {
    v = engine_();
  } while (v >= limit);
  return lo + v % range;
}

std::uint64_t PortableRng::poisson(double mean) {
  // Knuth's product method on chunks of at most 30 (Poisson is additive).
  std::uint64_t total = 0;
  while (mean > 0.0) {
    const double chunk = std::min(mean, 30.0);
    mean -= chunk;
    const double limit = std::exp(-chunk);
    double prod = uniform01();
    while (prod > limit) {
      ++total;
      prod *= uniform01();
    }
  }
  return total;
}

// ---------------------------------------------------------------------------
// Config

bool Cohort::matches(int yob, Gender g) const {
  if (yob_min && yob < *yob_min) return false;
  if (yob_max && yob > *yob_max) return false;
  if (gender && g != *gender) return false;
  return true;
}

std::string background_code(std::size_t i) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "event_%03zu", i);
  return buf;
}

void GenConfig::validate() const {
  std::vector<std::string> problems;
  auto unit = [](double v) { return v >= 0.0 && v <= 1.0; };
  if (n_patients == 0) problems.push_back("n_patients must be >= 1");
  if (yob_min > yob_max) problems.push_back("yob_min must not exceed yob_max");
  if (yob_min < 1850) problems.push_back("yob_min must be >= 1850");
  if (!unit(gender_split)) problems.push_back("gender_split must lie in [0, 1]");
  if (!(background_rate >= 0.0) || background_rate > 10000.0) problems.push_back("background_rate must lie in [0, 10000]");
  if (background_rate > 0.0 && background_items == 0) problems.push_back("background_items must be >= 1 when background_rate > 0");
  for (std::size_t i = 0; i < planted_rules.size(); ++i) {
    const PlantedRule& r = planted_rules[i];
    const std::string where = "rule " + std::to_string(i + 1) + ": ";
    if (!unit(r.probability)) problems.push_back(where + "p must lie in [0, 1]");
    if (!unit(r.trigger_rate)) problems.push_back(where + "trigger_rate must lie in [0, 1]");
    if (trim(r.consequence).empty()) problems.push_back(where + "missing consequence");
    std::vector<std::string> codes = r.trigger;
    codes.push_back(r.consequence);
    for (const std::string& c : codes) {
      if (trim(c).empty()) problems.push_back(where + "empty trigger code");
      else if (is_demographic_symbol(c) || c.starts_with("event_")) {
        problems.push_back(where + "code '" + c + "' collides with a reserved prefix");
      }
    }
    if (r.cohort.yob_min && r.cohort.yob_max && *r.cohort.yob_min > *r.cohort.yob_max) {
      problems.push_back(where + "empty yob range");
    }
  }
  if (!problems.empty()) {
    std::string msg = "invalid generator config:";
    for (const auto& p : problems) msg += "\n  " + p;
    throw InputError(msg);
  }
}

namespace {

double parse_fraction(std::string_view text, const std::string& field) {
  try {
    return Ratio::parse_decimal(text).value();
  } catch (const InputError&) {
    throw InputError("invalid generator config:\n  " + field + ": expected a decimal, got '" + std::string(text) + "'");
  }
}

int parse_int(std::string_view text, const std::string& field) {
  try {
    return static_cast<int>(parse_uint(text, field));
  } catch (const InputError&) {
    throw InputError("invalid generator config:\n  " + field + ": expected an integer, got '" + std::string(text) + "'");
  }
}

std::vector<std::string_view> split_on(std::string_view text, std::string_view sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  for (std::size_t pos; (pos = text.find(sep, start)) != std::string_view::npos; start = pos + sep.size()) {
    out.push_back(text.substr(start, pos - start));
  }
  out.push_back(text.substr(start));
  return out;
}

PlantedRule parse_rule(std::string_view text, std::size_t line) {
  const std::string where = "line " + std::to_string(line);
  const auto parts = split_on(text, "|");
  const auto arrow = parts[0].find("=>");
  if (arrow == std::string_view::npos) throw InputError("invalid generator config:\n  " + where + ": rule lacks '=>'");
  PlantedRule r;
  const std::string_view lhs = trim(parts[0].substr(0, arrow));
  if (!lhs.empty()) {
    for (std::string_view code : split_on(lhs, ">")) r.trigger.emplace_back(trim(code));
  }
  r.consequence = std::string(trim(parts[0].substr(arrow + 2)));
  for (std::size_t i = 1; i < parts.size(); ++i) {
    const std::string_view kv = trim(parts[i]);
    const auto eq = kv.find('=');
    if (eq == std::string_view::npos) throw InputError("invalid generator config:\n  " + where + ": expected key=value in rule");
    const std::string key(trim(kv.substr(0, eq)));
    const std::string_view value = trim(kv.substr(eq + 1));
    if (key == "p") {
      r.probability = parse_fraction(value, where + " p");
    } else if (key == "trigger_rate") {
      r.trigger_rate = parse_fraction(value, where + " trigger_rate");
    } else if (key == "yob") {
      const auto dash = value.find('-');
      r.cohort.yob_min = parse_int(value.substr(0, dash), where + " yob");
      r.cohort.yob_max = dash == std::string_view::npos ? *r.cohort.yob_min : parse_int(value.substr(dash + 1), where + " yob");
    } else if (key == "gender") {
      if (value == "female") r.cohort.gender = Gender::female;
      else if (value == "male") r.cohort.gender = Gender::male;
      else throw InputError("invalid generator config:\n  " + where + ": gender must be male or female");
    } else {
      throw InputError("invalid generator config:\n  " + where + ": unknown rule key '" + key + "'");
    }
  }
  return r;
}

}  // namespace

GenConfig parse_gen_config(std::istream& in) {
  GenConfig c;
  std::string raw;
  std::size_t line = 0;
  while (std::getline(in, raw)) {
    ++line;
    const std::string_view text = trim(raw);
    if (text.empty() || text.starts_with('#')) continue;
    const auto eq = text.find('=');
    if (eq == std::string_view::npos) {
      throw InputError("invalid generator config:\n  line " + std::to_string(line) + ": expected key = value");
    }
    const std::string key(trim(text.substr(0, eq)));
    const std::string_view value = trim(text.substr(eq + 1));
    if (key == "n_patients") c.n_patients = static_cast<std::size_t>(parse_int(value, key));
    else if (key == "yob_min") c.yob_min = parse_int(value, key);
    else if (key == "yob_max") c.yob_max = parse_int(value, key);
    else if (key == "gender_split") c.gender_split = parse_fraction(value, key);
    else if (key == "background_items") c.background_items = static_cast<std::size_t>(parse_int(value, key));
    else if (key == "background_rate") c.background_rate = parse_fraction(value, key);
    else if (key == "seed") c.seed = parse_uint(value, key);
    else if (key == "rule") c.planted_rules.push_back(parse_rule(value, line));
    else throw InputError("invalid generator config:\n  line " + std::to_string(line) + ": unknown key '" + key + "'");
  }
  c.validate();
  return c;
}

// ---------------------------------------------------------------------------
// Manifest

void write_manifest(std::ostream& out, const Manifest& manifest) {
  out << "#manifest v1\n";
  for (const ManifestEntry& m : manifest) {
    for (std::size_t i = 0; i < m.trigger.size(); ++i) out << (i ? "," : "") << escape_item(m.trigger[i]);
    out << '|' << escape_item(m.consequence) << '|' << m.cohort_n << '|' << m.carriers << '|' << m.firings << '\n';
  }
}

Manifest read_manifest(std::istream& in) {
  std::string line;
  std::size_t line_no = 1;
  if (!std::getline(in, line) || trim(line) != "#manifest v1") throw FormatError("expected '#manifest v1' header", 1);
  Manifest manifest;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty() || line.starts_with('#')) continue;
    try {
      const auto fields = split_raw(line, '|');
      if (fields.size() != 5) throw FormatError("expected 5 '|'-separated fields", line_no);
      ManifestEntry m;
      if (!fields[0].empty()) m.trigger = split_escaped(fields[0], ',');
      m.consequence = split_escaped(fields[1], ',').at(0);
      m.cohort_n = parse_uint(fields[2], "cohort_n");
      m.carriers = parse_uint(fields[3], "carriers");
      m.firings = parse_uint(fields[4], "firings");
      manifest.push_back(std::move(m));
    } catch (const FormatError&) {
      throw;
    } catch (const Error& e) {
      throw FormatError(e.what(), line_no);
    }
  }
  return manifest;
}

// ---------------------------------------------------------------------------
// Generator

namespace {

// Fixed collection window: 2003-01-01 through 2010-12-31.
constexpr int kWindowStartYear = 2003;
constexpr int kWindowYears = 8;

std::vector<Date> window_days() {
  std::vector<Date> days;
  for (int y = kWindowStartYear; y < kWindowStartYear + kWindowYears; ++y) {
    for (int m = 1; m <= 12; ++m) {
      for (int d = 1; d <= 31; ++d) {
        if (auto date = Date::parse_iso(Date{y, m, d}.iso())) days.push_back(*date);
      }
    }
  }
  return days;
}

bool carries(const std::vector<std::string>& history, const std::vector<std::string>& trigger) {
  std::size_t t = 0;
  for (const std::string& code : history) {
    if (t < trigger.size() && code == trigger[t]) ++t;
  }
  return t == trigger.size();
}

}  // namespace

GeneratedData generate(const GenConfig& config) {
  config.validate();
  static const std::vector<Date> days = window_days();

  PortableRng rng(config.seed);
  GeneratedData out;
  out.manifest.resize(config.planted_rules.size());
  for (std::size_t r = 0; r < config.planted_rules.size(); ++r) {
    out.manifest[r].trigger = config.planted_rules[r].trigger;
    out.manifest[r].consequence = config.planted_rules[r].consequence;
  }

  std::ostringstream patients;
  std::ostringstream medical;
  write_record(patients, {"patient_id", "yob", "gender"}, ',');
  write_record(medical, {"patient_id", "date", "code"}, ',');

  const int key_width = static_cast<int>(std::to_string(config.n_patients).size());
  std::vector<std::string> planted;
  std::vector<std::pair<std::size_t, std::string>> rows;  // (day index, code)
  for (std::size_t i = 1; i <= config.n_patients; ++i) {
    char key[32];
    std::snprintf(key, sizeof key, "p%0*zu", key_width, i);
    const int yob = static_cast<int>(rng.uniform(static_cast<std::uint64_t>(config.yob_min),
                                                 static_cast<std::uint64_t>(config.yob_max)));
    const Gender gender = rng.bernoulli(config.gender_split) ? Gender::female : Gender::male;
    write_record(patients, {key, std::to_string(yob), gender == Gender::female ? "F" : "M"}, ',');

    planted.clear();
    for (std::size_t r = 0; r < config.planted_rules.size(); ++r) {
      const PlantedRule& rule = config.planted_rules[r];
      if (!rule.cohort.matches(yob, gender)) continue;
      ManifestEntry& m = out.manifest[r];
      ++m.cohort_n;
      bool has_trigger = carries(planted, rule.trigger);
      if (!has_trigger && rng.bernoulli(rule.trigger_rate)) {
        planted.insert(planted.end(), rule.trigger.begin(), rule.trigger.end());
        has_trigger = true;
      }
      if (!has_trigger) continue;
      ++m.carriers;
      if (rng.bernoulli(rule.probability)) {
        planted.push_back(rule.consequence);
        ++m.firings;
      }
    }
    if (planted.size() > days.size()) throw InputError("too many planted events for the date window");

    // Planted events get distinct, increasing days (Floyd's sampling).
    std::set<std::size_t> chosen;
    for (std::size_t j = days.size() - planted.size(); j < days.size(); ++j) {
      const auto t = static_cast<std::size_t>(rng.uniform(0, j));
      if (!chosen.insert(t).second) chosen.insert(j);
    }
    rows.clear();
    auto day = chosen.begin();
    for (const std::string& code : planted) rows.emplace_back(*day++, code);

    const std::uint64_t noise = config.background_rate > 0.0 ? rng.poisson(config.background_rate) : 0;
    for (std::uint64_t n = 0; n < noise; ++n) {
      const auto d = static_cast<std::size_t>(rng.uniform(0, days.size() - 1));
      const auto c = static_cast<std::size_t>(rng.uniform(0, config.background_items - 1));
      rows.emplace_back(d, background_code(c));
    }
    std::sort(rows.begin(), rows.end());
    for (const auto& [d, code] : rows) write_record(medical, {key, days[d].iso(), code}, ',');
  }
  out.patients_csv = patients.str();
  out.medical_csv = medical.str();
  return out;
}

}  // namespace seqmine
