#include "seqmine/ingest.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <ctime>
#include <map>
#include <set>
#include <unordered_map>

#include "seqmine/miner.hpp"
#include "seqmine/text.hpp"

namespace seqmine {

namespace {

constexpr int kMinYob = 1850;

bool is_leap(int y) { return (y % 4 == 0 && y % 100 != 0) || y % 400 == 0; }

int days_in_month(int y, int m) {
  static constexpr int days[] = {31, 28, 31, 30, 31, 30, 31, 31, 30, 31, 30, 31};
  return m == 2 && is_leap(y) ? 29 : days[m - 1];
}

std::optional<int> parse_fixed_digits(std::string_view s, std::size_t width) {
  if (s.size() != width || s.find_first_not_of("0123456789") != std::string_view::npos) return std::nullopt;
  int v = 0;
  std::from_chars(s.data(), s.data() + s.size(), v);
  return v;
}

std::string lower(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(), [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return out;
}

struct Columns {
  std::vector<std::size_t> index;
  std::size_t width = 0;
};

Columns locate_columns(DelimitedReader& reader, std::initializer_list<std::string_view> required, std::string_view table) {
  auto header = reader.next();
  if (!header) throw FormatError(std::string(table) + " table: missing header row", 1);
  Columns cols;
  cols.width = header->size();
  for (std::string_view name : required) {
    auto it = std::find_if(header->begin(), header->end(), [&](const std::string& h) { return lower(trim(h)) == name; });
    if (it == header->end()) {
      throw FormatError(std::string(table) + " table: header lacks column '" + std::string(name) + "'", reader.line());
    }
    cols.index.push_back(static_cast<std::size_t>(it - header->begin()));
  }
  return cols;
}

Gender parse_gender(std::string_view text) {
  const std::string g = lower(trim(text));
  if (g == "m" || g == "male") return Gender::male;
  if (g == "f" || g == "female") return Gender::female;
  return Gender::unknown;
}

}  // namespace

std::string_view to_string(Gender g) {
  switch (g) {
    case Gender::male: return "male";
    case Gender::female: return "female";
    case Gender::unknown: return "unknown";
  }
  return "unknown";
}

std::optional<Date> Date::parse_iso(std::string_view text) {
  text = trim(text);
  if (text.size() != 10 || text[4] != '-' || text[7] != '-') return std::nullopt;
  const auto y = parse_fixed_digits(text.substr(0, 4), 4);
  const auto m = parse_fixed_digits(text.substr(5, 2), 2);
  const auto d = parse_fixed_digits(text.substr(8, 2), 2);
  if (!y || !m || !d || *m < 1 || *m > 12 || *d < 1 || *d > days_in_month(*y, *m)) return std::nullopt;
  return Date{*y, *m, *d};
}

std::string Date::iso() const {
  char buf[16];
  std::snprintf(buf, sizeof buf, "%04d-%02d-%02d", year, month, day);
  return buf;
}

int current_year() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  return tm.tm_year + 1900;
}

PatientTable parse_patient_table(std::istream& in, const IngestOptions& options) {
  DelimitedReader reader(in, options.delimiter);
  const Columns cols = locate_columns(reader, {"patient_id", "yob", "gender"}, "patient");
  const int max_year = options.current_year ? options.current_year : current_year();

  PatientTable table;
  std::set<std::string> seen;
  while (auto row = reader.next()) {
    auto field = [&](std::size_t c) -> std::string_view {
      return cols.index[c] < row->size() ? trim((*row)[cols.index[c]]) : std::string_view{};
    };
    const std::string_view key = field(0);
    if (key.empty()) {
      table.diagnostics.push_back({reader.line(), "missing patient_id"});
      continue;
    }
    const auto yob = parse_fixed_digits(field(1), 4);
    if (!yob || *yob < kMinYob || *yob > max_year) {
      table.diagnostics.push_back({reader.line(), "unusable yob '" + std::string(field(1)) + "'"});
      continue;
    }
    if (!seen.insert(std::string(key)).second) {
      table.diagnostics.push_back({reader.line(), "duplicate patient_id '" + std::string(key) + "'"});
      continue;
    }
    table.records.push_back({std::string(key), *yob, parse_gender(field(2))});
  }
  return table;
}

MedicalTable parse_medical_table(std::istream& in, const IngestOptions& options) {
  DelimitedReader reader(in, options.delimiter);
  const Columns cols = locate_columns(reader, {"patient_id", "date", "code"}, "medical");

  MedicalTable table;
  while (auto row = reader.next()) {
    auto field = [&](std::size_t c) -> std::string_view {
      return cols.index[c] < row->size() ? trim((*row)[cols.index[c]]) : std::string_view{};
    };
    const std::string_view key = field(0);
    const std::string_view code = field(2);
    if (key.empty() || code.empty()) {
      table.diagnostics.push_back({reader.line(), key.empty() ? "missing patient_id" : "missing code"});
      continue;
    }
    if (is_demographic_symbol(code)) {
      table.diagnostics.push_back({reader.line(), "code '" + std::string(code) + "' uses a reserved demographic prefix"});
      continue;
    }
    const auto date = Date::parse_iso(field(1));
    if (!date) {
      ++table.dropped_bad_date;
      table.diagnostics.push_back({reader.line(), "partial or missing date '" + std::string(field(1)) + "'"});
      continue;
    }
    table.records.push_back({std::string(key), *date, std::string(code)});
  }
  return table;
}

IngestResult build_sequences(const PatientTable& patients, const MedicalTable& events) {
  std::vector<const PatientRecord*> order;
  order.reserve(patients.records.size());
  for (const PatientRecord& p : patients.records) order.push_back(&p);
  std::sort(order.begin(), order.end(),
            [](const PatientRecord* a, const PatientRecord* b) { return a->patient_key < b->patient_key; });
  for (std::size_t i = 1; i < order.size(); ++i) {
    if (order[i]->patient_key == order[i - 1]->patient_key) {
      throw InputError("duplicate patient_id '" + order[i]->patient_key + "'");
    }
  }
  if (order.size() > kernels::kMaxSid) throw InputError("too many patients");

  IngestReport report;
  report.patients_in = patients.records.size();
  report.events_dropped_bad_date = events.dropped_bad_date;
  report.events_in = events.records.size() + events.dropped_bad_date;

  std::unordered_map<std::string_view, std::size_t> slot;
  slot.reserve(order.size());
  for (std::size_t i = 0; i < order.size(); ++i) slot.emplace(order[i]->patient_key, i);

  std::vector<std::map<Date, std::set<std::string>>> baskets(order.size());
  for (const MedicalEventRecord& e : events.records) {
    const auto it = slot.find(e.patient_key);
    if (it == slot.end()) {
      ++report.events_dropped_orphan;
      continue;
    }
    if (baskets[it->second][e.date].insert(e.code).second) ++report.events_kept;
    else ++report.events_merged_duplicate;
  }

  SymbolTable symbols;
  std::vector<Sequence> sequences;
  sequences.reserve(order.size());
  for (std::size_t sid = 0; sid < order.size(); ++sid) {
    const PatientRecord& p = *order[sid];
    std::vector<ItemId> demographic{symbols.intern("yob:" + std::to_string(p.yob))};
    if (p.gender != Gender::unknown) demographic.push_back(symbols.intern("gender:" + std::string(to_string(p.gender))));

    std::vector<Event> seq_events;
    seq_events.reserve(baskets[sid].size() + 1);
    seq_events.push_back({0, EventSet(std::move(demographic))});
    std::uint32_t eid = 1;
    for (const auto& [date, codes] : baskets[sid]) {
      std::vector<ItemId> items;
      items.reserve(codes.size());
      for (const std::string& code : codes) items.push_back(symbols.intern(code));
      seq_events.push_back({eid++, EventSet(std::move(items))});
    }
    sequences.emplace_back(static_cast<std::uint32_t>(sid), std::move(seq_events));
  }
  report.patients_out = sequences.size();
  return {SequenceDatabase(std::move(symbols), std::move(sequences)), report};
}

IngestResult build_sequences(const std::vector<PatientRecord>& patients,
                             const std::vector<MedicalEventRecord>& events) {
  return build_sequences(PatientTable{patients, {}}, MedicalTable{events, 0, {}});
}

void write_seqdb(std::ostream& out, const SequenceDatabase& db) {
  out << "#seqdb v1\n";
  const SymbolTable& symbols = db.symbols();
  for (const Sequence& s : db.sequences()) {
    for (const Event& e : s.events()) {
      out << s.sid() << '\t' << e.eid << '\t';
      bool first = true;
      for (ItemId item : e.basket.items()) {
        if (!first) out << ',';
        first = false;
        out << escape_item(symbols.name(item));
      }
      out << '\n';
    }
  }
}

SequenceDatabase read_seqdb(std::istream& in) {
  std::string line;
  std::size_t line_no = 1;
  if (!std::getline(in, line) || trim(line) != "#seqdb v1") throw FormatError("expected '#seqdb v1' header", 1);

  struct Row {
    std::uint32_t sid;
    std::uint32_t eid;
    std::vector<std::string> items;
  };
  std::vector<Row> rows;
  SymbolOrder order;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line.starts_with('#')) continue;
    try {
      const auto fields = split_raw(line, '\t');
      if (fields.size() != 3) throw FormatError("expected sid, eid and items separated by tabs", line_no);
      const std::uint64_t sid = parse_uint(fields[0], "sid");
      const std::uint64_t eid = parse_uint(fields[1], "eid");
      if (sid > kernels::kMaxSid || eid > UINT32_MAX) throw FormatError("sid or eid out of range", line_no);
      if (!rows.empty() && (sid < rows.back().sid || (sid == rows.back().sid && eid <= rows.back().eid))) {
        throw FormatError("lines must be sorted by (sid, eid) without repeats", line_no);
      }
      Row row{static_cast<std::uint32_t>(sid), static_cast<std::uint32_t>(eid), split_escaped(fields[2], ',')};
      order.add_group(row.items);
      rows.push_back(std::move(row));
    } catch (const FormatError&) {
      throw;
    } catch (const Error& e) {
      throw FormatError(e.what(), line_no);
    }
  }

  SymbolTable symbols = order.build();
  std::vector<Sequence> sequences;
  std::vector<Event> events;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    std::vector<ItemId> items;
    for (const std::string& name : rows[i].items) items.push_back(*symbols.find(name));
    events.push_back({rows[i].eid, EventSet(std::move(items))});
    if (i + 1 == rows.size() || rows[i + 1].sid != rows[i].sid) {
      sequences.emplace_back(rows[i].sid, std::move(events));
      events.clear();
    }
  }
  return SequenceDatabase(std::move(symbols), std::move(sequences));
}

}  // namespace seqmine
