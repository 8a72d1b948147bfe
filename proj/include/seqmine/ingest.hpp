#pragma once

// Patient/medical tables -> transaction sequences.
//
// Same-day events of a patient form one basket, baskets are ordered by date
// and numbered from eid 1, and eid 0 carries the demographic basket
// {yob:<year>, gender:<male|female>}. Events without a full calendar date are
// dropped because their position in the sequence is unknown.

#include <compare>
#include <cstddef>
#include <cstdint>
#include <istream>
#include <optional>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

#include "seqmine/model.hpp"

namespace seqmine {

enum class Gender { male, female, unknown };

std::string_view to_string(Gender g);

struct Date {
  int year = 0;
  int month = 0;
  int day = 0;

  /// Strict ISO "YYYY-MM-DD" naming a real calendar day; nullopt otherwise.
  static std::optional<Date> parse_iso(std::string_view text);
  std::string iso() const;

  friend auto operator<=>(const Date&, const Date&) = default;
};

struct PatientRecord {
  std::string patient_key;
  int yob = 0;
  Gender gender = Gender::unknown;
};

struct MedicalEventRecord {
  std::string patient_key;
  Date date;
  std::string code;
};

struct Diagnostic {
  std::size_t line = 0;
  std::string message;
};

struct PatientTable {
  std::vector<PatientRecord> records;
  std::vector<Diagnostic> diagnostics;
};

struct MedicalTable {
  std::vector<MedicalEventRecord> records;
  /// Rows dropped for a partial, missing or impossible date.
  std::size_t dropped_bad_date = 0;
  std::vector<Diagnostic> diagnostics;
};

struct IngestReport {
  std::size_t patients_in = 0;
  std::size_t patients_out = 0;
  std::size_t events_in = 0;
  std::size_t events_kept = 0;
  std::size_t events_dropped_bad_date = 0;
  std::size_t events_merged_duplicate = 0;
  std::size_t events_dropped_orphan = 0;

  bool balanced() const {
    return events_in == events_kept + events_dropped_bad_date + events_merged_duplicate + events_dropped_orphan;
  }
};

struct IngestOptions {
  char delimiter = ',';
  /// Upper bound for a plausible year of birth; defaults to the current year.
  int current_year = 0;
};

/// Header must name patient_id, yob and gender (any order, extra columns
/// ignored). Bad rows become diagnostics; a missing header or column throws
/// FormatError.
PatientTable parse_patient_table(std::istream& in, const IngestOptions& options = {});

/// Header must name patient_id, date and code. Rows lacking a key or code
/// are diagnostics and are not counted as events; rows with an unusable date
/// are counted in dropped_bad_date.
MedicalTable parse_medical_table(std::istream& in, const IngestOptions& options = {});

struct IngestResult {
  SequenceDatabase db;
  IngestReport report;
};

/// Groups, orders and numbers the events of every patient. sids follow
/// ascending patient_key order, so the result does not depend on row order.
/// Throws InputError on duplicate patient keys.
IngestResult build_sequences(const PatientTable& patients, const MedicalTable& events);
IngestResult build_sequences(const std::vector<PatientRecord>& patients,
                             const std::vector<MedicalEventRecord>& events);

/// `#seqdb v1`: one `sid<TAB>eid<TAB>item,item` line per basket, sorted by
/// (sid, eid).
void write_seqdb(std::ostream& out, const SequenceDatabase& db);
/// Interns symbols in order of first appearance. Throws FormatError.
SequenceDatabase read_seqdb(std::istream& in);

int current_year();

}  // namespace seqmine
