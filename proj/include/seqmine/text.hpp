#pragma once

// Small text helpers shared by the file formats: trimming, delimited-record
// splitting, item-list escaping and exact decimal thresholds.

#include <cstdint>
#include <istream>
#include <optional>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

namespace seqmine {

std::string_view trim(std::string_view s);

/// Reads delimiter-separated records with double-quote wrapping and doubled
/// quotes as escapes. Quoted fields may not span lines.
class DelimitedReader {
 public:
  DelimitedReader(std::istream& in, char delimiter) : in_(in), delimiter_(delimiter) {}

  /// Next non-blank record, or nullopt at end of input. Throws FormatError on
  /// an unterminated quote.
  std::optional<std::vector<std::string>> next();
  /// 1-based line number of the record last returned.
  std::size_t line() const { return line_; }

 private:
  std::istream& in_;
  char delimiter_;
  std::size_t line_ = 0;
};

/// Writes one record, quoting fields that contain the delimiter, quotes or
/// line breaks.
void write_record(std::ostream& out, const std::vector<std::string>& fields, char delimiter);

/// Item symbols in the text formats are joined with ',' inside an element and
/// '|' between elements. Those characters, backslash, tab and newline are
/// backslash-escaped; other symbols are written verbatim.
std::string escape_item(std::string_view item);

/// Splits `text` on unescaped `separator` and unescapes each piece.
std::vector<std::string> split_escaped(std::string_view text, char separator);

/// Splits on unescaped `separator` without unescaping (for nested splits).
std::vector<std::string_view> split_raw(std::string_view text, char separator);

/// Exact non-negative rational, used for thresholds written as decimals so
/// that ceil(0.1 * 30) is 3 rather than 4.
struct Ratio {
  std::uint64_t num = 0;
  std::uint64_t den = 1;

  /// Parses "0.25", "1", "1.0", ".5". Throws InputError on anything else or
  /// on more than 18 fractional digits.
  static Ratio parse_decimal(std::string_view text);
  static Ratio from_double(double value);

  double value() const { return static_cast<double>(num) / static_cast<double>(den); }
  /// ceil(num / den * n).
  std::uint64_t ceil_times(std::uint64_t n) const;
  /// a / b >= num / den, exactly.
  bool le_fraction(std::uint64_t a, std::uint64_t b) const;
};

/// Shortest round-trip decimal for a double.
std::string format_double(double value);

std::uint64_t parse_uint(std::string_view text, std::string_view what);

}  // namespace seqmine
