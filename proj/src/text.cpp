#include "seqmine/text.hpp"

#include <charconv>
#include <cmath>

#include "seqmine/error.hpp"

namespace seqmine {

std::string_view trim(std::string_view s) {
  constexpr std::string_view ws = " \t\r\n\f\v";
  const auto b = s.find_first_not_of(ws);
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(ws);
  return s.substr(b, e - b + 1);
}

std::optional<std::vector<std::string>> DelimitedReader::next() {
  std::string raw;
  while (std::getline(in_, raw)) {
    ++line_;
    if (!raw.empty() && raw.back() == '\r') raw.pop_back();
    if (trim(raw).empty()) continue;

    std::vector<std::string> fields;
    std::string field;
    bool quoted = false;
    for (std::size_t i = 0; i < raw.size(); ++i) {
      const char c = raw[i];
      if (quoted) {
        if (c == '"') {
          if (i + 1 < raw.size() && raw[i + 1] == '"') {
            field += '"';
            ++i;
          } else {
            quoted = false;
          }
        } else {
          field += c;
        }
      } else if (c == '"') {
        quoted = true;
      } else if (c == delimiter_) {
        fields.push_back(std::move(field));
        field.clear();
      } else {
        field += c;
      }
    }
    if (quoted) throw FormatError("unterminated quoted field", line_);
    fields.push_back(std::move(field));
    return fields;
  }
  return std::nullopt;
}

void write_record(std::ostream& out, const std::vector<std::string>& fields, char delimiter) {
  for (std::size_t i = 0; i < fields.size(); ++i) {
    if (i) out << delimiter;
    const std::string& f = fields[i];
    if (f.find_first_of(std::string{delimiter, '"', '\n', '\r'}) == std::string::npos) {
      out << f;
      continue;
    }
    out << '"';
    for (char c : f) {
      if (c == '"') out << '"';
      out << c;
    }
    out << '"';
  }
  out << '\n';
}

std::string escape_item(std::string_view item) {
  std::string out;
  out.reserve(item.size());
  for (char c : item) {
    switch (c) {
      case '\\': out += "\\\\"; break;
      case ',': out += "\\,"; break;
      case '|': out += "\\|"; break;
      case '\t': out += "\\t"; break;
      case '\n': out += "\\n"; break;
      default: out += c;
    }
  }
  return out;
}

std::vector<std::string_view> split_raw(std::string_view text, char separator) {
  std::vector<std::string_view> parts;
  std::size_t start = 0;
  for (std::size_t i = 0; i < text.size(); ++i) {
    if (text[i] == '\\') {
      ++i;
    } else if (text[i] == separator) {
      parts.push_back(text.substr(start, i - start));
      start = i + 1;
    }
  }
  parts.push_back(text.substr(start));
  return parts;
}

std::vector<std::string> split_escaped(std::string_view text, char separator) {
  std::vector<std::string> out;
  for (std::string_view piece : split_raw(text, separator)) {
    std::string s;
    s.reserve(piece.size());
    for (std::size_t i = 0; i < piece.size(); ++i) {
      if (piece[i] != '\\') {
        s += piece[i];
        continue;
      }
      if (++i == piece.size()) throw FormatError("dangling escape in '" + std::string(text) + "'");
      switch (piece[i]) {
        case 't': s += '\t'; break;
        case 'n': s += '\n'; break;
        default: s += piece[i];
      }
    }
    out.push_back(std::move(s));
  }
  return out;
}

Ratio Ratio::parse_decimal(std::string_view text) {
  text = trim(text);
  const auto dot = text.find('.');
  const std::string_view whole = text.substr(0, dot);
  const std::string_view frac = dot == std::string_view::npos ? std::string_view{} : text.substr(dot + 1);
  if ((whole.empty() && frac.empty()) || frac.size() > 18) {
    throw InputError("not a decimal number: '" + std::string(text) + "'");
  }
  auto digits_only = [](std::string_view s) { return s.find_first_not_of("0123456789") == std::string_view::npos; };
  if (!digits_only(whole) || !digits_only(frac) || (dot != std::string_view::npos && frac.empty() && whole.empty())) {
    throw InputError("not a decimal number: '" + std::string(text) + "'");
  }
  Ratio r;
  for (std::size_t i = 0; i < frac.size(); ++i) r.den *= 10;
  std::uint64_t w = 0;
  if (!whole.empty()) w = parse_uint(whole, "decimal");
  std::uint64_t f = 0;
  if (!frac.empty()) f = parse_uint(frac, "decimal");
  const unsigned __int128 num = static_cast<unsigned __int128>(w) * r.den + f;
  if (num > UINT64_MAX) throw InputError("decimal out of range: '" + std::string(text) + "'");
  r.num = static_cast<std::uint64_t>(num);
  return r;
}

Ratio Ratio::from_double(double value) {
  if (!(value >= 0.0) || value > 1e6) throw InputError("ratio out of range");
  constexpr std::uint64_t den = 1'000'000'000ULL;
  return Ratio{static_cast<std::uint64_t>(std::llround(value * static_cast<double>(den))), den};
}

std::uint64_t Ratio::ceil_times(std::uint64_t n) const {
  const unsigned __int128 p = static_cast<unsigned __int128>(num) * n;
  return static_cast<std::uint64_t>((p + den - 1) / den);
}

bool Ratio::le_fraction(std::uint64_t a, std::uint64_t b) const {
  return static_cast<unsigned __int128>(a) * den >= static_cast<unsigned __int128>(num) * b;
}

std::string format_double(double value) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, value);
  return std::string(buf, res.ptr);
}

std::uint64_t parse_uint(std::string_view text, std::string_view what) {
  text = trim(text);
  std::uint64_t v = 0;
  const auto res = std::from_chars(text.data(), text.data() + text.size(), v);
  if (text.empty() || res.ec != std::errc{} || res.ptr != text.data() + text.size()) {
    throw InputError("invalid " + std::string(what) + ": '" + std::string(text) + "'");
  }
  return v;
}

}  // namespace seqmine
