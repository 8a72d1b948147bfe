#include <gtest/gtest.h>

#include <sstream>

#include "seqmine/error.hpp"
#include "seqmine/text.hpp"

using namespace seqmine;

TEST(Trim, StripsSurroundingWhitespace) {
  EXPECT_EQ(trim("  a b \t\r\n"), "a b");
  EXPECT_EQ(trim(" \t "), "");
  EXPECT_EQ(trim(""), "");
}

TEST(DelimitedReader, SplitsQuotesAndSkipsBlankLines) {
  std::istringstream in("a,b,c\n\n\"x,y\",\"say \"\"hi\"\"\",z\r\nlast,,\n");
  DelimitedReader r(in, ',');
  auto rec = r.next();
  ASSERT_TRUE(rec);
  EXPECT_EQ(*rec, (std::vector<std::string>{"a", "b", "c"}));
  EXPECT_EQ(r.line(), 1u);
  rec = r.next();
  ASSERT_TRUE(rec);
  EXPECT_EQ(*rec, (std::vector<std::string>{"x,y", "say \"hi\"", "z"}));
  EXPECT_EQ(r.line(), 3u);
  rec = r.next();
  ASSERT_TRUE(rec);
  EXPECT_EQ(*rec, (std::vector<std::string>{"last", "", ""}));
  EXPECT_FALSE(r.next());
}

TEST(DelimitedReader, TabDelimiter) {
  std::istringstream in("a\tb,c\n");
  DelimitedReader r(in, '\t');
  EXPECT_EQ(*r.next(), (std::vector<std::string>{"a", "b,c"}));
}

TEST(DelimitedReader, UnterminatedQuoteIsFormatError) {
  std::istringstream in("ok\n\"broken,field\n");
  DelimitedReader r(in, ',');
  ASSERT_TRUE(r.next());
  try {
    r.next();
    FAIL() << "expected FormatError";
  } catch (const FormatError& e) {
    EXPECT_EQ(e.line(), 2u);
  }
}

TEST(WriteRecord, RoundTripsThroughReader) {
  const std::vector<std::string> fields{"plain", "has,comma", "has \"quote\"", ""};
  std::ostringstream out;
  write_record(out, fields, ',');
  std::istringstream in(out.str());
  DelimitedReader r(in, ',');
  EXPECT_EQ(*r.next(), fields);
}

TEST(ItemEscaping, RoundTripsSeparators) {
  const std::string nasty = "Diarrhoea & vomiting, symptom|x\\y\tz";
  const std::string joined = escape_item(nasty) + "," + escape_item("b");
  EXPECT_EQ(split_escaped(joined, ','), (std::vector<std::string>{nasty, "b"}));
  EXPECT_EQ(split_raw("a\\|b|c", '|').size(), 2u);
  EXPECT_THROW(split_escaped("dangling\\", ','), FormatError);
}

TEST(Ratio, ParsesDecimalsExactly) {
  const Ratio r = Ratio::parse_decimal("0.1");
  EXPECT_EQ(r.num, 1u);
  EXPECT_EQ(r.den, 10u);
  EXPECT_EQ(r.ceil_times(30), 3u);  // a double product would give 3.0000000000000004 -> 4
  EXPECT_EQ(Ratio::parse_decimal(".5").ceil_times(3), 2u);
  EXPECT_EQ(Ratio::parse_decimal("1.0").ceil_times(7), 7u);
  EXPECT_EQ(Ratio::parse_decimal("2").num, 2u);
}

TEST(Ratio, RejectsMalformedText) {
  for (const char* bad : {"", ".", "abc", "1.2.3", "-0.5", "0.1x", "1e-3", "0.1234567890123456789"}) {
    EXPECT_THROW(Ratio::parse_decimal(bad), InputError) << bad;
  }
}

TEST(Ratio, FractionComparisonIsExact) {
  const Ratio tenth{1, 10};
  EXPECT_TRUE(tenth.le_fraction(1, 10));
  EXPECT_TRUE(tenth.le_fraction(2, 19));
  EXPECT_FALSE(tenth.le_fraction(9, 91));
}

TEST(FormatDouble, ShortestRoundTrip) {
  EXPECT_EQ(format_double(0.1), "0.1");
  EXPECT_EQ(format_double(2.0 / 3.0), "0.6666666666666666");
  EXPECT_EQ(format_double(1.0), "1");
}

TEST(ParseUint, ValidatesWholeField) {
  EXPECT_EQ(parse_uint(" 42 ", "n"), 42u);
  EXPECT_THROW(parse_uint("4x", "n"), InputError);
  EXPECT_THROW(parse_uint("", "n"), InputError);
  EXPECT_THROW(parse_uint("-1", "n"), InputError);
}
