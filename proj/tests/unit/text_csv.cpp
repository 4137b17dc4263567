#include "barrier/csv.hpp"
#include "barrier/error.hpp"
#include "barrier/text.hpp"

#include <doctest.h>

#include <limits>
#include <sstream>

using namespace barrier;

TEST_SUITE("text") {
  TEST_CASE("trim and case helpers") {
    CHECK(text::trim("  a b \t") == "a b");
    CHECK(text::trim("   ").empty());
    CHECK(text::to_lower("News.Sky.COM") == "news.sky.com");
    CHECK(text::iequals("Political", "political"));
    CHECK_FALSE(text::iequals("Political", "politic"));
  }

  TEST_CASE("split keeps empty fields") {
    const auto parts = text::split("a,,b,", ',');
    REQUIRE(parts.size() == 4);
    CHECK(parts[1].empty());
    CHECK(parts[3].empty());
  }

  TEST_CASE("shortest round-trip formatting") {
    for (double v : {0.1, 1.0 / 3.0, 1e-300, -2.5, 123456789.125, 0.979}) {
      const auto s = text::format_double(v);
      CHECK(*text::parse_double(s) == v);
    }
    CHECK(text::format_double(0.7) == "0.7");
    CHECK(text::format_fixed(0.705, 2).size() == 4);
  }

  TEST_CASE("number parsing rejects junk") {
    CHECK_FALSE(text::parse_double("1.2.3"));
    CHECK_FALSE(text::parse_double(""));
    CHECK_FALSE(text::parse_int("4.5"));
    CHECK(*text::parse_int(" -720 ") == -720);
    CHECK(*text::parse_bool("TRUE"));
    CHECK_FALSE(*text::parse_bool("0"));
    CHECK_FALSE(text::parse_bool("maybe"));
  }
}

TEST_SUITE("csv") {
  TEST_CASE("quoted fields, embedded separators and CRLF") {
    const auto records = csv::parse("a,\"b,c\",\"say \"\"hi\"\"\"\r\n1,2,3\r\n");
    REQUIRE(records.size() == 2);
    CHECK(records[0].fields[1] == "b,c");
    CHECK(records[0].fields[2] == "say \"hi\"");
    CHECK(records[1].line == 2);
  }

  TEST_CASE("embedded newline inside quotes") {
    const auto records = csv::parse("x,\"line1\nline2\"\ny,z\n");
    REQUIRE(records.size() == 2);
    CHECK(records[0].fields[1] == "line1\nline2");
  }

  TEST_CASE("BOM is skipped") {
    const auto table = csv::parse_table("\xEF\xBB\xBF" "a,b\n1,2\n", "bom.csv");
    CHECK(table.require_column("a") == 0);
  }

  TEST_CASE("missing column names the column") {
    const auto table = csv::parse_table("a,b\n1,2\n", "t.csv");
    try {
      table.require_column("Governance");
      FAIL("expected MissingColumn");
    } catch (const Error& e) {
      CHECK(e.code() == Errc::MissingColumn);
      CHECK(std::string(e.what()).find("Governance") != std::string::npos);
    }
  }

  TEST_CASE("ragged rows are malformed") {
    CHECK_THROWS_AS(csv::parse_table("a,b\n1,2,3\n", "t.csv"), Error);
  }

  TEST_CASE("writer quotes only when needed and round-trips") {
    std::ostringstream out;
    csv::write_row(out, {"plain", "with,comma", "with \"quote\"", ""});
    CHECK(out.str() == "plain,\"with,comma\",\"with \"\"quote\"\"\",\n");
    const auto back = csv::parse(out.str());
    REQUIRE(back.size() == 1);
    CHECK(back[0].fields == std::vector<std::string>{"plain", "with,comma", "with \"quote\"", ""});
  }
}
