#include <doctest.h>

#include <sstream>

#include "adsvol/errors.hpp"
#include "adsvol/marketdata.hpp"

using namespace adsvol;
using namespace adsvol::marketdata;

namespace {

std::vector<OptionQuoteRow> parse(const std::string& body) {
    std::istringstream in(std::string(kCsvHeader) + "\n" + body);
    return read_chain(in);
}

std::string message_of(const std::string& body) {
    try {
        parse(body);
    } catch (const ParseError& e) {
        return e.what();
    }
    return {};
}

}  // namespace

TEST_CASE("dates round-trip and reject garbage") {
    CHECK(format_date(parse_date("2024-02-29")) == "2024-02-29");
    CHECK_THROWS_AS(parse_date("2023-02-29"), ParseError);
    CHECK_THROWS_AS(parse_date("2024-13-01"), ParseError);
    CHECK_THROWS_AS(parse_date("20240101"), ParseError);
    CHECK(year_fraction(parse_date("2024-01-01"), parse_date("2024-01-31")) == doctest::Approx(30.0 / 365.0));
}

TEST_CASE("chain rows parse into typed quotes") {
    auto rows = parse("AAPL,2024-01-02,2024-02-01,190,0.25,192.5,0.05\n"
                      "AAPL,2024-01-02,2024-02-01,195,0.22,192.5,0.05\n");
    REQUIRE(rows.size() == 2);
    CHECK(rows[0].ticker == "AAPL");
    CHECK(rows[1].strike == 195.0);
    CHECK(rows[1].implied_vol == 0.22);
    CHECK(rows[0].underlying_close == 192.5);
}

TEST_CASE("parse errors name the row and column") {
    CHECK(message_of("AAPL,2024-01-02,2024-02-01,abc,0.25,192.5,0.05\n").find("row 1") != std::string::npos);
    CHECK(message_of("AAPL,2024-01-02,2024-02-01,abc,0.25,192.5,0.05\n").find("strike") != std::string::npos);
    CHECK(message_of("A,2024-01-02,2024-02-01,1,0.2,1,0\nA,2024-01-02,2024-02-01,2,-0.2,1,0\n")
              .find("row 2") != std::string::npos);
    CHECK(message_of("A,2024-01-02,2024-01-01,1,0.2,1,0\n").find("expiry") != std::string::npos);
    CHECK_FALSE(message_of("A,2024-01-02,2024-02-01,1,0.2,1\n").empty());

    std::istringstream empty("");
    CHECK_THROWS_AS(read_chain(empty), ParseError);
    std::istringstream bad_header("a,b,c\n");
    CHECK_THROWS_AS(read_chain(bad_header), ParseError);
    CHECK_THROWS_AS(load_chain("/nonexistent/chain.csv"), ParseError);
}

TEST_CASE("slice sorts by moneyness and locates K_min") {
    auto rows = parse("X,2024-01-02,2024-03-02,90,0.30,100,0.01\n"
                      "X,2024-01-02,2024-03-02,110,0.24,100,0.01\n"
                      "X,2024-01-02,2024-03-02,100,0.20,100,0.01\n"
                      "X,2024-01-02,2024-04-02,100,0.50,100,0.01\n");
    auto s = build_slice(rows, parse_date("2024-03-02"));
    REQUIRE(s.points.size() == 3);
    CHECK(s.points[0].strike == 110.0);  // lowest moneyness first
    CHECK(s.points[2].strike == 90.0);
    CHECK(s.k_min == 100.0);
    CHECK(s.m_min() == doctest::Approx(1.0));
    CHECK(s.tau == doctest::Approx(60.0 / 365.0));
    for (std::size_t i = 1; i < s.points.size(); ++i) CHECK(s.points[i - 1].moneyness < s.points[i].moneyness);
}

TEST_CASE("duplicate strikes keep the first quote") {
    auto rows = parse("X,2024-01-02,2024-03-02,90,0.30,100,0\n"
                      "X,2024-01-02,2024-03-02,90,0.99,100,0\n"
                      "X,2024-01-02,2024-03-02,100,0.20,100,0\n"
                      "X,2024-01-02,2024-03-02,110,0.25,100,0\n");
    auto s = build_slice(rows, parse_date("2024-03-02"));
    CHECK(s.points.size() == 3);
    CHECK(s.duplicate_strikes == std::vector<double>{90.0});
    CHECK(s.points.back().iv == 0.30);
}

TEST_CASE("K_min ties break toward the money, then the lower strike") {
    auto rows = parse("X,2024-01-02,2024-03-02,80,0.20,100,0\n"
                      "X,2024-01-02,2024-03-02,95,0.20,100,0\n"
                      "X,2024-01-02,2024-03-02,105,0.20,100,0\n"
                      "X,2024-01-02,2024-03-02,120,0.30,100,0\n");
    auto s = build_slice(rows, parse_date("2024-03-02"));
    // |100/95 - 1| = 0.0526 vs |100/105 - 1| = 0.0476
    CHECK(s.k_min == 105.0);
}

TEST_CASE("fewer than three strikes is rejected") {
    auto rows = parse("X,2024-01-02,2024-03-02,90,0.30,100,0\n"
                      "X,2024-01-02,2024-03-02,90,0.31,100,0\n"
                      "X,2024-01-02,2024-03-02,100,0.20,100,0\n");
    CHECK_THROWS_AS(build_slice(rows, parse_date("2024-03-02")), InvalidArgument);
}

TEST_CASE("slice keys and round trip through rows") {
    auto rows = load_chain(ADSVOL_TEST_DATA "/synthetic_chain.csv");
    auto keys = slice_keys(rows);
    REQUIRE(keys.size() == 2);
    CHECK(keys[0].ticker == "SYN");
    CHECK(keys[1].ticker == "SYN2");
    auto s = build_slice(filter_ticker(rows, "SYN"), keys[0].expiry);
    CHECK(s.points.size() == 25);
    CHECK(s.k_min == 105.0);
    auto back = build_slice(slice_rows(s), s.expiry);
    CHECK(back.points.size() == s.points.size());
    CHECK(back.k_min == s.k_min);
    CHECK(back.tau == s.tau);
}
