#pragma once

#include <chrono>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

namespace adsvol::marketdata {

using Date = std::chrono::sys_days;

/// Parses an ISO-8601 calendar date (YYYY-MM-DD). Throws ParseError.
Date parse_date(const std::string& text);
std::string format_date(Date d);

/// One record of the option-chain CSV.
struct OptionQuoteRow {
    std::string ticker;
    Date quote_date;
    Date expiry;
    double strike = 0.0;
    double implied_vol = 0.0;
    double underlying_close = 0.0;
    double rate = 0.0;
};

/// Column order of the input CSV; the header must match it exactly.
inline constexpr const char* kCsvHeader =
    "ticker,quote_date,expiry,strike,implied_vol,underlying_close,rate";

struct SlicePoint {
    double strike = 0.0;
    double moneyness = 0.0;  // S / K
    double iv = 0.0;
};

/// One expiry's smile: points strictly ascending in moneyness.
struct QuoteSlice {
    std::string ticker;
    Date quote_date;
    Date expiry;
    double spot = 0.0;
    double rate = 0.0;
    double tau = 0.0;  // ACT/365 year fraction
    std::vector<SlicePoint> points;
    double k_min = 0.0;
    /// Strikes dropped because an earlier row already carried them.
    std::vector<double> duplicate_strikes;

    [[nodiscard]] double m_min() const { return spot / k_min; }
    [[nodiscard]] std::vector<double> moneyness() const;
    [[nodiscard]] std::vector<double> ivs() const;
    [[nodiscard]] std::vector<double> strikes() const;
};

std::vector<OptionQuoteRow> read_chain(std::istream& in);
std::vector<OptionQuoteRow> load_chain(const std::filesystem::path& path);

/// Day count used for tau: calendar days / 365.
double year_fraction(Date from, Date to);

/// Builds the slice for `expiry` out of `rows` (rows of other expiries are
/// ignored). Duplicate strikes keep the first occurrence. K_min is the
/// argmin of observed IV; ties go to |M - 1| smallest, then the lower strike.
QuoteSlice build_slice(const std::vector<OptionQuoteRow>& rows, Date expiry);

/// Reconstructs rows carrying the slice's own points.
std::vector<OptionQuoteRow> slice_rows(const QuoteSlice& slice);

/// Distinct (ticker, expiry) groups in first-seen order.
struct SliceKey {
    std::string ticker;
    Date expiry;
    friend bool operator==(const SliceKey&, const SliceKey&) = default;
};
std::vector<SliceKey> slice_keys(const std::vector<OptionQuoteRow>& rows);

std::vector<OptionQuoteRow> filter_ticker(const std::vector<OptionQuoteRow>& rows,
                                          const std::string& ticker);

}  // namespace adsvol::marketdata
