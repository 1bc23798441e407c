#include "adsvol/marketdata.hpp"

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <cmath>
#include <fstream>
#include <istream>
#include <limits>
#include <sstream>

#include "adsvol/errors.hpp"

namespace adsvol::marketdata {

namespace {

std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r'))
        s.remove_suffix(1);
    return s;
}

std::vector<std::string_view> split_commas(std::string_view line) {
    std::vector<std::string_view> out;
    std::size_t start = 0;
    while (true) {
        auto pos = line.find(',', start);
        if (pos == std::string_view::npos) {
            out.push_back(trim(line.substr(start)));
            break;
        }
        out.push_back(trim(line.substr(start, pos - start)));
        start = pos + 1;
    }
    return out;
}

constexpr const char* kColumns[] = {"ticker", "quote_date", "expiry", "strike",
                                    "implied_vol", "underlying_close", "rate"};

[[noreturn]] void fail_row(std::size_t row, std::string_view column, const std::string& what) {
    std::ostringstream os;
    os << "row " << row << ", column '" << column << "': " << what;
    throw ParseError(os.str());
}

double parse_number(std::string_view text, std::size_t row, std::string_view column) {
    double value = 0.0;
    const char* first = text.data();
    const char* last = text.data() + text.size();
    if (!text.empty() && *first == '+') ++first;
    auto [ptr, ec] = std::from_chars(first, last, value);
    if (text.empty() || ec != std::errc() || ptr != last || !std::isfinite(value))
        fail_row(row, column, "not a number: '" + std::string(text) + "'");
    return value;
}

}  // namespace

Date parse_date(const std::string& text) {
    int y = 0;
    unsigned m = 0, d = 0;
    auto bad = [&] { throw ParseError("invalid ISO date: '" + text + "'"); };
    if (text.size() != 10 || text[4] != '-' || text[7] != '-') bad();
    auto digits = [&](std::size_t pos, std::size_t len, auto& out) {
        auto [p, ec] = std::from_chars(text.data() + pos, text.data() + pos + len, out);
        if (ec != std::errc() || p != text.data() + pos + len) bad();
    };
    digits(0, 4, y);
    digits(5, 2, m);
    digits(8, 2, d);
    std::chrono::year_month_day ymd{std::chrono::year{y}, std::chrono::month{m},
                                    std::chrono::day{d}};
    if (!ymd.ok()) bad();
    return Date{ymd};
}

std::string format_date(Date d) {
    std::chrono::year_month_day ymd{d};
    char buf[16];
    std::snprintf(buf, sizeof buf, "%04d-%02u-%02u", static_cast<int>(ymd.year()),
                  static_cast<unsigned>(ymd.month()), static_cast<unsigned>(ymd.day()));
    return buf;
}

std::vector<double> QuoteSlice::moneyness() const {
    std::vector<double> out;
    out.reserve(points.size());
    for (const auto& p : points) out.push_back(p.moneyness);
    return out;
}

std::vector<double> QuoteSlice::ivs() const {
    std::vector<double> out;
    out.reserve(points.size());
    for (const auto& p : points) out.push_back(p.iv);
    return out;
}

std::vector<double> QuoteSlice::strikes() const {
    std::vector<double> out;
    out.reserve(points.size());
    for (const auto& p : points) out.push_back(p.strike);
    return out;
}

std::vector<OptionQuoteRow> read_chain(std::istream& in) {
    std::string line;
    if (!std::getline(in, line)) throw ParseError("empty input: missing CSV header");
    if (line.size() >= 3 && static_cast<unsigned char>(line[0]) == 0xEF) line.erase(0, 3);
    auto header = split_commas(line);
    bool header_ok = header.size() == std::size(kColumns);
    for (std::size_t i = 0; header_ok && i < header.size(); ++i)
        header_ok = header[i] == kColumns[i];
    if (!header_ok)
        throw ParseError("malformed header: expected '" + std::string(kCsvHeader) + "', got '" +
                         line + "'");

    std::vector<OptionQuoteRow> rows;
    std::size_t row_no = 0;
    while (std::getline(in, line)) {
        ++row_no;
        if (trim(line).empty()) continue;
        auto fields = split_commas(line);
        if (fields.size() != std::size(kColumns)) {
            std::ostringstream os;
            os << "row " << row_no << ": expected " << std::size(kColumns) << " fields, got "
               << fields.size();
            throw ParseError(os.str());
        }
        OptionQuoteRow r;
        r.ticker = std::string(fields[0]);
        if (r.ticker.empty()) fail_row(row_no, kColumns[0], "empty ticker");
        try {
            r.quote_date = parse_date(std::string(fields[1]));
        } catch (const ParseError& e) {
            fail_row(row_no, kColumns[1], e.what());
        }
        try {
            r.expiry = parse_date(std::string(fields[2]));
        } catch (const ParseError& e) {
            fail_row(row_no, kColumns[2], e.what());
        }
        r.strike = parse_number(fields[3], row_no, kColumns[3]);
        r.implied_vol = parse_number(fields[4], row_no, kColumns[4]);
        r.underlying_close = parse_number(fields[5], row_no, kColumns[5]);
        r.rate = parse_number(fields[6], row_no, kColumns[6]);
        if (r.strike <= 0.0) fail_row(row_no, kColumns[3], "strike must be positive");
        if (r.implied_vol <= 0.0) fail_row(row_no, kColumns[4], "implied_vol must be positive");
        if (r.underlying_close <= 0.0)
            fail_row(row_no, kColumns[5], "underlying_close must be positive");
        if (r.expiry <= r.quote_date) fail_row(row_no, kColumns[2], "expiry must follow quote_date");
        rows.push_back(std::move(r));
    }
    return rows;
}

std::vector<OptionQuoteRow> load_chain(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ParseError("cannot open input file: " + path.string());
    return read_chain(in);
}

double year_fraction(Date from, Date to) {
    return static_cast<double>((to - from).count()) / 365.0;
}

QuoteSlice build_slice(const std::vector<OptionQuoteRow>& rows, Date expiry) {
    QuoteSlice s;
    s.expiry = expiry;
    bool first = true;
    for (const auto& r : rows) {
        if (r.expiry != expiry) continue;
        if (first) {
            s.ticker = r.ticker;
            s.quote_date = r.quote_date;
            s.spot = r.underlying_close;
            s.rate = r.rate;
            first = false;
        }
        bool dup = std::any_of(s.points.begin(), s.points.end(),
                               [&](const SlicePoint& p) { return p.strike == r.strike; });
        if (dup) {
            s.duplicate_strikes.push_back(r.strike);
            continue;
        }
        s.points.push_back({r.strike, 0.0, r.implied_vol});
    }
    if (s.points.size() < 3) {
        std::ostringstream os;
        os << "expiry " << format_date(expiry) << " has " << s.points.size()
           << " distinct strikes; at least 3 are required";
        throw InvalidArgument(os.str());
    }
    for (auto& p : s.points) p.moneyness = s.spot / p.strike;
    std::sort(s.points.begin(), s.points.end(),
              [](const SlicePoint& a, const SlicePoint& b) { return a.moneyness < b.moneyness; });
    for (std::size_t i = 1; i < s.points.size(); ++i)
        if (!(s.points[i - 1].moneyness < s.points[i].moneyness))
            throw InvalidArgument("strikes collapse to duplicate moneyness values");
    s.tau = year_fraction(s.quote_date, s.expiry);

    const SlicePoint* best = &s.points.front();
    for (const auto& p : s.points) {
        if (p.iv < best->iv) {
            best = &p;
        } else if (p.iv == best->iv) {
            double dp = std::abs(p.moneyness - 1.0), db = std::abs(best->moneyness - 1.0);
            if (dp < db || (dp == db && p.strike < best->strike)) best = &p;
        }
    }
    s.k_min = best->strike;
    return s;
}

std::vector<OptionQuoteRow> slice_rows(const QuoteSlice& slice) {
    std::vector<OptionQuoteRow> rows;
    rows.reserve(slice.points.size());
    for (const auto& p : slice.points)
        rows.push_back({slice.ticker, slice.quote_date, slice.expiry, p.strike, p.iv, slice.spot,
                        slice.rate});
    return rows;
}

std::vector<SliceKey> slice_keys(const std::vector<OptionQuoteRow>& rows) {
    std::vector<SliceKey> keys;
    for (const auto& r : rows) {
        SliceKey k{r.ticker, r.expiry};
        if (std::find(keys.begin(), keys.end(), k) == keys.end()) keys.push_back(std::move(k));
    }
    return keys;
}

std::vector<OptionQuoteRow> filter_ticker(const std::vector<OptionQuoteRow>& rows,
                                          const std::string& ticker) {
    std::vector<OptionQuoteRow> out;
    std::copy_if(rows.begin(), rows.end(), std::back_inserter(out),
                 [&](const OptionQuoteRow& r) { return r.ticker == ticker; });
    return out;
}

}  // namespace adsvol::marketdata
