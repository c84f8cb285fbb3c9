#ifndef EFFIMETRICS_CSV_IO_HPP
#define EFFIMETRICS_CSV_IO_HPP

// Price CSV files: header `date,close`, ISO-8601 dates, ascending rows.

#include <charconv>
#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <istream>
#include <ostream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "effimetrics/timeseries.hpp"

namespace effimetrics {

class CsvError : public std::runtime_error {
public:
    CsvError(const std::string& source, std::size_t line, const std::string& what)
        : std::runtime_error(source + ":" + std::to_string(line) + ": " + what), line_(line)
    {
    }

    std::size_t line() const { return line_; }

private:
    std::size_t line_;
};

namespace detail {

inline std::string_view trim(std::string_view s)
{
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) {
        s.remove_prefix(1);
    }
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) {
        s.remove_suffix(1);
    }
    return s;
}

template <typename T>
bool parse_number(std::string_view s, T& out)
{
    const auto* end = s.data() + s.size();
    const auto [ptr, ec] = std::from_chars(s.data(), end, out);
    return ec == std::errc{} && ptr == end;
}

}  // namespace detail

/// Parses YYYY-MM-DD; throws std::invalid_argument otherwise.
inline Date parse_date(std::string_view s)
{
    s = detail::trim(s);
    int y = 0;
    unsigned m = 0, d = 0;
    if (s.size() != 10 || s[4] != '-' || s[7] != '-' || !detail::parse_number(s.substr(0, 4), y) ||
        !detail::parse_number(s.substr(5, 2), m) || !detail::parse_number(s.substr(8, 2), d)) {
        throw std::invalid_argument("malformed date '" + std::string(s) + "'");
    }
    const Date date{std::chrono::year{y}, std::chrono::month{m}, std::chrono::day{d}};
    if (!date.ok()) {
        throw std::invalid_argument("invalid calendar date '" + std::string(s) + "'");
    }
    return date;
}

inline PriceSeries read_price_csv(std::istream& in, const std::string& market_id,
                                  const std::string& source = "<stream>")
{
    std::string line;
    std::size_t lineno = 0;
    if (!std::getline(in, line)) {
        throw CsvError(source, 1, "empty file, expected header 'date,close'");
    }
    ++lineno;
    if (detail::trim(line) != "date,close") {
        throw CsvError(source, lineno, "expected header 'date,close'");
    }
    std::vector<PriceSeries::Observation> obs;
    while (std::getline(in, line)) {
        ++lineno;
        const std::string_view row = detail::trim(line);
        if (row.empty()) {
            continue;
        }
        const auto comma = row.find(',');
        if (comma == std::string_view::npos || row.find(',', comma + 1) != std::string_view::npos) {
            throw CsvError(source, lineno, "expected two fields 'date,close'");
        }
        PriceSeries::Observation o{};
        try {
            o.date = parse_date(row.substr(0, comma));
        } catch (const std::invalid_argument& e) {
            throw CsvError(source, lineno, e.what());
        }
        const std::string_view close = detail::trim(row.substr(comma + 1));
        if (!detail::parse_number(close, o.price)) {
            throw CsvError(source, lineno, "malformed close '" + std::string(close) + "'");
        }
        if (!(o.price > 0.0)) {
            throw CsvError(source, lineno, "non-positive close on " + format_date(o.date));
        }
        if (!obs.empty() && !(obs.back().date < o.date)) {
            throw CsvError(source, lineno, "dates not strictly ascending at " + format_date(o.date));
        }
        obs.push_back(o);
    }
    if (obs.size() < 2) {
        throw CsvError(source, lineno, "need at least 2 price rows");
    }
    return PriceSeries(market_id, std::move(obs));
}

/// Reads a price file; the market id is the file stem.
inline PriceSeries ingest_csv(const std::filesystem::path& path)
{
    std::ifstream in(path);
    if (!in) {
        throw std::runtime_error("cannot open '" + path.string() + "'");
    }
    return read_price_csv(in, path.stem().string(), path.string());
}

/// Shortest round-trip decimal form of a double.
inline std::string format_double(double v)
{
    char buf[32];
    const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
    if (ec != std::errc{}) {
        throw std::runtime_error("cannot format number");
    }
    return std::string(buf, ptr);
}

inline void write_price_csv(std::ostream& out, const PriceSeries& prices)
{
    out << "date,close\n";
    for (const auto& o : prices.observations()) {
        out << format_date(o.date) << ',' << format_double(o.price) << '\n';
    }
}

inline void write_price_csv(const std::filesystem::path& path, const PriceSeries& prices)
{
    std::ofstream out(path);
    if (!out) {
        throw std::runtime_error("cannot write '" + path.string() + "'");
    }
    write_price_csv(out, prices);
    if (!out) {
        throw std::runtime_error("failed writing '" + path.string() + "'");
    }
}

}  // namespace effimetrics

#endif
