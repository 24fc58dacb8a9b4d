#include "platoon/ingest.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <set>
#include <string>
#include <string_view>

namespace platoon {

namespace {

std::string_view trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string_view::npos) {
        return {};
    }
    const auto last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
}

// Splits a two-column row; nothing else is accepted.
std::pair<std::string_view, std::string_view> split_row(std::string_view line, std::size_t lineno) {
    const auto comma = line.find(',');
    if (comma == std::string_view::npos || line.find(',', comma + 1) != std::string_view::npos) {
        throw ParseError(lineno, "expected exactly two comma-separated fields");
    }
    return {trim(line.substr(0, comma)), trim(line.substr(comma + 1))};
}

template <class T>
T parse_number(std::string_view field, std::size_t lineno, const char* what) {
    T value{};
    const auto* end = field.data() + field.size();
    const auto [ptr, ec] = std::from_chars(field.data(), end, value);
    if (field.empty() || ec != std::errc() || ptr != end) {
        throw ParseError(lineno, std::string(what) + " '" + std::string(field) + "' is not a number");
    }
    return value;
}

// Calls row(first, second, lineno) for each data row after checking the header.
template <class RowFn>
void read_two_column_csv(std::istream& in, std::string_view col1, std::string_view col2, RowFn row) {
    std::string line;
    std::size_t lineno = 0;
    bool header_seen = false;
    while (std::getline(in, line)) {
        ++lineno;
        if (trim(line).empty()) {
            continue;
        }
        const auto [a, b] = split_row(line, lineno);
        if (!header_seen) {
            if (a != col1 || b != col2) {
                throw ParseError(lineno, "expected header '" + std::string(col1) + "," +
                                             std::string(col2) + "'");
            }
            header_seen = true;
            continue;
        }
        row(a, b, lineno);
    }
    if (!header_seen) {
        throw ParseError(lineno == 0 ? 1 : lineno, "file is empty");
    }
}

std::ifstream open_or_throw(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw std::runtime_error("cannot open " + path.string());
    }
    return in;
}

}  // namespace

double to_lambda(const HourlyCounts& counts, double stop_fraction, double step_seconds) {
    if (!(stop_fraction >= 0.0 && stop_fraction <= 1.0)) {
        throw std::invalid_argument("stop fraction must lie in [0, 1]");
    }
    if (!(step_seconds > 0.0) || !std::isfinite(step_seconds)) {
        throw std::invalid_argument("step length must be positive");
    }
    if (!(counts.vehicles_per_hour >= 0.0)) {
        throw std::invalid_argument("hourly count must be nonnegative");
    }
    return counts.vehicles_per_hour * stop_fraction * step_seconds / 3600.0;
}

std::vector<HourlyCounts> parse_counts_csv(std::istream& in) {
    std::vector<HourlyCounts> out;
    std::set<int> hours;
    read_two_column_csv(in, "hour", "count", [&](std::string_view a, std::string_view b, std::size_t lineno) {
        const int hour = parse_number<int>(a, lineno, "hour");
        if (hour < 0 || hour > 23) {
            throw ParseError(lineno, "hour " + std::to_string(hour) + " outside 0-23");
        }
        const double count = parse_number<double>(b, lineno, "count");
        if (!(count >= 0.0) || !std::isfinite(count)) {
            throw ParseError(lineno, "count must be nonnegative");
        }
        if (!hours.insert(hour).second) {
            throw ParseError(lineno, "duplicate hour " + std::to_string(hour));
        }
        out.push_back({hour, count});
    });
    return out;
}

std::vector<HourlyCounts> parse_counts_csv(const std::filesystem::path& path) {
    auto in = open_or_throw(path);
    return parse_counts_csv(in);
}

std::vector<std::pair<std::int64_t, double>> parse_pmf_csv(std::istream& in) {
    std::vector<std::pair<std::int64_t, double>> out;
    read_two_column_csv(in, "count", "probability",
                        [&](std::string_view a, std::string_view b, std::size_t lineno) {
                            out.emplace_back(parse_number<std::int64_t>(a, lineno, "count"),
                                             parse_number<double>(b, lineno, "probability"));
                        });
    return out;
}

std::vector<std::pair<std::int64_t, double>> parse_pmf_csv(const std::filesystem::path& path) {
    auto in = open_or_throw(path);
    return parse_pmf_csv(in);
}

}  // namespace platoon
