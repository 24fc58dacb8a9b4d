#pragma once

#include <cstdint>
#include <filesystem>
#include <istream>
#include <stdexcept>
#include <utility>
#include <vector>

namespace platoon {

struct HourlyCounts {
    int hour_of_day = 0;
    double vehicles_per_hour = 0.0;
};

/// Malformed input file; the message carries the 1-based line number.
class ParseError : public std::runtime_error {
public:
    ParseError(std::size_t line, const std::string& what)
        : std::runtime_error("line " + std::to_string(line) + ": " + what), line_(line) {}

    std::size_t line() const { return line_; }

private:
    std::size_t line_;
};

/// Arrivals per step: vehicles_per_hour * stop_fraction * step_seconds / 3600.
double to_lambda(const HourlyCounts& counts, double stop_fraction, double step_seconds);

/// Reads `hour,count` CSV. Whitespace around fields is ignored; duplicate
/// hours are rejected.
std::vector<HourlyCounts> parse_counts_csv(std::istream& in);
std::vector<HourlyCounts> parse_counts_csv(const std::filesystem::path& path);

/// Reads `count,probability` CSV for an arbitrary arrival pmf.
std::vector<std::pair<std::int64_t, double>> parse_pmf_csv(std::istream& in);
std::vector<std::pair<std::int64_t, double>> parse_pmf_csv(const std::filesystem::path& path);

}  // namespace platoon
