#ifndef FAIRCEPTRON_UTIL_H_
#define FAIRCEPTRON_UTIL_H_

#include <chrono>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

namespace fairceptron {

// Shortest decimal representation that parses back to the same double.
std::string FormatDouble(double value);

// Empty string for nullopt; used for CSV cells of inapplicable measures.
std::string FormatOptional(const std::optional<double>& value);

// Strict full-string parse; nullopt on any trailing garbage.
std::optional<double> ParseDouble(std::string_view text);
std::optional<std::int64_t> ParseInt(std::string_view text);

using Timestamp = std::chrono::time_point<std::chrono::system_clock,
                                          std::chrono::milliseconds>;

// ISO-8601 UTC with millisecond precision, e.g. 2026-10-15T08:30:00.250Z.
std::string FormatTimestamp(Timestamp t);
std::optional<Timestamp> ParseTimestamp(std::string_view text);

Timestamp NowUtc();

// 64-bit FNV-1a, rendered as 16 lowercase hex digits.
std::string Fnv1aHex(std::string_view data);

}  // namespace fairceptron

#endif  // FAIRCEPTRON_UTIL_H_
