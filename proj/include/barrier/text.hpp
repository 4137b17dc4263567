#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace barrier::text {

std::string_view trim(std::string_view s);
std::string to_lower(std::string_view s);
bool iequals(std::string_view a, std::string_view b);
std::vector<std::string> split(std::string_view s, char sep);

/// Shortest decimal form that parses back to the identical double.
std::string format_double(double value);
/// Fixed-point form with `decimals` places.
std::string format_fixed(double value, int decimals);

/// Full-string parse; nullopt on trailing junk or empty input. May return
/// inf/nan when spelled that way; callers check finiteness.
std::optional<double> parse_double(std::string_view s);
std::optional<long long> parse_int(std::string_view s);
std::optional<bool> parse_bool(std::string_view s);

}  // namespace barrier::text
