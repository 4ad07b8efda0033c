// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace copilot::text {

std::string to_lower(std::string_view s);
std::string_view trim(std::string_view s);
std::vector<std::string> split(std::string_view s, char sep);
std::vector<std::string> split_lines(std::string_view s);
std::string join(const std::vector<std::string>& parts, std::string_view sep);

bool contains_ci(std::string_view haystack, std::string_view needle);
bool is_ident_char(char c) noexcept;

/// Substring occurrence where both neighbours (if any) are non-identifier characters.
bool contains_at_ident_boundary(std::string_view haystack, std::string_view needle);

/// Lowercased alphanumeric runs; everything else separates. Keeps formula tokens
/// such as "TiO2" intact as "tio2".
std::vector<std::string> tokenize(std::string_view s);

/// First decimal number (optionally signed, optionally fractional) in the text.
std::optional<std::string> first_number(std::string_view s);

std::string replace_all(std::string s, std::string_view from, std::string_view to);

/// Fixed-point rendering with the given number of decimals.
std::string fixed(double value, int decimals);

} // namespace copilot::text
