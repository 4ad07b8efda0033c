// SPDX-License-Identifier: Apache-2.0
#include "copilot/core/text.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>

namespace copilot::text {

std::string to_lower(std::string_view s)
{
    std::string out(s);
    std::transform(out.begin(), out.end(), out.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return out;
}

std::string_view trim(std::string_view s)
{
    auto is_space = [](unsigned char c) { return std::isspace(c) != 0; };
    while (!s.empty() && is_space(s.front()))
        s.remove_prefix(1);
    while (!s.empty() && is_space(s.back()))
        s.remove_suffix(1);
    return s;
}

std::vector<std::string> split(std::string_view s, char sep)
{
    std::vector<std::string> out;
    std::size_t start = 0;
    while (true) {
        auto pos = s.find(sep, start);
        if (pos == std::string_view::npos) {
            out.emplace_back(s.substr(start));
            break;
        }
        out.emplace_back(s.substr(start, pos - start));
        start = pos + 1;
    }
    return out;
}

std::vector<std::string> split_lines(std::string_view s)
{
    auto lines = split(s, '\n');
    for (auto& line : lines)
        if (!line.empty() && line.back() == '\r')
            line.pop_back();
    return lines;
}

std::string join(const std::vector<std::string>& parts, std::string_view sep)
{
    std::string out;
    for (std::size_t i = 0; i < parts.size(); ++i) {
        if (i)
            out += sep;
        out += parts[i];
    }
    return out;
}

bool contains_ci(std::string_view haystack, std::string_view needle)
{
    if (needle.empty())
        return true;
    return to_lower(haystack).find(to_lower(needle)) != std::string::npos;
}

bool is_ident_char(char c) noexcept
{
    auto u = static_cast<unsigned char>(c);
    return std::isalnum(u) != 0 || c == '_';
}

bool contains_at_ident_boundary(std::string_view haystack, std::string_view needle)
{
    if (needle.empty())
        return false;
    std::size_t pos = 0;
    while ((pos = haystack.find(needle, pos)) != std::string_view::npos) {
        bool left_ok = pos == 0 || !is_ident_char(haystack[pos - 1]);
        auto end = pos + needle.size();
        bool right_ok = end >= haystack.size() || !is_ident_char(haystack[end]);
        if (left_ok && right_ok)
            return true;
        ++pos;
    }
    return false;
}

std::vector<std::string> tokenize(std::string_view s)
{
    std::vector<std::string> out;
    std::string current;
    for (char c : s) {
        auto u = static_cast<unsigned char>(c);
        if (std::isalnum(u)) {
            current.push_back(static_cast<char>(std::tolower(u)));
        } else if (!current.empty()) {
            out.push_back(std::move(current));
            current.clear();
        }
    }
    if (!current.empty())
        out.push_back(std::move(current));
    return out;
}

std::optional<std::string> first_number(std::string_view s)
{
    for (std::size_t i = 0; i < s.size(); ++i) {
        auto u = static_cast<unsigned char>(s[i]);
        if (!std::isdigit(u))
            continue;
        // Skip digits glued to letters, e.g. the "2" in "TiO2".
        if (i > 0 && std::isalpha(static_cast<unsigned char>(s[i - 1])))
            continue;
        std::size_t start = i;
        if (i > 0 && s[i - 1] == '-' && (i < 2 || !is_ident_char(s[i - 2])))
            start = i - 1;
        std::size_t end = i;
        while (end < s.size() && std::isdigit(static_cast<unsigned char>(s[end])))
            ++end;
        if (end + 1 < s.size() && s[end] == '.' && std::isdigit(static_cast<unsigned char>(s[end + 1]))) {
            ++end;
            while (end < s.size() && std::isdigit(static_cast<unsigned char>(s[end])))
                ++end;
        }
        return std::string(s.substr(start, end - start));
    }
    return std::nullopt;
}

std::string replace_all(std::string s, std::string_view from, std::string_view to)
{
    if (from.empty())
        return s;
    std::size_t pos = 0;
    while ((pos = s.find(from, pos)) != std::string::npos) {
        s.replace(pos, from.size(), to);
        pos += to.size();
    }
    return s;
}

std::string fixed(double value, int decimals)
{
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*f", decimals, value);
    return buf;
}

} // namespace copilot::text
