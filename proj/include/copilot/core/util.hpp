// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace copilot {

using Clock = std::chrono::system_clock;
using Timestamp = Clock::time_point;

/// RFC 3339 UTC with millisecond precision, e.g. 2025-01-01T00:00:00.000Z.
std::string format_timestamp(Timestamp t);
Timestamp parse_timestamp(std::string_view s);

/// Cryptographically random lowercase hex string of 2*bytes characters.
std::string random_hex(std::size_t bytes);

std::string sha256_hex(std::string_view data);

using Bytes = std::string;

Bytes read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, std::string_view data);

/// Writes to a sibling temporary then renames, so readers never see a partial file.
void write_file_atomic(const std::filesystem::path& path, std::string_view data);

/// True if `path` (after lexical normalization) lies inside `root`.
bool path_within(const std::filesystem::path& root, const std::filesystem::path& path);

} // namespace copilot
