// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <string>
#include <vector>

namespace copilot::tar {

struct Entry {
    std::string name;
    std::string data;
};

/// POSIX ustar archive of regular files. Names must fit the 100-byte name field.
std::string write(const std::vector<Entry>& entries);

/// Reads regular-file entries; throws Error(Parse) on bad checksums or truncation.
std::vector<Entry> read(const std::string& archive);

} // namespace copilot::tar
