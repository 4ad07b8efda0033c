// SPDX-License-Identifier: Apache-2.0
#include "copilot/core/tar.hpp"

#include "copilot/core/error.hpp"

#include <cstdio>
#include <cstring>

namespace copilot::tar {

namespace {

constexpr std::size_t kBlock = 512;

void put_octal(char* field, std::size_t width, unsigned long long value)
{
    std::snprintf(field, width, "%0*llo", static_cast<int>(width - 1), value);
}

unsigned long long parse_octal(const char* field, std::size_t width)
{
    unsigned long long v = 0;
    std::size_t i = 0;
    while (i < width && (field[i] == ' ' || field[i] == '\0'))
        ++i;
    for (; i < width && field[i] >= '0' && field[i] <= '7'; ++i)
        v = v * 8 + static_cast<unsigned long long>(field[i] - '0');
    return v;
}

unsigned checksum(const char* header)
{
    unsigned sum = 0;
    for (std::size_t i = 0; i < kBlock; ++i)
        sum += (i >= 148 && i < 156) ? static_cast<unsigned>(' ') : static_cast<unsigned char>(header[i]);
    return sum;
}

} // namespace

std::string write(const std::vector<Entry>& entries)
{
    std::string out;
    for (const auto& e : entries) {
        if (e.name.empty() || e.name.size() >= 100)
            throw Error(ErrorKind::InvalidArgument, "tar entry name must be 1..99 bytes: " + e.name);
        char header[kBlock];
        std::memset(header, 0, sizeof header);
        std::memcpy(header, e.name.data(), e.name.size());
        put_octal(header + 100, 8, 0644);
        put_octal(header + 108, 8, 0);
        put_octal(header + 116, 8, 0);
        put_octal(header + 124, 12, e.data.size());
        put_octal(header + 136, 12, 0);
        header[156] = '0';
        std::memcpy(header + 257, "ustar", 6);
        std::memcpy(header + 263, "00", 2);
        std::snprintf(header + 148, 8, "%06o", checksum(header));
        header[155] = ' ';
        out.append(header, kBlock);
        out += e.data;
        auto pad = (kBlock - e.data.size() % kBlock) % kBlock;
        out.append(pad, '\0');
    }
    out.append(2 * kBlock, '\0');
    return out;
}

std::vector<Entry> read(const std::string& archive)
{
    std::vector<Entry> entries;
    std::size_t off = 0;
    while (true) {
        if (off + kBlock > archive.size())
            throw Error(ErrorKind::Parse, "tar archive truncated");
        const char* header = archive.data() + off;
        bool all_zero = true;
        for (std::size_t i = 0; i < kBlock && all_zero; ++i)
            all_zero = header[i] == '\0';
        if (all_zero)
            break;
        auto stored = parse_octal(header + 148, 8);
        if (stored != checksum(header))
            throw Error(ErrorKind::Parse, "tar header checksum mismatch at offset " + std::to_string(off));
        std::string name(header, strnlen(header, 100));
        std::string prefix(header + 345, strnlen(header + 345, 155));
        if (!prefix.empty())
            name = prefix + "/" + name;
        auto size = parse_octal(header + 124, 12);
        char type = header[156];
        off += kBlock;
        if (off + size > archive.size())
            throw Error(ErrorKind::Parse, "tar entry '" + name + "' truncated");
        if (type == '0' || type == '\0')
            entries.push_back({name, archive.substr(off, size)});
        off += (size + kBlock - 1) / kBlock * kBlock;
    }
    return entries;
}

} // namespace copilot::tar
