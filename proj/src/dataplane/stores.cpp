// SPDX-License-Identifier: Apache-2.0
#include "copilot/dataplane/stores.hpp"

#include "copilot/core/error.hpp"

#include <algorithm>

namespace fs = std::filesystem;

namespace copilot::dataplane {

namespace {

std::string hex_encode(std::string_view s)
{
    static const char* digits = "0123456789abcdef";
    std::string out;
    out.reserve(s.size() * 2);
    for (unsigned char c : s) {
        out.push_back(digits[c >> 4]);
        out.push_back(digits[c & 15]);
    }
    return out;
}

std::string hex_decode(std::string_view s)
{
    auto val = [](char c) { return c <= '9' ? c - '0' : c - 'a' + 10; };
    std::string out;
    for (std::size_t i = 0; i + 1 < s.size(); i += 2)
        out.push_back(static_cast<char>(val(s[i]) * 16 + val(s[i + 1])));
    return out;
}

bool has_prefix(const std::string& s, const std::string& p) { return s.compare(0, p.size(), p) == 0; }

} // namespace

std::optional<std::string> MemoryKvStore::get(const std::string& key) const
{
    std::shared_lock lk(mu_);
    auto it = data_.find(key);
    if (it == data_.end())
        return std::nullopt;
    return it->second;
}

void MemoryKvStore::put(const std::string& key, const std::string& value)
{
    std::unique_lock lk(mu_);
    data_[key] = value;
}

void MemoryKvStore::erase(const std::string& key)
{
    std::unique_lock lk(mu_);
    data_.erase(key);
}

std::vector<std::string> MemoryKvStore::keys(const std::string& prefix) const
{
    std::shared_lock lk(mu_);
    std::vector<std::string> out;
    for (auto it = data_.lower_bound(prefix); it != data_.end() && has_prefix(it->first, prefix); ++it)
        out.push_back(it->first);
    return out;
}

FsKvStore::FsKvStore(fs::path dir) : dir_(std::move(dir))
{
    fs::create_directories(dir_);
}

std::optional<std::string> FsKvStore::get(const std::string& key) const
{
    std::shared_lock lk(mu_);
    auto p = dir_ / hex_encode(key);
    std::error_code ec;
    if (!fs::exists(p, ec))
        return std::nullopt;
    return read_file(p);
}

void FsKvStore::put(const std::string& key, const std::string& value)
{
    std::unique_lock lk(mu_);
    write_file_atomic(dir_ / hex_encode(key), value);
}

void FsKvStore::erase(const std::string& key)
{
    std::unique_lock lk(mu_);
    std::error_code ec;
    fs::remove(dir_ / hex_encode(key), ec);
}

std::vector<std::string> FsKvStore::keys(const std::string& prefix) const
{
    std::shared_lock lk(mu_);
    std::vector<std::string> out;
    for (const auto& e : fs::directory_iterator(dir_)) {
        auto name = e.path().filename().string();
        if (name.find('.') != std::string::npos)
            continue;  // temporaries from atomic writes
        auto key = hex_decode(name);
        if (has_prefix(key, prefix))
            out.push_back(std::move(key));
    }
    std::sort(out.begin(), out.end());
    return out;
}

Bytes ObjectStore::fetch(const ObjectRef& ref) const
{
    auto data = get(ref.key);
    if (data.size() != ref.size || sha256_hex(data) != ref.hash)
        throw Error(ErrorKind::Validation, "object '" + ref.key + "' failed its integrity check");
    return data;
}

FsObjectStore::FsObjectStore(fs::path prefix) : prefix_(fs::absolute(std::move(prefix)))
{
    fs::create_directories(prefix_);
}

fs::path FsObjectStore::resolve(const std::string& key) const
{
    if (key.empty() || key.front() == '/')
        throw Error(ErrorKind::InvalidArgument, "invalid object key '" + key + "'");
    auto p = prefix_ / key;
    if (!path_within(prefix_, p) || p.lexically_normal() == prefix_.lexically_normal())
        throw Error(ErrorKind::InvalidArgument, "object key escapes the store prefix: '" + key + "'");
    return p;
}

ObjectRef FsObjectStore::put(const std::string& key, std::string_view data)
{
    write_file_atomic(resolve(key), data);
    return {key, sha256_hex(data), data.size()};
}

Bytes FsObjectStore::get(const std::string& key) const
{
    auto p = resolve(key);
    std::error_code ec;
    if (!fs::is_regular_file(p, ec))
        throw Error(ErrorKind::NotFound, "no object '" + key + "'");
    return read_file(p);
}

bool FsObjectStore::exists(const std::string& key) const
{
    std::error_code ec;
    return fs::is_regular_file(resolve(key), ec);
}

void FsObjectStore::erase(const std::string& key)
{
    std::error_code ec;
    fs::remove(resolve(key), ec);
}

std::vector<std::string> FsObjectStore::list(const std::string& prefix) const
{
    std::vector<std::string> out;
    std::error_code ec;
    for (auto it = fs::recursive_directory_iterator(prefix_, ec); !ec && it != fs::recursive_directory_iterator();
         it.increment(ec)) {
        if (!it->is_regular_file())
            continue;
        auto key = fs::relative(it->path(), prefix_).generic_string();
        if (key.find(".tmp-") != std::string::npos)
            continue;
        if (has_prefix(key, prefix))
            out.push_back(std::move(key));
    }
    std::sort(out.begin(), out.end());
    return out;
}

ObjectRef MemoryObjectStore::put(const std::string& key, std::string_view data)
{
    std::lock_guard lk(mu_);
    data_[key] = Bytes(data);
    return {key, sha256_hex(data), data.size()};
}

Bytes MemoryObjectStore::get(const std::string& key) const
{
    std::lock_guard lk(mu_);
    auto it = data_.find(key);
    if (it == data_.end())
        throw Error(ErrorKind::NotFound, "no object '" + key + "'");
    return it->second;
}

bool MemoryObjectStore::exists(const std::string& key) const
{
    std::lock_guard lk(mu_);
    return data_.count(key) != 0;
}

void MemoryObjectStore::erase(const std::string& key)
{
    std::lock_guard lk(mu_);
    data_.erase(key);
}

std::vector<std::string> MemoryObjectStore::list(const std::string& prefix) const
{
    std::lock_guard lk(mu_);
    std::vector<std::string> out;
    for (auto it = data_.lower_bound(prefix); it != data_.end() && has_prefix(it->first, prefix); ++it)
        out.push_back(it->first);
    return out;
}

std::size_t MemoryObjectStore::size() const
{
    std::lock_guard lk(mu_);
    return data_.size();
}

void FaultyKvStore::put(const std::string& key, const std::string& value)
{
    if (remaining_.fetch_sub(1) <= 0)
        throw Error(ErrorKind::Io, "injected KV write failure for '" + key + "'");
    inner_->put(key, value);
}

ObjectRef FaultyObjectStore::put(const std::string& key, std::string_view data)
{
    if (remaining_.fetch_sub(1) <= 0)
        throw Error(ErrorKind::Io, "injected object write failure for '" + key + "'");
    return inner_->put(key, data);
}

} // namespace copilot::dataplane
