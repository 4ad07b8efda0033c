// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "copilot/core/util.hpp"

#include <atomic>
#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <shared_mutex>
#include <string>
#include <vector>

namespace copilot::dataplane {

class KvStore {
public:
    virtual ~KvStore() = default;
    virtual std::optional<std::string> get(const std::string& key) const = 0;
    virtual void put(const std::string& key, const std::string& value) = 0;
    virtual void erase(const std::string& key) = 0;
    virtual std::vector<std::string> keys(const std::string& prefix = {}) const = 0;
};

class MemoryKvStore : public KvStore {
public:
    std::optional<std::string> get(const std::string& key) const override;
    void put(const std::string& key, const std::string& value) override;
    void erase(const std::string& key) override;
    std::vector<std::string> keys(const std::string& prefix = {}) const override;

private:
    mutable std::shared_mutex mu_;
    std::map<std::string, std::string> data_;
};

/// One file per key under `dir`; file names are the hex encoding of the key.
class FsKvStore : public KvStore {
public:
    explicit FsKvStore(std::filesystem::path dir);
    std::optional<std::string> get(const std::string& key) const override;
    void put(const std::string& key, const std::string& value) override;
    void erase(const std::string& key) override;
    std::vector<std::string> keys(const std::string& prefix = {}) const override;

private:
    std::filesystem::path dir_;
    mutable std::shared_mutex mu_;
};

struct ObjectRef {
    std::string key;
    std::string hash;  // sha256 hex of the content
    std::uint64_t size = 0;

    bool operator==(const ObjectRef&) const = default;
};

class ObjectStore {
public:
    virtual ~ObjectStore() = default;
    virtual ObjectRef put(const std::string& key, std::string_view data) = 0;
    /// Throws Error(NotFound) for a missing key.
    virtual Bytes get(const std::string& key) const = 0;
    virtual bool exists(const std::string& key) const = 0;
    virtual void erase(const std::string& key) = 0;
    /// Keys under a prefix, sorted.
    virtual std::vector<std::string> list(const std::string& prefix = {}) const = 0;

    /// Fetches and checks the content hash; throws Error(Validation) on mismatch.
    Bytes fetch(const ObjectRef& ref) const;
};

/// Keys are relative slash-separated paths; anything escaping the prefix is rejected.
class FsObjectStore : public ObjectStore {
public:
    explicit FsObjectStore(std::filesystem::path prefix);
    ObjectRef put(const std::string& key, std::string_view data) override;
    Bytes get(const std::string& key) const override;
    bool exists(const std::string& key) const override;
    void erase(const std::string& key) override;
    std::vector<std::string> list(const std::string& prefix = {}) const override;
    const std::filesystem::path& prefix() const noexcept { return prefix_; }

private:
    std::filesystem::path resolve(const std::string& key) const;
    std::filesystem::path prefix_;
};

class MemoryObjectStore : public ObjectStore {
public:
    ObjectRef put(const std::string& key, std::string_view data) override;
    Bytes get(const std::string& key) const override;
    bool exists(const std::string& key) const override;
    void erase(const std::string& key) override;
    std::vector<std::string> list(const std::string& prefix = {}) const override;
    std::size_t size() const;

private:
    mutable std::mutex mu_;
    std::map<std::string, Bytes> data_;
};

/// Test doubles that start failing writes after a given number of successful ones.
class FaultyKvStore : public KvStore {
public:
    FaultyKvStore(std::shared_ptr<KvStore> inner, long fail_after_puts)
        : inner_(std::move(inner)), remaining_(fail_after_puts) {}
    std::optional<std::string> get(const std::string& key) const override { return inner_->get(key); }
    void put(const std::string& key, const std::string& value) override;
    void erase(const std::string& key) override { inner_->erase(key); }
    std::vector<std::string> keys(const std::string& prefix = {}) const override { return inner_->keys(prefix); }

private:
    std::shared_ptr<KvStore> inner_;
    std::atomic<long> remaining_;
};

class FaultyObjectStore : public ObjectStore {
public:
    FaultyObjectStore(std::shared_ptr<ObjectStore> inner, long fail_after_puts)
        : inner_(std::move(inner)), remaining_(fail_after_puts) {}
    ObjectRef put(const std::string& key, std::string_view data) override;
    Bytes get(const std::string& key) const override { return inner_->get(key); }
    bool exists(const std::string& key) const override { return inner_->exists(key); }
    void erase(const std::string& key) override { inner_->erase(key); }
    std::vector<std::string> list(const std::string& prefix = {}) const override { return inner_->list(prefix); }

private:
    std::shared_ptr<ObjectStore> inner_;
    std::atomic<long> remaining_;
};

} // namespace copilot::dataplane
