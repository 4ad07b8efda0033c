// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "copilot/dataplane/index.hpp"
#include "copilot/dataplane/metadata.hpp"
#include "copilot/dataplane/stores.hpp"

#include <atomic>
#include <chrono>
#include <filesystem>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <thread>
#include <vector>

namespace copilot::dataplane {

struct StoredRecord {
    MetadataRecord metadata;
    std::vector<std::pair<std::string, ObjectRef>> files;  // payload name -> object
    std::uint64_t ingest_seq = 0;
    std::string ingested_at;
};

Json stored_record_to_json(const StoredRecord& r);
StoredRecord stored_record_from_json(const Json& j);

class DataPlane {
public:
    DataPlane(std::shared_ptr<KvStore> kv, std::shared_ptr<ObjectStore> objects,
              IndexQueue::Mode mode = IndexQueue::Mode::Sync);

    /// Atomic from a searcher's perspective: on any store failure every write
    /// is rolled back and the error rethrown. Throws Error(AlreadyExists) for a
    /// record id already present.
    std::string ingest_package(const DataPackage& pkg);

    std::vector<SearchHit> keyword_search(std::string_view query, std::size_t k) const;
    std::optional<StoredRecord> record(const std::string& record_id) const;
    std::vector<std::string> record_ids() const;
    Bytes fetch_file(const std::string& record_id, const std::string& name) const;

    /// Rebuilds the index from the KV store, e.g. after a restart.
    void reindex();
    void flush_index() { queue_.flush(); }

    KvStore& kv() { return *kv_; }
    ObjectStore& objects() { return *objects_; }
    const ObjectStore& objects() const { return *objects_; }

private:
    std::shared_ptr<KvStore> kv_;
    std::shared_ptr<ObjectStore> objects_;
    InvertedIndex index_;
    IndexQueue queue_;
    std::mutex write_mu_;
    std::atomic<std::uint64_t> seq_{0};
};

/// Content hash of a package container. Archives hash their bytes; directories
/// hash sorted relative paths and contents, so the container's own name never counts.
std::string package_content_hash(const std::filesystem::path& container);

/// One crawl tick over a drop folder or mounted share. Each immediate child that
/// is a directory or a .tar archive is a package; packages whose content hash was
/// already seen are skipped, unreadable or invalid ones are logged and skipped.
std::vector<std::string> crawl_source(DataPlane& plane, const std::filesystem::path& root);

/// Runs crawl_source on a fixed interval in a background thread.
class Crawler {
public:
    Crawler(DataPlane& plane, std::filesystem::path root, std::chrono::milliseconds interval);
    ~Crawler();
    void start();
    void stop();
    std::vector<std::string> tick();

private:
    DataPlane& plane_;
    std::filesystem::path root_;
    std::chrono::milliseconds interval_;
    std::mutex mu_;
    std::condition_variable cv_;
    bool running_ = false;
    std::thread thread_;
};

} // namespace copilot::dataplane
