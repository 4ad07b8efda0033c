// SPDX-License-Identifier: Apache-2.0
#include "copilot/dataplane/dataplane.hpp"

#include "copilot/core/error.hpp"
#include "copilot/core/log.hpp"

#include <algorithm>

namespace fs = std::filesystem;

namespace copilot::dataplane {

namespace {

const std::string kMetaPrefix = "meta/";
const std::string kSeenPrefix = "crawl/seen/";

std::string object_key(const std::string& record_id, const std::string& name)
{
    bool plain = std::all_of(record_id.begin(), record_id.end(), [](char c) {
        return std::isalnum(static_cast<unsigned char>(c)) || c == '-' || c == '_' || c == '.';
    }) && record_id != "." && record_id != "..";
    return "records/" + (plain ? record_id : sha256_hex(record_id).substr(0, 24)) + "/" + name;
}

IndexEntry entry_for(const StoredRecord& r)
{
    std::string text = r.metadata.searchable_text();
    for (const auto& [name, ref] : r.files) {
        (void)ref;
        text += "\n" + name;
    }
    return make_index_entry(r.metadata.record_id, text);
}

} // namespace

Json stored_record_to_json(const StoredRecord& r)
{
    Json files = Json::array();
    for (const auto& [name, ref] : r.files)
        files.push_back({{"name", name}, {"key", ref.key}, {"hash", ref.hash}, {"size", ref.size}});
    return Json{{"metadata", metadata_to_json(r.metadata)},
                {"files", files},
                {"ingest_seq", r.ingest_seq},
                {"ingested_at", r.ingested_at}};
}

StoredRecord stored_record_from_json(const Json& j)
{
    StoredRecord r;
    r.metadata = metadata_from_json(j.at("metadata"));
    for (const auto& f : j.at("files"))
        r.files.emplace_back(f.at("name").get<std::string>(),
                             ObjectRef{f.at("key").get<std::string>(), f.at("hash").get<std::string>(),
                                       f.at("size").get<std::uint64_t>()});
    r.ingest_seq = j.value("ingest_seq", std::uint64_t{0});
    r.ingested_at = j.value("ingested_at", std::string{});
    return r;
}

DataPlane::DataPlane(std::shared_ptr<KvStore> kv, std::shared_ptr<ObjectStore> objects, IndexQueue::Mode mode)
    : kv_(std::move(kv)), objects_(std::move(objects)), queue_(index_, mode)
{
    if (!kv_ || !objects_)
        throw Error(ErrorKind::InvalidArgument, "data plane needs a KV store and an object store");
    reindex();
}

void DataPlane::reindex()
{
    for (const auto& key : kv_->keys(kMetaPrefix)) {
        auto raw = kv_->get(key);
        if (!raw)
            continue;
        try {
            auto rec = stored_record_from_json(Json::parse(*raw));
            seq_ = std::max<std::uint64_t>(seq_, rec.ingest_seq);
            queue_.enqueue_upsert(entry_for(rec));
        } catch (const std::exception& e) {
            log::warn("dataplane: skipping unreadable record ", key, ": ", e.what());
        }
    }
}

std::string DataPlane::ingest_package(const DataPackage& pkg)
{
    std::lock_guard lk(write_mu_);
    const auto& id = pkg.metadata.record_id;
    if (id.empty())
        throw Error(ErrorKind::Validation, "missing record id");
    const auto meta_key = kMetaPrefix + id;
    if (kv_->get(meta_key))
        throw Error(ErrorKind::AlreadyExists, "record '" + id + "' already ingested");

    StoredRecord rec;
    rec.metadata = pkg.metadata;
    std::vector<std::string> written;
    try {
        for (const auto& f : pkg.files) {
            auto key = object_key(id, f.name);
            written.push_back(key);
            rec.files.emplace_back(f.name, objects_->put(key, f.data));
        }
        rec.ingest_seq = seq_ + 1;
        rec.ingested_at = format_timestamp(Clock::now());
        kv_->put(meta_key, stored_record_to_json(rec).dump());
    } catch (...) {
        for (const auto& key : written) {
            try {
                objects_->erase(key);
            } catch (...) {
            }
        }
        try {
            kv_->erase(meta_key);
        } catch (...) {
        }
        throw;
    }
    seq_ = rec.ingest_seq;
    queue_.enqueue_upsert(entry_for(rec));
    log::info("dataplane: ingested ", id, " (", rec.files.size(), " files)");
    return id;
}

std::vector<SearchHit> DataPlane::keyword_search(std::string_view query, std::size_t k) const
{
    return index_.search(query, k);
}

std::optional<StoredRecord> DataPlane::record(const std::string& record_id) const
{
    auto raw = kv_->get(kMetaPrefix + record_id);
    if (!raw)
        return std::nullopt;
    return stored_record_from_json(Json::parse(*raw));
}

std::vector<std::string> DataPlane::record_ids() const
{
    std::vector<std::string> out;
    for (const auto& key : kv_->keys(kMetaPrefix))
        out.push_back(key.substr(kMetaPrefix.size()));
    return out;
}

Bytes DataPlane::fetch_file(const std::string& record_id, const std::string& name) const
{
    auto rec = record(record_id);
    if (!rec)
        throw Error(ErrorKind::NotFound, "unknown record '" + record_id + "'");
    for (const auto& [n, ref] : rec->files)
        if (n == name)
            return objects_->fetch(ref);
    throw Error(ErrorKind::NotFound, "record '" + record_id + "' has no file '" + name + "'");
}

std::string package_content_hash(const fs::path& container)
{
    if (!fs::is_directory(container))
        return sha256_hex(read_file(container));
    std::vector<std::pair<std::string, fs::path>> files;
    for (auto it = fs::recursive_directory_iterator(container); it != fs::recursive_directory_iterator(); ++it)
        if (it->is_regular_file() && !it->is_symlink())
            files.emplace_back(fs::relative(it->path(), container).generic_string(), it->path());
    std::sort(files.begin(), files.end());
    std::string material;
    for (const auto& [rel, path] : files) {
        auto data = read_file(path);
        material += rel;
        material.push_back('\0');
        material += std::to_string(data.size());
        material.push_back('\0');
        material += data;
    }
    return sha256_hex(material);
}

std::vector<std::string> crawl_source(DataPlane& plane, const fs::path& root)
{
    std::vector<std::string> ingested;
    std::error_code ec;
    if (!fs::is_directory(root, ec))
        throw Error(ErrorKind::Precondition, "crawl source is not a readable directory: " + root.string());

    std::vector<fs::path> candidates;
    for (auto it = fs::directory_iterator(root, ec); !ec && it != fs::directory_iterator(); it.increment(ec)) {
        const auto& p = it->path();
        if (p.filename().string().front() == '.')
            continue;
        if (it->is_directory() || (it->is_regular_file() && p.extension() == ".tar"))
            candidates.push_back(p);
    }
    std::sort(candidates.begin(), candidates.end());

    for (const auto& c : candidates) {
        try {
            auto hash = package_content_hash(c);
            if (plane.kv().get(kSeenPrefix + hash))
                continue;
            auto pkg = validate_package(c);
            auto id = plane.ingest_package(pkg);
            plane.kv().put(kSeenPrefix + hash, id);
            ingested.push_back(id);
        } catch (const std::exception& e) {
            log::warn("crawler: skipping ", c.string(), ": ", e.what());
        }
    }
    return ingested;
}

Crawler::Crawler(DataPlane& plane, fs::path root, std::chrono::milliseconds interval)
    : plane_(plane), root_(std::move(root)), interval_(interval)
{
}

Crawler::~Crawler() { stop(); }

std::vector<std::string> Crawler::tick()
{
    try {
        return crawl_source(plane_, root_);
    } catch (const std::exception& e) {
        log::warn("crawler: tick failed: ", e.what());
        return {};
    }
}

void Crawler::start()
{
    std::lock_guard lk(mu_);
    if (running_)
        return;
    running_ = true;
    thread_ = std::thread([this] {
        std::unique_lock lk(mu_);
        while (running_) {
            lk.unlock();
            tick();
            lk.lock();
            cv_.wait_for(lk, interval_, [&] { return !running_; });
        }
    });
}

void Crawler::stop()
{
    {
        std::lock_guard lk(mu_);
        running_ = false;
    }
    cv_.notify_all();
    if (thread_.joinable())
        thread_.join();
}

} // namespace copilot::dataplane
