// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <condition_variable>
#include <deque>
#include <functional>
#include <map>
#include <mutex>
#include <shared_mutex>
#include <string>
#include <thread>
#include <vector>

namespace copilot::dataplane {

struct IndexEntry {
    std::string record_id;
    std::map<std::string, int> terms;  // lowercase token -> frequency
};

IndexEntry make_index_entry(const std::string& record_id, std::string_view text);

struct SearchHit {
    std::string record_id;
    double score = 0;
};

/// score(d) = sum over distinct query terms t of tf(t, d) * ln(1 + N / df(t)).
class InvertedIndex {
public:
    void upsert(IndexEntry entry);
    void remove(const std::string& record_id);
    /// Throws Error(InvalidArgument) if k < 1.
    std::vector<SearchHit> search(std::string_view query, std::size_t k) const;
    bool contains(const std::string& record_id) const;
    std::size_t size() const;

private:
    void remove_locked(const std::string& record_id);

    mutable std::shared_mutex mu_;
    std::map<std::string, std::map<std::string, int>> docs_;
    std::map<std::string, std::map<std::string, int>> postings_;  // term -> record -> tf
};

/// Index events are applied inline (sync) or by a background worker (async).
class IndexQueue {
public:
    enum class Mode { Sync, Async };

    IndexQueue(InvertedIndex& index, Mode mode);
    ~IndexQueue();
    IndexQueue(const IndexQueue&) = delete;
    IndexQueue& operator=(const IndexQueue&) = delete;

    void enqueue_upsert(IndexEntry entry);
    void enqueue_remove(std::string record_id);
    /// Blocks until every event enqueued so far is applied.
    void flush();
    Mode mode() const noexcept { return mode_; }

private:
    void run();

    InvertedIndex& index_;
    Mode mode_;
    std::mutex mu_;
    std::condition_variable cv_;
    std::condition_variable drained_;
    std::deque<std::function<void()>> events_;
    std::size_t in_flight_ = 0;
    bool stopping_ = false;
    std::thread worker_;
};

} // namespace copilot::dataplane
