// SPDX-License-Identifier: Apache-2.0
#include "copilot/dataplane/index.hpp"

#include "copilot/core/error.hpp"
#include "copilot/core/text.hpp"

#include <algorithm>
#include <cmath>
#include <set>

namespace copilot::dataplane {

IndexEntry make_index_entry(const std::string& record_id, std::string_view text)
{
    IndexEntry e{record_id, {}};
    for (auto& t : text::tokenize(text))
        ++e.terms[t];
    return e;
}

void InvertedIndex::remove_locked(const std::string& record_id)
{
    auto it = docs_.find(record_id);
    if (it == docs_.end())
        return;
    for (const auto& [term, tf] : it->second) {
        (void)tf;
        auto p = postings_.find(term);
        if (p == postings_.end())
            continue;
        p->second.erase(record_id);
        if (p->second.empty())
            postings_.erase(p);
    }
    docs_.erase(it);
}

void InvertedIndex::upsert(IndexEntry entry)
{
    std::unique_lock lk(mu_);
    remove_locked(entry.record_id);
    for (const auto& [term, tf] : entry.terms)
        postings_[term][entry.record_id] = tf;
    docs_[entry.record_id] = std::move(entry.terms);
}

void InvertedIndex::remove(const std::string& record_id)
{
    std::unique_lock lk(mu_);
    remove_locked(record_id);
}

std::vector<SearchHit> InvertedIndex::search(std::string_view query, std::size_t k) const
{
    if (k < 1)
        throw Error(ErrorKind::InvalidArgument, "keyword_search needs k >= 1");
    auto tokens = text::tokenize(query);
    std::set<std::string> terms(tokens.begin(), tokens.end());

    std::shared_lock lk(mu_);
    const double n = static_cast<double>(docs_.size());
    std::map<std::string, double> scores;
    for (const auto& term : terms) {
        auto p = postings_.find(term);
        if (p == postings_.end())
            continue;
        double idf = std::log(1.0 + n / static_cast<double>(p->second.size()));
        for (const auto& [id, tf] : p->second)
            scores[id] += tf * idf;
    }
    lk.unlock();

    std::vector<SearchHit> hits;
    for (const auto& [id, score] : scores)
        if (score > 0)
            hits.push_back({id, score});
    std::sort(hits.begin(), hits.end(), [](const SearchHit& a, const SearchHit& b) {
        return a.score != b.score ? a.score > b.score : a.record_id < b.record_id;
    });
    if (hits.size() > k)
        hits.resize(k);
    return hits;
}

bool InvertedIndex::contains(const std::string& record_id) const
{
    std::shared_lock lk(mu_);
    return docs_.count(record_id) != 0;
}

std::size_t InvertedIndex::size() const
{
    std::shared_lock lk(mu_);
    return docs_.size();
}

IndexQueue::IndexQueue(InvertedIndex& index, Mode mode) : index_(index), mode_(mode)
{
    if (mode_ == Mode::Async)
        worker_ = std::thread([this] { run(); });
}

IndexQueue::~IndexQueue()
{
    {
        std::lock_guard lk(mu_);
        stopping_ = true;
    }
    cv_.notify_all();
    if (worker_.joinable())
        worker_.join();
}

void IndexQueue::enqueue_upsert(IndexEntry entry)
{
    if (mode_ == Mode::Sync) {
        index_.upsert(std::move(entry));
        return;
    }
    {
        std::lock_guard lk(mu_);
        events_.push_back([this, e = std::move(entry)]() mutable { index_.upsert(std::move(e)); });
    }
    cv_.notify_one();
}

void IndexQueue::enqueue_remove(std::string record_id)
{
    if (mode_ == Mode::Sync) {
        index_.remove(record_id);
        return;
    }
    {
        std::lock_guard lk(mu_);
        events_.push_back([this, id = std::move(record_id)] { index_.remove(id); });
    }
    cv_.notify_one();
}

void IndexQueue::flush()
{
    std::unique_lock lk(mu_);
    drained_.wait(lk, [&] { return events_.empty() && in_flight_ == 0; });
}

void IndexQueue::run()
{
    std::unique_lock lk(mu_);
    for (;;) {
        cv_.wait(lk, [&] { return stopping_ || !events_.empty(); });
        if (events_.empty() && stopping_)
            return;
        auto ev = std::move(events_.front());
        events_.pop_front();
        ++in_flight_;
        lk.unlock();
        ev();
        lk.lock();
        --in_flight_;
        if (events_.empty() && in_flight_ == 0)
            drained_.notify_all();
    }
}

} // namespace copilot::dataplane
