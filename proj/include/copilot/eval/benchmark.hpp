// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "copilot/eval/endpoint.hpp"

#include <filesystem>
#include <map>
#include <string>
#include <vector>

namespace copilot::eval {

struct BenchmarkQuestion {
    std::string id;
    std::string question;
    std::string answer;  // answer key
    std::string topic;
};

/// Line-delimited JSON objects with id, question, answer and topic. Throws
/// Error(Parse) naming the line and field on malformed input.
std::vector<BenchmarkQuestion> parse_benchmark(std::string_view jsonl);
std::vector<BenchmarkQuestion> load_benchmark(const std::filesystem::path& path);

/// The part of a response compared with the key: text after the last "Answer:" line if any.
std::string extract_answer(std::string_view response);
/// Lowercased, whitespace-collapsed, surrounding brackets, quotes and final period removed.
std::string normalize_answer(std::string_view s);

struct TopicTally {
    std::size_t total = 0;
    std::size_t completed = 0;  // non-empty, non-refusal answer returned
    std::size_t correct = 0;    // completed and matching the key

    /// Percentages to two decimals, computed exactly from the counts.
    std::string completion_pct() const;
    std::string correctness_pct() const;
};

struct BenchmarkEntry {
    std::string id;
    std::string topic;
    bool completed = false;
    bool correct = false;
    std::string response;
    std::string error;
};

struct BenchmarkReport {
    std::map<std::string, TopicTally> topics;
    TopicTally overall;
    std::vector<BenchmarkEntry> entries;
    bool aborted = false;
    std::string abort_reason;

    std::string render_table() const;
    Json to_json() const;
};

struct BenchmarkOptions {
    std::chrono::milliseconds timeout{60'000};
    std::size_t parallelism = 1;
    std::vector<std::string> refusal_phrases;  // empty: default_refusal_phrases()
};

/// Sends each question once, in a fresh session, and tallies completion and correctness.
BenchmarkReport run_benchmark(const std::vector<BenchmarkQuestion>& questions, ChatEndpoint& endpoint,
                              const BenchmarkOptions& options = {});

/// Tally from already judged entries.
BenchmarkReport tally_benchmark(std::vector<BenchmarkEntry> entries);

/// Percentage count/total to `decimals` places, rounded half up in integer arithmetic.
std::string exact_pct(std::size_t count, std::size_t total, int decimals);

} // namespace copilot::eval
