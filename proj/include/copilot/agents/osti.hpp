// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "copilot/runtime/message.hpp"

#include <chrono>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace copilot::agents {

struct PublicationRecord {
    std::string title;
    std::optional<std::string> description;
    std::vector<std::string> authors;
    std::optional<std::string> doi;
    Json extra = Json::object();
};

bool well_formed_doi(std::string_view doi);

/// Parses a repository response body (a JSON array of records). Throws
/// Error(MalformedPayload) naming the record index and offending field.
std::vector<PublicationRecord> parse_publication_records(std::string_view body);

/// Plain-text listing handed to the summarizing model.
std::string format_publications(const std::vector<PublicationRecord>& records);

struct OstiConfig {
    std::string base_url = "https://www.osti.gov/api/v1/records";
    std::size_t max_rows = 20;
    bool live = false;
    std::filesystem::path fixture_dir;  // index.json + recorded bodies
    std::chrono::milliseconds timeout{20'000};
};

void from_json(const Json& j, OstiConfig& c);

/// Literature repository client. Live mode issues GET {base_url}?q=<query>&rows=<n>;
/// fixture mode serves recorded bodies from fixture_dir/index.json, whose entries
/// {"key": "...", "file": "..."} hit when every key token occurs in the query
/// (the entry with the most key tokens wins).
class OstiClient {
public:
    explicit OstiClient(OstiConfig config);

    /// Throws Error(Precondition) for an empty query or rows outside [1, max_rows],
    /// Error(Transport) for HTTP failures, Error(MalformedPayload) for bad bodies.
    std::vector<PublicationRecord> search(const std::string& query, std::size_t rows) const;

    /// Raw body for a query, or nullopt when no fixture matches (fixture mode only).
    std::optional<std::string> fixture_body(const std::string& query) const;

    const OstiConfig& config() const noexcept { return config_; }

private:
    std::string fetch_live(const std::string& query, std::size_t rows) const;

    OstiConfig config_;
};

} // namespace copilot::agents
