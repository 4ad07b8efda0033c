// SPDX-License-Identifier: Apache-2.0
#include "copilot/agents/osti.hpp"

#include "copilot/core/error.hpp"
#include "copilot/core/text.hpp"
#include "copilot/core/util.hpp"

#include <httplib.h>

#include <algorithm>
#include <set>

namespace fs = std::filesystem;

namespace copilot::agents {

namespace {

[[noreturn]] void bad_field(std::size_t index, const std::string& field, const std::string& what)
{
    throw Error(ErrorKind::MalformedPayload,
                "record " + std::to_string(index) + ": field '" + field + "' " + what);
}

std::optional<std::string> optional_string(const Json& rec, const char* key, std::size_t index)
{
    if (!rec.contains(key) || rec.at(key).is_null())
        return std::nullopt;
    if (!rec.at(key).is_string())
        bad_field(index, key, "must be a string");
    return rec.at(key).get<std::string>();
}

} // namespace

bool well_formed_doi(std::string_view doi)
{
    return doi.size() > 4 && doi.substr(0, 3) == "10." && doi.find('/') != std::string_view::npos &&
           doi.find(' ') == std::string_view::npos;
}

std::vector<PublicationRecord> parse_publication_records(std::string_view body)
{
    Json doc;
    try {
        doc = Json::parse(body);
    } catch (const Json::parse_error& e) {
        throw Error(ErrorKind::MalformedPayload, std::string("response is not valid JSON: ") + e.what());
    }
    if (doc.is_object() && doc.contains("records"))
        doc = doc.at("records");
    if (!doc.is_array())
        throw Error(ErrorKind::MalformedPayload, "response must be a JSON array of records");

    std::vector<PublicationRecord> out;
    for (std::size_t i = 0; i < doc.size(); ++i) {
        const auto& rec = doc[i];
        if (!rec.is_object())
            throw Error(ErrorKind::MalformedPayload, "record " + std::to_string(i) + " is not an object");
        PublicationRecord p;
        if (!rec.contains("title") || !rec.at("title").is_string() || text::trim(rec.at("title").get<std::string>()).empty())
            bad_field(i, "title", "must be a non-empty string");
        p.title = rec.at("title").get<std::string>();
        p.description = optional_string(rec, "description", i);
        if (rec.contains("authors") && !rec.at("authors").is_null()) {
            const auto& a = rec.at("authors");
            if (a.is_string()) {
                p.authors.push_back(a.get<std::string>());
            } else if (a.is_array()) {
                for (const auto& name : a) {
                    if (!name.is_string())
                        bad_field(i, "authors", "must be a list of strings");
                    p.authors.push_back(name.get<std::string>());
                }
            } else {
                bad_field(i, "authors", "must be a list of strings");
            }
        }
        p.doi = optional_string(rec, "doi", i);
        if (p.doi && p.doi->empty())
            p.doi.reset();
        if (p.doi && !well_formed_doi(*p.doi))
            bad_field(i, "doi", "is not a well-formed DOI");
        for (const auto& [k, v] : rec.items())
            if (k != "title" && k != "description" && k != "authors" && k != "doi")
                p.extra[k] = v;
        out.push_back(std::move(p));
    }
    return out;
}

std::string format_publications(const std::vector<PublicationRecord>& records)
{
    if (records.empty())
        return "No publications found.";
    std::string out;
    for (std::size_t i = 0; i < records.size(); ++i) {
        const auto& r = records[i];
        out += std::to_string(i + 1) + ". " + r.title + "\n";
        out += "   DOI: " + r.doi.value_or("n/a") + "\n";
        if (!r.authors.empty())
            out += "   Authors: " + text::join(r.authors, "; ") + "\n";
        if (r.extra.contains("publication_date") && r.extra.at("publication_date").is_string())
            out += "   Published: " + r.extra.at("publication_date").get<std::string>() + "\n";
        if (r.description && !r.description->empty())
            out += "   " + *r.description + "\n";
    }
    return out;
}

void from_json(const Json& j, OstiConfig& c)
{
    OstiConfig d;
    c.base_url = j.value("base_url", d.base_url);
    c.max_rows = j.value("max_rows", d.max_rows);
    c.live = j.value("live", d.live);
    c.fixture_dir = j.value("fixture_dir", std::string{});
    c.timeout = std::chrono::milliseconds(j.value("timeout_ms", static_cast<long>(d.timeout.count())));
}

OstiClient::OstiClient(OstiConfig config) : config_(std::move(config))
{
    if (config_.max_rows == 0)
        throw Error(ErrorKind::Validation, "max_rows must be positive");
    if (!config_.live && config_.fixture_dir.empty())
        throw Error(ErrorKind::Validation, "fixture mode needs a fixture directory");
}

std::optional<std::string> OstiClient::fixture_body(const std::string& query) const
{
    auto index_path = config_.fixture_dir / "index.json";
    Json index = Json::parse(read_file(index_path));
    const Json& entries = index.is_object() ? index.at("fixtures") : index;
    auto qt = text::tokenize(query);
    std::set<std::string> query_tokens(qt.begin(), qt.end());

    std::optional<std::string> best_file;
    std::size_t best_tokens = 0;
    for (const auto& e : entries) {
        auto kt = text::tokenize(e.at("key").get<std::string>());
        std::set<std::string> key_tokens(kt.begin(), kt.end());
        if (key_tokens.empty())
            continue;
        bool hit = std::all_of(key_tokens.begin(), key_tokens.end(), [&](const auto& t) { return query_tokens.count(t); });
        if (hit && key_tokens.size() > best_tokens) {
            best_tokens = key_tokens.size();
            best_file = e.at("file").get<std::string>();
        }
    }
    if (!best_file)
        return std::nullopt;
    auto path = config_.fixture_dir / *best_file;
    if (!path_within(config_.fixture_dir, path))
        throw Error(ErrorKind::Validation, "fixture path escapes the fixture directory");
    return read_file(path);
}

std::string OstiClient::fetch_live(const std::string& query, std::size_t rows) const
{
    auto scheme_end = config_.base_url.find("://");
    if (scheme_end == std::string::npos)
        throw Error(ErrorKind::Validation, "repository base URL needs a scheme");
    auto path_start = config_.base_url.find('/', scheme_end + 3);
    std::string origin = config_.base_url.substr(0, path_start);
    std::string path = path_start == std::string::npos ? "/" : config_.base_url.substr(path_start);

    httplib::Client client(origin);
    auto secs = std::chrono::duration_cast<std::chrono::seconds>(config_.timeout).count();
    client.set_connection_timeout(secs, 0);
    client.set_read_timeout(secs, 0);
    client.set_follow_location(true);
    httplib::Params params{{"q", query}, {"rows", std::to_string(rows)}};
    auto res = client.Get(path, params, httplib::Headers{{"Accept", "application/json"}});
    if (!res)
        throw Error(ErrorKind::Transport, "repository request failed: " + httplib::to_string(res.error()));
    if (res->status != 200)
        throw Error(ErrorKind::Transport, "repository returned HTTP " + std::to_string(res->status));
    return res->body;
}

std::vector<PublicationRecord> OstiClient::search(const std::string& query, std::size_t rows) const
{
    if (text::trim(query).empty())
        throw Error(ErrorKind::Precondition, "literature search needs a non-empty query");
    if (rows < 1 || rows > config_.max_rows)
        throw Error(ErrorKind::Precondition,
                    "rows must be between 1 and " + std::to_string(config_.max_rows));
    std::string body;
    if (config_.live) {
        body = fetch_live(query, rows);
    } else {
        auto fixture = fixture_body(query);
        if (!fixture)
            return {};
        body = std::move(*fixture);
    }
    auto records = parse_publication_records(body);
    if (records.size() > rows)
        records.resize(rows);
    return records;
}

} // namespace copilot::agents
