// SPDX-License-Identifier: Apache-2.0
#include "copilot/dataplane/artifacts.hpp"

#include "copilot/core/error.hpp"
#include "copilot/core/text.hpp"

#include <algorithm>

namespace copilot::dataplane {

namespace {

const std::string kArtifactPrefix = "artifact/";

ArtifactInfo info_from_json(const Json& j)
{
    ArtifactInfo a;
    a.id = j.at("id").get<std::string>();
    a.name = j.at("name").get<std::string>();
    a.content_type = j.at("content_type").get<std::string>();
    a.session_id = j.value("session_id", std::string{});
    a.created_at = j.value("created_at", std::string{});
    a.object = {j.at("key").get<std::string>(), j.at("hash").get<std::string>(), j.at("size").get<std::uint64_t>()};
    return a;
}

bool valid_id(const std::string& id)
{
    return !id.empty() && id.size() <= 64 &&
           std::all_of(id.begin(), id.end(), [](char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '-'; });
}

} // namespace

Json ArtifactInfo::to_json() const
{
    return Json{{"id", id},           {"name", name},         {"content_type", content_type},
                {"session_id", session_id}, {"created_at", created_at}, {"key", object.key},
                {"hash", object.hash}, {"size", object.size}};
}

std::string content_type_for(std::string_view name)
{
    auto lower = text::to_lower(name);
    auto ends = [&](std::string_view suffix) {
        return lower.size() >= suffix.size() && lower.compare(lower.size() - suffix.size(), suffix.size(), suffix) == 0;
    };
    if (ends(".png"))
        return "image/png";
    if (ends(".csv"))
        return "text/csv";
    if (ends(".json"))
        return "application/json";
    if (ends(".txt") || ends(".log"))
        return "text/plain";
    if (ends(".tar"))
        return "application/x-tar";
    return "application/octet-stream";
}

std::string artifact_link(const std::string& id) { return "/artifacts/" + id; }

ArtifactStore::ArtifactStore(std::shared_ptr<KvStore> kv, std::shared_ptr<ObjectStore> objects)
    : kv_(std::move(kv)), objects_(std::move(objects))
{
}

ArtifactInfo ArtifactStore::put(const std::string& name, std::string_view data, const std::string& session_id,
                                std::string content_type)
{
    ArtifactInfo a;
    a.id = "art-" + random_hex(10);
    a.name = name;
    a.content_type = content_type.empty() ? content_type_for(name) : std::move(content_type);
    a.session_id = session_id;
    a.created_at = format_timestamp(Clock::now());
    a.object = objects_->put("artifacts/" + a.id, data);
    kv_->put(kArtifactPrefix + a.id, a.to_json().dump());
    return a;
}

std::optional<ArtifactInfo> ArtifactStore::info(const std::string& id) const
{
    if (!valid_id(id))
        return std::nullopt;
    auto raw = kv_->get(kArtifactPrefix + id);
    if (!raw)
        return std::nullopt;
    return info_from_json(Json::parse(*raw));
}

std::pair<ArtifactInfo, Bytes> ArtifactStore::get(const std::string& id) const
{
    auto a = info(id);
    if (!a)
        throw Error(ErrorKind::NotFound, "unknown artifact '" + id + "'");
    return {*a, objects_->fetch(a->object)};
}

std::vector<ArtifactInfo> ArtifactStore::list() const
{
    std::vector<ArtifactInfo> out;
    for (const auto& key : kv_->keys(kArtifactPrefix))
        if (auto raw = kv_->get(key))
            out.push_back(info_from_json(Json::parse(*raw)));
    return out;
}

} // namespace copilot::dataplane
