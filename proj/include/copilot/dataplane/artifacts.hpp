// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "copilot/dataplane/stores.hpp"
#include "copilot/runtime/message.hpp"

#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace copilot::dataplane {

struct ArtifactInfo {
    std::string id;
    std::string name;
    std::string content_type;
    std::string session_id;  // creator; informational only
    std::string created_at;
    ObjectRef object;

    Json to_json() const;
};

/// Downloadable outputs (figures, tables, archives) addressed by opaque ids.
class ArtifactStore {
public:
    ArtifactStore(std::shared_ptr<KvStore> kv, std::shared_ptr<ObjectStore> objects);

    ArtifactInfo put(const std::string& name, std::string_view data, const std::string& session_id,
                     std::string content_type = {});
    std::optional<ArtifactInfo> info(const std::string& id) const;
    /// Throws Error(NotFound) for an unknown id.
    std::pair<ArtifactInfo, Bytes> get(const std::string& id) const;
    std::vector<ArtifactInfo> list() const;

private:
    std::shared_ptr<KvStore> kv_;
    std::shared_ptr<ObjectStore> objects_;
};

/// Content type guessed from a file extension.
std::string content_type_for(std::string_view name);

/// Link text embedded in responses for an artifact.
std::string artifact_link(const std::string& id);

} // namespace copilot::dataplane
