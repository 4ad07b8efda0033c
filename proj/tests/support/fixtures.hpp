// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "copilot/app/app.hpp"
#include "copilot/app/config.hpp"
#include "copilot/core/util.hpp"
#include "copilot/gateway/gateway.hpp"
#include "copilot/gateway/scripted_backend.hpp"

#include <filesystem>
#include <memory>
#include <string>

namespace testing {

inline std::filesystem::path repo_path(const std::string& rel)
{
    return std::filesystem::path(COPILOT_REPO_DIR) / rel;
}

class TempDir {
public:
    TempDir()
        : path_(std::filesystem::temp_directory_path() / ("copilot-test-" + copilot::random_hex(6)))
    {
        std::filesystem::create_directories(path_);
    }
    ~TempDir()
    {
        std::error_code ec;
        std::filesystem::remove_all(path_, ec);
    }
    TempDir(const TempDir&) = delete;
    TempDir& operator=(const TempDir&) = delete;
    const std::filesystem::path& path() const { return path_; }
    std::filesystem::path operator/(const std::string& rel) const { return path_ / rel; }

private:
    std::filesystem::path path_;
};

// Gateway with one scripted backend "scripted" as the default.
inline void add_scripted(copilot::gateway::Gateway& gw, const copilot::Json& rules, const std::string& id = "scripted")
{
    gw.add_backend(std::make_shared<copilot::gateway::ScriptedBackend>(
        id, copilot::gateway::ScriptedRules::from_json_doc(rules)));
    if (gw.default_backend().empty())
        gw.set_default_backend(id);
}

// The bundled configuration, optionally with the job pool resized.
inline copilot::app::AppConfig bundled_config(std::size_t workers = 4)
{
    auto cfg = copilot::app::load_app_config(repo_path("config/copilot.json"));
    cfg.jobs.workers = workers;
    return cfg;
}

} // namespace testing
