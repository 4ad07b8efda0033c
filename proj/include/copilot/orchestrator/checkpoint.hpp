// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "copilot/orchestrator/graph_state.hpp"

#include <map>
#include <mutex>
#include <string>

namespace copilot::orchestrator {

/// In-process snapshot store. Tokens do not survive a restart.
class CheckpointStore {
public:
    CheckpointToken save(const GraphState& state);

    /// Throws Error(NotFound) for tokens not issued by this store.
    GraphState restore(const std::string& token) const;

    std::size_t size() const;

private:
    mutable std::mutex mutex_;
    std::map<std::string, GraphState> snapshots_;
};

} // namespace copilot::orchestrator
