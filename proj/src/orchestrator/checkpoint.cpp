// SPDX-License-Identifier: Apache-2.0
#include "copilot/orchestrator/checkpoint.hpp"

#include "copilot/core/error.hpp"

namespace copilot::orchestrator {

CheckpointToken CheckpointStore::save(const GraphState& state)
{
    CheckpointToken token{"ckpt-" + random_hex(16), Clock::now()};
    std::lock_guard lock(mutex_);
    snapshots_.emplace(token.token, state);
    return token;
}

GraphState CheckpointStore::restore(const std::string& token) const
{
    std::lock_guard lock(mutex_);
    auto it = snapshots_.find(token);
    if (it == snapshots_.end())
        throw Error(ErrorKind::NotFound, "unknown checkpoint token");
    return it->second;
}

std::size_t CheckpointStore::size() const
{
    std::lock_guard lock(mutex_);
    return snapshots_.size();
}

} // namespace copilot::orchestrator
