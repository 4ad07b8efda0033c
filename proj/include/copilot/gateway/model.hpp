// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "copilot/runtime/message.hpp"
#include "copilot/runtime/tool_spec.hpp"

#include <optional>
#include <string>
#include <vector>

namespace copilot::gateway {

struct ModelRequest {
    std::vector<Message> messages;
    std::vector<ToolSpec> tool_specs;
    std::string backend;  // backend id; empty selects the gateway default
    std::string agent;    // calling agent or tool binding, visible to scripted rules
    std::optional<double> temperature;
};

struct ModelResponse {
    std::optional<std::string> text;
    std::vector<ToolCall> tool_calls;
    std::string finish_reason = "stop";

    bool operator==(const ModelResponse&) const = default;
};

void to_json(Json& j, const ModelResponse& r);
void from_json(const Json& j, ModelResponse& r);

/// One pluggable completion provider.
class Backend {
public:
    virtual ~Backend() = default;
    virtual std::string id() const = 0;
    virtual ModelResponse complete(const ModelRequest& request) = 0;
};

} // namespace copilot::gateway
