// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "copilot/runtime/message.hpp"
#include "copilot/runtime/tool_spec.hpp"

#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <vector>

namespace copilot {

/// Per-call context handed to tool implementations.
struct ToolContext {
    std::string session_id;
    std::string agent;
};

struct ToolOutput {
    std::string text;
    std::vector<std::string> artifacts;  // artifact ids
};

struct Observation {
    std::string call_id;
    std::string payload;
    std::vector<std::string> artifacts;
    bool is_error = false;

    bool operator==(const Observation&) const = default;
};

void to_json(Json& j, const Observation& o);

using ToolHandler = std::function<ToolOutput(const NormalizedArgs&, const ToolContext&)>;

/// Tool specs plus their implementations. Non-reentrant tools are serialized.
class ToolRegistry {
public:
    void add(ToolSpec spec, ToolHandler handler);

    /// Registers a spec whose handler is bound later with bind().
    void declare(ToolSpec spec);
    void bind(const std::string& name, ToolHandler handler);

    bool contains(const std::string& name) const;
    bool bound(const std::string& name) const;
    const ToolSpec& spec(const std::string& name) const;
    std::vector<std::string> names() const;

    /// Validates arguments and runs the tool; failures become error observations.
    Observation invoke(const ToolCall& call, const ToolContext& ctx) const;

private:
    struct Entry {
        ToolSpec spec;
        ToolHandler handler;
        std::unique_ptr<std::mutex> serial;
    };
    const Entry& entry(const std::string& name) const;

    mutable std::mutex mutex_;
    std::map<std::string, Entry> tools_;
};

} // namespace copilot
