// SPDX-License-Identifier: Apache-2.0
#include "copilot/runtime/tool_registry.hpp"

#include "copilot/core/error.hpp"

namespace copilot {

void to_json(Json& j, const Observation& o)
{
    j = Json{{"call_id", o.call_id}, {"payload", o.payload}, {"artifacts", o.artifacts}, {"is_error", o.is_error}};
}

void ToolRegistry::add(ToolSpec spec, ToolHandler handler)
{
    auto name = spec.name;
    declare(std::move(spec));
    bind(name, std::move(handler));
}

void ToolRegistry::declare(ToolSpec spec)
{
    spec.check();
    std::lock_guard lock(mutex_);
    if (tools_.count(spec.name))
        throw Error(ErrorKind::AlreadyExists, "tool '" + spec.name + "' already registered");
    auto name = spec.name;
    tools_.emplace(name, Entry{std::move(spec), {}, std::make_unique<std::mutex>()});
}

void ToolRegistry::bind(const std::string& name, ToolHandler handler)
{
    std::lock_guard lock(mutex_);
    auto it = tools_.find(name);
    if (it == tools_.end())
        throw Error(ErrorKind::NotFound, "cannot bind undeclared tool '" + name + "'");
    it->second.handler = std::move(handler);
}

bool ToolRegistry::contains(const std::string& name) const
{
    std::lock_guard lock(mutex_);
    return tools_.count(name) > 0;
}

bool ToolRegistry::bound(const std::string& name) const
{
    std::lock_guard lock(mutex_);
    auto it = tools_.find(name);
    return it != tools_.end() && static_cast<bool>(it->second.handler);
}

const ToolRegistry::Entry& ToolRegistry::entry(const std::string& name) const
{
    std::lock_guard lock(mutex_);
    auto it = tools_.find(name);
    if (it == tools_.end())
        throw Error(ErrorKind::NotFound, "unknown tool '" + name + "'");
    return it->second;
}

const ToolSpec& ToolRegistry::spec(const std::string& name) const { return entry(name).spec; }

std::vector<std::string> ToolRegistry::names() const
{
    std::lock_guard lock(mutex_);
    std::vector<std::string> out;
    for (const auto& [name, _] : tools_)
        out.push_back(name);
    return out;
}

Observation ToolRegistry::invoke(const ToolCall& call, const ToolContext& ctx) const
{
    Observation obs;
    obs.call_id = call.call_id;
    try {
        const auto& e = entry(call.name);
        if (!e.handler)
            throw Error(ErrorKind::Unavailable, "tool '" + call.name + "' has no implementation bound");
        auto args = validate_args(e.spec, call.raw_args);
        ToolOutput out;
        if (e.spec.reentrant) {
            out = e.handler(args, ctx);
        } else {
            std::lock_guard serial(*e.serial);
            out = e.handler(args, ctx);
        }
        obs.payload = std::move(out.text);
        obs.artifacts = std::move(out.artifacts);
    } catch (const Error& err) {
        obs.is_error = true;
        obs.payload = "Error (" + std::string(err.category()) + "): " + err.what();
    } catch (const std::exception& err) {
        obs.is_error = true;
        obs.payload = std::string("Error: ") + err.what();
    }
    return obs;
}

} // namespace copilot
