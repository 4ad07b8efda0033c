// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "copilot/runtime/message.hpp"

#include <map>
#include <optional>
#include <string>
#include <vector>

namespace copilot {

enum class ArgType { String, Number, Integer, Boolean, StringList };

std::string_view to_string(ArgType type) noexcept;
ArgType parse_arg_type(std::string_view s);

struct ArgField {
    std::string name;
    ArgType type = ArgType::String;
    std::optional<std::string> units;
    std::optional<Json> default_value;
    std::string description;

    bool required() const noexcept { return !default_value.has_value(); }
    bool operator==(const ArgField&) const = default;
};

/// Declarative tool definition. The description and per-argument descriptions
/// are both shown to the model.
struct ToolSpec {
    std::string name;
    std::string description;
    std::vector<ArgField> args;
    bool reentrant = true;

    /// Throws Error(Validation) on duplicate arg names or defaults that do not
    /// type-check against their field.
    void check() const;

    const ArgField* field(std::string_view arg) const;

    /// Text presented to the model: doc text followed by one line per argument.
    std::string model_description() const;

    /// JSON-schema "parameters" object for chat-completions style tool lists.
    Json parameters_schema() const;

    bool operator==(const ToolSpec&) const = default;
};

void to_json(Json& j, const ArgField& f);
void from_json(const Json& j, ArgField& f);
void to_json(Json& j, const ToolSpec& s);
void from_json(const Json& j, ToolSpec& s);

struct ArgValue {
    Json value;
    std::optional<std::string> units;

    bool operator==(const ArgValue&) const = default;
};

using RawArgs = std::map<std::string, std::string>;
using NormalizedArgs = std::map<std::string, ArgValue>;

/// Coerces raw text arguments against the schema, filling defaults and
/// attaching declared units. Units are recorded, never converted.
NormalizedArgs validate_args(const ToolSpec& spec, const RawArgs& raw);

/// Renders normalized args back to text; validate_args(spec, to_raw(n)) == n.
RawArgs to_raw(const NormalizedArgs& args);

/// Convenience accessors; throw Error(InvalidArgument) if absent or mistyped.
std::string arg_string(const NormalizedArgs& args, const std::string& name);
double arg_number(const NormalizedArgs& args, const std::string& name);
std::vector<std::string> arg_list(const NormalizedArgs& args, const std::string& name);

Json args_to_json(const NormalizedArgs& args);

} // namespace copilot
