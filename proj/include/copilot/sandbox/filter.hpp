// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "copilot/runtime/message.hpp"

#include <string>
#include <string_view>
#include <vector>

namespace copilot::sandbox {

struct FilterPolicy {
    std::vector<std::string> blocked_tokens;
    std::vector<std::string> allowed_libraries;
    bool strip_imports = true;

    /// Blocked: os, boto3, __import__. Allowed: numpy, pandas, matplotlib, seaborn.
    static FilterPolicy defaults();

    /// Throws Error(Validation) if allowed_libraries is empty or overlaps blocked_tokens.
    void check() const;
};

void to_json(Json& j, const FilterPolicy& p);
void from_json(const Json& j, FilterPolicy& p);

/// One name an import statement would have introduced; the sandbox recreates
/// these so a stripped script still resolves them. attribute "*" is a star import.
struct ImportBinding {
    std::string name;
    std::string module;
    std::string attribute;
    bool bind_root = false;  // `import a.b` binds `a`

    bool operator==(const ImportBinding&) const = default;
};

void to_json(Json& j, const ImportBinding& b);

struct ImportStatement {
    std::size_t line = 0;               // 1-based physical line where it starts
    std::vector<std::string> modules;   // dotted names as written
    std::vector<std::string> roots;     // top-level package of each module
    std::vector<ImportBinding> bindings;
};

struct FilterResult {
    bool accepted = false;
    std::string sanitized;
    std::string reason;                 // set on rejection
    std::vector<std::string> libraries; // roots referenced by import statements
    std::vector<ImportBinding> bindings;

    explicit operator bool() const noexcept { return accepted; }
};

/// Import statements found outside comments and string literals.
std::vector<ImportStatement> find_imports(std::string_view script);

/// Rejects if a blocked token occurs anywhere in the original text or an
/// imported library is not allowlisted; otherwise strips import statements.
/// Tokens made of identifier characters match at identifier boundaries only.
FilterResult tier2_filter(std::string_view script, const FilterPolicy& policy);

} // namespace copilot::sandbox
