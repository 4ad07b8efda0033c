// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "copilot/gateway/guardrail.hpp"
#include "copilot/gateway/model.hpp"

#include <chrono>
#include <map>
#include <memory>
#include <mutex>
#include <string>

namespace copilot::gateway {

/// Uniform completion entry point. Screens every request and response with
/// the same guardrail policy; a blocked request never reaches a backend.
class Gateway {
public:
    explicit Gateway(GuardrailPolicy policy = GuardrailPolicy::defaults());

    void add_backend(std::shared_ptr<Backend> backend);
    void set_default_backend(std::string id);
    const std::string& default_backend() const noexcept { return default_; }
    bool has_backend(const std::string& id) const;

    /// Caps requests per second to one backend; <= 0 removes the cap.
    void set_rate_limit(const std::string& backend_id, double per_second);

    const GuardrailPolicy& policy() const noexcept { return policy_; }

    ModelResponse complete(const ModelRequest& request);

private:
    struct Limiter {
        std::mutex mutex;
        std::chrono::steady_clock::duration interval{};
        std::chrono::steady_clock::time_point next{};
    };

    Backend& resolve(const std::string& id);
    void throttle(const std::string& id);

    GuardrailPolicy policy_;
    std::string default_;
    mutable std::mutex mutex_;
    std::map<std::string, std::shared_ptr<Backend>> backends_;
    std::map<std::string, std::unique_ptr<Limiter>> limiters_;
};

} // namespace copilot::gateway
