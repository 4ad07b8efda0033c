// SPDX-License-Identifier: Apache-2.0
#include "copilot/core/log.hpp"

#include "copilot/core/error.hpp"
#include "copilot/core/util.hpp"

#include <atomic>
#include <iostream>
#include <mutex>

namespace copilot::log {

namespace {
std::atomic<Level> g_level{Level::Warn};
std::mutex g_mutex;

const char* label(Level l)
{
    switch (l) {
    case Level::Debug: return "debug";
    case Level::Info: return "info";
    case Level::Warn: return "warn";
    case Level::Error: return "error";
    case Level::Off: break;
    }
    return "";
}
} // namespace

void set_level(Level l) { g_level = l; }
Level level() { return g_level; }

Level parse_level(std::string_view name)
{
    for (auto l : {Level::Debug, Level::Info, Level::Warn, Level::Error})
        if (name == label(l))
            return l;
    if (name == "off")
        return Level::Off;
    throw Error(ErrorKind::InvalidArgument, "unknown log level '" + std::string(name) + "'");
}

void write(Level l, const std::string& message)
{
    std::lock_guard lock(g_mutex);
    std::clog << format_timestamp(Clock::now()) << " [" << label(l) << "] " << message << '\n';
}

} // namespace copilot::log
