// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <sstream>
#include <string>
#include <string_view>

namespace copilot::log {

enum class Level { Debug = 0, Info = 1, Warn = 2, Error = 3, Off = 4 };

void set_level(Level level);
Level level();
/// "debug", "info", "warn", "error" or "off"; throws Error(InvalidArgument) otherwise.
Level parse_level(std::string_view name);
void write(Level level, const std::string& message);

namespace detail {
template <typename... Args>
std::string concat(const Args&... args)
{
    std::ostringstream ss;
    (ss << ... << args);
    return ss.str();
}
} // namespace detail

template <typename... Args> void debug(const Args&... args)
{
    if (level() <= Level::Debug)
        write(Level::Debug, detail::concat(args...));
}
template <typename... Args> void info(const Args&... args)
{
    if (level() <= Level::Info)
        write(Level::Info, detail::concat(args...));
}
template <typename... Args> void warn(const Args&... args)
{
    if (level() <= Level::Warn)
        write(Level::Warn, detail::concat(args...));
}
template <typename... Args> void error(const Args&... args)
{
    if (level() <= Level::Error)
        write(Level::Error, detail::concat(args...));
}

} // namespace copilot::log
