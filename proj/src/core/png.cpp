// SPDX-License-Identifier: Apache-2.0
#include "copilot/core/png.hpp"

#include "copilot/core/error.hpp"

#include <zlib.h>

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <limits>

namespace copilot::png {

Canvas::Canvas(int width, int height, Rgb background)
    : width_(width), height_(height)
{
    if (width <= 0 || height <= 0)
        throw Error(ErrorKind::InvalidArgument, "canvas dimensions must be positive");
    pixels_.assign(static_cast<std::size_t>(width) * static_cast<std::size_t>(height), background);
}

void Canvas::set(int x, int y, Rgb c)
{
    if (x < 0 || y < 0 || x >= width_ || y >= height_)
        return;
    pixels_[static_cast<std::size_t>(y) * static_cast<std::size_t>(width_) + static_cast<std::size_t>(x)] = c;
}

Rgb Canvas::get(int x, int y) const
{
    if (x < 0 || y < 0 || x >= width_ || y >= height_)
        return {};
    return pixels_[static_cast<std::size_t>(y) * static_cast<std::size_t>(width_) + static_cast<std::size_t>(x)];
}

void Canvas::line(int x0, int y0, int x1, int y1, Rgb c)
{
    int dx = std::abs(x1 - x0), sx = x0 < x1 ? 1 : -1;
    int dy = -std::abs(y1 - y0), sy = y0 < y1 ? 1 : -1;
    int err = dx + dy;
    while (true) {
        set(x0, y0, c);
        if (x0 == x1 && y0 == y1)
            break;
        int e2 = 2 * err;
        if (e2 >= dy) {
            err += dy;
            x0 += sx;
        }
        if (e2 <= dx) {
            err += dx;
            y0 += sy;
        }
    }
}

void Canvas::fill_rect(int x0, int y0, int x1, int y1, Rgb c)
{
    if (x0 > x1)
        std::swap(x0, x1);
    if (y0 > y1)
        std::swap(y0, y1);
    for (int y = y0; y <= y1; ++y)
        for (int x = x0; x <= x1; ++x)
            set(x, y, c);
}

void Canvas::rect(int x0, int y0, int x1, int y1, Rgb c)
{
    line(x0, y0, x1, y0, c);
    line(x1, y0, x1, y1, c);
    line(x1, y1, x0, y1, c);
    line(x0, y1, x0, y0, c);
}

namespace {

void put_u32(std::string& out, std::uint32_t v)
{
    out.push_back(static_cast<char>((v >> 24) & 0xFF));
    out.push_back(static_cast<char>((v >> 16) & 0xFF));
    out.push_back(static_cast<char>((v >> 8) & 0xFF));
    out.push_back(static_cast<char>(v & 0xFF));
}

void put_chunk(std::string& out, const char* type, const std::string& data)
{
    put_u32(out, static_cast<std::uint32_t>(data.size()));
    std::string body(type, 4);
    body += data;
    out += body;
    auto crc = crc32(0L, reinterpret_cast<const Bytef*>(body.data()), static_cast<uInt>(body.size()));
    put_u32(out, static_cast<std::uint32_t>(crc));
}

} // namespace

std::string Canvas::encode() const
{
    std::string raw;
    raw.reserve(static_cast<std::size_t>(height_) * (static_cast<std::size_t>(width_) * 3 + 1));
    for (int y = 0; y < height_; ++y) {
        raw.push_back('\0'); // filter: none
        for (int x = 0; x < width_; ++x) {
            auto p = get(x, y);
            raw.push_back(static_cast<char>(p.r));
            raw.push_back(static_cast<char>(p.g));
            raw.push_back(static_cast<char>(p.b));
        }
    }
    uLongf bound = compressBound(static_cast<uLong>(raw.size()));
    std::string compressed(bound, '\0');
    if (compress2(reinterpret_cast<Bytef*>(compressed.data()), &bound,
                  reinterpret_cast<const Bytef*>(raw.data()), static_cast<uLong>(raw.size()), 6) != Z_OK)
        throw Error(ErrorKind::Io, "png deflate failed");
    compressed.resize(bound);

    std::string out("\x89PNG\r\n\x1a\n", 8);
    std::string ihdr;
    put_u32(ihdr, static_cast<std::uint32_t>(width_));
    put_u32(ihdr, static_cast<std::uint32_t>(height_));
    ihdr += std::string("\x08\x02\x00\x00\x00", 5); // 8-bit, truecolour
    put_chunk(out, "IHDR", ihdr);
    put_chunk(out, "IDAT", compressed);
    put_chunk(out, "IEND", "");
    return out;
}

Rgb heat(double t)
{
    t = std::clamp(t, 0.0, 1.0);
    auto r = static_cast<std::uint8_t>(std::lround(255.0 * t));
    auto b = static_cast<std::uint8_t>(std::lround(255.0 * (1.0 - t)));
    auto g = static_cast<std::uint8_t>(std::lround(255.0 * (1.0 - std::abs(2.0 * t - 1.0)) * 0.6));
    return {r, g, b};
}

std::string line_chart(const std::vector<double>& x, const std::vector<Series>& series, int width, int height)
{
    Canvas canvas(width, height);
    const int margin = 24;
    if (x.size() < 2 || series.empty())
        return canvas.encode();

    double xmin = x.front(), xmax = x.back();
    double ymin = std::numeric_limits<double>::infinity();
    double ymax = -ymin;
    for (const auto& s : series)
        for (double v : s.y) {
            ymin = std::min(ymin, v);
            ymax = std::max(ymax, v);
        }
    if (!(ymax > ymin)) {
        ymin -= 1.0;
        ymax += 1.0;
    }
    auto px = [&](double v) {
        return margin + static_cast<int>(std::lround((v - xmin) / (xmax - xmin) * (width - 2 * margin)));
    };
    auto py = [&](double v) {
        return height - margin - static_cast<int>(std::lround((v - ymin) / (ymax - ymin) * (height - 2 * margin)));
    };

    const Rgb axis{60, 60, 60};
    canvas.line(margin, height - margin, width - margin, height - margin, axis);
    canvas.line(margin, margin, margin, height - margin, axis);
    for (const auto& s : series)
        for (std::size_t i = 1; i < x.size() && i < s.y.size(); ++i)
            canvas.line(px(x[i - 1]), py(s.y[i - 1]), px(x[i]), py(s.y[i]), s.color);
    return canvas.encode();
}

bool read_dimensions(const std::string& bytes, int& width, int& height)
{
    if (bytes.size() < 24 || bytes.compare(0, 8, std::string("\x89PNG\r\n\x1a\n", 8)) != 0)
        return false;
    auto u32 = [&](std::size_t off) {
        return (static_cast<std::uint32_t>(static_cast<unsigned char>(bytes[off])) << 24) |
               (static_cast<std::uint32_t>(static_cast<unsigned char>(bytes[off + 1])) << 16) |
               (static_cast<std::uint32_t>(static_cast<unsigned char>(bytes[off + 2])) << 8) |
               static_cast<std::uint32_t>(static_cast<unsigned char>(bytes[off + 3]));
    };
    width = static_cast<int>(u32(16));
    height = static_cast<int>(u32(20));
    return true;
}

} // namespace copilot::png
