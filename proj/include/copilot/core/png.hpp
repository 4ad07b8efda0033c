// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace copilot::png {

struct Rgb {
    std::uint8_t r = 0, g = 0, b = 0;
};

/// Minimal RGB raster used for stand-in plots and annotated frames.
class Canvas {
public:
    Canvas(int width, int height, Rgb background = {255, 255, 255});

    int width() const noexcept { return width_; }
    int height() const noexcept { return height_; }

    void set(int x, int y, Rgb c);
    Rgb get(int x, int y) const;
    void line(int x0, int y0, int x1, int y1, Rgb c);
    void fill_rect(int x0, int y0, int x1, int y1, Rgb c);
    void rect(int x0, int y0, int x1, int y1, Rgb c);

    /// Encodes as an 8-bit truecolour PNG.
    std::string encode() const;

private:
    int width_;
    int height_;
    std::vector<Rgb> pixels_;
};

/// Blue-to-red ramp for t in [0, 1].
Rgb heat(double t);

/// Line chart of several series over a shared x axis; bands drawn lighter.
struct Series {
    std::vector<double> y;
    Rgb color;
};
std::string line_chart(const std::vector<double>& x, const std::vector<Series>& series, int width = 480,
                       int height = 320);

/// Parses width/height from an encoded PNG header; returns false if not a PNG.
bool read_dimensions(const std::string& bytes, int& width, int& height);

} // namespace copilot::png
