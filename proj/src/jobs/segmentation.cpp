// SPDX-License-Identifier: Apache-2.0
#include "copilot/jobs/segmentation.hpp"

#include "copilot/core/error.hpp"
#include "copilot/core/png.hpp"
#include "copilot/core/tar.hpp"
#include "copilot/core/text.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>

namespace fs = std::filesystem;

namespace copilot::jobs {

namespace {

constexpr double kPi = 3.14159265358979323846;
const std::string kSceneInputPrefix = "inputs/segmentation/";

double cross(const Point& o, const Point& a, const Point& b)
{
    return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0]);
}

Point vertex_mean(const Polygon& p)
{
    Point m{0, 0};
    for (const auto& v : p) {
        m[0] += v[0];
        m[1] += v[1];
    }
    m[0] /= static_cast<double>(p.size());
    m[1] /= static_cast<double>(p.size());
    return m;
}

double num(const Json& j, const char* key, const std::string& where)
{
    if (!j.contains(key) || !j.at(key).is_number())
        throw Error(ErrorKind::Validation, where + ": '" + key + "' must be a number");
    return j.at(key).get<double>();
}

std::vector<Polygon> parse_particles(const Json& frame, const std::string& where)
{
    if (!frame.contains("particles") || !frame.at("particles").is_array())
        throw Error(ErrorKind::Validation, where + ": 'particles' must be a list");
    std::vector<Polygon> out;
    std::size_t i = 0;
    for (const auto& p : frame.at("particles")) {
        auto w = where + " particle " + std::to_string(i++);
        auto shape = p.value("shape", std::string{});
        if (shape == "ellipse" || shape == "circle") {
            double a = shape == "circle" ? num(p, "r", w) : num(p, "a", w);
            double b = shape == "circle" ? a : num(p, "b", w);
            if (!(a > 0) || !(b > 0))
                throw Error(ErrorKind::Validation, w + ": axes must be positive");
            auto vertices = p.value("vertices", std::size_t{65536});
            if (vertices < 3)
                throw Error(ErrorKind::Validation, w + ": needs at least 3 vertices");
            out.push_back(ellipse_polygon(num(p, "cx", w), num(p, "cy", w), a, b, p.value("angle_deg", 0.0), vertices));
        } else if (shape == "polygon") {
            if (!p.contains("points") || !p.at("points").is_array() || p.at("points").size() < 3)
                throw Error(ErrorKind::Validation, w + ": polygon needs at least 3 points");
            Polygon poly;
            for (const auto& pt : p.at("points")) {
                if (!pt.is_array() || pt.size() != 2 || !pt[0].is_number() || !pt[1].is_number())
                    throw Error(ErrorKind::Validation, w + ": points must be [x, y] pairs");
                poly.push_back({pt[0].get<double>(), pt[1].get<double>()});
            }
            out.push_back(std::move(poly));
        } else {
            throw Error(ErrorKind::Validation, w + ": unknown shape '" + shape + "'");
        }
    }
    return out;
}

std::string descriptor_row(int frame, const ParticleDescriptor& d, bool with_frame)
{
    std::string row = with_frame ? std::to_string(frame) + "," : std::string{};
    row += std::to_string(d.particle) + "," + text::fixed(d.area, 4) + "," + text::fixed(d.cx, 4) + "," +
           text::fixed(d.cy, 4) + "," + text::fixed(d.perimeter, 4) + "," + text::fixed(d.eccentricity, 6) + "," +
           text::fixed(d.sphericity, 6) + "," + text::fixed(d.solidity, 6) + "\n";
    return row;
}

Json descriptor_json(const ParticleDescriptor& d)
{
    return Json{{"particle", d.particle},       {"area_nm2", d.area},         {"cx_nm", d.cx},
                {"cy_nm", d.cy},                {"perimeter_nm", d.perimeter}, {"eccentricity", d.eccentricity},
                {"sphericity", d.sphericity},   {"solidity", d.solidity}};
}

} // namespace

Polygon ellipse_polygon(double cx, double cy, double a, double b, double angle_deg, std::size_t vertices)
{
    Polygon p;
    p.reserve(vertices);
    double th = angle_deg * kPi / 180.0;
    double c = std::cos(th), s = std::sin(th);
    for (std::size_t i = 0; i < vertices; ++i) {
        double t = 2.0 * kPi * static_cast<double>(i) / static_cast<double>(vertices);
        double x = a * std::cos(t), y = b * std::sin(t);
        p.push_back({cx + x * c - y * s, cy + x * s + y * c});
    }
    return p;
}

double polygon_area(const Polygon& p)
{
    if (p.size() < 3)
        return 0;
    auto o = vertex_mean(p);
    double acc = 0;
    for (std::size_t i = 0; i < p.size(); ++i) {
        const auto& a = p[i];
        const auto& b = p[(i + 1) % p.size()];
        acc += (a[0] - o[0]) * (b[1] - o[1]) - (b[0] - o[0]) * (a[1] - o[1]);
    }
    return std::abs(acc) / 2.0;
}

double polygon_perimeter(const Polygon& p)
{
    double acc = 0;
    for (std::size_t i = 0; i < p.size(); ++i) {
        const auto& a = p[i];
        const auto& b = p[(i + 1) % p.size()];
        acc += std::hypot(b[0] - a[0], b[1] - a[1]);
    }
    return acc;
}

Point polygon_centroid(const Polygon& p)
{
    auto o = vertex_mean(p);
    double area2 = 0, cx = 0, cy = 0;
    for (std::size_t i = 0; i < p.size(); ++i) {
        double x0 = p[i][0] - o[0], y0 = p[i][1] - o[1];
        double x1 = p[(i + 1) % p.size()][0] - o[0], y1 = p[(i + 1) % p.size()][1] - o[1];
        double c = x0 * y1 - x1 * y0;
        area2 += c;
        cx += (x0 + x1) * c;
        cy += (y0 + y1) * c;
    }
    if (area2 == 0)
        return o;
    return {o[0] + cx / (3.0 * area2), o[1] + cy / (3.0 * area2)};
}

std::array<double, 3> polygon_moments(const Polygon& p)
{
    auto o = polygon_centroid(p);
    double area2 = 0, sxx = 0, syy = 0, sxy = 0;
    for (std::size_t i = 0; i < p.size(); ++i) {
        double x0 = p[i][0] - o[0], y0 = p[i][1] - o[1];
        double x1 = p[(i + 1) % p.size()][0] - o[0], y1 = p[(i + 1) % p.size()][1] - o[1];
        double c = x0 * y1 - x1 * y0;
        area2 += c;
        sxx += (x0 * x0 + x0 * x1 + x1 * x1) * c;
        syy += (y0 * y0 + y0 * y1 + y1 * y1) * c;
        sxy += (x0 * y1 + 2 * x0 * y0 + 2 * x1 * y1 + x1 * y0) * c;
    }
    if (area2 == 0)
        return {0, 0, 0};
    double area = area2 / 2.0;
    // Integrals about the centroid divided by the (signed) area.
    return {sxx / 12.0 / area, syy / 12.0 / area, sxy / 24.0 / area};
}

Polygon convex_hull(Polygon p)
{
    std::sort(p.begin(), p.end());
    p.erase(std::unique(p.begin(), p.end()), p.end());
    if (p.size() < 3)
        return p;
    Polygon h(2 * p.size());
    std::size_t k = 0;
    for (std::size_t i = 0; i < p.size(); ++i) {
        while (k >= 2 && cross(h[k - 2], h[k - 1], p[i]) <= 0)
            --k;
        h[k++] = p[i];
    }
    for (std::size_t i = p.size() - 1, t = k + 1; i > 0; --i) {
        while (k >= t && cross(h[k - 2], h[k - 1], p[i - 1]) <= 0)
            --k;
        h[k++] = p[i - 1];
    }
    h.resize(k - 1);
    return h;
}

ParticleDescriptor describe(const Polygon& p, double nm_per_px)
{
    if (!(nm_per_px > 0))
        throw Error(ErrorKind::Validation, "nm_per_px must be positive");
    double area = polygon_area(p);
    double perim = polygon_perimeter(p);
    if (p.size() < 3 || !(area > 0) || !(perim > 0))
        throw Error(ErrorKind::Validation, "degenerate particle outline");
    auto c = polygon_centroid(p);
    auto m = polygon_moments(p);
    double half_tr = (m[0] + m[1]) / 2.0;
    double disc = std::sqrt(((m[0] - m[1]) / 2.0) * ((m[0] - m[1]) / 2.0) + m[2] * m[2]);
    double lmax = half_tr + disc, lmin = std::max(0.0, half_tr - disc);
    if (!(lmax > 0))
        throw Error(ErrorKind::Validation, "degenerate particle outline");
    double hull = polygon_area(convex_hull(p));

    ParticleDescriptor d;
    d.area = area * nm_per_px * nm_per_px;
    d.cx = c[0] * nm_per_px;
    d.cy = c[1] * nm_per_px;
    d.perimeter = perim * nm_per_px;
    d.eccentricity = std::min(std::sqrt(std::max(0.0, 1.0 - lmin / lmax)), std::nextafter(1.0, 0.0));
    d.sphericity = std::min(1.0, 4.0 * kPi * area / (perim * perim));
    d.solidity = hull > 0 ? std::min(1.0, area / hull) : 1.0;
    return d;
}

std::vector<Scene> parse_scene_document(const Json& doc, bool& is_video)
{
    if (!doc.is_object())
        throw Error(ErrorKind::Validation, "scene document must be a JSON object");
    Scene base;
    base.width = doc.value("width", 256);
    base.height = doc.value("height", 256);
    base.nm_per_px = doc.value("nm_per_px", 1.0);
    if (base.width <= 0 || base.height <= 0 || base.width > 4096 || base.height > 4096 || !(base.nm_per_px > 0))
        throw Error(ErrorKind::Validation, "scene dimensions out of range");
    std::vector<Scene> out;
    is_video = doc.contains("frames");
    if (is_video) {
        if (!doc.at("frames").is_array() || doc.at("frames").empty())
            throw Error(ErrorKind::Validation, "'frames' must be a non-empty list");
        std::size_t i = 0;
        for (const auto& f : doc.at("frames")) {
            Scene s = base;
            s.particles = parse_particles(f, "frame " + std::to_string(i++));
            out.push_back(std::move(s));
        }
    } else {
        base.particles = parse_particles(doc, "scene");
        out.push_back(std::move(base));
    }
    return out;
}

std::vector<FrameDescriptors> track_particles(const std::vector<Scene>& frames)
{
    std::vector<FrameDescriptors> out;
    std::vector<ParticleDescriptor> prev;
    int next_id = 1;
    for (std::size_t f = 0; f < frames.size(); ++f) {
        std::vector<ParticleDescriptor> cur;
        for (const auto& poly : frames[f].particles)
            cur.push_back(describe(poly, frames[f].nm_per_px));

        struct Pair {
            double dist;
            std::size_t prev, cur;
        };
        std::vector<Pair> pairs;
        for (std::size_t i = 0; i < prev.size(); ++i)
            for (std::size_t j = 0; j < cur.size(); ++j)
                pairs.push_back({std::hypot(prev[i].cx - cur[j].cx, prev[i].cy - cur[j].cy), i, j});
        std::sort(pairs.begin(), pairs.end(), [](const Pair& a, const Pair& b) {
            return a.dist != b.dist ? a.dist < b.dist : std::tie(a.prev, a.cur) < std::tie(b.prev, b.cur);
        });
        std::vector<bool> used_prev(prev.size()), used_cur(cur.size());
        for (const auto& p : pairs) {
            if (used_prev[p.prev] || used_cur[p.cur])
                continue;
            used_prev[p.prev] = used_cur[p.cur] = true;
            cur[p.cur].particle = prev[p.prev].particle;
        }
        for (std::size_t j = 0; j < cur.size(); ++j)
            if (!used_cur[j])
                cur[j].particle = next_id++;
        std::sort(cur.begin(), cur.end(), [](const auto& a, const auto& b) { return a.particle < b.particle; });
        out.push_back({static_cast<int>(f), cur});
        prev = cur;
    }
    return out;
}

std::string render_annotated(const Scene& scene, const std::vector<ParticleDescriptor>& desc)
{
    png::Canvas canvas(scene.width, scene.height, {24, 24, 28});
    for (const auto& poly : scene.particles) {
        int px = 0, py = 0;
        bool first = true;
        double minx = 1e300, miny = 1e300, maxx = -1e300, maxy = -1e300;
        for (std::size_t i = 0; i <= poly.size(); ++i) {
            const auto& v = poly[i % poly.size()];
            int x = static_cast<int>(std::lround(v[0])), y = static_cast<int>(std::lround(v[1]));
            minx = std::min(minx, v[0]);
            miny = std::min(miny, v[1]);
            maxx = std::max(maxx, v[0]);
            maxy = std::max(maxy, v[1]);
            if (!first && (x != px || y != py))
                canvas.line(px, py, x, y, {40, 220, 120});
            px = x;
            py = y;
            first = false;
        }
        canvas.rect(static_cast<int>(minx) - 2, static_cast<int>(miny) - 2, static_cast<int>(maxx) + 2,
                    static_cast<int>(maxy) + 2, {230, 200, 40});
    }
    for (const auto& d : desc) {
        int x = static_cast<int>(std::lround(d.cx / scene.nm_per_px));
        int y = static_cast<int>(std::lround(d.cy / scene.nm_per_px));
        canvas.line(x - 3, y, x + 3, y, {230, 50, 50});
        canvas.line(x, y - 3, x, y + 3, {230, 50, 50});
    }
    return canvas.encode();
}

ToolSpec SegmentationExecutor::schema() const
{
    ToolSpec spec;
    if (kind_ == JobKind::VideoTracking) {
        spec.name = "track_particles_video";
        spec.description = "Tracks nanoparticles through every frame of a microscopy video and reports per-frame "
                           "size, centroid and shape descriptors with an annotated video.";
    } else {
        spec.name = "segment_particles_image";
        spec.description = "Segments nanoparticles in a microscopy image and reports area, centroid, eccentricity, "
                           "sphericity and solidity per particle.";
    }
    spec.args = {{"input", ArgType::String, std::nullopt, std::nullopt,
                  "Name of an available input (see the input listing) or its full object key."}};
    return spec;
}

std::vector<std::string> SegmentationExecutor::inputs(const NormalizedArgs& args) const
{
    auto in = arg_string(args, "input");
    return {in.find('/') == std::string::npos ? kSceneInputPrefix + in : in};
}

void SegmentationExecutor::run(const ExecutionContext& ctx) const
{
    std::vector<fs::path> staged;
    for (const auto& e : fs::directory_iterator(ctx.inputs_dir))
        if (e.is_regular_file())
            staged.push_back(e.path());
    if (staged.size() != 1)
        throw Error(ErrorKind::Validation, "segmentation expects exactly one staged input");
    Json doc;
    try {
        doc = Json::parse(read_file(staged.front()));
    } catch (const Json::parse_error&) {
        throw Error(ErrorKind::Validation, "unreadable input '" + staged.front().filename().string() + "'");
    }
    bool video = false;
    auto frames = parse_scene_document(doc, video);
    if (kind_ == JobKind::VideoTracking && !video)
        throw Error(ErrorKind::Validation, "video tracking needs a document with 'frames'");
    if (kind_ == JobKind::ImageSegmentation && video)
        throw Error(ErrorKind::Validation, "image segmentation got a video document");

    const std::string header = "particle,area_nm2,cx_nm,cy_nm,perimeter_nm,eccentricity,sphericity,solidity\n";
    if (!video) {
        auto tracked = track_particles(frames);
        const auto& parts = tracked.front().particles;
        std::string csv = header;
        Json list = Json::array();
        for (const auto& d : parts) {
            csv += descriptor_row(0, d, false);
            list.push_back(descriptor_json(d));
        }
        write_file(ctx.outputs_dir / "particles.csv", csv);
        write_file(ctx.outputs_dir / "summary.json",
                   Json{{"mode", "image"}, {"particle_count", parts.size()}, {"particles", list}}.dump(2));
        write_file(ctx.outputs_dir / "annotated.png", render_annotated(frames.front(), parts));
        return;
    }

    auto tracked = track_particles(frames);
    std::string csv = "frame," + header;
    std::vector<tar::Entry> pngs;
    std::vector<double> frame_idx, mean_area;
    Json counts = Json::array();
    for (std::size_t f = 0; f < tracked.size(); ++f) {
        double sum = 0;
        for (const auto& d : tracked[f].particles) {
            csv += descriptor_row(static_cast<int>(f), d, true);
            sum += d.area;
        }
        counts.push_back(tracked[f].particles.size());
        frame_idx.push_back(static_cast<double>(f));
        mean_area.push_back(tracked[f].particles.empty() ? 0.0 : sum / static_cast<double>(tracked[f].particles.size()));
        char name[32];
        std::snprintf(name, sizeof name, "frame_%04zu.png", f);
        pngs.push_back({name, render_annotated(frames[f], tracked[f].particles)});
    }
    std::set<int> ids;
    for (const auto& fr : tracked)
        for (const auto& d : fr.particles)
            ids.insert(d.particle);
    write_file(ctx.outputs_dir / "tracks.csv", csv);
    write_file(ctx.outputs_dir / "summary.json", Json{{"mode", "video"},
                                                      {"frames", tracked.size()},
                                                      {"tracks", ids.size()},
                                                      {"particle_counts", counts},
                                                      {"mean_area_nm2", mean_area}}
                                                     .dump(2));
    write_file(ctx.outputs_dir / "annotated_video.tar", tar::write(pngs));
    write_file(ctx.outputs_dir / "area_vs_frame.png", png::line_chart(frame_idx, {{mean_area, {20, 60, 200}}}));
}

} // namespace copilot::jobs
