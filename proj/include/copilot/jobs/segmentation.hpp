// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "copilot/jobs/jobs.hpp"

#include <array>
#include <string>
#include <vector>

namespace copilot::jobs {

using Point = std::array<double, 2>;
using Polygon = std::vector<Point>;

/// Ellipse outline sampled as a regular polygon (65536 vertices by default).
Polygon ellipse_polygon(double cx, double cy, double a, double b, double angle_deg, std::size_t vertices = 65536);

double polygon_area(const Polygon& p);       // absolute shoelace area
double polygon_perimeter(const Polygon& p);
Point polygon_centroid(const Polygon& p);
Polygon convex_hull(Polygon p);

/// Second central moments of the polygon region: {mu20, mu02, mu11} per unit area.
std::array<double, 3> polygon_moments(const Polygon& p);

struct ParticleDescriptor {
    int particle = 0;   // index within the frame, or track id in video mode
    double area = 0;    // nm^2
    double cx = 0;      // nm
    double cy = 0;      // nm
    double perimeter = 0;
    double eccentricity = 0;  // sqrt(1 - lambda_min / lambda_max), in [0, 1)
    double sphericity = 0;    // 4 pi A / P^2, in (0, 1]
    double solidity = 0;      // A / hull area, in (0, 1]
};

/// Throws Error(Validation) for degenerate polygons.
ParticleDescriptor describe(const Polygon& p, double nm_per_px = 1.0);

struct Scene {
    int width = 256;
    int height = 256;
    double nm_per_px = 1.0;
    std::vector<Polygon> particles;
};

/// Scene document: {width, height, nm_per_px, particles:[{shape:"ellipse", cx, cy, a, b, angle_deg} |
/// {shape:"polygon", points:[[x,y],...]}]}. Video: {width, height, nm_per_px, frames:[{particles:[...]}]}.
/// Throws Error(Validation) on malformed input.
std::vector<Scene> parse_scene_document(const Json& doc, bool& is_video);

struct FrameDescriptors {
    int frame = 0;
    std::vector<ParticleDescriptor> particles;
};

/// Assigns stable track ids across frames by greedy nearest-centroid matching.
std::vector<FrameDescriptors> track_particles(const std::vector<Scene>& frames);

/// Outlines and centroid markers drawn over the scene.
std::string render_annotated(const Scene& scene, const std::vector<ParticleDescriptor>& desc);

class SegmentationExecutor : public Executor {
public:
    explicit SegmentationExecutor(JobKind kind) : kind_(kind) {}
    std::string name() const override
    {
        return kind_ == JobKind::VideoTracking ? "particle-tracking" : "particle-segmentation";
    }
    JobKind kind() const override { return kind_; }
    ToolSpec schema() const override;
    std::vector<std::string> inputs(const NormalizedArgs& args) const override;
    void run(const ExecutionContext& ctx) const override;

private:
    JobKind kind_;
};

} // namespace copilot::jobs
