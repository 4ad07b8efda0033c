// SPDX-License-Identifier: Apache-2.0
#include "copilot/core/error.hpp"
#include "copilot/core/util.hpp"
#include "copilot/dataplane/artifacts.hpp"
#include "copilot/dataplane/stores.hpp"
#include "copilot/jobs/jobs.hpp"
#include "copilot/jobs/segmentation.hpp"
#include "copilot/jobs/simulation.hpp"
#include "copilot/jobs/uq.hpp"

#include "fixtures.hpp"
#include "oracles.hpp"

#include <doctest.h>

#include <cmath>
#include <random>
#include <thread>

using namespace copilot;
using namespace copilot::jobs;
using namespace std::chrono_literals;

namespace {

class FailingExecutor : public Executor {
public:
    std::string name() const override { return "always-fails"; }
    JobKind kind() const override { return JobKind::ImageSegmentation; }
    ToolSpec schema() const override
    {
        ToolSpec s;
        s.name = "fail";
        s.description = "Fails.";
        return s;
    }
    void run(const ExecutionContext& ctx) const override
    {
        write_file(ctx.outputs_dir / "partial.txt", "half done");
        throw std::runtime_error("detector offline");
    }
};

struct SchedulerFixture {
    std::shared_ptr<dataplane::MemoryObjectStore> objects = std::make_shared<dataplane::MemoryObjectStore>();
    std::shared_ptr<dataplane::ArtifactStore> artifacts = std::make_shared<dataplane::ArtifactStore>(
        std::make_shared<dataplane::MemoryKvStore>(), std::make_shared<dataplane::MemoryObjectStore>());
    std::unique_ptr<JobScheduler> sched;

    explicit SchedulerFixture(std::size_t workers = 4)
    {
        objects->put("inputs/segmentation/disk_ellipse.json",
                     read_file(testing::repo_path("data/inputs/segmentation/disk_ellipse.json")));
        objects->put("inputs/segmentation/growth_video.json",
                     read_file(testing::repo_path("data/inputs/segmentation/growth_video.json")));
        objects->put("inputs/uq/training.csv", read_file(testing::repo_path("data/inputs/uq/training.csv")));
        SchedulerConfig cfg;
        cfg.workers = workers;
        sched = std::make_unique<JobScheduler>(cfg, objects, artifacts);
        sched->register_executor({JobKind::Simulation, "sintering-sim"}, std::make_shared<SimulationExecutor>());
        sched->register_executor({JobKind::UncertaintyQuantification, "gp-uq"}, std::make_shared<UqExecutor>());
        sched->register_executor({JobKind::VideoTracking, "particle-tracking", ResourceClass::Gpu},
                                 std::make_shared<SegmentationExecutor>(JobKind::VideoTracking));
    }
};

bool history_is_complete(const JobRecord& r)
{
    std::vector<JobState> expected{JobState::Submitted, JobState::Starting, JobState::Running};
    if (r.history.size() != 4)
        return false;
    for (std::size_t i = 0; i < 3; ++i)
        if (r.history[i].state != expected[i])
            return false;
    for (std::size_t i = 1; i < r.history.size(); ++i)
        if (r.history[i].at < r.history[i - 1].at)
            return false;
    return is_terminal(r.history.back().state) && r.history.back().state == r.state;
}

} // namespace

TEST_SUITE("jobs") {

TEST_CASE("state machine")
{
    const std::vector<JobState> all{JobState::Submitted, JobState::Starting, JobState::Running, JobState::Succeeded,
                                    JobState::Failed};
    int valid = 0;
    for (auto a : all)
        for (auto b : all)
            valid += is_valid_transition(a, b);
    CHECK(valid == 4);
    CHECK(is_valid_transition(JobState::Running, JobState::Failed));
    CHECK_FALSE(is_valid_transition(JobState::Submitted, JobState::Running));
    CHECK(is_terminal(JobState::Succeeded));
    CHECK_FALSE(is_terminal(JobState::Running));
    CHECK(parse_job_kind(to_string(JobKind::VideoTracking)) == JobKind::VideoTracking);
    CHECK_THROWS_AS(parse_job_kind("teleport"), Error);
}

TEST_CASE("sintering law")
{
    CHECK(sinter_size(2, 0.01, 3, 100) == doctest::Approx(2 * std::cbrt(2.0)).epsilon(1e-14));
    CHECK(sinter_size(2, 0.01, 3, 100) == doctest::Approx(oracle::sinter_diameter(2, 0.01, 3, 100)));
    CHECK(arrhenius_rate(5e3, 100e3, 500) ==
          doctest::Approx(5e3 * std::exp(-100e3 / (kGasConstant * 773.15))).epsilon(1e-14));

    SimParams p;
    auto s = run_simulation(p, 600, 600, 10);
    REQUIRE(s.time_min.size() == 61);
    CHECK(s.time_min.back() == 600);
    CHECK(s.mean_nm.front() == doctest::Approx(p.d0_nm));
    for (std::size_t i = 0; i < s.time_min.size(); ++i) {
        CHECK(s.lower_nm[i] <= s.mean_nm[i]);
        CHECK(s.mean_nm[i] <= s.upper_nm[i]);
        if (i > 0)
            CHECK(s.mean_nm[i] >= s.mean_nm[i - 1]);
    }
    CHECK(s.to_csv().rfind("time_min,mean_nm,lower_nm,upper_nm\n", 0) == 0);

    CHECK_THROWS_AS(run_simulation(p, 5000), Error);
    CHECK_THROWS_AS(run_simulation(p, -100), Error);
    CHECK_THROWS_AS(run_simulation(p, 500, 100, 0), Error);
}

TEST_CASE("hotter runs coarsen faster")
{
    SimParams p;
    std::vector<double> temps{400, 500, 600, 700, 800};
    std::vector<SimSeries> runs;
    for (double t : temps)
        runs.push_back(run_simulation(p, t));
    for (std::size_t i = 1; i < runs.size(); ++i)
        for (std::size_t j = 1; j < runs[i].time_min.size(); ++j)
            CHECK(runs[i].mean_nm[j] > runs[i - 1].mean_nm[j]);
}

TEST_CASE("geometry of sampled shapes")
{
    auto disk = ellipse_polygon(0, 0, 30, 30, 0);
    auto d = describe(disk);
    CHECK(d.area == doctest::Approx(M_PI * 900).epsilon(1e-6));
    CHECK(d.perimeter == doctest::Approx(2 * M_PI * 30).epsilon(1e-6));
    CHECK(std::abs(d.eccentricity) < 1e-6);
    CHECK(std::abs(d.sphericity - 1) < 1e-6);
    CHECK(std::abs(d.solidity - 1) < 1e-6);
    CHECK(std::abs(d.cx) < 1e-6);

    auto ell = ellipse_polygon(10, -5, 40, 20, 30);
    auto e = describe(ell);
    CHECK(std::abs(e.eccentricity - std::sqrt(0.75)) < 1e-6);
    CHECK(e.area == doctest::Approx(M_PI * 800).epsilon(1e-6));
    CHECK(e.perimeter == doctest::Approx(oracle::ellipse_perimeter(40, 20)).epsilon(1e-6));
    CHECK(std::abs(e.cx - 10) < 1e-6);
    CHECK(std::abs(e.cy + 5) < 1e-6);
    CHECK(std::abs(e.solidity - 1) < 1e-6);

    auto scaled = describe(ell, 0.5);
    CHECK(scaled.area == doctest::Approx(e.area * 0.25));
    CHECK(scaled.perimeter == doctest::Approx(e.perimeter * 0.5));
    CHECK(scaled.eccentricity == doctest::Approx(e.eccentricity));

    Polygon l_shape{{0, 0}, {2, 0}, {2, 1}, {1, 1}, {1, 2}, {0, 2}};
    CHECK(polygon_area(l_shape) == doctest::Approx(3));
    CHECK(describe(l_shape).solidity == doctest::Approx(3.0 / 3.5));
    CHECK(polygon_area(convex_hull(l_shape)) == doctest::Approx(3.5));
    CHECK_THROWS_AS(describe(Polygon{{0, 0}, {1, 1}}), Error);
}

TEST_CASE("scene parsing and tracking")
{
    bool video = true;
    auto scenes = parse_scene_document(Json::parse(read_file(testing::repo_path("data/inputs/segmentation/disk_ellipse.json"))), video);
    CHECK_FALSE(video);
    REQUIRE(scenes.size() == 1);
    CHECK(scenes[0].particles.size() == 3);

    auto frames = parse_scene_document(Json::parse(read_file(testing::repo_path("data/inputs/segmentation/growth_video.json"))), video);
    CHECK(video);
    auto tracked = track_particles(frames);
    REQUIRE(tracked.size() == 8);
    std::map<int, std::vector<double>> areas;
    for (const auto& f : tracked)
        for (const auto& p : f.particles)
            areas[p.particle].push_back(p.area);
    CHECK_FALSE(areas.empty());
    for (const auto& [id, a] : areas) {
        CHECK(a.size() == 8);
        for (std::size_t i = 1; i < a.size(); ++i)
            CHECK(a[i] > a[i - 1]);
    }
    CHECK_THROWS_AS(parse_scene_document(Json::parse(R"({"particles": [{"shape": "blob"}]})"), video), Error);
}

TEST_CASE("gp posterior variance matches a dense solve")
{
    std::mt19937 rng(17);
    std::uniform_real_distribution<double> u(0, 10);
    for (int dims : {1, 2}) {
        std::vector<double> lengths(dims, 1.5);
        std::vector<std::vector<double>> x;
        std::vector<double> y;
        for (int i = 0; i < 12; ++i) {
            std::vector<double> p;
            for (int d = 0; d < dims; ++d)
                p.push_back(u(rng));
            x.push_back(p);
            y.push_back(std::sin(p[0]));
        }
        GaussianProcess gp(lengths, 2.0, 1e-8);
        gp.fit(x, y);
        std::vector<std::vector<double>> grid;
        for (int i = 0; i <= 20; ++i)
            if (dims == 1)
                grid.push_back({i * 0.5});
            else
                for (int j = 0; j <= 20; ++j)
                    grid.push_back({i * 0.5, j * 0.5});
        auto expect = oracle::gp_variance(x, grid, lengths, 2.0, gp.effective_jitter() / 1.0);
        std::vector<double> got;
        for (const auto& q : grid) {
            auto [mean, var] = gp.predict(q);
            CHECK(var >= 0);
            CHECK(var <= gp.prior_variance());
            got.push_back(var);
        }
        for (std::size_t i = 0; i < grid.size(); ++i)
            CHECK(std::abs(got[i] - expect[i]) < 1e-8);

        std::vector<std::size_t> ours(grid.size()), theirs(grid.size());
        std::iota(ours.begin(), ours.end(), 0);
        std::iota(theirs.begin(), theirs.end(), 0);
        std::stable_sort(ours.begin(), ours.end(), [&](auto a, auto b) { return got[a] > got[b] + 1e-9; });
        std::stable_sort(theirs.begin(), theirs.end(), [&](auto a, auto b) { return expect[a] > expect[b] + 1e-9; });
        CHECK(ours.front() == theirs.front());

        auto [m0, v0] = gp.predict(x[0]);
        CHECK(v0 < 1e-6);
        CHECK(m0 == doctest::Approx(y[0]).epsilon(1e-4));
    }
}

TEST_CASE("uq ranking and bounds")
{
    auto training = parse_training_csv(read_file(testing::repo_path("data/inputs/uq/training.csv")), "conversion_loss_pct");
    REQUIRE(training.size() > 3);
    UqConfig cfg;
    UqBounds b{300, 700, 0.5, 5.0, {}};
    auto res = run_uq(cfg, training, b);
    CHECK(res.ranked.size() == res.methods.size() * res.temperatures.size() * res.loadings.size());
    CHECK(res.temperatures.front() == 300);
    CHECK(res.temperatures.back() == 700);
    for (std::size_t i = 1; i < res.ranked.size(); ++i)
        CHECK(res.ranked[i - 1].variance >= res.ranked[i].variance);
    for (const auto& c : res.ranked) {
        CHECK(c.variance >= 0);
        CHECK(c.variance <= cfg.signal_variance);
    }
    CHECK_THROWS_AS(run_uq(cfg, training, UqBounds{310, 320, 0.5, 5.0, {}}), Error);
    CHECK_THROWS_AS(run_uq(cfg, training, UqBounds{700, 300, 0.5, 5.0, {}}), Error);
    CHECK_THROWS_AS(parse_training_csv("temperature_c\n1\n", "conversion_loss_pct"), Error);
}

TEST_CASE("scheduler runs a job through every state")
{
    SchedulerFixture f;
    auto id = f.sched->submit(JobKind::Simulation, RawArgs{{"temperature", "650"}}, "s1");
    CHECK(id.rfind("job-", 0) == 0);
    REQUIRE(f.sched->wait(id, 30s));
    auto r = f.sched->status(id);
    CHECK(r.state == JobState::Succeeded);
    CHECK(history_is_complete(r));
    auto out = f.sched->collect(id);
    CHECK(out.text.find("time_min") != std::string::npos);
    REQUIRE(out.artifacts.size() == 2);
    for (const auto& a : out.artifacts)
        CHECK(f.artifacts->info(a.artifact_id).has_value());
    CHECK(r.to_json()["state"] == "SUCCEEDED");
}

TEST_CASE("scheduler errors")
{
    SchedulerFixture f(1);
    CHECK_THROWS_AS(f.sched->status("job-0000"), Error);
    CHECK_THROWS_AS(f.sched->submit(JobKind::ImageSegmentation, RawArgs{{"input", "x"}}, "s"), Error);
    CHECK_THROWS_AS(f.sched->submit(JobKind::Simulation, RawArgs{}, "s"), Error);
    CHECK_THROWS_AS(f.sched->submit(JobKind::Simulation, RawArgs{{"temperature", "9000"}}, "s"), Error);
    CHECK_THROWS_AS(f.sched->submit(JobKind::VideoTracking, RawArgs{{"input", "missing.json"}}, "s"), Error);

    // A slow job keeps the single worker busy so the second stays queued.
    auto slow = f.sched->submit(JobKind::UncertaintyQuantification, RawArgs{{"temp_min", "200"}, {"temp_max", "1200"}}, "s");
    auto queued = f.sched->submit(JobKind::Simulation, RawArgs{{"temperature", "500"}}, "s");
    try {
        f.sched->collect(queued);
        // Finished already on a fast machine; nothing to assert.
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::NotFinished);
    }
    CHECK(f.sched->wait(slow, 60s));
    CHECK(f.sched->wait(queued, 60s));
}

TEST_CASE("failed jobs report their log")
{
    SchedulerFixture f(1);
    f.sched->register_executor({JobKind::ImageSegmentation, "always-fails"}, std::make_shared<FailingExecutor>());
    auto id = f.sched->submit(JobKind::ImageSegmentation, RawArgs{}, "s");
    REQUIRE(f.sched->wait(id, 30s));
    auto r = f.sched->status(id);
    CHECK(r.state == JobState::Failed);
    CHECK(history_is_complete(r));
    CHECK(r.failure_log.find("detector offline") != std::string::npos);
    try {
        f.sched->collect(id);
        FAIL("expected");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::JobFailed);
        CHECK(std::string(e.what()).find("detector offline") != std::string::npos);
    }
}

TEST_CASE("many concurrent jobs stay scoped to their sessions")
{
    SchedulerFixture f(4);
    std::map<std::string, std::string> owner;
    std::mutex mu;
    std::vector<std::thread> submitters;
    for (int s = 0; s < 5; ++s)
        submitters.emplace_back([&, s] {
            for (int j = 0; j < 8; ++j) {
                auto session = "sess-" + std::to_string(s);
                auto kind = j % 4 == 3 ? JobKind::VideoTracking : JobKind::Simulation;
                RawArgs args = kind == JobKind::VideoTracking ? RawArgs{{"input", "growth_video.json"}}
                                                              : RawArgs{{"temperature", std::to_string(300 + 50 * j)}};
                auto id = f.sched->submit(kind, args, session);
                std::lock_guard lock(mu);
                owner[id] = session;
            }
        });
    for (auto& t : submitters)
        t.join();
    REQUIRE(owner.size() == 40);
    for (const auto& [id, session] : owner) {
        REQUIRE(f.sched->wait(id, 120s));
        auto r = f.sched->status(id);
        CHECK(r.state == JobState::Succeeded);
        CHECK(r.session_id == session);
        CHECK(history_is_complete(r));
        for (const auto& o : f.sched->collect(id).artifacts)
            CHECK(f.artifacts->info(o.artifact_id).has_value());
    }
    for (int s = 0; s < 5; ++s) {
        auto session = "sess-" + std::to_string(s);
        auto listed = f.sched->list(session);
        CHECK(listed.size() == 8);
        for (const auto& r : listed)
            CHECK(owner.at(r.id) == session);
    }
    CHECK(f.sched->list("nobody").empty());
}

}
