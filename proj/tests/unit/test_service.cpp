// SPDX-License-Identifier: Apache-2.0
#include "copilot/app/app.hpp"
#include "copilot/core/error.hpp"
#include "copilot/service/api.hpp"

#include "fixtures.hpp"

#include <doctest.h>
#include <httplib.h>

#include <thread>

using namespace copilot;
using namespace copilot::service;
using namespace std::chrono_literals;

namespace {

app::App& shared_app()
{
    static app::App a(testing::bundled_config());
    return a;
}

ApiHandler& handler()
{
    static ApiHandler h(ApiConfig{}, shared_app().engine(), shared_app().jobs(), shared_app().artifacts());
    return h;
}

HttpResponse call(const std::string& method, const std::string& path, const Json& body = nullptr,
                  std::map<std::string, std::string> query = {}, const std::string& user = "tester")
{
    HttpRequest r;
    r.method = method;
    r.path = path;
    r.query = std::move(query);
    if (!user.empty())
        r.headers["x-auth-user"] = user;
    if (!body.is_null())
        r.body = body.dump();
    return handler().handle(r);
}

std::string job_id_in(const std::string& s)
{
    auto pos = s.find("job-");
    REQUIRE(pos != std::string::npos);
    auto end = pos + 4;
    while (end < s.size() && std::isxdigit(static_cast<unsigned char>(s[end])))
        ++end;
    return s.substr(pos, end - pos);
}

} // namespace

TEST_SUITE("service") {

TEST_CASE("health, auth and routing errors")
{
    auto h = call("GET", "/health", nullptr, {}, "");
    CHECK(h.status == 200);
    CHECK(h.json()["status"] == "ok");
    CHECK(call("GET", "/agents", nullptr, {}, "").status == 401);
    CHECK(call("GET", "/agents", nullptr, {}, "   ").status == 401);
    auto agents = call("GET", "/agents").json()["agents"];
    CHECK(agents.size() == 6);
    CHECK(call("GET", "/nowhere").status == 404);
    CHECK(call("GET", "/chat").status == 405);
    CHECK(call("POST", "/health").status == 405);

    HttpRequest bad;
    bad.method = "POST";
    bad.path = "/chat";
    bad.headers["X-Auth-User"] = "u";
    bad.body = "{not json";
    CHECK(handler().handle(bad).status == 400);
    CHECK(call("POST", "/chat", Json{{"message", "hi"}, {"mode", "sideways"}}).status == 400);
    CHECK(call("POST", "/chat", Json{{"message", ""}}).status == 400);
    CHECK(call("POST", "/chat", Json{{"message", "x"}, {"mode", "direct"}}).status == 400);
    auto unknown = call("POST", "/chat", Json{{"message", "x"}, {"mode", "direct"}, {"agent", "ghost"}});
    CHECK(unknown.status == 404);
    CHECK(unknown.json()["error"]["category"] == "not_found");
}

TEST_CASE("chat request parsing")
{
    auto full = parse_chat_request(Json{{"message", "m"}});
    CHECK_FALSE(full.mode.is_direct());
    CHECK(full.session_id.empty());
    auto direct = parse_chat_request(Json{{"message", "m"}, {"mode", "direct"}, {"agent", "uq"}, {"session_id", "s"}});
    CHECK(direct.mode.is_direct());
    CHECK(direct.session_id == "s");
    CHECK_THROWS_AS(parse_chat_request(Json{{"message", "m"}, {"tool", 3}, {"mode", "direct"}, {"agent", "uq"}}), Error);
    CHECK_THROWS_AS(parse_chat_request(Json::array()), Error);
    CHECK(http_status_for(ErrorKind::NotFound) == 404);
    CHECK(http_status_for(ErrorKind::Validation) == 400);
}

TEST_CASE("full-mode chat routes through the supervisor")
{
    auto r = call("POST", "/chat", Json{{"message", "Find recent articles on TiO2-supported Pt catalysts for CO oxidation"}});
    REQUIRE(r.status == 200);
    auto j = r.json();
    CHECK(j["ok"] == true);
    CHECK_FALSE(j["final"].get<std::string>().empty());
    CHECK(j["trace_summary"]["agents"] == Json::array({"researcher"}));
    CHECK(j["trace_summary"]["tools"] == Json::array({"osti_search"}));
    auto session = j["session_id"].get<std::string>();
    CHECK_FALSE(session.empty());

    auto again = call("POST", "/chat", Json{{"message", "Segment the particles in the TEM image disk_ellipse.json"},
                                            {"session_id", session}});
    REQUIRE(again.status == 200);
    CHECK(again.json()["session_id"] == session);
    CHECK(again.json()["trace_summary"]["agents"] == Json::array({"segmenter"}));
}

TEST_CASE("direct-mode chat and job endpoints")
{
    auto r = call("POST", "/chat", Json{{"message", "Simulate Pt nanoparticle sintering at 650 C"},
                                        {"mode", "direct"},
                                        {"agent", "simulation"},
                                        {"session_id", "svc-direct"}});
    REQUIRE(r.status == 200);
    auto j = r.json();
    CHECK(j["agent"] == "simulation");
    CHECK(j["trace_summary"]["agents"] == Json::array({"simulation"}));
    for (const auto& d : j["trace_summary"]["decisions"])
        CHECK(d["kind"] != "route");
    auto id = job_id_in(j["final"].get<std::string>());
    REQUIRE(shared_app().jobs().wait(id, 60s));

    CHECK(call("GET", "/jobs").status == 400);
    auto list = call("GET", "/jobs", nullptr, {{"session_id", "svc-direct"}}).json();
    REQUIRE(list["jobs"].size() == 1);
    CHECK(list["jobs"][0]["job_id"] == id);
    CHECK(call("GET", "/jobs", nullptr, {{"session_id", "someone-else"}}).json()["jobs"].empty());

    auto job = call("GET", "/jobs/" + id, nullptr, {{"session_id", "svc-direct"}});
    REQUIRE(job.status == 200);
    CHECK(job.json()["state"] == "SUCCEEDED");
    CHECK(call("GET", "/jobs/" + id, nullptr, {{"session_id", "someone-else"}}).status == 404);
    CHECK(call("GET", "/jobs/job-0").status == 404);

    auto outputs = job.json()["outputs"];
    REQUIRE(outputs.size() == 2);
    for (const auto& o : outputs) {
        auto link = o["link"].get<std::string>();
        auto art = call("GET", link);
        CHECK(art.status == 200);
        CHECK(art.body.size() == o["size"].get<std::size_t>());
        CHECK(art.headers.count("Content-Disposition") == 1);
    }
    CHECK(call("GET", "/artifacts/art-nope").status == 404);

    auto filtered = call("POST", "/chat", Json{{"message", "Simulate sintering at 500 C"},
                                               {"mode", "direct"},
                                               {"agent", "simulation"},
                                               {"tool", "osti_search"}});
    CHECK(filtered.status == 404);
}

TEST_CASE("routes over a real socket")
{
    httplib::Server server;
    bind_routes(server, handler());
    int port = server.bind_to_any_port("127.0.0.1");
    std::thread t([&] { server.listen_after_bind(); });
    server.wait_until_ready();

    httplib::Client client("127.0.0.1", port);
    client.set_read_timeout(60, 0);
    auto health = client.Get("/health");
    REQUIRE(health);
    CHECK(health->status == 200);
    auto denied = client.Post("/chat", R"({"message": "hi"})", "application/json");
    REQUIRE(denied);
    CHECK(denied->status == 401);
    httplib::Headers auth{{"X-Auth-User", "net"}};
    auto chat = client.Post("/chat", auth, R"({"message": "Simulate Pt nanoparticle sintering at 650 C"})",
                            "application/json");
    REQUIRE(chat);
    CHECK(chat->status == 200);
    auto body = Json::parse(chat->body);
    CHECK(body["trace_summary"]["agents"] == Json::array({"simulation"}));
    auto jobs = client.Get("/jobs?session_id=" + body["session_id"].get<std::string>(), auth);
    REQUIRE(jobs);
    CHECK(Json::parse(jobs->body)["jobs"].size() == 1);

    server.stop();
    t.join();
}

}
