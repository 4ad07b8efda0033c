// SPDX-License-Identifier: Apache-2.0
#include "copilot/core/error.hpp"
#include "copilot/core/util.hpp"
#include "copilot/dataplane/artifacts.hpp"
#include "copilot/dataplane/dataplane.hpp"
#include "copilot/dataplane/index.hpp"
#include "copilot/dataplane/metadata.hpp"
#include "copilot/dataplane/stores.hpp"

#include "fixtures.hpp"
#include "oracles.hpp"

#include <doctest.h>

#include <random>
#include <thread>

using namespace copilot;
using namespace copilot::dataplane;

namespace {

std::optional<std::string> maybe_text(std::mt19937& rng, const std::string& stem)
{
    if (rng() % 3 == 0)
        return std::nullopt;
    return stem + " " + std::to_string(rng() % 1000);
}

MetadataRecord random_metadata(std::mt19937& rng, int i)
{
    MetadataRecord m;
    m.record_id = "rec-" + std::to_string(i);
    m.title = maybe_text(rng, "Title");
    m.description = maybe_text(rng, "Description with ünïcode");
    if (rng() % 2) {
        ExperimentConditions c;
        if (rng() % 2)
            c.temperature_c = static_cast<double>(rng() % 1000) / 4.0;
        c.catalyst_composition = maybe_text(rng, "Pt/Al2O3");
        if (rng() % 2)
            c.metal_loading_wt_pct = static_cast<double>(rng() % 100) / 8.0;
        c.synthesis_method = maybe_text(rng, "colloidal");
        if (rng() % 2)
            c.extras["pressure_bar"] = static_cast<int>(rng() % 30);
        m.experiment_conditions = c;
    }
    if (rng() % 2)
        m.characterization_types = std::vector<std::string>{"DRIFTS", "XAS"};
    if (rng() % 2)
        m.degradation_mechanisms = std::vector<std::string>{};
    if (rng() % 2) {
        Provenance p;
        p.uploader = maybe_text(rng, "lab");
        p.timestamp = maybe_text(rng, "2025-01-01T00:00:00Z");
        if (rng() % 2)
            p.extras["instrument"] = "TEM-2";
        m.provenance = p;
    }
    if (rng() % 2)
        m.extras["custom_field"] = Json{{"nested", Json::array({1, "two", nullptr})}};
    return m;
}

DataPackage title_package(const std::string& id, const std::string& title)
{
    DataPackage p;
    p.metadata.record_id = id;
    p.metadata.title = title;
    return p;
}

} // namespace

TEST_SUITE("dataplane") {

TEST_CASE("metadata round-trips losslessly, including the all-null record")
{
    MetadataRecord bare;
    bare.record_id = "only-id";
    CHECK_FALSE(bare.has_content());
    CHECK(metadata_from_json(metadata_to_json(bare)) == bare);

    std::mt19937 rng(8);
    for (int i = 0; i < 500; ++i) {
        auto m = random_metadata(rng, i);
        auto j = metadata_to_json(m);
        CHECK(metadata_from_json(j) == m);
        CHECK(metadata_from_json(Json::parse(j.dump())) == m);
    }
}

TEST_CASE("lenient metadata parsing and validation")
{
    auto m = metadata_from_json(Json::parse(R"({"record_id": 17,
        "experiment_conditions": {"temperature_c": "650", "metal_loading_wt_pct": 1.5},
        "characterization_types": "TEM"})"));
    CHECK(m.record_id == "17");
    CHECK(m.experiment_conditions->temperature_c == 650.0);
    CHECK(*m.characterization_types == std::vector<std::string>{"TEM"});

    CHECK_THROWS_AS(metadata_from_json(Json::parse(R"({"title": "x"})")), Error);
    CHECK_THROWS_AS(metadata_from_json(Json::parse(R"({"record_id": null})")), Error);
    try {
        metadata_from_json(Json::parse(R"({"record_id": "a", "experiment_conditions": {"temperature_c": "hot"}})"));
        FAIL("expected");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::Validation);
        CHECK(std::string(e.what()).find("temperature_c") != std::string::npos);
    }
    CHECK_THROWS_AS(validate_package(Json{{"record_id", "x"}}, {}), Error);
    CHECK_NOTHROW(validate_package(Json{{"record_id", "x"}}, {{"a.csv", "1"}}));
}

TEST_CASE("object stores: integrity and key confinement")
{
    testing::TempDir dir;
    FsObjectStore fs_store(dir.path());
    MemoryObjectStore mem;
    for (ObjectStore* s : {static_cast<ObjectStore*>(&fs_store), static_cast<ObjectStore*>(&mem)}) {
        auto ref = s->put("a/b.txt", "hello");
        CHECK(ref.hash == sha256_hex("hello"));
        CHECK(ref.size == 5);
        CHECK(s->fetch(ref) == "hello");
        CHECK(s->list("a/") == std::vector<std::string>{"a/b.txt"});
        s->put("a/b.txt", "changed");
        CHECK_THROWS_AS(s->fetch(ref), Error);
        CHECK_THROWS_AS(s->get("missing"), Error);
        s->erase("a/b.txt");
        CHECK_FALSE(s->exists("a/b.txt"));
    }
    CHECK_THROWS_AS(fs_store.put("../escape.txt", "x"), Error);
    CHECK_THROWS_AS(fs_store.put("/abs.txt", "x"), Error);
}

TEST_CASE("kv stores agree")
{
    testing::TempDir dir;
    FsKvStore fs_kv(dir.path());
    MemoryKvStore mem;
    for (KvStore* kv : {static_cast<KvStore*>(&fs_kv), static_cast<KvStore*>(&mem)}) {
        kv->put("meta/x", "1");
        kv->put("meta/y", "2");
        kv->put("other/z", "3");
        CHECK(kv->get("meta/x") == "1");
        CHECK(kv->keys("meta/") == std::vector<std::string>{"meta/x", "meta/y"});
        kv->erase("meta/x");
        CHECK_FALSE(kv->get("meta/x").has_value());
    }
}

TEST_CASE("keyword search equals brute-force tf-idf on random corpora")
{
    std::mt19937 rng(2024);
    for (int corpus = 0; corpus < 30; ++corpus) {
        auto vocab_size = 1 + rng() % 50;
        std::vector<std::string> vocab;
        for (std::size_t v = 0; v < vocab_size; ++v)
            vocab.push_back("term" + std::string(1, static_cast<char>('a' + v % 26)) + std::to_string(v / 26));
        DataPlane plane(std::make_shared<MemoryKvStore>(), std::make_shared<MemoryObjectStore>());
        std::map<std::string, std::string> docs;
        auto n = 1 + rng() % 20;
        for (std::size_t r = 0; r < n; ++r) {
            std::string title;
            auto len = 1 + rng() % 8;
            for (std::size_t w = 0; w < len; ++w)
                title += vocab[rng() % vocab.size()] + (rng() % 2 ? " " : ", ");
            auto id = "doc" + std::to_string(r);
            plane.ingest_package(title_package(id, title));
            docs[id] = id + "\n" + title;
        }
        for (int q = 0; q < 10; ++q) {
            std::string query;
            auto len = 1 + rng() % 4;
            for (std::size_t w = 0; w < len; ++w)
                query += vocab[rng() % vocab.size()] + " ";
            auto expected = oracle::tfidf_rank(docs, query);
            auto got = plane.keyword_search(query, 100);
            REQUIRE(got.size() == expected.size());
            std::map<std::string, double> oracle_score(expected.begin(), expected.end());
            for (std::size_t i = 0; i < got.size(); ++i) {
                CHECK(got[i].score == doctest::Approx(expected[i].second).epsilon(1e-12));
                CHECK(oracle_score.at(got[i].record_id) == doctest::Approx(got[i].score).epsilon(1e-12));
            }
        }
    }
}

TEST_CASE("search examples")
{
    DataPlane plane(std::make_shared<MemoryKvStore>(), std::make_shared<MemoryObjectStore>());
    CHECK(plane.keyword_search("anything", 5).empty());
    plane.ingest_package(title_package("a", "Pt on TiO2 sintering"));
    auto hits = plane.keyword_search("TiO2", 5);
    REQUIRE(hits.size() == 1);
    CHECK(hits[0].record_id == "a");
    CHECK(hits[0].score > 0);
    CHECK_THROWS_AS(plane.keyword_search("x", 0), Error);
    CHECK_THROWS_AS(plane.ingest_package(title_package("a", "again")), Error);
}

TEST_CASE("every ingested record is found by each term of its title")
{
    std::mt19937 rng(5);
    DataPlane plane(std::make_shared<MemoryKvStore>(), std::make_shared<MemoryObjectStore>(), IndexQueue::Mode::Async);
    std::map<std::string, std::string> titles;
    for (int i = 0; i < 40; ++i) {
        std::string title = "w" + std::to_string(rng() % 30) + " w" + std::to_string(rng() % 30) + " Pt" + std::to_string(i);
        titles["r" + std::to_string(i)] = title;
        plane.ingest_package(title_package("r" + std::to_string(i), title));
    }
    plane.flush_index();
    for (const auto& [id, title] : titles)
        for (const auto& term : oracle::words(title)) {
            auto hits = plane.keyword_search(term, 100);
            bool found = std::any_of(hits.begin(), hits.end(), [&](const SearchHit& h) { return h.record_id == id; });
            CHECK_MESSAGE(found, id << " not found by " << term);
        }
}

TEST_CASE("failed ingestion leaves nothing behind")
{
    for (long fail_after = 0; fail_after < 3; ++fail_after) {
        auto kv = std::make_shared<MemoryKvStore>();
        auto objects = std::make_shared<MemoryObjectStore>();
        auto faulty_objects = std::make_shared<FaultyObjectStore>(objects, fail_after);
        DataPlane plane(kv, faulty_objects);
        DataPackage pkg = title_package("atomic", "atomic ingestion probe");
        pkg.files = {{"a.csv", "1"}, {"b.csv", "2"}, {"c.csv", "3"}};
        CHECK_THROWS(plane.ingest_package(pkg));
        CHECK(objects->list().empty());
        CHECK(kv->keys().empty());
        CHECK(plane.keyword_search("atomic", 5).empty());
    }
    auto kv = std::make_shared<MemoryKvStore>();
    auto objects = std::make_shared<MemoryObjectStore>();
    DataPlane plane(std::make_shared<FaultyKvStore>(kv, 0), objects);
    DataPackage pkg = title_package("atomic", "atomic ingestion probe");
    pkg.files = {{"a.csv", "1"}};
    CHECK_THROWS(plane.ingest_package(pkg));
    CHECK(objects->list().empty());
    CHECK(plane.keyword_search("atomic", 5).empty());
}

TEST_CASE("searchers never see a partially ingested record")
{
    DataPlane plane(std::make_shared<MemoryKvStore>(), std::make_shared<MemoryObjectStore>());
    std::atomic<bool> done{false};
    std::atomic<int> bad{0};
    std::thread reader([&] {
        while (!done) {
            for (const auto& h : plane.keyword_search("concurrent", 50)) {
                auto rec = plane.record(h.record_id);
                if (!rec || rec->files.size() != 2)
                    ++bad;
            }
        }
    });
    for (int i = 0; i < 60; ++i) {
        DataPackage pkg = title_package("c" + std::to_string(i), "concurrent record");
        pkg.files = {{"x.csv", std::string(2000, 'x')}, {"y.csv", "y"}};
        plane.ingest_package(pkg);
    }
    done = true;
    reader.join();
    CHECK(bad == 0);
}

TEST_CASE("fetch, reindex and file access")
{
    auto kv = std::make_shared<MemoryKvStore>();
    auto objects = std::make_shared<MemoryObjectStore>();
    {
        DataPlane plane(kv, objects);
        DataPackage pkg = title_package("keep", "persisted record");
        pkg.files = {{"data.csv", "a,b\n1,2\n"}};
        plane.ingest_package(pkg);
        CHECK(plane.fetch_file("keep", "data.csv") == "a,b\n1,2\n");
        CHECK_THROWS_AS(plane.fetch_file("keep", "nope.csv"), Error);
    }
    DataPlane again(kv, objects);
    again.flush_index();
    REQUIRE(again.keyword_search("persisted", 5).size() == 1);
    CHECK(again.record("keep")->files.size() == 1);
}

TEST_CASE("crawler ingests directories and archives once")
{
    testing::TempDir drop;
    std::filesystem::create_directories(drop / "pkg-dir");
    write_file(drop / "pkg-dir" / kMetadataFileName, R"({"record_id": "from-dir", "title": "Directory package"})");
    write_file(drop / "pkg-dir" / "values.csv", "x\n1\n");
    DataPackage tar_pkg = title_package("from-tar", "Archive package");
    tar_pkg.files = {{"t.csv", "t\n2\n"}};
    write_file(drop / "pkg.tar", package_to_tar(tar_pkg));
    std::filesystem::create_directories(drop / "broken");
    write_file(drop / "broken" / kMetadataFileName, R"({"title": "no id"})");

    DataPlane plane(std::make_shared<MemoryKvStore>(), std::make_shared<MemoryObjectStore>());
    auto first = crawl_source(plane, drop.path());
    std::sort(first.begin(), first.end());
    CHECK(first == std::vector<std::string>{"from-dir", "from-tar"});
    CHECK(crawl_source(plane, drop.path()).empty());
    CHECK(plane.record_ids().size() == 2);

    // Renaming a container does not change its content hash.
    std::filesystem::rename(drop / "pkg-dir", drop / "renamed");
    CHECK(crawl_source(plane, drop.path()).empty());

    Crawler crawler(plane, drop.path(), std::chrono::milliseconds(20));
    crawler.start();
    std::this_thread::sleep_for(std::chrono::milliseconds(80));
    crawler.stop();
    CHECK(plane.record_ids().size() == 2);
}

TEST_CASE("artifacts resolve by id")
{
    ArtifactStore store(std::make_shared<MemoryKvStore>(), std::make_shared<MemoryObjectStore>());
    auto info = store.put("plot.png", "\x89PNG....", "s1");
    CHECK(info.content_type == "image/png");
    CHECK(artifact_link(info.id) == "/artifacts/" + info.id);
    auto [got, bytes] = store.get(info.id);
    CHECK(got.name == "plot.png");
    CHECK(bytes == "\x89PNG....");
    CHECK_FALSE(store.info("art-missing").has_value());
    CHECK_THROWS_AS(store.get("art-missing"), Error);
    CHECK(content_type_for("a.csv") == "text/csv");
}

}
