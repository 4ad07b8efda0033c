// SPDX-License-Identifier: Apache-2.0
#include "copilot/core/error.hpp"
#include "copilot/core/log.hpp"
#include "copilot/core/png.hpp"
#include "copilot/core/tar.hpp"
#include "copilot/core/text.hpp"
#include "copilot/core/util.hpp"

#include <doctest.h>

#include <random>

using namespace copilot;

TEST_SUITE("core") {

TEST_CASE("tokenize keeps formula tokens and lowercases")
{
    auto t = text::tokenize("Pt/TiO2 catalysts, CO-oxidation!");
    CHECK(t == std::vector<std::string>{"pt", "tio2", "catalysts", "co", "oxidation"});
    CHECK(text::tokenize("").empty());
}

TEST_CASE("first_number skips digits glued to letters")
{
    CHECK(text::first_number("Simulate TiO2 at 650 C").value() == "650");
    CHECK(text::first_number("at -12.5 degrees").value() == "-12.5");
    CHECK_FALSE(text::first_number("no digits here").has_value());
}

TEST_CASE("identifier-boundary search")
{
    CHECK(text::contains_at_ident_boundary("import os", "os"));
    CHECK(text::contains_at_ident_boundary("os.system(1)", "os"));
    CHECK_FALSE(text::contains_at_ident_boundary("plt.close()", "os"));
    CHECK_FALSE(text::contains_at_ident_boundary("cost = 1", "os"));
}

TEST_CASE("string helpers")
{
    CHECK(text::trim("  a b \n") == "a b");
    CHECK(text::split("a,,b", ',') == std::vector<std::string>{"a", "", "b"});
    CHECK(text::join({"x", "y"}, ", ") == "x, y");
    CHECK(text::replace_all("aaa", "a", "bb") == "bbbbbb");
    CHECK(text::fixed(2.0 / 3.0, 3) == "0.667");
    CHECK(text::contains_ci("Hello World", "WORLD"));
}

TEST_CASE("sha256 known vector")
{
    CHECK(sha256_hex("abc") == "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
}

TEST_CASE("random_hex length and alphabet")
{
    auto h = random_hex(8);
    CHECK(h.size() == 16);
    CHECK(h.find_first_not_of("0123456789abcdef") == std::string::npos);
    CHECK(random_hex(8) != h);
}

TEST_CASE("timestamps round-trip at millisecond precision")
{
    auto now = std::chrono::time_point_cast<std::chrono::milliseconds>(Clock::now());
    auto s = format_timestamp(now);
    CHECK(s.back() == 'Z');
    CHECK(parse_timestamp(s) == now);
}

TEST_CASE("path_within rejects escapes")
{
    CHECK(path_within("/a/b", "/a/b/c/d"));
    CHECK_FALSE(path_within("/a/b", "/a/b/../c"));
    CHECK_FALSE(path_within("/a/b", "/a/bc"));
}

TEST_CASE("error category names")
{
    Error e(ErrorKind::NotFinished, "x");
    CHECK(e.category() == "not_finished");
    CHECK(to_string(ErrorKind::Guardrail) == "guardrail");
}

TEST_CASE("log level parsing")
{
    CHECK(log::parse_level("warn") == log::Level::Warn);
    CHECK_THROWS_AS(log::parse_level("loud"), Error);
}

TEST_CASE("png encodes readable dimensions")
{
    png::Canvas c(13, 7);
    c.line(0, 0, 12, 6, {255, 0, 0});
    auto bytes = c.encode();
    int w = 0, h = 0;
    REQUIRE(png::read_dimensions(bytes, w, h));
    CHECK(w == 13);
    CHECK(h == 7);
    CHECK(c.get(0, 0).r == 255);
    CHECK_FALSE(png::read_dimensions("not a png", w, h));
}

TEST_CASE("tar round-trip and corruption")
{
    std::mt19937 rng(5);
    std::vector<tar::Entry> entries;
    for (int i = 0; i < 5; ++i) {
        std::string data(static_cast<std::size_t>(rng() % 3000), '\0');
        for (auto& ch : data)
            ch = static_cast<char>(rng() % 256);
        entries.push_back({"dir/file" + std::to_string(i) + ".bin", data});
    }
    auto archive = tar::write(entries);
    auto back = tar::read(archive);
    REQUIRE(back.size() == entries.size());
    for (std::size_t i = 0; i < entries.size(); ++i) {
        CHECK(back[i].name == entries[i].name);
        CHECK(back[i].data == entries[i].data);
    }
    auto bad = archive;
    bad[10] ^= 0x5a;
    CHECK_THROWS_AS(tar::read(bad), Error);
    CHECK_THROWS_AS(tar::read(archive.substr(0, 700)), Error);
}

}
