// SPDX-License-Identifier: Apache-2.0
#include "copilot/core/error.hpp"
#include "copilot/core/text.hpp"
#include "copilot/core/util.hpp"
#include "copilot/sandbox/filter.hpp"
#include "copilot/sandbox/sandbox.hpp"

#include "oracles.hpp"
#include "scripts.hpp"

#include <doctest.h>

#include <random>

using namespace copilot;
using namespace copilot::sandbox;

namespace {

Sandbox& shared_sandbox()
{
    static Sandbox box([] {
        SandboxConfig c;
        c.python = "/usr/bin/python3";
        c.parallelism = 2;
        c.limits.wall = std::chrono::milliseconds(60000);
        return c;
    }());
    return box;
}

ExecutionOutcome run_filtered(const std::string& script)
{
    auto f = tier2_filter(script, FilterPolicy::defaults());
    REQUIRE_MESSAGE(f.accepted, f.reason);
    return shared_sandbox().execute(f.sanitized, {}, f.bindings);
}

} // namespace

TEST_SUITE("sandbox") {

TEST_CASE("default policy values")
{
    auto p = FilterPolicy::defaults();
    CHECK(p.blocked_tokens == std::vector<std::string>{"os", "boto3", "__import__"});
    CHECK(p.allowed_libraries == std::vector<std::string>{"numpy", "pandas", "matplotlib", "seaborn"});
    CHECK_NOTHROW(p.check());
    auto bad = p;
    bad.blocked_tokens.push_back("numpy");
    CHECK_THROWS_AS(bad.check(), Error);
    bad.allowed_libraries.clear();
    CHECK_THROWS_AS(bad.check(), Error);
}

TEST_CASE("filter examples")
{
    auto p = FilterPolicy::defaults();
    CHECK_FALSE(tier2_filter("import os\nprint(1)\n", p).accepted);
    CHECK_FALSE(tier2_filter("import boto3\n", p).accepted);
    CHECK_FALSE(tier2_filter("x = __import__('math')\n", p).accepted);
    auto sys = tier2_filter("import sys\nprint(1)\n", p);
    CHECK_FALSE(sys.accepted);
    CHECK(sys.reason.find("sys") != std::string::npos);

    auto ok = tier2_filter("import numpy as np\nimport matplotlib.pyplot as plt\nprint(np.pi)\nplt.close()\n", p);
    REQUIRE(ok.accepted);
    CHECK(ok.sanitized == "print(np.pi)\nplt.close()\n");
    CHECK(ok.libraries == std::vector<std::string>{"numpy", "matplotlib"});
    CHECK(ok.bindings.size() == 2);

    auto compound = tier2_filter("if True: import numpy as np\nprint(np.e)\n", p);
    REQUIRE(compound.accepted);
    CHECK(oracle::count_import_lines(compound.sanitized) == 0);

    CHECK_THROWS_AS(tier2_filter("   \n", p), Error);
}

TEST_CASE("imports inside strings and comments are ignored")
{
    auto found = find_imports("s = 'import os'\n# import sys\nimport numpy\n");
    REQUIRE(found.size() == 1);
    CHECK(found[0].line == 3);
    CHECK(found[0].roots == std::vector<std::string>{"numpy"});
}

TEST_CASE("random scripts: monotone rejection, zero imports, idempotent sanitize")
{
    std::mt19937 rng(99);
    const std::vector<std::string> token_pool{"os", "boto3", "__import__", "sys", "print", "np", "json", "path",
                                              "range", "cost"};
    const std::vector<std::string> libs{"numpy", "pandas", "matplotlib", "seaborn", "json", "math"};
    int accepted = 0, rejected = 0;
    for (int i = 0; i < 400; ++i) {
        auto s = scripts::random_script(rng).text;
        FilterPolicy p;
        for (const auto& t : token_pool)
            if (rng() % 4 == 0)
                p.blocked_tokens.push_back(t);
        for (const auto& l : libs)
            if (rng() % 3)
                p.allowed_libraries.push_back(l);
        if (p.allowed_libraries.empty())
            p.allowed_libraries.push_back("numpy");
        auto base = tier2_filter(s, p);
        base.accepted ? ++accepted : ++rejected;

        auto wider = p;
        for (const auto& t : token_pool)
            if (rng() % 3 == 0)
                wider.blocked_tokens.push_back(t);
        if (!base.accepted)
            CHECK_MESSAGE(!tier2_filter(s, wider).accepted, s);

        if (base.accepted) {
            CHECK_MESSAGE(oracle::count_import_lines(base.sanitized) == 0, base.sanitized);
            if (!text::trim(base.sanitized).empty()) {
                auto again = tier2_filter(base.sanitized, p);
                CHECK(again.accepted);
                CHECK(again.sanitized == base.sanitized);
            }
        }
    }
    CHECK(accepted > 50);
    CHECK(rejected > 50);
}

TEST_CASE("allowlisted scripts run; preloaded names resolve after stripping")
{
    auto out = run_filtered("import numpy as np\nimport pandas as pd\nfrom matplotlib import pyplot as plt\n"
                            "df = pd.DataFrame({'a': np.arange(4)})\nprint(int(df['a'].sum()))\n"
                            "fig, ax = plt.subplots()\nax.plot([0, 1], [1, 0])\nfig.savefig('line.png')\n");
    CHECK_MESSAGE(out.ok, (out.stdout_text + out.stderr_text));
    CHECK(out.stdout_text.find("6") != std::string::npos);
    REQUIRE(out.figures.size() == 1);
    CHECK(out.figures[0].name == "line.png");
    CHECK(out.figures[0].bytes.substr(1, 3) == "PNG");
    CHECK(path_within(out.scratch, out.figures[0].path));
}

TEST_CASE("inputs are staged by name")
{
    auto out = shared_sandbox().execute("print(INPUT_FILES)\nprint(len(open(INPUT_FILES[0]).read()))\n",
                                        {{"data.csv", "a,b\n1,2\n"}});
    CHECK_MESSAGE(out.ok, (out.stdout_text + out.stderr_text));
    CHECK(out.stdout_text.find("data.csv") != std::string::npos);
    CHECK(out.stdout_text.find("8") != std::string::npos);
}

TEST_CASE("failure categories")
{
    auto& box = shared_sandbox();
    auto err = box.execute("raise ValueError('bad value')\n");
    CHECK_FALSE(err.ok);
    CHECK(err.category == "runtime_error");
    CHECK(err.stdout_text.find("ValueError") != std::string::npos);

    SandboxLimits quick;
    quick.wall = std::chrono::milliseconds(1500);
    auto slow = box.execute("while True:\n    pass\n", {}, {}, quick);
    CHECK(slow.category == "timeout");

    auto net = box.execute("import socket\ns = socket.socket()\ns.connect(('127.0.0.1', 9))\n");
    CHECK(net.category == "isolation");

    auto write = box.execute("with open('/tmp/escape-attempt.txt', 'w') as f:\n    f.write('x')\n");
    CHECK(write.category == "isolation");

    SandboxLimits small;
    small.memory_bytes = 512ull << 20;
    auto mem = box.execute("x = bytearray(2 << 30)\n", {}, {}, small);
    CHECK(mem.category == "memory");
}

TEST_CASE("limits validation")
{
    SandboxLimits l;
    CHECK_NOTHROW(l.check());
    l.cpu = std::chrono::seconds(0);
    CHECK_THROWS_AS(l.check(), Error);
}

}
