// SPDX-License-Identifier: Apache-2.0
#include "copilot/eval/benchmark.hpp"

#include "copilot/core/error.hpp"
#include "copilot/core/text.hpp"
#include "copilot/core/util.hpp"
#include "copilot/eval/eval.hpp"

#include <atomic>
#include <mutex>
#include <set>
#include <thread>

namespace copilot::eval {

std::string exact_pct(std::size_t count, std::size_t total, int decimals)
{
    if (total == 0)
        return decimals > 0 ? "0." + std::string(static_cast<std::size_t>(decimals), '0') : "0";
    std::uint64_t scale = 1;
    for (int i = 0; i < decimals; ++i)
        scale *= 10;
    auto v = (static_cast<std::uint64_t>(count) * 100 * scale + total / 2) / total;
    auto s = std::to_string(v / scale);
    if (decimals > 0) {
        auto frac = std::to_string(v % scale);
        s += "." + std::string(static_cast<std::size_t>(decimals) - frac.size(), '0') + frac;
    }
    return s;
}

std::string TopicTally::completion_pct() const { return exact_pct(completed, total, 2); }
std::string TopicTally::correctness_pct() const { return exact_pct(correct, total, 2); }

std::vector<BenchmarkQuestion> parse_benchmark(std::string_view jsonl)
{
    std::vector<BenchmarkQuestion> out;
    std::set<std::string> ids;
    std::size_t lineno = 0;
    for (const auto& line : text::split_lines(jsonl)) {
        ++lineno;
        auto t = text::trim(line);
        if (t.empty())
            continue;
        auto where = "benchmark line " + std::to_string(lineno);
        auto j = Json::parse(t, nullptr, false);
        if (j.is_discarded() || !j.is_object())
            throw Error(ErrorKind::Parse, where + ": not a JSON object");
        BenchmarkQuestion q;
        for (auto [field, dest] : {std::pair{"id", &q.id}, std::pair{"question", &q.question},
                                   std::pair{"answer", &q.answer}, std::pair{"topic", &q.topic}}) {
            if (!j.contains(field) || !(j[field].is_string() || j[field].is_number()))
                throw Error(ErrorKind::Parse, where + ": field '" + field + "' is missing or not a string");
            *dest = j[field].is_string() ? j[field].get<std::string>() : j[field].dump();
        }
        if (q.id.empty() || text::trim(q.question).empty())
            throw Error(ErrorKind::Parse, where + ": id and question must be non-empty");
        if (!ids.insert(q.id).second)
            throw Error(ErrorKind::Parse, where + ": duplicate id '" + q.id + "'");
        out.push_back(std::move(q));
    }
    return out;
}

std::vector<BenchmarkQuestion> load_benchmark(const std::filesystem::path& path)
{
    return parse_benchmark(read_file(path));
}

std::string extract_answer(std::string_view response)
{
    std::string found(response);
    for (const auto& line : text::split_lines(response)) {
        auto t = text::trim(line);
        if (t.size() >= 7 && text::to_lower(t.substr(0, 7)) == "answer:")
            found = std::string(text::trim(t.substr(7)));
    }
    return found;
}

std::string normalize_answer(std::string_view s)
{
    std::string out;
    bool space = false;
    for (char c : text::trim(s)) {
        if (std::isspace(static_cast<unsigned char>(c))) {
            space = true;
            continue;
        }
        if (space && !out.empty())
            out += ' ';
        space = false;
        out += static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    }
    while (!out.empty() && out.back() == '.')
        out.pop_back();
    while (out.size() >= 2 && ((out.front() == '[' && out.back() == ']') || (out.front() == '(' && out.back() == ')') ||
                               (out.front() == '"' && out.back() == '"')))
        out = out.substr(1, out.size() - 2);
    return out;
}

BenchmarkReport tally_benchmark(std::vector<BenchmarkEntry> entries)
{
    BenchmarkReport r;
    for (const auto& e : entries) {
        for (auto* t : {&r.topics[e.topic], &r.overall}) {
            ++t->total;
            t->completed += e.completed ? 1 : 0;
            t->correct += e.correct ? 1 : 0;
        }
    }
    r.entries = std::move(entries);
    return r;
}

BenchmarkReport run_benchmark(const std::vector<BenchmarkQuestion>& questions, ChatEndpoint& endpoint,
                              const BenchmarkOptions& options)
{
    auto phrases = options.refusal_phrases.empty() ? default_refusal_phrases() : options.refusal_phrases;
    std::vector<std::optional<BenchmarkEntry>> slots(questions.size());
    std::atomic<std::size_t> next{0};
    std::atomic<bool> abort{false};
    std::string abort_reason;
    std::mutex mu;

    auto worker = [&] {
        while (!abort.load()) {
            auto i = next.fetch_add(1);
            if (i >= questions.size())
                return;
            const auto& q = questions[i];
            Json req{{"session_id", "bench-" + q.id + "-" + random_hex(4)}, {"message", q.question}, {"mode", "full"}};
            ChatReply reply;
            try {
                reply = endpoint.send(req, options.timeout);
            } catch (const std::exception& e) {
                reply.reachable = false;
                reply.transport_error = e.what();
            }
            if (!reply.reachable) {
                std::lock_guard lk(mu);
                if (!abort.exchange(true))
                    abort_reason = endpoint.describe() + " unreachable: " + reply.transport_error;
                return;
            }
            BenchmarkEntry e{q.id, q.topic, false, false, {}, {}};
            if (reply.status == 200 && reply.latency <= options.timeout && reply.body.is_object()) {
                e.response = reply.body.value("final", std::string{});
                e.completed = !text::trim(e.response).empty() && !is_refusal(e.response, phrases);
                e.correct = e.completed && normalize_answer(extract_answer(e.response)) == normalize_answer(q.answer);
            } else if (!reply.transport_error.empty()) {
                e.error = reply.transport_error;
            } else {
                e.error = "status " + std::to_string(reply.status);
                if (reply.body.is_object() && reply.body.contains("error"))
                    e.error += ": " + reply.body["error"].value("category", std::string{});
            }
            std::lock_guard lk(mu);
            slots[i] = std::move(e);
        }
    };
    auto n = std::max<std::size_t>(1, std::min(options.parallelism, questions.size()));
    std::vector<std::thread> pool;
    for (std::size_t t = 1; t < n; ++t)
        pool.emplace_back(worker);
    worker();
    for (auto& t : pool)
        t.join();

    std::vector<BenchmarkEntry> entries;
    for (auto& s : slots)
        if (s)
            entries.push_back(std::move(*s));
    auto r = tally_benchmark(std::move(entries));
    r.aborted = abort.load();
    r.abort_reason = abort_reason;
    return r;
}

std::string BenchmarkReport::render_table() const
{
    auto row = [](const std::string& name, const TopicTally& t) {
        std::string n = name;
        if (n.size() < 26)
            n += std::string(26 - n.size(), ' ');
        auto cell = [](std::string s, std::size_t w) { return std::string(s.size() < w ? w - s.size() : 0, ' ') + s; };
        return n + cell(std::to_string(t.total), 8) + cell(std::to_string(t.completed), 11) +
               cell(t.completion_pct() + "%", 10) + cell(t.correctness_pct() + "%", 10) + "\n";
    };
    std::string out = "Topic                        Total  Completed   Success   Correct\n";
    out += std::string(65, '-') + "\n";
    for (const auto& [name, t] : topics)
        out += row(name, t);
    out += std::string(65, '-') + "\n";
    out += row("Overall", overall);
    return out;
}

Json BenchmarkReport::to_json() const
{
    auto tj = [](const TopicTally& t) {
        return Json{{"total", t.total},
                    {"completed", t.completed},
                    {"correct", t.correct},
                    {"completion_pct", t.completion_pct()},
                    {"correctness_pct", t.correctness_pct()}};
    };
    Json topics_j = Json::object();
    for (const auto& [name, t] : topics)
        topics_j[name] = tj(t);
    Json j{{"topics", topics_j}, {"overall", tj(overall)}, {"aborted", aborted}};
    if (aborted)
        j["abort_reason"] = abort_reason;
    return j;
}

} // namespace copilot::eval
