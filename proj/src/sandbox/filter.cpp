// SPDX-License-Identifier: Apache-2.0
#include "copilot/sandbox/filter.hpp"

#include "copilot/core/error.hpp"
#include "copilot/core/text.hpp"

#include <algorithm>
#include <cctype>
#include <optional>

namespace copilot::sandbox {

FilterPolicy FilterPolicy::defaults()
{
    FilterPolicy p;
    p.blocked_tokens = {"os", "boto3", "__import__"};
    p.allowed_libraries = {"numpy", "pandas", "matplotlib", "seaborn"};
    return p;
}

void FilterPolicy::check() const
{
    if (allowed_libraries.empty())
        throw Error(ErrorKind::Validation, "filter policy needs at least one allowed library");
    for (const auto& lib : allowed_libraries)
        if (std::find(blocked_tokens.begin(), blocked_tokens.end(), lib) != blocked_tokens.end())
            throw Error(ErrorKind::Validation, "library '" + lib + "' is both allowed and blocked");
}

void to_json(Json& j, const FilterPolicy& p)
{
    j = Json{{"blocked_tokens", p.blocked_tokens},
             {"allowed_libraries", p.allowed_libraries},
             {"strip_imports", p.strip_imports}};
}

void to_json(Json& j, const ImportBinding& b)
{
    j = Json{{"name", b.name}, {"module", b.module}, {"attribute", b.attribute}, {"bind_root", b.bind_root}};
}

void from_json(const Json& j, FilterPolicy& p)
{
    auto d = FilterPolicy::defaults();
    p.blocked_tokens = j.value("blocked_tokens", d.blocked_tokens);
    p.allowed_libraries = j.value("allowed_libraries", d.allowed_libraries);
    p.strip_imports = j.value("strip_imports", true);
}

namespace {

enum class Cls : unsigned char { Code, String, Comment };

/// Classifies every byte as code, string-literal or comment.
std::vector<Cls> classify(std::string_view src)
{
    std::vector<Cls> cls(src.size(), Cls::Code);
    std::size_t i = 0;
    while (i < src.size()) {
        char c = src[i];
        if (c == '#') {
            while (i < src.size() && src[i] != '\n')
                cls[i++] = Cls::Comment;
            continue;
        }
        if (c == '\'' || c == '"') {
            bool triple = i + 2 < src.size() && src[i + 1] == c && src[i + 2] == c;
            std::size_t qlen = triple ? 3 : 1;
            for (std::size_t k = 0; k < qlen; ++k)
                cls[i + k] = Cls::String;
            i += qlen;
            while (i < src.size()) {
                if (src[i] == '\\' && i + 1 < src.size()) {
                    cls[i] = cls[i + 1] = Cls::String;
                    i += 2;
                    continue;
                }
                if (!triple && src[i] == '\n')
                    break;  // unterminated single-quoted literal
                if (src[i] == c && (!triple || (i + 2 < src.size() && src[i + 1] == c && src[i + 2] == c))) {
                    for (std::size_t k = 0; k < qlen; ++k)
                        cls[i + k] = Cls::String;
                    i += qlen;
                    break;
                }
                cls[i++] = Cls::String;
            }
            continue;
        }
        ++i;
    }
    return cls;
}

struct Span {
    std::size_t begin = 0;
    std::size_t end = 0;  // exclusive, excludes the terminating newline
};

struct LogicalLine {
    Span span;
    std::size_t first_line = 1;
    std::vector<Span> statements;
};

std::vector<LogicalLine> logical_lines(std::string_view src, const std::vector<Cls>& cls)
{
    std::vector<LogicalLine> out;
    std::size_t start = 0, line_no = 1, start_line = 1;
    int depth = 0;
    std::size_t stmt_start = 0;
    std::vector<Span> stmts;

    auto finish = [&](std::size_t end) {
        stmts.push_back({stmt_start, end});
        out.push_back({{start, end}, start_line, std::move(stmts)});
        stmts.clear();
    };

    for (std::size_t i = 0; i <= src.size(); ++i) {
        bool at_end = i == src.size();
        char c = at_end ? '\n' : src[i];
        if (!at_end && cls[i] != Cls::Code) {
            if (c == '\n')
                ++line_no;
            continue;
        }
        if (c == '(' || c == '[' || c == '{')
            ++depth;
        else if ((c == ')' || c == ']' || c == '}') && depth > 0)
            --depth;
        else if (c == ';' && depth == 0) {
            stmts.push_back({stmt_start, i});
            stmt_start = i + 1;
        } else if (c == '\n') {
            bool continued = !at_end && (depth > 0 || (i > 0 && src[i - 1] == '\\' && cls[i - 1] == Cls::Code));
            if (!continued) {
                finish(at_end ? src.size() : i);
                start = stmt_start = i + 1;
                start_line = line_no + 1;
            }
            ++line_no;
        }
    }
    return out;
}

/// Statement text with strings/comments blanked and continuations flattened.
std::string code_only(std::string_view src, const std::vector<Cls>& cls, Span s)
{
    std::string out;
    for (std::size_t i = s.begin; i < s.end; ++i) {
        char c = src[i];
        if (cls[i] != Cls::Code || c == '\\' || c == '\n' || c == '\r' || c == '\t')
            out.push_back(' ');
        else
            out.push_back(c);
    }
    return out;
}

bool starts_with_keyword(std::string_view s, std::string_view kw)
{
    s = text::trim(s);
    return s.size() > kw.size() && s.substr(0, kw.size()) == kw &&
           (std::isspace(static_cast<unsigned char>(s[kw.size()])) != 0);
}

std::string root_of(std::string_view module)
{
    auto dot = module.find('.');
    return std::string(module.substr(0, dot));
}

std::string first_word(std::string_view s)
{
    s = text::trim(s);
    std::size_t n = 0;
    while (n < s.size() && !std::isspace(static_cast<unsigned char>(s[n])))
        ++n;
    return std::string(s.substr(0, n));
}

std::vector<std::string> words(std::string_view s)
{
    std::vector<std::string> out;
    std::string cur;
    for (char c : s) {
        if (std::isspace(static_cast<unsigned char>(c))) {
            if (!cur.empty())
                out.push_back(std::move(cur)), cur.clear();
        } else {
            cur.push_back(c);
        }
    }
    if (!cur.empty())
        out.push_back(std::move(cur));
    return out;
}

std::string strip_parens(std::string_view s)
{
    std::string out;
    for (char c : s)
        if (c != '(' && c != ')')
            out.push_back(c);
    return out;
}

/// Parses an import statement; returns nullopt when the statement is not one.
std::optional<ImportStatement> parse_import(const std::string& code)
{
    ImportStatement st;
    auto body = text::trim(code);
    if (starts_with_keyword(body, "import")) {
        for (const auto& part : text::split(strip_parens(body.substr(6)), ',')) {
            auto w = words(part);
            if (w.empty())
                continue;
            const auto& name = w[0];
            st.modules.push_back(name);
            st.roots.push_back(root_of(name));
            if (w.size() >= 3 && w[1] == "as")
                st.bindings.push_back({w[2], name, "", false});
            else
                st.bindings.push_back({root_of(name), name, "", name.find('.') != std::string::npos});
        }
        return st;
    }
    if (starts_with_keyword(body, "from") && text::contains_at_ident_boundary(body, "import")) {
        auto rest = text::trim(body.substr(4));
        auto name = first_word(rest);
        st.modules.push_back(name);
        st.roots.push_back(name.empty() || name.front() == '.' ? std::string{} : root_of(name));
        auto kw = rest.find(" import");
        if (kw != std::string_view::npos) {
            for (const auto& part : text::split(strip_parens(rest.substr(kw + 7)), ',')) {
                auto w = words(part);
                if (w.empty())
                    continue;
                std::string alias = w.size() >= 3 && w[1] == "as" ? w[2] : w[0];
                st.bindings.push_back({alias, name, w[0], false});
            }
        }
        return st;
    }
    return std::nullopt;
}

struct StatementScan {
    std::optional<ImportStatement> import;
    std::size_t offset = 0;   // where the import begins inside the statement
    bool malformed = false;   // import keyword in a position we cannot strip
};

/// Recognizes plain imports and imports forming the body of a one-line
/// compound statement such as `if cond: import x`.
StatementScan scan_statement(const std::string& code)
{
    StatementScan out;
    if ((out.import = parse_import(code)))
        return out;
    if (!text::contains_at_ident_boundary(code, "import"))
        return out;
    std::size_t pos = 0;
    while ((pos = code.find(':', pos)) != std::string::npos) {
        ++pos;
        auto tail = code.substr(pos);
        if (auto st = parse_import(tail)) {
            out.import = std::move(st);
            out.offset = pos;
            return out;
        }
    }
    out.malformed = true;
    return out;
}

bool token_present(std::string_view script, const std::string& token)
{
    if (token.empty())
        return false;
    bool ident_only = std::all_of(token.begin(), token.end(), text::is_ident_char);
    return ident_only ? text::contains_at_ident_boundary(script, token) : script.find(token) != std::string_view::npos;
}

std::size_t line_number_at(std::string_view src, std::size_t offset)
{
    return 1 + static_cast<std::size_t>(std::count(src.begin(), src.begin() + static_cast<std::ptrdiff_t>(offset), '\n'));
}

} // namespace

std::vector<ImportStatement> find_imports(std::string_view script)
{
    auto cls = classify(script);
    std::vector<ImportStatement> out;
    for (const auto& ll : logical_lines(script, cls))
        for (const auto& s : ll.statements) {
            auto scan = scan_statement(code_only(script, cls, s));
            if (scan.import) {
                scan.import->line = line_number_at(script, s.begin);
                out.push_back(std::move(*scan.import));
            } else if (scan.malformed) {
                ImportStatement embedded;
                embedded.line = line_number_at(script, s.begin);
                out.push_back(std::move(embedded));
            }
        }
    return out;
}

FilterResult tier2_filter(std::string_view script, const FilterPolicy& policy)
{
    if (text::trim(script).empty())
        throw Error(ErrorKind::Precondition, "tier2_filter needs a non-empty script");

    FilterResult result;
    for (const auto& token : policy.blocked_tokens) {
        if (token_present(script, token)) {
            result.reason = "blocked token '" + token + "'";
            return result;
        }
    }

    auto cls = classify(script);
    auto lines = logical_lines(script, cls);

    struct Removal {
        Span line;
        std::string replacement;
        bool drop_newline = false;
    };
    std::vector<Removal> edits;

    for (const auto& ll : lines) {
        std::vector<std::string> kept;
        bool had_import = false;
        for (const auto& s : ll.statements) {
            auto scan = scan_statement(code_only(script, cls, s));
            if (scan.malformed) {
                result.reason = "unparseable import on line " + std::to_string(line_number_at(script, s.begin));
                result.libraries.clear();
                return result;
            }
            auto& st = scan.import;
            if (!st) {
                auto raw = text::trim(script.substr(s.begin, s.end - s.begin));
                if (!raw.empty())
                    kept.emplace_back(raw);
                continue;
            }
            if (scan.offset > 0)
                kept.push_back(std::string(text::trim(script.substr(s.begin, scan.offset))) + " pass");
            had_import = true;
            for (const auto& root : st->roots) {
                if (std::find(policy.allowed_libraries.begin(), policy.allowed_libraries.end(), root) ==
                    policy.allowed_libraries.end()) {
                    result.reason = root.empty() ? "relative imports are not allowed"
                                                 : "library '" + root + "' is not in the allowed set";
                    result.libraries.clear();
                    result.bindings.clear();
                    return result;
                }
                if (std::find(result.libraries.begin(), result.libraries.end(), root) == result.libraries.end())
                    result.libraries.push_back(root);
            }
            for (const auto& b : st->bindings)
                if (std::find(result.bindings.begin(), result.bindings.end(), b) == result.bindings.end())
                    result.bindings.push_back(b);
        }
        if (!had_import || !policy.strip_imports)
            continue;

        auto line_text = script.substr(ll.span.begin, ll.span.end - ll.span.begin);
        std::size_t indent_len = 0;
        while (indent_len < line_text.size() && (line_text[indent_len] == ' ' || line_text[indent_len] == '\t'))
            ++indent_len;
        std::string indent(line_text.substr(0, indent_len));
        if (kept.empty()) {
            if (indent.empty())
                edits.push_back({ll.span, "", true});
            else
                edits.push_back({ll.span, indent + "pass", false});
        } else {
            edits.push_back({ll.span, indent + text::join(kept, "; "), false});
        }
    }

    std::string out;
    std::size_t pos = 0;
    for (const auto& e : edits) {
        out.append(script.substr(pos, e.line.begin - pos));
        out += e.replacement;
        pos = e.line.end;
        if (e.drop_newline && pos < script.size() && script[pos] == '\n')
            ++pos;
    }
    out.append(script.substr(pos));

    result.accepted = true;
    result.sanitized = std::move(out);
    return result;
}

} // namespace copilot::sandbox
