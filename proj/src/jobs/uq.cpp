// SPDX-License-Identifier: Apache-2.0
#include "copilot/jobs/uq.hpp"

#include "copilot/core/error.hpp"
#include "copilot/core/png.hpp"
#include "copilot/core/text.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <map>
#include <set>

namespace fs = std::filesystem;

namespace copilot::jobs {

namespace {

/// In-place Cholesky of a row-major SPD matrix; false if not positive definite.
bool cholesky(std::vector<double>& a, std::size_t n)
{
    for (std::size_t j = 0; j < n; ++j) {
        double d = a[j * n + j];
        for (std::size_t k = 0; k < j; ++k)
            d -= a[j * n + k] * a[j * n + k];
        if (!(d > 0))
            return false;
        d = std::sqrt(d);
        a[j * n + j] = d;
        for (std::size_t i = j + 1; i < n; ++i) {
            double s = a[i * n + j];
            for (std::size_t k = 0; k < j; ++k)
                s -= a[i * n + k] * a[j * n + k];
            a[i * n + j] = s / d;
        }
        for (std::size_t i = 0; i < j; ++i)
            a[i * n + j] = 0;
    }
    return true;
}

std::vector<double> forward_solve(const std::vector<double>& l, std::size_t n, std::vector<double> b)
{
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t k = 0; k < i; ++k)
            b[i] -= l[i * n + k] * b[k];
        b[i] /= l[i * n + i];
    }
    return b;
}

std::vector<double> backward_solve(const std::vector<double>& l, std::size_t n, std::vector<double> b)
{
    for (std::size_t ii = n; ii-- > 0;) {
        for (std::size_t k = ii + 1; k < n; ++k)
            b[ii] -= l[k * n + ii] * b[k];
        b[ii] /= l[ii * n + ii];
    }
    return b;
}

std::vector<double> lattice(double lo, double hi, double step)
{
    std::vector<double> out;
    double start = std::ceil(lo / step - 1e-9);
    for (double i = start;; i += 1.0) {
        double v = i * step;
        if (v > hi + 1e-9 * std::max(1.0, std::abs(hi)))
            break;
        out.push_back(v);
        if (out.size() > 10000)
            throw Error(ErrorKind::Validation, "candidate grid too large");
    }
    return out;
}

std::string method_file_stem(const std::string& m)
{
    std::string out;
    for (char c : m)
        out.push_back(std::isalnum(static_cast<unsigned char>(c)) ? static_cast<char>(std::tolower(c)) : '_');
    return out;
}

} // namespace

GaussianProcess::GaussianProcess(std::vector<double> length_scales, double signal_variance, double jitter)
    : length_scales_(std::move(length_scales)), signal_variance_(signal_variance), jitter_(jitter)
{
    if (length_scales_.empty() || std::any_of(length_scales_.begin(), length_scales_.end(), [](double l) { return !(l > 0); }))
        throw Error(ErrorKind::Validation, "GP length scales must be positive");
    if (!(signal_variance_ > 0) || !(jitter_ >= 0))
        throw Error(ErrorKind::Validation, "GP signal variance must be positive and jitter non-negative");
}

double GaussianProcess::kernel(const std::vector<double>& a, const std::vector<double>& b) const
{
    double s = 0;
    for (std::size_t d = 0; d < length_scales_.size(); ++d) {
        double z = (a[d] - b[d]) / length_scales_[d];
        s += z * z;
    }
    return signal_variance_ * std::exp(-0.5 * s);
}

void GaussianProcess::fit(const std::vector<std::vector<double>>& x, const std::vector<double>& y)
{
    if (x.empty() || x.size() != y.size())
        throw Error(ErrorKind::Validation, "GP needs matching, non-empty training inputs and targets");
    for (const auto& row : x)
        if (row.size() != length_scales_.size())
            throw Error(ErrorKind::Validation, "GP training input has the wrong dimension");
    n_ = x.size();
    x_ = x;
    y_mean_ = 0;
    for (double v : y)
        y_mean_ += v;
    y_mean_ /= static_cast<double>(n_);

    std::vector<double> k(n_ * n_);
    for (std::size_t i = 0; i < n_; ++i)
        for (std::size_t j = 0; j < n_; ++j)
            k[i * n_ + j] = kernel(x_[i], x_[j]);

    double jitter = jitter_;
    for (;;) {
        chol_ = k;
        for (std::size_t i = 0; i < n_; ++i)
            chol_[i * n_ + i] += jitter * signal_variance_;
        if (cholesky(chol_, n_))
            break;
        jitter = jitter > 0 ? jitter * 10 : 1e-10;
        if (jitter > 1e-2)
            throw Error(ErrorKind::Validation, "GP kernel matrix is degenerate even after regularization");
    }
    used_jitter_ = jitter;
    std::vector<double> centered(n_);
    for (std::size_t i = 0; i < n_; ++i)
        centered[i] = y[i] - y_mean_;
    alpha_ = backward_solve(chol_, n_, forward_solve(chol_, n_, centered));
}

std::pair<double, double> GaussianProcess::predict(const std::vector<double>& x) const
{
    if (n_ == 0)
        throw Error(ErrorKind::Precondition, "GP is not fitted");
    std::vector<double> ks(n_);
    double mean = y_mean_;
    for (std::size_t i = 0; i < n_; ++i) {
        ks[i] = kernel(x, x_[i]);
        mean += ks[i] * alpha_[i];
    }
    auto v = forward_solve(chol_, n_, ks);
    double var = signal_variance_;
    for (double e : v)
        var -= e * e;
    return {mean, std::clamp(var, 0.0, signal_variance_)};
}

void from_json(const Json& j, UqConfig& c)
{
    UqConfig d;
    c.temperature_length = j.value("temperature_length", d.temperature_length);
    c.loading_length = j.value("loading_length", d.loading_length);
    c.method_length = j.value("method_length", d.method_length);
    c.signal_variance = j.value("signal_variance", d.signal_variance);
    c.jitter = j.value("jitter", d.jitter);
    c.temperature_step = j.value("temperature_step", d.temperature_step);
    c.loading_step = j.value("loading_step", d.loading_step);
}

std::vector<TrainingRow> parse_training_csv(const std::string& csv, const std::string& target)
{
    auto lines = text::split_lines(csv);
    std::size_t first = 0;
    while (first < lines.size() && text::trim(lines[first]).empty())
        ++first;
    if (first == lines.size())
        throw Error(ErrorKind::Validation, "training data is empty");
    auto header = text::split(lines[first], ',');
    std::map<std::string, std::size_t> col;
    for (std::size_t i = 0; i < header.size(); ++i)
        col[std::string(text::trim(header[i]))] = i;
    for (const char* need : {"temperature_c", "metal_loading_wt_pct", "synthesis_method"})
        if (!col.count(need))
            throw Error(ErrorKind::Validation, std::string("training data lacks column '") + need + "'");
    if (!col.count(target))
        throw Error(ErrorKind::Validation, "unknown target column '" + target + "'");

    auto number = [](const std::string& s, std::size_t line) {
        auto t = std::string(text::trim(s));
        char* end = nullptr;
        double v = std::strtod(t.c_str(), &end);
        if (t.empty() || *end != '\0' || !std::isfinite(v))
            throw Error(ErrorKind::Validation, "training data line " + std::to_string(line) + ": bad number '" + t + "'");
        return v;
    };
    std::vector<TrainingRow> rows;
    for (std::size_t i = first + 1; i < lines.size(); ++i) {
        if (text::trim(lines[i]).empty())
            continue;
        auto cells = text::split(lines[i], ',');
        if (cells.size() != header.size())
            throw Error(ErrorKind::Validation, "training data line " + std::to_string(i + 1) + " has " +
                                                   std::to_string(cells.size()) + " cells");
        TrainingRow r;
        r.temperature_c = number(cells[col["temperature_c"]], i + 1);
        r.metal_loading_wt_pct = number(cells[col["metal_loading_wt_pct"]], i + 1);
        r.synthesis_method = std::string(text::trim(cells[col["synthesis_method"]]));
        r.target = number(cells[col[target]], i + 1);
        rows.push_back(std::move(r));
    }
    if (rows.empty())
        throw Error(ErrorKind::Validation, "training data has no rows");
    return rows;
}

void UqBounds::check() const
{
    if (!(temp_min <= temp_max) || !(loading_min <= loading_max))
        throw Error(ErrorKind::Validation, "malformed bounds: minimum exceeds maximum");
}

UqResult run_uq(const UqConfig& cfg, const std::vector<TrainingRow>& training, const UqBounds& bounds)
{
    bounds.check();
    if (!(cfg.temperature_step > 0) || !(cfg.loading_step > 0))
        throw Error(ErrorKind::Validation, "UQ grid steps must be positive");

    std::set<std::string> known;
    for (const auto& r : training)
        known.insert(r.synthesis_method);
    std::map<std::string, double> method_index;
    for (const auto& m : known)
        method_index.emplace(m, static_cast<double>(method_index.size()));

    UqResult res;
    res.methods = bounds.methods.empty() ? std::vector<std::string>(known.begin(), known.end()) : bounds.methods;
    for (const auto& m : res.methods)
        method_index.emplace(m, static_cast<double>(method_index.size()));
    res.temperatures = lattice(bounds.temp_min, bounds.temp_max, cfg.temperature_step);
    res.loadings = lattice(bounds.loading_min, bounds.loading_max, cfg.loading_step);
    if (res.methods.empty() || res.temperatures.empty() || res.loadings.empty())
        throw Error(ErrorKind::Validation, "empty candidate grid: the bounds exclude every candidate");

    GaussianProcess gp({cfg.temperature_length, cfg.loading_length, cfg.method_length}, cfg.signal_variance, cfg.jitter);
    std::vector<std::vector<double>> x;
    std::vector<double> y;
    for (const auto& r : training) {
        x.push_back({r.temperature_c, r.metal_loading_wt_pct, method_index.at(r.synthesis_method)});
        y.push_back(r.target);
    }
    gp.fit(x, y);

    for (const auto& m : res.methods)
        for (double t : res.temperatures)
            for (double l : res.loadings) {
                auto [mean, var] = gp.predict({t, l, method_index.at(m)});
                res.ranked.push_back({t, l, m, mean, var});
            }
    std::stable_sort(res.ranked.begin(), res.ranked.end(), [](const Candidate& a, const Candidate& b) {
        if (a.variance != b.variance)
            return a.variance > b.variance;
        return std::tie(a.synthesis_method, a.temperature_c, a.metal_loading_wt_pct) <
               std::tie(b.synthesis_method, b.temperature_c, b.metal_loading_wt_pct);
    });
    return res;
}

ToolSpec UqExecutor::schema() const
{
    ToolSpec spec;
    spec.name = "suggest_experiments_uq";
    spec.description = "Fits a Gaussian-process surrogate to time-on-stream data and ranks candidate experimental "
                       "conditions by predicted uncertainty, with uncertainty maps.";
    spec.args = {
        {"training_data", ArgType::String, std::nullopt, Json("inputs/uq/training.csv"), "Object key of the training CSV."},
        {"target", ArgType::String, std::nullopt, Json("conversion_loss_pct"), "Target metric column."},
        {"temp_min", ArgType::Number, "degC", Json(300.0), "Lower temperature bound."},
        {"temp_max", ArgType::Number, "degC", Json(700.0), "Upper temperature bound."},
        {"loading_min", ArgType::Number, "wt%", Json(0.5), "Lower metal loading bound."},
        {"loading_max", ArgType::Number, "wt%", Json(5.0), "Upper metal loading bound."},
        {"methods", ArgType::StringList, std::nullopt, Json::array(), "Synthesis methods to consider; empty for all."},
        {"top_k", ArgType::Integer, std::nullopt, Json(10), "Number of suggestions to report."},
    };
    return spec;
}

void UqExecutor::check_args(const NormalizedArgs& args) const
{
    UqBounds b;
    b.temp_min = arg_number(args, "temp_min");
    b.temp_max = arg_number(args, "temp_max");
    b.loading_min = arg_number(args, "loading_min");
    b.loading_max = arg_number(args, "loading_max");
    b.check();
    if (arg_number(args, "top_k") < 1)
        throw Error(ErrorKind::Validation, "top_k must be at least 1");
}

std::vector<std::string> UqExecutor::inputs(const NormalizedArgs& args) const
{
    return {arg_string(args, "training_data")};
}

void UqExecutor::run(const ExecutionContext& ctx) const
{
    auto args = ctx.args();
    auto key = args.at("training_data").get<std::string>();
    auto csv = read_file(ctx.inputs_dir / fs::path(key).filename());
    auto training = parse_training_csv(csv, args.at("target").get<std::string>());
    UqBounds b;
    b.temp_min = args.at("temp_min").get<double>();
    b.temp_max = args.at("temp_max").get<double>();
    b.loading_min = args.at("loading_min").get<double>();
    b.loading_max = args.at("loading_max").get<double>();
    b.methods = args.value("methods", std::vector<std::string>{});
    auto res = run_uq(cfg_, training, b);
    auto top_k = static_cast<std::size_t>(args.value("top_k", 10));

    std::string header = "rank,temperature_c,metal_loading_wt_pct,synthesis_method,predicted_mean,predicted_std,variance\n";
    std::string top = header, grid = header;
    for (std::size_t i = 0; i < res.ranked.size(); ++i) {
        const auto& c = res.ranked[i];
        auto row = std::to_string(i + 1) + "," + text::fixed(c.temperature_c, 2) + "," +
                   text::fixed(c.metal_loading_wt_pct, 3) + "," + c.synthesis_method + "," + text::fixed(c.mean, 6) +
                   "," + text::fixed(std::sqrt(c.variance), 6) + "," + text::fixed(c.variance, 8) + "\n";
        grid += row;
        if (i < top_k)
            top += row;
    }
    write_file(ctx.outputs_dir / "suggestions.csv", top);
    write_file(ctx.outputs_dir / "uncertainty_grid.csv", grid);

    double vmax = 0;
    for (const auto& c : res.ranked)
        vmax = std::max(vmax, c.variance);
    const int cell = 16;
    for (const auto& m : res.methods) {
        png::Canvas canvas(static_cast<int>(res.temperatures.size()) * cell,
                           static_cast<int>(res.loadings.size()) * cell);
        for (const auto& c : res.ranked) {
            if (c.synthesis_method != m)
                continue;
            auto ti = std::find(res.temperatures.begin(), res.temperatures.end(), c.temperature_c) - res.temperatures.begin();
            auto li = std::find(res.loadings.begin(), res.loadings.end(), c.metal_loading_wt_pct) - res.loadings.begin();
            int x0 = static_cast<int>(ti) * cell;
            int y0 = static_cast<int>(res.loadings.size() - 1 - static_cast<std::size_t>(li)) * cell;
            canvas.fill_rect(x0, y0, x0 + cell - 1, y0 + cell - 1, png::heat(vmax > 0 ? c.variance / vmax : 0));
        }
        write_file(ctx.outputs_dir / ("uncertainty_map_" + method_file_stem(m) + ".png"), canvas.encode());
    }
}

} // namespace copilot::jobs
