// SPDX-License-Identifier: Apache-2.0
#include "copilot/jobs/simulation.hpp"

#include "copilot/core/error.hpp"
#include "copilot/core/png.hpp"
#include "copilot/core/text.hpp"

#include <algorithm>
#include <cmath>
#include <random>

namespace copilot::jobs {

void SimParams::check() const
{
    if (!(d0_nm > 0) || !(prefactor_per_min > 0) || !(activation_j_per_mol > 0) || !(exponent_n >= 1))
        throw Error(ErrorKind::Validation, "simulation parameters must be positive with n >= 1");
    if (!(min_temperature_c < max_temperature_c) || min_temperature_c <= -273.15)
        throw Error(ErrorKind::Validation, "simulation temperature bounds are malformed");
    if (ensemble_members < 1)
        throw Error(ErrorKind::Validation, "simulation ensemble needs at least one member");
}

void from_json(const Json& j, SimParams& p)
{
    SimParams d;
    p.d0_nm = j.value("d0_nm", d.d0_nm);
    p.prefactor_per_min = j.value("prefactor_per_min", d.prefactor_per_min);
    p.activation_j_per_mol = j.value("activation_j_per_mol", d.activation_j_per_mol);
    p.exponent_n = j.value("exponent_n", d.exponent_n);
    p.min_temperature_c = j.value("min_temperature_c", d.min_temperature_c);
    p.max_temperature_c = j.value("max_temperature_c", d.max_temperature_c);
    p.ensemble_members = j.value("ensemble_members", d.ensemble_members);
    p.prefactor_log_sd = j.value("prefactor_log_sd", d.prefactor_log_sd);
    p.activation_rel_sd = j.value("activation_rel_sd", d.activation_rel_sd);
    p.exponent_rel_sd = j.value("exponent_rel_sd", d.exponent_rel_sd);
    p.seed = j.value("seed", d.seed);
    p.check();
}

double arrhenius_rate(double prefactor, double activation, double temperature_c)
{
    return prefactor * std::exp(-activation / (kGasConstant * (temperature_c + 273.15)));
}

double sinter_size(double d0, double k, double n, double t_min) { return d0 * std::pow(1.0 + k * t_min, 1.0 / n); }

std::string SimSeries::to_csv() const
{
    std::string out = "time_min,mean_nm,lower_nm,upper_nm\n";
    for (std::size_t i = 0; i < time_min.size(); ++i)
        out += text::fixed(time_min[i], 2) + "," + text::fixed(mean_nm[i], 6) + "," + text::fixed(lower_nm[i], 6) +
               "," + text::fixed(upper_nm[i], 6) + "\n";
    return out;
}

SimSeries run_simulation(const SimParams& p, double temperature_c, double duration_min, double step_min)
{
    p.check();
    if (!std::isfinite(temperature_c) || temperature_c < p.min_temperature_c || temperature_c > p.max_temperature_c)
        throw Error(ErrorKind::Validation, "temperature " + text::fixed(temperature_c, 1) + " degC is outside [" +
                                               text::fixed(p.min_temperature_c, 1) + ", " +
                                               text::fixed(p.max_temperature_c, 1) + "]");
    if (!(step_min > 0) || !(duration_min >= 0) || duration_min / step_min > 100000)
        throw Error(ErrorKind::Validation, "time grid needs a positive step and non-negative duration");

    SimSeries s;
    s.temperature_c = temperature_c;
    for (std::size_t i = 0;; ++i) {
        double t = static_cast<double>(i) * step_min;
        if (t > duration_min + 1e-9)
            break;
        s.time_min.push_back(t);
    }

    struct Member {
        double a, ea, n;
    };
    std::vector<Member> members{{p.prefactor_per_min, p.activation_j_per_mol, p.exponent_n}};
    std::mt19937_64 rng(p.seed);
    std::normal_distribution<double> z(0.0, 1.0);
    for (int m = 1; m < p.ensemble_members; ++m) {
        double a = p.prefactor_per_min * std::exp(p.prefactor_log_sd * z(rng));
        double ea = p.activation_j_per_mol * (1.0 + p.activation_rel_sd * z(rng));
        double n = std::max(1.0, p.exponent_n * (1.0 + p.exponent_rel_sd * z(rng)));
        members.push_back({a, ea, n});
    }

    double k0 = arrhenius_rate(p.prefactor_per_min, p.activation_j_per_mol, temperature_c);
    for (double t : s.time_min) {
        double mean = sinter_size(p.d0_nm, k0, p.exponent_n, t);
        double lo = mean, hi = mean;
        for (const auto& m : members) {
            double d = sinter_size(p.d0_nm, arrhenius_rate(m.a, m.ea, temperature_c), m.n, t);
            lo = std::min(lo, d);
            hi = std::max(hi, d);
        }
        s.mean_nm.push_back(mean);
        s.lower_nm.push_back(lo);
        s.upper_nm.push_back(hi);
    }
    return s;
}

ToolSpec SimulationExecutor::schema() const
{
    ToolSpec spec;
    spec.name = "run_sintering_simulation";
    spec.description = "Predicts nanoparticle size evolution over time at a given temperature.";
    spec.args = {
        {"temperature", ArgType::Number, "degC", std::nullopt, "Reaction temperature in degrees Celsius."},
        {"duration", ArgType::Number, "min", Json(600.0), "Simulated time span in minutes."},
        {"step", ArgType::Number, "min", Json(10.0), "Time-grid spacing in minutes."},
    };
    return spec;
}

void SimulationExecutor::check_args(const NormalizedArgs& args) const
{
    double t = arg_number(args, "temperature");
    if (t < params_.min_temperature_c || t > params_.max_temperature_c)
        throw Error(ErrorKind::Validation, "temperature " + text::fixed(t, 1) + " degC is outside [" +
                                               text::fixed(params_.min_temperature_c, 1) + ", " +
                                               text::fixed(params_.max_temperature_c, 1) + "]");
    double step = arg_number(args, "step");
    double duration = arg_number(args, "duration");
    if (!(step > 0) || !(duration >= 0) || duration / step > 100000)
        throw Error(ErrorKind::Validation, "time grid needs a positive step and non-negative duration");
}

void SimulationExecutor::run(const ExecutionContext& ctx) const
{
    auto args = ctx.args();
    auto series = run_simulation(params_, args.at("temperature").get<double>(), args.value("duration", 600.0),
                                 args.value("step", 10.0));
    write_file(ctx.outputs_dir / "series.csv", series.to_csv());
    auto chart = png::line_chart(series.time_min, {{series.lower_nm, {150, 180, 230}},
                                                   {series.upper_nm, {150, 180, 230}},
                                                   {series.mean_nm, {20, 60, 200}}});
    write_file(ctx.outputs_dir / "size_vs_time.png", chart);
}

} // namespace copilot::jobs
