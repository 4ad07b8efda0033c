// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "copilot/jobs/jobs.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace copilot::jobs {

/// Stand-in sintering law d(t) = d0 (1 + k t)^(1/n), k = A exp(-Ea / (R T)).
struct SimParams {
    double d0_nm = 2.0;
    double prefactor_per_min = 5.0e3;
    double activation_j_per_mol = 100.0e3;
    double exponent_n = 3.0;
    double min_temperature_c = 25.0;
    double max_temperature_c = 1200.0;
    int ensemble_members = 32;
    double prefactor_log_sd = 0.2;     // lognormal spread on A
    double activation_rel_sd = 0.01;   // relative spread on Ea
    double exponent_rel_sd = 0.03;     // relative spread on n
    std::uint64_t seed = 20240601;

    void check() const;
};

void from_json(const Json& j, SimParams& p);

inline constexpr double kGasConstant = 8.314462618;

double arrhenius_rate(double prefactor, double activation, double temperature_c);
double sinter_size(double d0, double k, double n, double t_min);

struct SimSeries {
    double temperature_c = 0;
    std::vector<double> time_min;
    std::vector<double> mean_nm;
    std::vector<double> lower_nm;
    std::vector<double> upper_nm;

    /// Header: time_min,mean_nm,lower_nm,upper_nm
    std::string to_csv() const;
};

/// Grid 0, step, 2 step, ... up to duration. Throws Error(Validation) when
/// the temperature is out of bounds or the grid is malformed.
SimSeries run_simulation(const SimParams& p, double temperature_c, double duration_min = 600, double step_min = 10);

class SimulationExecutor : public Executor {
public:
    explicit SimulationExecutor(SimParams params = {}) : params_(params) { params_.check(); }
    std::string name() const override { return "sintering-sim"; }
    JobKind kind() const override { return JobKind::Simulation; }
    ToolSpec schema() const override;
    void check_args(const NormalizedArgs& args) const override;
    void run(const ExecutionContext& ctx) const override;
    const SimParams& params() const noexcept { return params_; }

private:
    SimParams params_;
};

} // namespace copilot::jobs
