// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "copilot/jobs/jobs.hpp"

#include <string>
#include <vector>

namespace copilot::jobs {

/// Exact GP regression with a squared-exponential kernel and per-dimension
/// length scales. Variances are clamped at zero.
class GaussianProcess {
public:
    GaussianProcess(std::vector<double> length_scales, double signal_variance = 1.0, double jitter = 1e-8);

    /// Escalates the jitter (x10, up to 1e-2 relative) if the kernel matrix is not positive definite.
    void fit(const std::vector<std::vector<double>>& x, const std::vector<double>& y);
    double kernel(const std::vector<double>& a, const std::vector<double>& b) const;
    std::pair<double, double> predict(const std::vector<double>& x) const;  // {mean, variance}
    double prior_variance() const noexcept { return signal_variance_; }
    double effective_jitter() const noexcept { return used_jitter_; }

private:
    std::vector<double> length_scales_;
    double signal_variance_;
    double jitter_;
    double used_jitter_ = 0;
    double y_mean_ = 0;
    std::vector<std::vector<double>> x_;
    std::vector<double> chol_;  // lower-triangular, row-major n x n
    std::vector<double> alpha_;
    std::size_t n_ = 0;
};

struct UqConfig {
    double temperature_length = 100.0;  // degC
    double loading_length = 1.0;        // wt%
    double method_length = 0.5;         // method index units
    double signal_variance = 1.0;
    double jitter = 1e-8;
    double temperature_step = 25.0;
    double loading_step = 0.25;
};

void from_json(const Json& j, UqConfig& c);

struct TrainingRow {
    double temperature_c = 0;
    double metal_loading_wt_pct = 0;
    std::string synthesis_method;
    double target = 0;
};

/// CSV with columns temperature_c, metal_loading_wt_pct, synthesis_method and the target column.
std::vector<TrainingRow> parse_training_csv(const std::string& csv, const std::string& target);

struct UqBounds {
    double temp_min = 0, temp_max = 0;
    double loading_min = 0, loading_max = 0;
    std::vector<std::string> methods;  // empty: every method in the training data

    /// Throws Error(Validation) if min > max.
    void check() const;
};

struct Candidate {
    double temperature_c = 0;
    double metal_loading_wt_pct = 0;
    std::string synthesis_method;
    double mean = 0;
    double variance = 0;
};

struct UqResult {
    std::vector<Candidate> ranked;  // descending variance, ties by (method, T, loading)
    std::vector<std::string> methods;
    std::vector<double> temperatures;
    std::vector<double> loadings;
};

/// Grid = lattice multiples of the configured steps inside the bounds, crossed
/// with the methods. Throws Error(Validation) for an empty grid.
UqResult run_uq(const UqConfig& cfg, const std::vector<TrainingRow>& training, const UqBounds& bounds);

class UqExecutor : public Executor {
public:
    explicit UqExecutor(UqConfig cfg = {}) : cfg_(cfg) {}
    std::string name() const override { return "gp-uq"; }
    JobKind kind() const override { return JobKind::UncertaintyQuantification; }
    ToolSpec schema() const override;
    void check_args(const NormalizedArgs& args) const override;
    std::vector<std::string> inputs(const NormalizedArgs& args) const override;
    void run(const ExecutionContext& ctx) const override;

private:
    UqConfig cfg_;
};

} // namespace copilot::jobs
