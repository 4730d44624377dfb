#pragma once

#include <string>
#include <vector>

#include "acl/pipeline.hpp"
#include "acl/simgen.hpp"

namespace acl {

// MSE = (1/n) sum (y_i - yhat_i)^2
double mse(const Eigen::VectorXd& y, const Eigen::VectorXd& y_hat);

// TPR = |S_hat intersect S0| / |S0|; S0 must be nonempty.
double tpr(const std::vector<int>& s_hat, const std::vector<int>& s0);

struct CurvePoint {
    int size = 0;
    double tpr = 0.0;
};

// One point per distinct selected-set size (max TPR on ties), ascending.
std::vector<CurvePoint> tpr_curve(const std::vector<std::vector<int>>& path_supports,
                                  const std::vector<int>& s0);

struct ReplicateRecord {
    std::string scenario;
    std::string method;
    int replicate = 0;
    double sigma = 0.0;
    int n_train = 0, n_val = 0;
    bool ok = false;
    std::string error;
    double mse_val = 0.0;
    double tpr_val = 0.0;
    int s_hat_size = 0;
    int stage1_size = 0; // 0 for methods without a screening stage
    double lambda1 = 0.0;
    double lambda3 = 0.0;
    StageTimings timings;
    std::vector<CurvePoint> curve;
    std::vector<int> stage1_s_lasso;
    std::vector<int> stage1_s1;
    std::vector<int> selected;
};

struct AggregateRow {
    std::string scenario;
    std::string method;
    double sigma = 0.0;
    int n_train = 0, n_val = 0;
    int replicates = 0;
    int failures = 0;
    double mean_mse = 0.0, sd_mse = 0.0;
    double mean_tpr = 0.0;
    double mean_s_hat = 0.0;
    double mean_stage1 = 0.0;
    double mean_time_screen = 0.0, mean_time_cluster = 0.0, mean_time_fit = 0.0,
           mean_time_total = 0.0;
};

// Mean TPR at each integer selected-set size; step values carry forward
// from a replicate's last observed size.
struct MeanCurve {
    std::string method;
    std::vector<int> sizes;
    std::vector<double> mean_tpr;
    int max_observed_size = 0;
};

struct BenchResult {
    ScenarioConfig config;
    std::vector<ReplicateRecord> records; // replicate-major, then method order
    std::vector<AggregateRow> aggregate;
    std::vector<MeanCurve> curves;
};

struct BenchOptions {
    int threads = 0; // 0: hardware concurrency
    PipelineConfig pipeline;
};

// Runs every method on every replicate; per-replicate failures are
// recorded, not fatal. Deterministic modulo the timing fields for any
// thread count.
BenchResult run_benchmark(const ScenarioConfig& config, const std::vector<std::string>& methods,
                          const BenchOptions& options = {});

// Recompute the aggregate table from replicate records (also used by the
// CLI report command on a parsed replicate CSV).
std::vector<AggregateRow> aggregate_records(const std::vector<ReplicateRecord>& records);
std::vector<MeanCurve> mean_curves(const std::vector<ReplicateRecord>& records);

// Artifact writers (CSV / JSON under a directory).
void write_replicates_csv(const std::string& path, const std::vector<ReplicateRecord>& records);
std::vector<ReplicateRecord> read_replicates_csv(const std::string& path);
void write_aggregate_csv(const std::string& path, const std::vector<AggregateRow>& rows);
void write_curves_csv(const std::string& path, const std::string& scenario,
                      const std::vector<MeanCurve>& curves);

} // namespace acl
