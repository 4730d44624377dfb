#pragma once

#include <cmath>
#include <string>
#include <vector>

#include "acl/group_lasso.hpp"
#include "acl/lasso.hpp"
#include "acl/screening.hpp"
#include "acl/var_cluster.hpp"

namespace acl {

struct PipelineConfig {
    int lambda_grid = 50;
    double lambda_ratio = 1e-3;
    Stage1Options stage1;
    Linkage linkage = Linkage::average;
    CutRule cut_rule = CutRule::by_height(0.5);
    GroupLassoOptions group_solver;
    // test/diagnostic knobs
    bool force_full_stage1 = false; // skip screening, keep all p columns (baseline equivalence)
    double lambda1_override = std::numeric_limits<double>::quiet_NaN();
    double lambda3_override = std::numeric_limits<double>::quiet_NaN();
};

struct StageTimings {
    double screen = 0.0;
    double cluster = 0.0;
    double fit = 0.0;
    double total() const { return screen + cluster + fit; }
};

// Output of any estimator. Coefficients are reported in the coordinates
// of the standardized training design; selected_vars is exactly the union
// of the selected groups of the partition used.
struct FitResult {
    std::string method;
    CoefVector beta; // length p
    std::vector<int> selected_vars;
    std::vector<int> selected_groups;
    GroupPartition partition; // over the original column indices
    double lambda1 = std::numeric_limits<double>::quiet_NaN();
    double lambda_stage3 = std::numeric_limits<double>::quiet_NaN();
    StageTimings timings;
    double validation_mse = 0.0;
    ScreenResult stage1; // populated by the screening estimators
    bool has_stage1 = false;
    // (lambda, selected variables) along the final-stage path; feeds the
    // selection-vs-size curves
    std::vector<std::pair<double, std::vector<int>>> path_supports;
};

// Standardized training data plus validation data transformed with the
// training parameters.
struct SplitData {
    DesignMatrix x_train;
    ResponseVector y_train;
    DesignMatrix x_val;
    ResponseVector y_val;
    StandardizeParams params;
};

SplitData prepare_data(const Eigen::MatrixXd& x_train, const Eigen::VectorXd& y_train,
                       const Eigen::MatrixXd& x_val, const Eigen::VectorXd& y_val,
                       std::vector<std::string> column_ids = {});

// argmin of validation MSE over a path; ties go to the larger lambda
// (the sparser model).
struct SelectedLambda {
    int index = -1;
    double lambda = 0.0;
    double mse = 0.0;
};

SelectedLambda select_lambda_by_validation(const std::vector<double>& lambdas,
                                           const std::vector<CoefVector>& betas,
                                           const DesignMatrix& x_val, const ResponseVector& y_val);

FitResult fit_acgl(const SplitData& data, const PipelineConfig& config = {});
FitResult fit_acrl(const SplitData& data, const PipelineConfig& config = {});
FitResult fit_cglcor(const SplitData& data, const PipelineConfig& config = {});
FitResult fit_crlcor(const SplitData& data, const PipelineConfig& config = {});
FitResult fit_lasso_method(const SplitData& data, const PipelineConfig& config = {});

// method ids: acgl | acrl | cglcor | crlcor | lasso
FitResult fit_method(const std::string& method, const SplitData& data,
                     const PipelineConfig& config = {});
std::vector<std::string> known_methods();

} // namespace acl
