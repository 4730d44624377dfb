#pragma once

#include <vector>

#include "acl/model_core.hpp"

namespace acl {

// Solution of (1/n) ||y - X beta||_2^2 + lambda ||beta||_1 (weighted
// variants replace lambda by lambda * w_j per coordinate). The 1/n loss
// scaling puts the stationarity conditions at (2/n) X_j' r = lambda s_j.
struct LassoFit {
    CoefVector beta;
    double lambda = 0.0;
    long iterations = 0; // coordinate-descent sweeps
    double kkt_residual = 0.0;
    double objective = 0.0;
    std::vector<double> objective_trace; // per sweep, when tracking is on
};

struct LassoOptions {
    double tol = 1e-7;     // max |coefficient change| per sweep
    double kkt_tol = 1e-6; // stationarity residual at exit
    long max_iter = 100000;
    bool track_objective = false;
};

class LassoNonConvergence : public Error {
public:
    LassoNonConvergence(long iters, LassoFit fit)
        : Error("lasso did not converge within " + std::to_string(iters) + " sweeps"),
          best(std::move(fit)) {}
    LassoFit best;
};

// sign(z) * max(|z| - gamma, 0)
double soft_threshold(double z, double gamma);

LassoFit fit_lasso(const DesignMatrix& x, const ResponseVector& y, double lambda,
                   const LassoOptions& options = {}, const Eigen::VectorXd* warm_start = nullptr);

// Cyclic coordinate descent without the standardization precondition:
// column norms are handled explicitly and the penalty can carry
// per-coefficient multipliers. Used by the adaptive variant and by tests
// that solve purposely rescaled problems.
LassoFit fit_lasso_general(const Eigen::MatrixXd& x, const Eigen::VectorXd& y, double lambda,
                           const Eigen::VectorXd& penalty_weights = Eigen::VectorXd(),
                           const LassoOptions& options = {},
                           const Eigen::VectorXd* warm_start = nullptr);

// Strictly decreasing geometric grid from lambda_max = max_j |(2/n) X_j'y|
// down to lambda_max * ratio. Throws EmptyPath when lambda_max is zero.
struct LambdaPath {
    std::vector<double> values;
    int grid_size = 0;
};

LambdaPath lambda_path(const DesignMatrix& x, const ResponseVector& y, int grid_size, double ratio);

// Path fits with warm starts from the previous lambda.
std::vector<LassoFit> fit_lasso_path(const DesignMatrix& x, const ResponseVector& y,
                                     const LambdaPath& path, const LassoOptions& options = {});

// Penalty reweighting w_j = 1 / (|beta_init_j| + delta).
Eigen::VectorXd adaptive_weights(const LassoFit& initial, double delta = 1e-3);

LassoFit fit_adaptive_lasso(const DesignMatrix& x, const ResponseVector& y, double lambda,
                            const LassoFit& initial, double delta = 1e-3,
                            const LassoOptions& options = {});

// Weighted analogue of lambda_path: lambda_max = max_j |(2/n) X_j'y| / w_j.
LambdaPath weighted_lambda_path(const DesignMatrix& x, const ResponseVector& y,
                                const Eigen::VectorXd& penalty_weights, int grid_size, double ratio);

std::vector<LassoFit> fit_weighted_lasso_path(const DesignMatrix& x, const ResponseVector& y,
                                              const Eigen::VectorXd& penalty_weights,
                                              const LambdaPath& path, const LassoOptions& options = {});

// Zero out every coefficient with |beta_j| <= tau.
CoefVector threshold_fit(const LassoFit& fit, double tau);

} // namespace acl
