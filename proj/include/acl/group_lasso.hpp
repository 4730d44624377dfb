#pragma once

#include <utility>
#include <vector>

#include "acl/lasso.hpp"
#include "acl/model_core.hpp"
#include "acl/partition.hpp"

namespace acl {

// Solution of (1/n) ||y - X beta||_2^2 + lambda * sum_r w_r ||beta_{G_r}||_2
// with w_r = sqrt(m_r) by default. Block minimization is exact when every
// within-group Gram block equals the identity, so fits expect a design
// produced by orthonormalize_groups (singleton groups of a standardized
// design already qualify).
struct GroupLassoFit {
    CoefVector beta;
    double lambda = 0.0;
    std::vector<int> selected_groups; // {r : ||beta_{G_r}|| > 0}
    double kkt_residual = 0.0;
    long iterations = 0;
    std::vector<double> group_norms;
    double objective = 0.0;
    std::vector<double> objective_trace;
};

struct GroupLassoOptions {
    double tol = 1e-6; // both max coefficient change and KKT residual
    long max_iter = 100000;
    bool track_objective = false;
};

class GroupLassoNonConvergence : public Error {
public:
    GroupLassoNonConvergence(long iters, GroupLassoFit fit)
        : Error("group lasso did not converge within " + std::to_string(iters) + " sweeps"),
          best(std::move(fit)) {}
    GroupLassoFit best;
};

// v * max(1 - gamma/||v||, 0); the zero vector when ||v|| <= gamma.
Eigen::VectorXd group_soft_threshold(const Eigen::VectorXd& v, double gamma);

// Within-group change of basis making every (1/n) X_{G_r}' X_{G_r} the
// identity. Rank-deficient blocks are reduced to their numerical rank;
// back_transform maps fitted coefficients to the original coordinates.
struct GroupTransform {
    std::vector<Eigen::MatrixXd> basis;            // per group, m_r x k_r
    std::vector<std::vector<int>> original_groups; // column indices in the input design
    GroupPartition transformed_groups;             // contiguous blocks in the output design
    std::vector<double> penalty_weights;           // sqrt of the original group sizes
    std::vector<int> rank_deficient;               // groups with k_r < m_r
    int original_p = 0;

    CoefVector back_transform(const CoefVector& transformed) const;
};

std::pair<DesignMatrix, GroupTransform> orthonormalize_groups(const DesignMatrix& x,
                                                              const GroupPartition& partition);

GroupLassoFit fit_group_lasso(const DesignMatrix& x, const ResponseVector& y,
                              const GroupPartition& partition, double lambda,
                              const GroupLassoOptions& options = {},
                              const std::vector<double>* penalty_weights = nullptr,
                              const Eigen::VectorXd* warm_start = nullptr);

// lambda_max = max_r ||(2/n) X_{G_r}' y||_2 / w_r, geometric grid as for
// the lasso path.
LambdaPath group_lambda_path(const DesignMatrix& x, const ResponseVector& y,
                             const GroupPartition& partition, int grid_size, double ratio,
                             const std::vector<double>* penalty_weights = nullptr);

std::vector<GroupLassoFit> fit_group_lasso_path(const DesignMatrix& x, const ResponseVector& y,
                                                const GroupPartition& partition,
                                                const LambdaPath& path,
                                                const GroupLassoOptions& options = {},
                                                const std::vector<double>* penalty_weights = nullptr);

} // namespace acl
