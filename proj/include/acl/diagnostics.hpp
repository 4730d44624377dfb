#pragma once

#include <cstdint>
#include <vector>

#include "acl/model_core.hpp"
#include "acl/partition.hpp"

namespace acl {

// Support-recovery condition report for an index set S. theta_exact is the
// worst-case row l1 norm of Sigma21 * Sigma11^{-1} (the maximum of the
// linear form over the unit cube is attained at a vertex, so this value is
// exact). theta_bound is the eigenvalue-based sufficient bound
// sqrt(s) * max_{j not in S} ||Sigma_{j,S}||_2 / Lambda_min(Sigma11)^2.
struct IrReport {
    double theta_exact = 0.0;
    double theta_bound = 0.0;
    double min_eigen_s11 = 0.0;
    bool holds_strict = false; // theta_exact < 1
};

IrReport ir_theta_exact(const GramMatrix& sigma, const std::vector<int>& s);
double ir_theta_bound(const GramMatrix& sigma, const std::vector<int>& s);

struct GirOptions {
    bool use_pseudo_inverse = false;
    int restarts = 64;
    int max_ascent_iters = 200;
    double epsilon = 0.0; // condition holds when all values < 1 - epsilon
    std::uint64_t seed = 20240901;
};

// Group-level analogue. rw_min_eigen is the smallest eigenvalue of the
// between-active-group correlation matrix R_W. group_ir_values holds, per
// noise group r, a lower bound on
//   max over ||tau||_{2,inf} <= 1 of (1/m_r) ||(Sigma21 Sigma11^{-1} K tau)_{G_r}||_2
// obtained by alternating sphere ascent with random restarts (the
// feasible set is a product of l2 balls, not a cube, so vertex evaluation
// does not apply).
struct GirReport {
    double rw_min_eigen = 0.0;
    std::vector<double> group_ir_values; // aligned with noise_groups
    std::vector<int> noise_groups;
    bool holds = false;
};

GirReport gir_check(const DesignMatrix& x, const GroupPartition& partition,
                    const std::vector<int>& active_groups, const GirOptions& options = {});

struct BetaMinReport {
    bool holds = false;
    double margin = 0.0;    // min_{j in S} |beta_j| - threshold
    double threshold = 0.0; // 4 * lambda * |S| / phi^2
};

BetaMinReport beta_min_check(const CoefVector& beta, const std::vector<int>& s, double lambda,
                             double phi_sq);

struct GroupBetaMinReport {
    bool holds = false;
    std::vector<double> margins; // per active group: ||beta_{G_r}||_inf - D*lambda*sqrt(m_r)/n
};

GroupBetaMinReport group_beta_min_check(const CoefVector& beta, const GroupPartition& partition,
                                        const std::vector<int>& active_groups, double lambda, int n,
                                        double d_const = 4.0);

} // namespace acl
