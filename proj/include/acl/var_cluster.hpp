#pragma once

#include <Eigen/Dense>
#include <vector>

#include "acl/model_core.hpp"
#include "acl/partition.hpp"

namespace acl {

// Merge tree of bottom-up agglomerative clustering. Leaves are numbered
// 0..p-1, the node created by merge t is p+t. With average or complete
// linkage on a proper dissimilarity the heights are non-decreasing.
struct Dendrogram {
    struct Merge {
        int left = 0;
        int right = 0;
        double height = 0.0;
    };
    std::vector<Merge> merges; // exactly p-1 entries
    int leaves = 0;
};

enum class Linkage { average, complete };

// d_jk = 1 - |rho_jk| on a standardized design; negatively correlated
// columns are as close as positively correlated ones.
Eigen::MatrixXd corr_distance_matrix(const DesignMatrix& x);

// Deterministic agglomeration: ties on merge height go to the pair whose
// (smallest leaf id, larger of the two smallest leaf ids) key is
// lexicographically least.
Dendrogram hier_cluster(const Eigen::MatrixXd& dissimilarity, Linkage linkage = Linkage::average);

struct CutRule {
    enum class Kind { by_height, by_count };
    Kind kind = Kind::by_height;
    double height = 0.5;
    int count = 0;

    static CutRule by_height(double h) { return {Kind::by_height, h, 0}; }
    static CutRule by_count(int q) { return {Kind::by_count, 0.0, q}; }
};

// by_height groups leaves connected by merges of height < h; by_count
// applies merges in order until q clusters remain. Groups are ordered by
// their smallest leaf.
GroupPartition cut(const Dendrogram& dendrogram, const CutRule& rule);

// Per-cluster arithmetic means of the standardized columns.
struct ClusterRepresentatives {
    Eigen::MatrixXd values; // n x q
    GroupPartition partition;
};

ClusterRepresentatives representatives(const DesignMatrix& x, const GroupPartition& partition);

// Rescale representatives to the (1/n)-unit-norm convention used by the
// solvers. Near-zero columns (cancelling clusters) raise
// DegenerateRepresentative.
struct StandardizedRepresentatives {
    DesignMatrix x;
    Eigen::VectorXd scale; // representative_std = (rep - mean) / scale
};

StandardizedRepresentatives standardize_representatives(const ClusterRepresentatives& reps);

} // namespace acl
