#include "acl/var_cluster.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace acl {

Eigen::MatrixXd corr_distance_matrix(const DesignMatrix& x) {
    const GramMatrix g = gram(x);
    const Eigen::Index p = g.p();
    Eigen::MatrixXd d(p, p);
    for (Eigen::Index j = 0; j < p; ++j) {
        d(j, j) = 0.0;
        for (Eigen::Index k = j + 1; k < p; ++k) {
            const double v = std::max(0.0, 1.0 - std::abs(g.values(j, k)));
            d(j, k) = v;
            d(k, j) = v;
        }
    }
    return d;
}

namespace {

void validate_dissimilarity(const Eigen::MatrixXd& d) {
    if (d.rows() != d.cols()) throw Error("dissimilarity matrix must be square");
    for (Eigen::Index j = 0; j < d.rows(); ++j) {
        if (d(j, j) != 0.0) throw Error("dissimilarity diagonal must be zero");
        for (Eigen::Index k = j + 1; k < d.cols(); ++k) {
            if (d(j, k) < 0.0) throw Error("dissimilarity entries must be nonnegative");
            if (std::abs(d(j, k) - d(k, j)) > 1e-12) throw Error("dissimilarity must be symmetric");
        }
    }
}

} // namespace

Dendrogram hier_cluster(const Eigen::MatrixXd& dissimilarity, Linkage linkage) {
    validate_dissimilarity(dissimilarity);
    const int p = static_cast<int>(dissimilarity.rows());
    Dendrogram out;
    out.leaves = p;
    if (p <= 1) return out;

    // slot state; merging a < b keeps slot a, retires slot b
    std::vector<char> alive(static_cast<std::size_t>(p), 1);
    std::vector<int> node(static_cast<std::size_t>(p));   // dendrogram node id of the slot
    std::vector<int> count(static_cast<std::size_t>(p), 1);
    std::vector<int> rep(static_cast<std::size_t>(p));    // smallest leaf id in the slot
    std::iota(node.begin(), node.end(), 0);
    std::iota(rep.begin(), rep.end(), 0);

    // agg(a,b): sum of all leaf-pair dissimilarities (average linkage) or
    // their max (complete); dist(a,b) is the current cluster distance
    Eigen::MatrixXd agg = dissimilarity;
    Eigen::MatrixXd dist = dissimilarity;

    for (int t = 0; t < p - 1; ++t) {
        int best_a = -1, best_b = -1;
        double best_d = std::numeric_limits<double>::infinity();
        int best_lo = 0, best_hi = 0;
        for (int a = 0; a < p; ++a) {
            if (!alive[static_cast<std::size_t>(a)]) continue;
            for (int b = a + 1; b < p; ++b) {
                if (!alive[static_cast<std::size_t>(b)]) continue;
                const double d = dist(a, b);
                const int lo = std::min(rep[static_cast<std::size_t>(a)], rep[static_cast<std::size_t>(b)]);
                const int hi = std::max(rep[static_cast<std::size_t>(a)], rep[static_cast<std::size_t>(b)]);
                if (d < best_d || (d == best_d && (lo < best_lo || (lo == best_lo && hi < best_hi)))) {
                    best_d = d;
                    best_a = a;
                    best_b = b;
                    best_lo = lo;
                    best_hi = hi;
                }
            }
        }

        const auto a = static_cast<std::size_t>(best_a);
        const auto b = static_cast<std::size_t>(best_b);
        out.merges.push_back({std::min(node[a], node[b]), std::max(node[a], node[b]), best_d});

        for (int c = 0; c < p; ++c) {
            if (!alive[static_cast<std::size_t>(c)] || c == best_a || c == best_b) continue;
            double ag, dv;
            if (linkage == Linkage::average) {
                ag = agg(best_a, c) + agg(best_b, c);
                dv = ag / (static_cast<double>(count[a] + count[b]) * static_cast<double>(count[static_cast<std::size_t>(c)]));
            } else {
                ag = std::max(agg(best_a, c), agg(best_b, c));
                dv = ag;
            }
            agg(best_a, c) = ag;
            agg(c, best_a) = ag;
            dist(best_a, c) = dv;
            dist(c, best_a) = dv;
        }
        count[a] += count[b];
        rep[a] = std::min(rep[a], rep[b]);
        node[a] = p + t;
        alive[b] = 0;
    }
    return out;
}

namespace {

struct LeafUnion {
    std::vector<int> parent;
    explicit LeafUnion(int n) : parent(static_cast<std::size_t>(n)) {
        std::iota(parent.begin(), parent.end(), 0);
    }
    int find(int v) {
        while (parent[static_cast<std::size_t>(v)] != v) {
            parent[static_cast<std::size_t>(v)] = parent[static_cast<std::size_t>(parent[static_cast<std::size_t>(v)])];
            v = parent[static_cast<std::size_t>(v)];
        }
        return v;
    }
    void unite(int a, int b) { parent[static_cast<std::size_t>(find(a))] = find(b); }
};

GroupPartition partition_from_merges(const Dendrogram& dendrogram, int num_merges) {
    const int p = dendrogram.leaves;
    LeafUnion uf(p);
    // node id -> a leaf inside it
    std::vector<int> leaf_of(static_cast<std::size_t>(p + num_merges));
    std::iota(leaf_of.begin(), leaf_of.begin() + p, 0);
    for (int t = 0; t < num_merges; ++t) {
        const auto& m = dendrogram.merges[static_cast<std::size_t>(t)];
        const int la = leaf_of[static_cast<std::size_t>(m.left)];
        const int lb = leaf_of[static_cast<std::size_t>(m.right)];
        uf.unite(la, lb);
        leaf_of[static_cast<std::size_t>(p + t)] = la;
    }
    std::vector<std::vector<int>> by_root(static_cast<std::size_t>(p));
    for (int j = 0; j < p; ++j) by_root[static_cast<std::size_t>(uf.find(j))].push_back(j);
    GroupPartition out;
    for (auto& g : by_root)
        if (!g.empty()) out.groups.push_back(std::move(g)); // roots scanned ascending -> ordered by min leaf
    return out;
}

} // namespace

GroupPartition cut(const Dendrogram& dendrogram, const CutRule& rule) {
    const int p = dendrogram.leaves;
    if (rule.kind == CutRule::Kind::by_count) {
        if (rule.count < 1 || rule.count > p)
            throw InvalidCount("cluster count must be between 1 and " + std::to_string(p));
        return partition_from_merges(dendrogram, p - rule.count);
    }
    int applied = 0;
    for (const auto& m : dendrogram.merges) {
        if (m.height < rule.height) ++applied;
    }
    // heights are non-decreasing, so the first `applied` merges are the ones below the cut
    return partition_from_merges(dendrogram, applied);
}

ClusterRepresentatives representatives(const DesignMatrix& x, const GroupPartition& partition) {
    if (!x.standardized) throw Error("representatives requires a standardized design");
    partition.validate(static_cast<int>(x.p()));
    ClusterRepresentatives out;
    out.partition = partition;
    out.values.resize(x.n(), partition.num_groups());
    for (int r = 0; r < partition.num_groups(); ++r) {
        const auto& g = partition.groups[static_cast<std::size_t>(r)];
        Eigen::VectorXd mean = Eigen::VectorXd::Zero(x.n());
        for (int j : g) mean += x.values.col(j);
        out.values.col(r) = mean / static_cast<double>(g.size());
    }
    return out;
}

StandardizedRepresentatives standardize_representatives(const ClusterRepresentatives& reps) {
    const Eigen::Index n = reps.values.rows();
    const Eigen::Index q = reps.values.cols();
    StandardizedRepresentatives out;
    out.scale.resize(q);
    out.x.values.resize(n, q);
    for (Eigen::Index r = 0; r < q; ++r) {
        Eigen::VectorXd c = reps.values.col(r).array() - reps.values.col(r).mean();
        const double scale = std::sqrt(c.squaredNorm() / static_cast<double>(n));
        if (scale < 1e-8) throw DegenerateRepresentative(static_cast<int>(r));
        out.scale[r] = scale;
        out.x.values.col(r) = c / scale;
        out.x.column_ids.push_back("R" + std::to_string(r + 1));
    }
    out.x.standardized = true;
    return out;
}

} // namespace acl
