#pragma once

// Test-only utilities: random instance generators and independent oracle
// implementations. The oracles deliberately avoid the library's solver
// code paths so that agreement is meaningful.

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <vector>

#include "acl/model_core.hpp"
#include "acl/partition.hpp"
#include "acl/rng.hpp"

namespace test {

inline Eigen::MatrixXd random_matrix(int n, int p, std::uint64_t seed) {
    acl::NormalSampler rng(seed);
    Eigen::MatrixXd m(n, p);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < p; ++j) m(i, j) = rng.normal();
    return m;
}

inline Eigen::VectorXd random_vector(int n, std::uint64_t seed) {
    acl::NormalSampler rng(seed);
    Eigen::VectorXd v(n);
    for (int i = 0; i < n; ++i) v[i] = rng.normal();
    return v;
}

// Standardized design with exactly orthonormal columns: (1/n) X'X = I.
inline Eigen::MatrixXd orthonormal_design(int n, int p, std::uint64_t seed) {
    Eigen::MatrixXd g = random_matrix(n, p, seed);
    Eigen::HouseholderQR<Eigen::MatrixXd> qr(g);
    Eigen::MatrixXd q = qr.householderQ() * Eigen::MatrixXd::Identity(n, p);
    // center columns then re-orthonormalize so both conventions hold
    for (int j = 0; j < p; ++j) q.col(j).array() -= q.col(j).mean();
    Eigen::HouseholderQR<Eigen::MatrixXd> qr2(q);
    q = qr2.householderQ() * Eigen::MatrixXd::Identity(n, p);
    for (int j = 0; j < p; ++j) q.col(j).array() -= q.col(j).mean();
    return q * std::sqrt(static_cast<double>(n));
}

// Random correlation-like PSD matrix with unit diagonal.
inline Eigen::MatrixXd random_correlation(int p, std::uint64_t seed, int dof = 0) {
    if (dof <= 0) dof = 3 * p;
    const Eigen::MatrixXd a = random_matrix(dof, p, seed);
    Eigen::MatrixXd s = a.transpose() * a / static_cast<double>(dof);
    Eigen::VectorXd d = s.diagonal().cwiseSqrt();
    for (int i = 0; i < p; ++i)
        for (int j = 0; j < p; ++j) s(i, j) /= d[i] * d[j];
    return 0.5 * (s + s.transpose());
}

// ---------------------------------------------------------------------
// Lasso oracle: enumerate all sign patterns in {-1,0,1}^p, solve the
// sign-restricted stationarity system, keep sign-consistent candidates.
// The global minimizer of the convex objective is one of them.
inline double lasso_objective(const Eigen::MatrixXd& x, const Eigen::VectorXd& y,
                              const Eigen::VectorXd& beta, double lambda) {
    const double n = static_cast<double>(x.rows());
    return (y - x * beta).squaredNorm() / n + lambda * beta.lpNorm<1>();
}

inline double lasso_sign_enum_oracle(const Eigen::MatrixXd& x, const Eigen::VectorXd& y,
                                     double lambda) {
    const int p = static_cast<int>(x.cols());
    const double n = static_cast<double>(x.rows());
    double best = lasso_objective(x, y, Eigen::VectorXd::Zero(p), lambda);

    std::vector<int> signs(static_cast<std::size_t>(p), 0);
    long total = 1;
    for (int j = 0; j < p; ++j) total *= 3;
    for (long code = 0; code < total; ++code) {
        long c = code;
        std::vector<int> active;
        for (int j = 0; j < p; ++j) {
            signs[static_cast<std::size_t>(j)] = static_cast<int>(c % 3) - 1; // -1, 0, 1
            c /= 3;
            if (signs[static_cast<std::size_t>(j)] != 0) active.push_back(j);
        }
        if (active.empty()) continue; // beta = 0 is seeded above
        const auto k = static_cast<Eigen::Index>(active.size());
        Eigen::MatrixXd xa(x.rows(), k);
        Eigen::VectorXd sa(k);
        for (Eigen::Index i = 0; i < k; ++i) {
            xa.col(i) = x.col(active[static_cast<std::size_t>(i)]);
            sa[i] = signs[static_cast<std::size_t>(active[static_cast<std::size_t>(i)])];
        }
        // stationarity on the orthant: (X_A'X_A/n) b = X_A'y/n - lambda s/2
        const Eigen::MatrixXd gram = xa.transpose() * xa / n;
        const Eigen::VectorXd rhs = xa.transpose() * y / n - 0.5 * lambda * sa;
        const Eigen::VectorXd b = gram.ldlt().solve(rhs);
        bool consistent = true;
        for (Eigen::Index i = 0; i < k; ++i)
            if (b[i] * sa[i] <= 0.0) consistent = false;
        if (!consistent) continue;
        Eigen::VectorXd beta = Eigen::VectorXd::Zero(p);
        for (Eigen::Index i = 0; i < k; ++i) beta[active[static_cast<std::size_t>(i)]] = b[i];
        best = std::min(best, lasso_objective(x, y, beta, lambda));
    }
    return best;
}

// ---------------------------------------------------------------------
// Group-lasso oracle: proximal gradient (ISTA) from many random starts.
inline double group_objective(const Eigen::MatrixXd& x, const Eigen::VectorXd& y,
                              const Eigen::VectorXd& beta, double lambda,
                              const acl::GroupPartition& partition,
                              const std::vector<double>& weights) {
    const double n = static_cast<double>(x.rows());
    double pen = 0.0;
    for (int r = 0; r < partition.num_groups(); ++r) {
        double sq = 0.0;
        for (int j : partition.groups[static_cast<std::size_t>(r)]) sq += beta[j] * beta[j];
        pen += weights[static_cast<std::size_t>(r)] * std::sqrt(sq);
    }
    return (y - x * beta).squaredNorm() / n + lambda * pen;
}

inline double group_prox_oracle(const Eigen::MatrixXd& x, const Eigen::VectorXd& y, double lambda,
                                const acl::GroupPartition& partition, int starts,
                                std::uint64_t seed, int iters = 4000) {
    const int p = static_cast<int>(x.cols());
    const double n = static_cast<double>(x.rows());
    std::vector<double> weights;
    for (int r = 0; r < partition.num_groups(); ++r)
        weights.push_back(std::sqrt(static_cast<double>(partition.size_of(r))));

    const Eigen::MatrixXd gram = x.transpose() * x / n;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(gram);
    const double lip = 2.0 * es.eigenvalues().maxCoeff();
    const double step = 1.0 / lip;

    double best = std::numeric_limits<double>::infinity();
    for (int s = 0; s < starts; ++s) {
        acl::NormalSampler rng(acl::mix_seed(seed, static_cast<std::uint64_t>(s), 17));
        Eigen::VectorXd beta(p);
        if (s == 0)
            beta.setZero();
        else
            for (int j = 0; j < p; ++j) beta[j] = rng.normal();
        for (int it = 0; it < iters; ++it) {
            const Eigen::VectorXd grad = -2.0 / n * (x.transpose() * (y - x * beta));
            Eigen::VectorXd z = beta - step * grad;
            for (int r = 0; r < partition.num_groups(); ++r) {
                const auto& g = partition.groups[static_cast<std::size_t>(r)];
                double sq = 0.0;
                for (int j : g) sq += z[j] * z[j];
                const double norm = std::sqrt(sq);
                const double gamma = step * lambda * weights[static_cast<std::size_t>(r)];
                const double scale = norm <= gamma ? 0.0 : 1.0 - gamma / norm;
                for (int j : g) z[j] *= scale;
            }
            beta = z;
        }
        best = std::min(best, group_objective(x, y, beta, lambda, partition, weights));
    }
    return best;
}

// ---------------------------------------------------------------------
// Clustering oracle: textbook agglomeration that recomputes every
// cluster-pair distance from the original dissimilarities at each step.
struct NaiveDendrogram {
    std::vector<std::vector<int>> step_clusters; // cluster contents after each merge
    std::vector<double> heights;
};

inline std::vector<std::vector<int>> naive_cut_by_height(const Eigen::MatrixXd& d, double h,
                                                         bool average_linkage = true) {
    const int p = static_cast<int>(d.rows());
    std::vector<std::vector<int>> clusters;
    for (int j = 0; j < p; ++j) clusters.push_back({j});

    auto cluster_distance = [&](const std::vector<int>& a, const std::vector<int>& b) {
        if (average_linkage) {
            double sum = 0.0;
            for (int i : a)
                for (int j : b) sum += d(i, j);
            return sum / (static_cast<double>(a.size()) * static_cast<double>(b.size()));
        }
        double mx = 0.0;
        for (int i : a)
            for (int j : b) mx = std::max(mx, d(i, j));
        return mx;
    };

    while (clusters.size() > 1) {
        double best_d = std::numeric_limits<double>::infinity();
        std::size_t best_a = 0, best_b = 0;
        int best_lo = 0, best_hi = 0;
        for (std::size_t a = 0; a < clusters.size(); ++a) {
            for (std::size_t b = a + 1; b < clusters.size(); ++b) {
                const double dist = cluster_distance(clusters[a], clusters[b]);
                const int ra = *std::min_element(clusters[a].begin(), clusters[a].end());
                const int rb = *std::min_element(clusters[b].begin(), clusters[b].end());
                const int lo = std::min(ra, rb), hi = std::max(ra, rb);
                if (dist < best_d ||
                    (dist == best_d && (lo < best_lo || (lo == best_lo && hi < best_hi)))) {
                    best_d = dist;
                    best_a = a;
                    best_b = b;
                    best_lo = lo;
                    best_hi = hi;
                }
            }
        }
        if (best_d >= h) break;
        clusters[best_a].insert(clusters[best_a].end(), clusters[best_b].begin(),
                                clusters[best_b].end());
        std::sort(clusters[best_a].begin(), clusters[best_a].end());
        clusters.erase(clusters.begin() + static_cast<std::ptrdiff_t>(best_b));
    }
    for (auto& c : clusters) std::sort(c.begin(), c.end());
    std::sort(clusters.begin(), clusters.end());
    return clusters;
}

inline std::vector<std::vector<int>> canonical_partition(const acl::GroupPartition& partition) {
    std::vector<std::vector<int>> out;
    for (const auto& g : partition.groups) {
        auto s = g;
        std::sort(s.begin(), s.end());
        out.push_back(std::move(s));
    }
    std::sort(out.begin(), out.end());
    return out;
}

} // namespace test
