#include "acl/group_lasso.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace acl {

int GroupPartition::total_size() const {
    int total = 0;
    for (const auto& g : groups) total += static_cast<int>(g.size());
    return total;
}

int GroupPartition::max_group_size() const {
    int m = 0;
    for (const auto& g : groups) m = std::max(m, static_cast<int>(g.size()));
    return m;
}

void GroupPartition::validate(int p) const {
    std::vector<char> seen(static_cast<std::size_t>(p), 0);
    for (const auto& g : groups) {
        if (g.empty()) throw InvalidPartition("empty group");
        for (int j : g) {
            if (j < 0 || j >= p) throw InvalidPartition("group member out of range");
            if (seen[static_cast<std::size_t>(j)]) throw InvalidPartition("groups overlap");
            seen[static_cast<std::size_t>(j)] = 1;
        }
    }
    for (int j = 0; j < p; ++j)
        if (!seen[static_cast<std::size_t>(j)])
            throw InvalidPartition("column " + std::to_string(j + 1) + " is not covered");
}

GroupPartition GroupPartition::singletons(int p) {
    GroupPartition out;
    out.groups.resize(static_cast<std::size_t>(p));
    for (int j = 0; j < p; ++j) out.groups[static_cast<std::size_t>(j)] = {j};
    return out;
}

std::vector<int> GroupPartition::membership(int p) const {
    std::vector<int> member(static_cast<std::size_t>(p), -1);
    for (int r = 0; r < num_groups(); ++r)
        for (int j : groups[static_cast<std::size_t>(r)]) member[static_cast<std::size_t>(j)] = r;
    return member;
}

Eigen::VectorXd group_soft_threshold(const Eigen::VectorXd& v, double gamma) {
    if (gamma < 0.0) throw Error("gamma must be nonnegative");
    const double norm = v.norm();
    if (norm <= gamma) return Eigen::VectorXd::Zero(v.size());
    return v * (1.0 - gamma / norm);
}

namespace {

std::vector<double> default_weights(const GroupPartition& partition) {
    std::vector<double> w(static_cast<std::size_t>(partition.num_groups()));
    for (int r = 0; r < partition.num_groups(); ++r)
        w[static_cast<std::size_t>(r)] = std::sqrt(static_cast<double>(partition.size_of(r)));
    return w;
}

void require_inputs(const DesignMatrix& x, const ResponseVector& y, const GroupPartition& partition,
                    const std::vector<double>* weights) {
    if (!x.standardized) throw Error("fit_group_lasso requires a standardized design");
    if (!y.centered) throw Error("fit_group_lasso requires a centered response");
    if (y.values.size() != x.n()) throw DimensionMismatch("x and y have different numbers of rows");
    partition.validate(static_cast<int>(x.p()));
    if (weights && static_cast<int>(weights->size()) != partition.num_groups())
        throw DimensionMismatch("penalty weights length does not match the number of groups");
}

// Verifies (1/n) X_{G_r}' X_{G_r} = I for multi-column groups; singleton
// groups are covered by the standardization convention.
void require_orthonormal_groups(const DesignMatrix& x, const GroupPartition& partition) {
    const double n = static_cast<double>(x.n());
    for (int r = 0; r < partition.num_groups(); ++r) {
        const auto& g = partition.groups[static_cast<std::size_t>(r)];
        if (g.size() < 2) continue;
        const auto m = static_cast<Eigen::Index>(g.size());
        Eigen::MatrixXd block(x.n(), m);
        for (Eigen::Index i = 0; i < m; ++i) block.col(i) = x.values.col(g[static_cast<std::size_t>(i)]);
        const Eigen::MatrixXd gm = block.transpose() * block / n;
        const double dev = (gm - Eigen::MatrixXd::Identity(m, m)).cwiseAbs().maxCoeff();
        if (dev > 1e-6)
            throw Error("group " + std::to_string(r + 1) +
                        " is not orthonormalized; run orthonormalize_groups first");
    }
}

struct GroupWorkspace {
    const Eigen::MatrixXd& x;
    const Eigen::VectorXd& y;
    const GroupPartition& partition;
    const std::vector<double>& weights;
    double lambda;
    Eigen::VectorXd beta;
    Eigen::VectorXd resid;
    double inv_n;

    double sweep(const std::vector<int>& group_ids) {
        double dmax = 0.0;
        for (int r : group_ids) {
            const auto& g = partition.groups[static_cast<std::size_t>(r)];
            const auto m = static_cast<Eigen::Index>(g.size());
            Eigen::VectorXd z(m);
            for (Eigen::Index i = 0; i < m; ++i) {
                const int j = g[static_cast<std::size_t>(i)];
                z[i] = resid.dot(x.col(j)) * inv_n + beta[j];
            }
            const Eigen::VectorXd nb =
                group_soft_threshold(z, 0.5 * lambda * weights[static_cast<std::size_t>(r)]);
            for (Eigen::Index i = 0; i < m; ++i) {
                const int j = g[static_cast<std::size_t>(i)];
                const double diff = nb[i] - beta[j];
                if (diff != 0.0) {
                    resid -= diff * x.col(j);
                    beta[j] = nb[i];
                    dmax = std::max(dmax, std::abs(diff));
                }
            }
        }
        return dmax;
    }

    void refresh_residual() { resid = y - x * beta; }

    double group_norm(int r) const {
        const auto& g = partition.groups[static_cast<std::size_t>(r)];
        double s = 0.0;
        for (int j : g) s += beta[j] * beta[j];
        return std::sqrt(s);
    }

    double objective() const {
        double pen = 0.0;
        for (int r = 0; r < partition.num_groups(); ++r)
            pen += weights[static_cast<std::size_t>(r)] * group_norm(r);
        return resid.squaredNorm() * inv_n + lambda * pen;
    }

    double kkt_residual() const {
        double worst = 0.0;
        for (int r = 0; r < partition.num_groups(); ++r) {
            const auto& g = partition.groups[static_cast<std::size_t>(r)];
            const auto m = static_cast<Eigen::Index>(g.size());
            Eigen::VectorXd grad(m);
            for (Eigen::Index i = 0; i < m; ++i)
                grad[i] = 2.0 * inv_n * resid.dot(x.col(g[static_cast<std::size_t>(i)]));
            const double norm = group_norm(r);
            const double pw = lambda * weights[static_cast<std::size_t>(r)];
            double v;
            if (norm > 0.0) {
                Eigen::VectorXd dir(m);
                for (Eigen::Index i = 0; i < m; ++i) dir[i] = beta[g[static_cast<std::size_t>(i)]] / norm;
                v = (grad - pw * dir).norm();
            } else {
                v = std::max(0.0, grad.norm() - pw);
            }
            worst = std::max(worst, v);
        }
        return worst;
    }
};

GroupLassoFit finish(GroupWorkspace& w, long iters, std::vector<double> trace) {
    w.refresh_residual();
    GroupLassoFit fit;
    fit.beta.values = w.beta;
    fit.lambda = w.lambda;
    fit.iterations = iters;
    fit.kkt_residual = w.kkt_residual();
    fit.objective = w.objective();
    fit.objective_trace = std::move(trace);
    fit.group_norms.resize(static_cast<std::size_t>(w.partition.num_groups()));
    for (int r = 0; r < w.partition.num_groups(); ++r) {
        fit.group_norms[static_cast<std::size_t>(r)] = w.group_norm(r);
        if (fit.group_norms[static_cast<std::size_t>(r)] > 0.0) fit.selected_groups.push_back(r);
    }
    return fit;
}

GroupLassoFit solve(const DesignMatrix& x, const ResponseVector& y, const GroupPartition& partition,
                    double lambda, const GroupLassoOptions& opt, const std::vector<double>& weights,
                    const Eigen::VectorXd* warm_start) {
    if (lambda < 0.0) throw Error("lambda must be nonnegative");
    GroupWorkspace w{x.values, y.values, partition, weights, lambda,
                     Eigen::VectorXd(), Eigen::VectorXd(), 1.0 / static_cast<double>(x.n())};
    if (warm_start && warm_start->size() == x.p()) {
        w.beta = *warm_start;
        w.refresh_residual();
    } else {
        w.beta = Eigen::VectorXd::Zero(x.p());
        w.resid = y.values;
    }

    std::vector<int> all(static_cast<std::size_t>(partition.num_groups()));
    std::iota(all.begin(), all.end(), 0);

    std::vector<double> trace;
    long iters = 0;
    auto budget = [&]() {
        if (iters >= opt.max_iter)
            throw GroupLassoNonConvergence(opt.max_iter, finish(w, iters, trace));
    };
    auto record = [&]() {
        if (opt.track_objective) trace.push_back(w.objective());
    };

    for (;;) {
        budget();
        ++iters;
        const double d_full = w.sweep(all);
        record();
        if (d_full < opt.tol) {
            w.refresh_residual();
            if (w.kkt_residual() <= opt.tol) break;
            continue;
        }
        std::vector<int> active;
        for (int r = 0; r < partition.num_groups(); ++r)
            if (w.group_norm(r) > 0.0) active.push_back(r);
        double d = d_full;
        while (d >= opt.tol && !active.empty()) {
            budget();
            ++iters;
            d = w.sweep(active);
            record();
        }
    }
    return finish(w, iters, std::move(trace));
}

} // namespace

CoefVector GroupTransform::back_transform(const CoefVector& transformed) const {
    CoefVector out;
    out.values = Eigen::VectorXd::Zero(original_p);
    for (std::size_t r = 0; r < basis.size(); ++r) {
        const auto& tg = transformed_groups.groups[r];
        Eigen::VectorXd bt(static_cast<Eigen::Index>(tg.size()));
        for (std::size_t i = 0; i < tg.size(); ++i)
            bt[static_cast<Eigen::Index>(i)] = transformed.values[tg[i]];
        const Eigen::VectorXd orig = basis[r] * bt;
        const auto& og = original_groups[r];
        for (std::size_t i = 0; i < og.size(); ++i) out.values[og[i]] = orig[static_cast<Eigen::Index>(i)];
    }
    return out;
}

std::pair<DesignMatrix, GroupTransform> orthonormalize_groups(const DesignMatrix& x,
                                                              const GroupPartition& partition) {
    if (!x.standardized) throw Error("orthonormalize_groups requires a standardized design");
    partition.validate(static_cast<int>(x.p()));
    const double n = static_cast<double>(x.n());

    GroupTransform tf;
    tf.original_p = static_cast<int>(x.p());
    std::vector<Eigen::MatrixXd> blocks;
    int total_cols = 0;

    for (int r = 0; r < partition.num_groups(); ++r) {
        const auto& g = partition.groups[static_cast<std::size_t>(r)];
        const auto m = static_cast<Eigen::Index>(g.size());
        Eigen::MatrixXd block(x.n(), m);
        for (Eigen::Index i = 0; i < m; ++i) block.col(i) = x.values.col(g[static_cast<std::size_t>(i)]);

        Eigen::MatrixXd basis;
        if (m == 1) {
            // standardized columns already satisfy (1/n) X_j'X_j = 1
            basis = Eigen::MatrixXd::Identity(1, 1);
        } else {
            const Eigen::MatrixXd s_rr = block.transpose() * block / n;
            Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(s_rr);
            const Eigen::VectorXd ev = es.eigenvalues(); // ascending
            const double cutoff = 1e-10 * std::max(ev[m - 1], 1.0);
            Eigen::Index k = 0;
            for (Eigen::Index i = 0; i < m; ++i)
                if (ev[i] > cutoff) ++k;
            if (k == 0) throw SingularGroupGram(r);
            basis.resize(m, k);
            Eigen::Index col = 0;
            for (Eigen::Index i = 0; i < m; ++i) {
                if (ev[i] <= cutoff) continue;
                basis.col(col++) = es.eigenvectors().col(i) / std::sqrt(ev[i]);
            }
            if (k < m) tf.rank_deficient.push_back(r);
        }

        blocks.push_back(block * basis);
        tf.basis.push_back(std::move(basis));
        tf.original_groups.push_back(g);
        std::vector<int> tg(static_cast<std::size_t>(blocks.back().cols()));
        std::iota(tg.begin(), tg.end(), total_cols);
        total_cols += static_cast<int>(tg.size());
        tf.transformed_groups.groups.push_back(std::move(tg));
        tf.penalty_weights.push_back(std::sqrt(static_cast<double>(m)));
    }

    DesignMatrix out;
    out.values.resize(x.n(), total_cols);
    out.column_ids.reserve(static_cast<std::size_t>(total_cols));
    int col = 0;
    for (int r = 0; r < partition.num_groups(); ++r) {
        const auto& block = blocks[static_cast<std::size_t>(r)];
        for (Eigen::Index i = 0; i < block.cols(); ++i) {
            out.values.col(col++) = block.col(i);
            out.column_ids.push_back("G" + std::to_string(r + 1) + "." + std::to_string(i + 1));
        }
    }
    out.standardized = true;
    return {std::move(out), std::move(tf)};
}

GroupLassoFit fit_group_lasso(const DesignMatrix& x, const ResponseVector& y,
                              const GroupPartition& partition, double lambda,
                              const GroupLassoOptions& options,
                              const std::vector<double>* penalty_weights,
                              const Eigen::VectorXd* warm_start) {
    require_inputs(x, y, partition, penalty_weights);
    require_orthonormal_groups(x, partition);
    const std::vector<double> weights = penalty_weights ? *penalty_weights : default_weights(partition);
    return solve(x, y, partition, lambda, options, weights, warm_start);
}

LambdaPath group_lambda_path(const DesignMatrix& x, const ResponseVector& y,
                             const GroupPartition& partition, int grid_size, double ratio,
                             const std::vector<double>* penalty_weights) {
    require_inputs(x, y, partition, penalty_weights);
    const std::vector<double> weights = penalty_weights ? *penalty_weights : default_weights(partition);
    const double n = static_cast<double>(x.n());
    double lambda_max = 0.0;
    for (int r = 0; r < partition.num_groups(); ++r) {
        const auto& g = partition.groups[static_cast<std::size_t>(r)];
        double sq = 0.0;
        for (int j : g) {
            const double v = 2.0 / n * x.values.col(j).dot(y.values);
            sq += v * v;
        }
        lambda_max = std::max(lambda_max, std::sqrt(sq) / weights[static_cast<std::size_t>(r)]);
    }
    if (grid_size < 2) throw Error("grid_size must be at least 2");
    if (!(ratio > 0.0 && ratio < 1.0)) throw Error("ratio must be in (0, 1)");
    if (lambda_max <= 0.0) throw EmptyPath("lambda_max is zero; the null model spans the path");
    LambdaPath path;
    path.grid_size = grid_size;
    path.values.resize(static_cast<std::size_t>(grid_size));
    for (int i = 0; i < grid_size; ++i)
        path.values[static_cast<std::size_t>(i)] =
            lambda_max * std::pow(ratio, static_cast<double>(i) / static_cast<double>(grid_size - 1));
    return path;
}

std::vector<GroupLassoFit> fit_group_lasso_path(const DesignMatrix& x, const ResponseVector& y,
                                                const GroupPartition& partition,
                                                const LambdaPath& path,
                                                const GroupLassoOptions& options,
                                                const std::vector<double>* penalty_weights) {
    require_inputs(x, y, partition, penalty_weights);
    require_orthonormal_groups(x, partition);
    const std::vector<double> weights = penalty_weights ? *penalty_weights : default_weights(partition);
    std::vector<GroupLassoFit> fits;
    fits.reserve(path.values.size());
    const Eigen::VectorXd* warm = nullptr;
    for (double lambda : path.values) {
        fits.push_back(solve(x, y, partition, lambda, options, weights, warm));
        warm = &fits.back().beta.values;
    }
    return fits;
}

} // namespace acl
