#include "acl/diagnostics.hpp"

#include <algorithm>
#include <cmath>

#include "acl/rng.hpp"

namespace acl {

namespace {

struct IrBlocks {
    GramPartition part;
    double min_eigen = 0.0;
    Eigen::MatrixXd sigma11_inv;
};

IrBlocks ir_blocks(const GramMatrix& sigma, const std::vector<int>& s) {
    if (s.empty()) throw Error("index set must be nonempty");
    IrBlocks out;
    out.part = partition_gram(sigma, s);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(out.part.s11);
    out.min_eigen = es.eigenvalues().minCoeff();
    if (out.min_eigen <= 1e-10)
        throw SingularSigma11("Sigma11(S) has minimum eigenvalue " + std::to_string(out.min_eigen));
    out.sigma11_inv = es.eigenvectors() * es.eigenvalues().cwiseInverse().asDiagonal() *
                      es.eigenvectors().transpose();
    return out;
}

double bound_from_blocks(const IrBlocks& b) {
    if (b.part.outside.empty()) return 0.0;
    const double s = static_cast<double>(b.part.inside.size());
    double worst = 0.0;
    for (Eigen::Index j = 0; j < b.part.s21.rows(); ++j)
        worst = std::max(worst, b.part.s21.row(j).norm());
    return std::sqrt(s) * worst / (b.min_eigen * b.min_eigen);
}

} // namespace

IrReport ir_theta_exact(const GramMatrix& sigma, const std::vector<int>& s) {
    const IrBlocks b = ir_blocks(sigma, s);
    IrReport report;
    report.min_eigen_s11 = b.min_eigen;
    if (!b.part.outside.empty()) {
        const Eigen::MatrixXd m = b.part.s21 * b.sigma11_inv;
        for (Eigen::Index j = 0; j < m.rows(); ++j)
            report.theta_exact = std::max(report.theta_exact, m.row(j).lpNorm<1>());
    }
    report.theta_bound = bound_from_blocks(b);
    report.holds_strict = report.theta_exact < 1.0;
    return report;
}

double ir_theta_bound(const GramMatrix& sigma, const std::vector<int>& s) {
    return bound_from_blocks(ir_blocks(sigma, s));
}

namespace {

// Inverse square root of a group Gram block; pseudo-inverse drops the
// null space when allowed.
Eigen::MatrixXd inv_sqrt(const Eigen::MatrixXd& m, int group, bool pseudo) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(m);
    const Eigen::VectorXd ev = es.eigenvalues();
    const double cutoff = 1e-10 * std::max(1.0, ev.maxCoeff());
    Eigen::VectorXd inv(ev.size());
    for (Eigen::Index i = 0; i < ev.size(); ++i) {
        if (ev[i] > cutoff) {
            inv[i] = 1.0 / std::sqrt(ev[i]);
        } else if (pseudo) {
            inv[i] = 0.0;
        } else {
            throw SingularGroupGram(group);
        }
    }
    return es.eigenvectors() * inv.asDiagonal() * es.eigenvectors().transpose();
}

// max ||A tau||_2 over tau in a product of per-block unit l2 balls, by
// alternating ascent on (u, tau_1, ..., tau_w) with random restarts. The
// result is a certified lower bound on the true maximum.
double structured_norm_lower_bound(const Eigen::MatrixXd& a, const std::vector<Eigen::Index>& block_starts,
                                   const std::vector<Eigen::Index>& block_sizes, const GirOptions& opt,
                                   std::uint64_t stream) {
    const Eigen::Index s = a.cols();
    if (a.rows() == 0 || s == 0) return 0.0;
    double best = 0.0;
    for (int restart = 0; restart < opt.restarts; ++restart) {
        NormalSampler rng(mix_seed(opt.seed, stream, static_cast<std::uint64_t>(restart)));
        Eigen::VectorXd tau(s);
        for (Eigen::Index i = 0; i < s; ++i) tau[i] = rng.normal();
        for (std::size_t b = 0; b < block_starts.size(); ++b) {
            auto seg = tau.segment(block_starts[b], block_sizes[b]);
            const double norm = seg.norm();
            if (norm > 0.0) seg /= norm;
        }
        double value = (a * tau).norm();
        for (int it = 0; it < opt.max_ascent_iters; ++it) {
            Eigen::VectorXd v = a * tau;
            const double vn = v.norm();
            if (vn <= 0.0) break;
            const Eigen::VectorXd g = a.transpose() * (v / vn);
            for (std::size_t b = 0; b < block_starts.size(); ++b) {
                auto gseg = g.segment(block_starts[b], block_sizes[b]);
                const double gn = gseg.norm();
                if (gn > 0.0) tau.segment(block_starts[b], block_sizes[b]) = gseg / gn;
            }
            const double next = (a * tau).norm();
            if (next <= value + 1e-13 * std::max(1.0, value)) {
                value = std::max(value, next);
                break;
            }
            value = next;
        }
        best = std::max(best, value);
    }
    return best;
}

} // namespace

GirReport gir_check(const DesignMatrix& x, const GroupPartition& partition,
                    const std::vector<int>& active_groups, const GirOptions& options) {
    partition.validate(static_cast<int>(x.p()));
    if (active_groups.empty()) throw Error("active group set must be nonempty");
    const GramMatrix sigma = gram(x);

    std::vector<int> w_sorted(active_groups);
    std::sort(w_sorted.begin(), w_sorted.end());
    std::vector<char> is_active(static_cast<std::size_t>(partition.num_groups()), 0);
    for (int r : w_sorted) {
        if (r < 0 || r >= partition.num_groups()) throw Error("active group index out of range");
        is_active[static_cast<std::size_t>(r)] = 1;
    }

    // active columns, grouped; remember block extents inside the active set
    std::vector<int> active_cols;
    std::vector<Eigen::Index> block_starts, block_sizes;
    std::vector<double> block_multiplier; // K = diag(m_r I)
    for (int r : w_sorted) {
        const auto& g = partition.groups[static_cast<std::size_t>(r)];
        block_starts.push_back(static_cast<Eigen::Index>(active_cols.size()));
        block_sizes.push_back(static_cast<Eigen::Index>(g.size()));
        block_multiplier.push_back(static_cast<double>(g.size()));
        active_cols.insert(active_cols.end(), g.begin(), g.end());
    }
    const auto s = static_cast<Eigen::Index>(active_cols.size());

    Eigen::MatrixXd sigma11(s, s);
    for (Eigen::Index a = 0; a < s; ++a)
        for (Eigen::Index b = 0; b < s; ++b)
            sigma11(a, b) = sigma.values(active_cols[static_cast<std::size_t>(a)],
                                         active_cols[static_cast<std::size_t>(b)]);

    GirReport report;

    // R_W: between-group correlation structure of the active groups
    {
        std::vector<Eigen::MatrixXd> half_inv;
        for (std::size_t i = 0; i < w_sorted.size(); ++i) {
            const Eigen::MatrixXd block =
                sigma11.block(block_starts[i], block_starts[i], block_sizes[i], block_sizes[i]);
            half_inv.push_back(inv_sqrt(block, w_sorted[i], options.use_pseudo_inverse));
        }
        Eigen::MatrixXd rw(s, s);
        for (std::size_t i = 0; i < w_sorted.size(); ++i) {
            for (std::size_t l = 0; l < w_sorted.size(); ++l) {
                const Eigen::MatrixXd cross =
                    sigma11.block(block_starts[i], block_starts[l], block_sizes[i], block_sizes[l]);
                rw.block(block_starts[i], block_starts[l], block_sizes[i], block_sizes[l]) =
                    half_inv[i] * cross * half_inv[l];
            }
        }
        rw = 0.5 * (rw + rw.transpose()).eval();
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(rw);
        report.rw_min_eigen = es.eigenvalues().minCoeff();
    }

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es11(sigma11);
    if (es11.eigenvalues().minCoeff() <= 1e-10) {
        if (!options.use_pseudo_inverse)
            throw SingularSigma11("active-set Gram block is singular");
    }
    Eigen::VectorXd inv_ev(s);
    for (Eigen::Index i = 0; i < s; ++i) {
        const double ev = es11.eigenvalues()[i];
        inv_ev[i] = ev > 1e-10 ? 1.0 / ev : 0.0;
    }
    const Eigen::MatrixXd sigma11_inv =
        es11.eigenvectors() * inv_ev.asDiagonal() * es11.eigenvectors().transpose();

    // Sigma11^{-1} K with K = diag(m_r I_{m_r})
    Eigen::MatrixXd inv_k = sigma11_inv;
    for (std::size_t i = 0; i < w_sorted.size(); ++i)
        inv_k.middleCols(block_starts[i], block_sizes[i]) *= block_multiplier[i];

    bool all_below = true;
    for (int r = 0; r < partition.num_groups(); ++r) {
        if (is_active[static_cast<std::size_t>(r)]) continue;
        const auto& g = partition.groups[static_cast<std::size_t>(r)];
        const auto m = static_cast<Eigen::Index>(g.size());
        Eigen::MatrixXd cross(m, s);
        for (Eigen::Index a = 0; a < m; ++a)
            for (Eigen::Index b = 0; b < s; ++b)
                cross(a, b) = sigma.values(g[static_cast<std::size_t>(a)],
                                           active_cols[static_cast<std::size_t>(b)]);
        const Eigen::MatrixXd a_r = cross * inv_k;
        const double value = structured_norm_lower_bound(a_r, block_starts, block_sizes, options,
                                                         static_cast<std::uint64_t>(r)) /
                             static_cast<double>(m);
        report.noise_groups.push_back(r);
        report.group_ir_values.push_back(value);
        if (!(value < 1.0 - options.epsilon)) all_below = false;
    }
    report.holds = all_below;
    return report;
}

BetaMinReport beta_min_check(const CoefVector& beta, const std::vector<int>& s, double lambda,
                             double phi_sq) {
    if (phi_sq <= 0.0) throw Error("phi^2 proxy must be positive");
    if (s.empty()) throw Error("active set must be nonempty");
    BetaMinReport report;
    report.threshold = 4.0 * lambda * static_cast<double>(s.size()) / phi_sq;
    double min_abs = std::numeric_limits<double>::infinity();
    for (int j : s) {
        if (j < 0 || j >= beta.values.size()) throw Error("active index out of range");
        min_abs = std::min(min_abs, std::abs(beta.values[j]));
    }
    report.margin = min_abs - report.threshold;
    report.holds = report.margin >= 0.0;
    return report;
}

GroupBetaMinReport group_beta_min_check(const CoefVector& beta, const GroupPartition& partition,
                                        const std::vector<int>& active_groups, double lambda, int n,
                                        double d_const) {
    if (d_const <= 0.0) throw Error("D must be positive");
    if (n <= 0) throw Error("n must be positive");
    GroupBetaMinReport report;
    report.holds = true;
    for (int r : active_groups) {
        if (r < 0 || r >= partition.num_groups()) throw Error("active group index out of range");
        const auto& g = partition.groups[static_cast<std::size_t>(r)];
        double linf = 0.0;
        for (int j : g) {
            if (j < 0 || j >= beta.values.size()) throw Error("group member out of range");
            linf = std::max(linf, std::abs(beta.values[j]));
        }
        const double threshold =
            d_const * lambda * std::sqrt(static_cast<double>(g.size())) / static_cast<double>(n);
        report.margins.push_back(linf - threshold);
        if (linf - threshold < 0.0) report.holds = false;
    }
    return report;
}

} // namespace acl
