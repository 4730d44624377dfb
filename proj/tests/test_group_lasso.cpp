#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "acl/group_lasso.hpp"
#include "helpers.hpp"

using namespace acl;

namespace {

StandardizedData random_problem(int n, int p, std::uint64_t seed) {
    return standardize(test::random_matrix(n, p, seed), test::random_vector(n, seed + 1));
}

// random orthonormal q x q matrix
Eigen::MatrixXd random_rotation(int q, std::uint64_t seed) {
    const Eigen::MatrixXd g = test::random_matrix(q, q, seed);
    Eigen::HouseholderQR<Eigen::MatrixXd> qr(g);
    return qr.householderQ();
}

} // namespace

TEST_CASE("partition validation") {
    GroupPartition ok;
    ok.groups = {{0, 2}, {1}};
    CHECK_NOTHROW(ok.validate(3));
    CHECK(ok.max_group_size() == 2);
    CHECK(ok.max_group_size_below(3));

    GroupPartition overlap;
    overlap.groups = {{0, 1}, {1, 2}};
    CHECK_THROWS_AS(overlap.validate(3), InvalidPartition);

    GroupPartition gap;
    gap.groups = {{0}, {2}};
    CHECK_THROWS_AS(gap.validate(3), InvalidPartition);
}

TEST_CASE("group_soft_threshold hand values") {
    Eigen::VectorXd v(2);
    v << 3, 4;
    CHECK(group_soft_threshold(v, 5.0).cwiseAbs().maxCoeff() == 0.0);
    CHECK((group_soft_threshold(v, 0.0) - v).cwiseAbs().maxCoeff() == 0.0);
    Eigen::VectorXd w(2);
    w << 6, 8;
    Eigen::VectorXd expect(2);
    expect << 3, 4;
    CHECK((group_soft_threshold(w, 5.0) - expect).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("orthonormalize_groups: singleton groups are the identity transform") {
    const StandardizedData d = random_problem(30, 4, 1101);
    const auto [xo, tf] = orthonormalize_groups(d.x, GroupPartition::singletons(4));
    CHECK((xo.values - d.x.values).cwiseAbs().maxCoeff() == 0.0);
    CHECK(tf.rank_deficient.empty());
    for (const auto& b : tf.basis) CHECK(b(0, 0) == 1.0);
}

TEST_CASE("orthonormalize_groups: duplicated column reduces the block") {
    Eigen::MatrixXd x = test::random_matrix(25, 3, 1201);
    x.col(1) = x.col(0);
    const StandardizedData d = standardize(x, test::random_vector(25, 1202));
    GroupPartition part;
    part.groups = {{0, 1}, {2}};
    const auto [xo, tf] = orthonormalize_groups(d.x, part);
    CHECK(tf.rank_deficient == std::vector<int>{0});
    CHECK(xo.p() == 2); // 2-column block collapses to rank 1
    CHECK(tf.penalty_weights[0] == doctest::Approx(std::sqrt(2.0)));
}

TEST_CASE("orthonormalize_groups: correlated block becomes exactly orthonormal") {
    Eigen::MatrixXd x = test::random_matrix(40, 3, 1301);
    x.col(1) = 0.8 * x.col(0) + 0.3 * x.col(1);
    x.col(2) = 0.7 * x.col(0) + 0.4 * x.col(2);
    const StandardizedData d = standardize(x, test::random_vector(40, 1302));
    GroupPartition part;
    part.groups = {{0, 1, 2}};
    const auto [xo, tf] = orthonormalize_groups(d.x, part);
    const Eigen::MatrixXd g = xo.values.transpose() * xo.values / 40.0;
    CHECK((g - Eigen::MatrixXd::Identity(3, 3)).cwiseAbs().maxCoeff() < 1e-10);
    // back transform reproduces the fitted predictor exactly
    CoefVector bt;
    bt.values = test::random_vector(3, 1303);
    const CoefVector orig = tf.back_transform(bt);
    CHECK((xo.values * bt.values - d.x.values * orig.values).cwiseAbs().maxCoeff() < 1e-8);
}

TEST_CASE("all-singleton partition coincides with the lasso") {
    for (std::uint64_t seed = 0; seed < 4; ++seed) {
        const StandardizedData d = random_problem(30, 7, 1400 + seed * 7);
        const double n = 30.0;
        const double lmax =
            ((2.0 / n) * (d.x.values.transpose() * d.y.values)).cwiseAbs().maxCoeff();
        const double lambda = 0.3 * lmax;
        const GroupLassoFit gfit =
            fit_group_lasso(d.x, d.y, GroupPartition::singletons(7), lambda);
        const LassoFit lfit = fit_lasso(d.x, d.y, lambda);
        CHECK((gfit.beta.values - lfit.beta.values).cwiseAbs().maxCoeff() < 1e-6);
    }
}

TEST_CASE("lambda at the group maximum gives the null model") {
    const StandardizedData d = random_problem(40, 6, 1501);
    GroupPartition part;
    part.groups = {{0, 1}, {2, 3, 4}, {5}};
    const auto [xo, tf] = orthonormalize_groups(d.x, part);
    const LambdaPath path = group_lambda_path(xo, d.y, tf.transformed_groups, 3, 0.1);
    const GroupLassoFit fit =
        fit_group_lasso(xo, d.y, tf.transformed_groups, path.values[0] * 1.000001);
    CHECK(fit.selected_groups.empty());
    CHECK(fit.beta.values.cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("matches the multi-start proximal oracle") {
    const int n = 30, p = 6;
    StandardizedData d = random_problem(n, p, 1601);
    GroupPartition part;
    part.groups = {{0, 1}, {2, 3}, {4, 5}};
    const auto [xo, tf] = orthonormalize_groups(d.x, part);
    const LambdaPath path = group_lambda_path(xo, d.y, tf.transformed_groups, 3, 0.2);
    const double lambda = path.values[1];
    const GroupLassoFit fit = fit_group_lasso(xo, d.y, tf.transformed_groups, lambda);
    const double oracle =
        test::group_prox_oracle(xo.values, d.y.values, lambda, tf.transformed_groups, 100, 1602);
    CHECK(fit.objective <= oracle + 1e-6);
}

TEST_CASE("group path: singleton groups equal the lasso grid, y = 0 is empty") {
    const StandardizedData d = random_problem(25, 5, 1701);
    const LambdaPath lasso_grid = lambda_path(d.x, d.y, 8, 0.05);
    const LambdaPath group_grid =
        group_lambda_path(d.x, d.y, GroupPartition::singletons(5), 8, 0.05);
    for (std::size_t i = 0; i < lasso_grid.values.size(); ++i)
        CHECK(group_grid.values[i] == doctest::Approx(lasso_grid.values[i]).epsilon(1e-12));

    ResponseVector zero;
    zero.values = Eigen::VectorXd::Zero(25);
    zero.centered = true;
    CHECK_THROWS_AS(group_lambda_path(d.x, zero, GroupPartition::singletons(5), 5, 0.1), EmptyPath);
}

TEST_CASE("group path maximum matches a hand computation on two groups") {
    const StandardizedData d = random_problem(30, 4, 1801);
    GroupPartition part;
    part.groups = {{0, 1}, {2, 3}};
    const auto [xo, tf] = orthonormalize_groups(d.x, part);
    const LambdaPath path = group_lambda_path(xo, d.y, tf.transformed_groups, 4, 0.1);
    double expect = 0.0;
    int col = 0;
    for (int r = 0; r < 2; ++r) {
        const int m = tf.transformed_groups.size_of(r);
        double sq = 0.0;
        for (int i = 0; i < m; ++i, ++col) {
            const double v = 2.0 / 30.0 * xo.values.col(col).dot(d.y.values);
            sq += v * v;
        }
        expect = std::max(expect, std::sqrt(sq) / std::sqrt(2.0));
    }
    CHECK(path.values[0] == doctest::Approx(expect).epsilon(1e-12));
}

TEST_CASE("objective and selected groups are invariant to within-group rotations") {
    for (std::uint64_t seed = 0; seed < 4; ++seed) {
        const int n = 40, p = 6;
        Eigen::MatrixXd raw = test::random_matrix(n, p, 1900 + seed * 11);
        Eigen::VectorXd beta0 = Eigen::VectorXd::Zero(p);
        beta0 << 1.2, -0.7, 0, 0, 0.9, 0.4;
        const Eigen::VectorXd y = raw * beta0 + 0.5 * test::random_vector(n, 1901 + seed * 11);
        const StandardizedData d = standardize(raw, y);
        GroupPartition part;
        part.groups = {{0, 1}, {2, 3}, {4, 5}};
        const auto [xo, tf] = orthonormalize_groups(d.x, part);
        const LambdaPath path = group_lambda_path(xo, d.y, tf.transformed_groups, 3, 0.15);
        const double lambda = path.values[1];
        const GroupLassoFit base = fit_group_lasso(xo, d.y, tf.transformed_groups, lambda);

        DesignMatrix rotated = xo;
        for (int r = 0; r < 3; ++r) {
            const auto& g = tf.transformed_groups.groups[static_cast<std::size_t>(r)];
            const auto m = static_cast<int>(g.size());
            const Eigen::MatrixXd q = random_rotation(m, 2000 + seed * 13 + r);
            Eigen::MatrixXd block(n, m);
            for (int i = 0; i < m; ++i) block.col(i) = xo.values.col(g[static_cast<std::size_t>(i)]);
            block = block * q;
            for (int i = 0; i < m; ++i) rotated.values.col(g[static_cast<std::size_t>(i)]) = block.col(i);
        }
        const GroupLassoFit rot = fit_group_lasso(rotated, d.y, tf.transformed_groups, lambda);
        CHECK(rot.objective == doctest::Approx(base.objective).epsilon(1e-6));
        CHECK(rot.selected_groups == base.selected_groups);
    }
}

TEST_CASE("group-or-nothing: no partial numerical supports") {
    const StandardizedData d = random_problem(50, 9, 2101);
    GroupPartition part;
    part.groups = {{0, 1, 2}, {3, 4, 5}, {6, 7, 8}};
    const auto [xo, tf] = orthonormalize_groups(d.x, part);
    const LambdaPath path = group_lambda_path(xo, d.y, tf.transformed_groups, 6, 0.05);
    for (double lambda : path.values) {
        const GroupLassoFit fit = fit_group_lasso(xo, d.y, tf.transformed_groups, lambda);
        for (int r = 0; r < tf.transformed_groups.num_groups(); ++r) {
            const auto& g = tf.transformed_groups.groups[static_cast<std::size_t>(r)];
            double mx = 0.0;
            for (int j : g) mx = std::max(mx, std::abs(fit.beta.values[j]));
            const bool selected = std::find(fit.selected_groups.begin(), fit.selected_groups.end(),
                                            r) != fit.selected_groups.end();
            if (!selected) CHECK(mx <= 1e-12);
        }
    }
}

TEST_CASE("objective non-increasing per block sweep") {
    const StandardizedData d = random_problem(60, 12, 2201);
    GroupPartition part;
    part.groups = {{0, 1, 2, 3}, {4, 5, 6, 7}, {8, 9, 10, 11}};
    const auto [xo, tf] = orthonormalize_groups(d.x, part);
    GroupLassoOptions opt;
    opt.track_objective = true;
    const LambdaPath path = group_lambda_path(xo, d.y, tf.transformed_groups, 3, 0.1);
    const GroupLassoFit fit =
        fit_group_lasso(xo, d.y, tf.transformed_groups, path.values[1], opt);
    REQUIRE(fit.objective_trace.size() >= 2);
    for (std::size_t i = 1; i < fit.objective_trace.size(); ++i)
        CHECK(fit.objective_trace[i] <= fit.objective_trace[i - 1] + 1e-12);
}

TEST_CASE("group error bound under the eigen proxy on full-rank designs") {
    const int n = 150, p = 12;
    const Eigen::MatrixXd raw = test::random_matrix(n, p, 2301);
    StandardizedData d = standardize(raw, Eigen::VectorXd::Zero(n));
    GroupPartition part;
    part.groups = {{0, 1, 2}, {3, 4, 5}, {6, 7, 8}, {9, 10, 11}};
    Eigen::VectorXd beta0 = Eigen::VectorXd::Zero(p);
    beta0.head(6) << 1.0, -0.5, 0.8, 0.6, -1.2, 0.4; // active groups: 0 and 1
    const Eigen::VectorXd eps = 0.3 * test::random_vector(n, 2302);
    const Eigen::VectorXd y = d.x.values * beta0 + eps;
    d.y.values = y.array() - y.mean();

    const auto [xo, tf] = orthonormalize_groups(d.x, part);
    // the transformed truth solves X beta0 = Xo beta0_t exactly on full-rank blocks
    Eigen::VectorXd beta0_t = Eigen::VectorXd::Zero(xo.p());
    for (int r = 0; r < part.num_groups(); ++r) {
        const auto& og = part.groups[static_cast<std::size_t>(r)];
        const auto& tg = tf.transformed_groups.groups[static_cast<std::size_t>(r)];
        Eigen::VectorXd orig(static_cast<Eigen::Index>(og.size()));
        for (std::size_t i = 0; i < og.size(); ++i) orig[static_cast<Eigen::Index>(i)] = beta0[og[i]];
        // basis columns are S_rr-orthogonal: coordinates come from the normal equations
        const Eigen::MatrixXd& b = tf.basis[static_cast<std::size_t>(r)];
        Eigen::MatrixXd block(n, static_cast<Eigen::Index>(og.size()));
        for (std::size_t i = 0; i < og.size(); ++i) block.col(static_cast<Eigen::Index>(i)) = d.x.values.col(og[i]);
        const Eigen::VectorXd coords =
            (block * b).transpose() * (block * orig) / static_cast<double>(n);
        for (std::size_t i = 0; i < tg.size(); ++i) beta0_t[tg[i]] = coords[static_cast<Eigen::Index>(i)];
    }

    const Eigen::VectorXd eps_c = eps.array() - eps.mean();
    double lambda0 = 0.0;
    for (int r = 0; r < tf.transformed_groups.num_groups(); ++r) {
        const auto& g = tf.transformed_groups.groups[static_cast<std::size_t>(r)];
        double sq = 0.0;
        for (int j : g) {
            const double v = 2.0 / n * xo.values.col(j).dot(eps_c);
            sq += v * v;
        }
        lambda0 = std::max(lambda0, std::sqrt(sq) / tf.penalty_weights[static_cast<std::size_t>(r)]);
    }
    const double lambda = 2.0 * lambda0 * 1.01;
    const GroupLassoFit fit =
        fit_group_lasso(xo, d.y, tf.transformed_groups, lambda, {}, &tf.penalty_weights);

    const Eigen::MatrixXd gramm = xo.values.transpose() * xo.values / n;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(gramm);
    const double phi_sq = es.eigenvalues().minCoeff();
    REQUIRE(phi_sq > 0.0);

    const Eigen::VectorXd delta = fit.beta.values - beta0_t;
    double delta_sum = 0.0;
    for (int r = 0; r < tf.transformed_groups.num_groups(); ++r) {
        double sq = 0.0;
        for (int j : tf.transformed_groups.groups[static_cast<std::size_t>(r)]) sq += delta[j] * delta[j];
        delta_sum += std::sqrt(sq);
    }
    const double lhs = (xo.values * delta).squaredNorm() / n + lambda * delta_sum;
    const double rhs = 24.0 * lambda * lambda * 6.0 / phi_sq; // active groups hold 6 columns
    CHECK(lhs <= rhs + 1e-9);
}
