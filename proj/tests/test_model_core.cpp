#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "acl/model_core.hpp"
#include "helpers.hpp"

using namespace acl;

TEST_CASE("standardize: single column basics") {
    Eigen::MatrixXd x(3, 1);
    x << 1, 2, 3;
    Eigen::VectorXd y(3);
    y << 4, 5, 9;
    const StandardizedData d = standardize(x, y);
    CHECK(std::abs(d.x.values.col(0).mean()) < 1e-10);
    CHECK(d.x.values.col(0).squaredNorm() / 3.0 == doctest::Approx(1.0).epsilon(1e-10));
    CHECK(std::abs(d.y.values.mean()) < 1e-10);
    CHECK(d.x.standardized);
    CHECK(d.y.centered);
}

TEST_CASE("standardize: idempotent within 1e-10") {
    const Eigen::MatrixXd x = test::random_matrix(25, 6, 11);
    const Eigen::VectorXd y = test::random_vector(25, 12);
    const StandardizedData once = standardize(x, y);
    const StandardizedData twice = standardize(once.x.values, once.y.values);
    CHECK((twice.x.values - once.x.values).cwiseAbs().maxCoeff() < 1e-10);
    CHECK((twice.y.values - once.y.values).cwiseAbs().maxCoeff() < 1e-10);
}

TEST_CASE("standardize: constant column rejected") {
    Eigen::MatrixXd x(3, 2);
    x << 1, 5, 2, 5, 3, 5;
    Eigen::VectorXd y(3);
    y << 1, 2, 3;
    CHECK_THROWS_AS(standardize(x, y), ZeroVarianceColumn);
}

TEST_CASE("apply_standardization reuses training parameters") {
    const Eigen::MatrixXd x = test::random_matrix(30, 4, 21);
    const Eigen::VectorXd y = test::random_vector(30, 22);
    const StandardizedData d = standardize(x, y);
    const DesignMatrix again = apply_standardization(x, d.params);
    CHECK((again.values - d.x.values).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("gram: orthonormal design gives the identity") {
    const Eigen::MatrixXd x = test::orthonormal_design(40, 8, 31);
    Eigen::VectorXd y = test::random_vector(40, 32);
    const StandardizedData d = standardize(x, y);
    const GramMatrix g = gram(d.x);
    CHECK((g.values - Eigen::MatrixXd::Identity(8, 8)).cwiseAbs().maxCoeff() < 1e-8);
}

TEST_CASE("gram: duplicated column has correlation one, 2-column dot oracle") {
    Eigen::MatrixXd x = test::random_matrix(20, 3, 41);
    x.col(2) = x.col(0);
    const StandardizedData d = standardize(x, test::random_vector(20, 42));
    const GramMatrix g = gram(d.x);
    CHECK(g.values(0, 2) == doctest::Approx(1.0).epsilon(1e-10));
    const double direct = d.x.values.col(0).dot(d.x.values.col(1)) / 20.0;
    CHECK(g.values(0, 1) == doctest::Approx(direct).epsilon(1e-12));
    for (int j = 0; j < 3; ++j) CHECK(g.values(j, j) == doctest::Approx(1.0).epsilon(1e-8));
}

TEST_CASE("norms: hand cases and ordering property") {
    CoefVector v;
    v.values.resize(3);
    v.values << 1, -2, 3;
    const Norms n = norms(v);
    CHECK(n.l1 == 6.0);
    CHECK(n.l2_squared == 14.0);
    CHECK(n.linf == 3.0);

    CoefVector zero;
    zero.values = Eigen::VectorXd::Zero(4);
    const Norms nz = norms(zero);
    CHECK(nz.l1 == 0.0);
    CHECK(nz.l2_squared == 0.0);
    CHECK(nz.linf == 0.0);

    CoefVector single;
    single.values.resize(1);
    single.values << -5;
    const Norms ns = norms(single);
    CHECK(ns.l1 == 5.0);
    CHECK(ns.l2_squared == 25.0);
    CHECK(ns.linf == 5.0);

    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        CoefVector r;
        r.values = test::random_vector(7, 100 + seed);
        const Norms nr = norms(r);
        CHECK(nr.linf <= std::sqrt(nr.l2_squared) + 1e-12);
        CHECK(std::sqrt(nr.l2_squared) <= nr.l1 + 1e-12);
    }
}

TEST_CASE("predict: zero beta, unit beta on orthonormal design, brute force") {
    const Eigen::MatrixXd raw = test::orthonormal_design(15, 5, 51);
    const StandardizedData d = standardize(raw, test::random_vector(15, 52));

    CoefVector zero;
    zero.values = Eigen::VectorXd::Zero(5);
    CHECK(predict(d.x, zero).cwiseAbs().maxCoeff() == 0.0);

    CoefVector ej;
    ej.values = Eigen::VectorXd::Zero(5);
    ej.values[2] = 1.0;
    CHECK((predict(d.x, ej) - d.x.values.col(2)).cwiseAbs().maxCoeff() < 1e-14);

    CoefVector beta;
    beta.values = test::random_vector(5, 53);
    const Eigen::VectorXd got = predict(d.x, beta);
    for (int i = 0; i < 15; ++i) {
        double dot = 0.0;
        for (int j = 0; j < 5; ++j) dot += d.x.values(i, j) * beta.values[j];
        CHECK(got[i] == doctest::Approx(dot).epsilon(1e-12));
    }

    CoefVector wrong;
    wrong.values = Eigen::VectorXd::Zero(4);
    CHECK_THROWS_AS(predict(d.x, wrong), DimensionMismatch);
}

TEST_CASE("gram diagonal is one for standardized designs") {
    const StandardizedData d =
        standardize(test::random_matrix(50, 10, 61), test::random_vector(50, 62));
    const GramMatrix g = gram(d.x);
    for (int j = 0; j < 10; ++j) CHECK(g.values(j, j) == doctest::Approx(1.0).epsilon(1e-8));
    CHECK((g.values - g.values.transpose()).cwiseAbs().maxCoeff() < 1e-10);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(g.values);
    CHECK(es.eigenvalues().minCoeff() > -1e-8);
}

TEST_CASE("partition then reassemble recovers the Gram matrix exactly") {
    const StandardizedData d =
        standardize(test::random_matrix(30, 9, 71), test::random_vector(30, 72));
    const GramMatrix g = gram(d.x);
    const GramPartition part = partition_gram(g, {1, 4, 6});
    const Eigen::MatrixXd back = reassemble_gram(part);
    CHECK((back - g.values).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("select_columns keeps ids and values") {
    const StandardizedData d =
        standardize(test::random_matrix(12, 5, 81), test::random_vector(12, 82));
    const DesignMatrix sub = select_columns(d.x, {3, 0});
    CHECK(sub.column_ids[0] == "V4");
    CHECK(sub.column_ids[1] == "V1");
    CHECK((sub.values.col(0) - d.x.values.col(3)).cwiseAbs().maxCoeff() == 0.0);
}
