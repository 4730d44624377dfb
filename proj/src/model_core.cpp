#include "acl/model_core.hpp"

#include <algorithm>
#include <cmath>

namespace acl {

std::vector<int> CoefVector::support(double tol) const {
    std::vector<int> out;
    for (Eigen::Index j = 0; j < values.size(); ++j) {
        if (std::abs(values[j]) > tol) out.push_back(static_cast<int>(j));
    }
    return out;
}

namespace {

std::vector<std::string> default_ids(Eigen::Index p) {
    std::vector<std::string> ids(static_cast<std::size_t>(p));
    for (Eigen::Index j = 0; j < p; ++j) ids[static_cast<std::size_t>(j)] = "V" + std::to_string(j + 1);
    return ids;
}

} // namespace

StandardizedData standardize(const Eigen::MatrixXd& x, const Eigen::VectorXd& y,
                             std::vector<std::string> column_ids) {
    const Eigen::Index n = x.rows();
    const Eigen::Index p = x.cols();
    if (n < 2) throw Error("standardize requires at least 2 observations");
    if (p < 1) throw Error("standardize requires at least 1 column");
    if (y.size() != n) throw DimensionMismatch("x and y have different numbers of rows");
    if (column_ids.empty()) column_ids = default_ids(p);
    if (static_cast<Eigen::Index>(column_ids.size()) != p)
        throw DimensionMismatch("column_ids length does not match p");

    StandardizedData out;
    out.params.col_mean.resize(p);
    out.params.col_scale.resize(p);
    out.x.values.resize(n, p);

    for (Eigen::Index j = 0; j < p; ++j) {
        const double mean = x.col(j).mean();
        Eigen::VectorXd centered = x.col(j).array() - mean;
        const double scale = std::sqrt(centered.squaredNorm() / static_cast<double>(n));
        if (scale < 1e-12 * std::max(1.0, std::abs(mean)))
            throw ZeroVarianceColumn(static_cast<int>(j), column_ids[static_cast<std::size_t>(j)]);
        out.params.col_mean[j] = mean;
        out.params.col_scale[j] = scale;
        out.x.values.col(j) = centered / scale;
    }
    out.x.column_ids = std::move(column_ids);
    out.x.standardized = true;

    out.params.y_mean = y.mean();
    out.y.values = y.array() - out.params.y_mean;
    out.y.centered = true;
    return out;
}

DesignMatrix apply_standardization(const Eigen::MatrixXd& x, const StandardizeParams& params,
                                   std::vector<std::string> column_ids) {
    const Eigen::Index p = x.cols();
    if (params.col_mean.size() != p) throw DimensionMismatch("transform was fitted for a different p");
    DesignMatrix out;
    out.values.resize(x.rows(), p);
    for (Eigen::Index j = 0; j < p; ++j)
        out.values.col(j) = (x.col(j).array() - params.col_mean[j]) / params.col_scale[j];
    out.column_ids = column_ids.empty() ? default_ids(p) : std::move(column_ids);
    out.standardized = true;
    return out;
}

ResponseVector apply_centering(const Eigen::VectorXd& y, const StandardizeParams& params) {
    ResponseVector out;
    out.values = y.array() - params.y_mean;
    out.centered = true;
    return out;
}

GramMatrix gram(const DesignMatrix& x) {
    if (!x.standardized) throw Error("gram requires a standardized design");
    const double n = static_cast<double>(x.n());
    Eigen::MatrixXd g = (x.values.transpose() * x.values) / n;
    // force exact symmetry; downstream eigen-solvers assume it
    g = 0.5 * (g + g.transpose()).eval();
    return GramMatrix{std::move(g)};
}

Norms norms(const CoefVector& v) {
    Norms out;
    out.l1 = v.values.lpNorm<1>();
    out.l2_squared = v.values.squaredNorm();
    out.linf = v.values.size() == 0 ? 0.0 : v.values.lpNorm<Eigen::Infinity>();
    return out;
}

Eigen::VectorXd predict(const DesignMatrix& x, const CoefVector& beta) {
    if (beta.values.size() != x.p()) throw DimensionMismatch("beta length does not match p");
    return x.values * beta.values;
}

Eigen::VectorXd residual(const DesignMatrix& x, const ResponseVector& y, const CoefVector& beta) {
    if (y.values.size() != x.n()) throw DimensionMismatch("y length does not match n");
    return y.values - predict(x, beta);
}

GramPartition partition_gram(const GramMatrix& sigma, const std::vector<int>& s) {
    const Eigen::Index p = sigma.p();
    std::vector<char> mark(static_cast<std::size_t>(p), 0);
    for (int j : s) {
        if (j < 0 || j >= p) throw Error("index set out of range");
        if (mark[static_cast<std::size_t>(j)]) throw Error("index set contains duplicates");
        mark[static_cast<std::size_t>(j)] = 1;
    }
    GramPartition part;
    part.inside = s;
    std::sort(part.inside.begin(), part.inside.end());
    for (Eigen::Index j = 0; j < p; ++j)
        if (!mark[static_cast<std::size_t>(j)]) part.outside.push_back(static_cast<int>(j));

    const auto ns = static_cast<Eigen::Index>(part.inside.size());
    const auto nc = static_cast<Eigen::Index>(part.outside.size());
    part.s11.resize(ns, ns);
    part.s12.resize(ns, nc);
    part.s21.resize(nc, ns);
    part.s22.resize(nc, nc);
    for (Eigen::Index a = 0; a < ns; ++a) {
        for (Eigen::Index b = 0; b < ns; ++b) part.s11(a, b) = sigma.values(part.inside[a], part.inside[b]);
        for (Eigen::Index b = 0; b < nc; ++b) part.s12(a, b) = sigma.values(part.inside[a], part.outside[b]);
    }
    for (Eigen::Index a = 0; a < nc; ++a) {
        for (Eigen::Index b = 0; b < ns; ++b) part.s21(a, b) = sigma.values(part.outside[a], part.inside[b]);
        for (Eigen::Index b = 0; b < nc; ++b) part.s22(a, b) = sigma.values(part.outside[a], part.outside[b]);
    }
    return part;
}

Eigen::MatrixXd reassemble_gram(const GramPartition& part) {
    const auto ns = static_cast<Eigen::Index>(part.inside.size());
    const auto nc = static_cast<Eigen::Index>(part.outside.size());
    Eigen::MatrixXd out(ns + nc, ns + nc);
    for (Eigen::Index a = 0; a < ns; ++a) {
        for (Eigen::Index b = 0; b < ns; ++b) out(part.inside[a], part.inside[b]) = part.s11(a, b);
        for (Eigen::Index b = 0; b < nc; ++b) out(part.inside[a], part.outside[b]) = part.s12(a, b);
    }
    for (Eigen::Index a = 0; a < nc; ++a) {
        for (Eigen::Index b = 0; b < ns; ++b) out(part.outside[a], part.inside[b]) = part.s21(a, b);
        for (Eigen::Index b = 0; b < nc; ++b) out(part.outside[a], part.outside[b]) = part.s22(a, b);
    }
    return out;
}

DesignMatrix select_columns(const DesignMatrix& x, const std::vector<int>& cols) {
    DesignMatrix out;
    out.values.resize(x.n(), static_cast<Eigen::Index>(cols.size()));
    out.column_ids.reserve(cols.size());
    for (std::size_t i = 0; i < cols.size(); ++i) {
        const int j = cols[i];
        if (j < 0 || j >= x.p()) throw Error("column index out of range");
        out.values.col(static_cast<Eigen::Index>(i)) = x.values.col(j);
        out.column_ids.push_back(x.column_ids[static_cast<std::size_t>(j)]);
    }
    out.standardized = x.standardized;
    return out;
}

std::vector<int> sorted_union(const std::vector<int>& a, const std::vector<int>& b) {
    std::vector<int> out;
    out.reserve(a.size() + b.size());
    std::set_union(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
    return out;
}

std::vector<int> sorted_intersection(const std::vector<int>& a, const std::vector<int>& b) {
    std::vector<int> out;
    std::set_intersection(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
    return out;
}

} // namespace acl
