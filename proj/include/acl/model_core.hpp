#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "acl/errors.hpp"

namespace acl {

// n x p predictor matrix with column identities. After standardize()
// every column has mean 0 and (1/n) X_j^T X_j = 1; the 1/n convention is
// load-bearing, all solver scalings assume it.
struct DesignMatrix {
    Eigen::MatrixXd values;
    std::vector<std::string> column_ids;
    bool standardized = false;

    Eigen::Index n() const { return values.rows(); }
    Eigen::Index p() const { return values.cols(); }
};

struct ResponseVector {
    Eigen::VectorXd values;
    bool centered = false;

    Eigen::Index n() const { return values.size(); }
};

// Coefficient vector paired with a DesignMatrix of the same p.
struct CoefVector {
    Eigen::VectorXd values;

    Eigen::Index p() const { return values.size(); }

    // indices j with |beta_j| > tol, ascending
    std::vector<int> support(double tol = 0.0) const;
};

// Scaled Gram matrix X^T X / n of a standardized design; symmetric PSD
// with unit diagonal.
struct GramMatrix {
    Eigen::MatrixXd values;

    Eigen::Index p() const { return values.rows(); }
};

// Centering/scaling parameters so that fits can be mapped back to
// original units and validation data can be transformed consistently.
struct StandardizeParams {
    Eigen::VectorXd col_mean;
    Eigen::VectorXd col_scale; // x_std = (x - mean) / scale
    double y_mean = 0.0;
};

struct StandardizedData {
    DesignMatrix x;
    ResponseVector y;
    StandardizeParams params;
};

// Center y and standardize every column of x to the 1/n convention.
// Throws ZeroVarianceColumn if some column is constant.
StandardizedData standardize(const Eigen::MatrixXd& x, const Eigen::VectorXd& y,
                             std::vector<std::string> column_ids = {});

// Apply a previously computed transform (e.g. train parameters applied to
// validation data).
DesignMatrix apply_standardization(const Eigen::MatrixXd& x, const StandardizeParams& params,
                                   std::vector<std::string> column_ids = {});
ResponseVector apply_centering(const Eigen::VectorXd& y, const StandardizeParams& params);

GramMatrix gram(const DesignMatrix& x);

struct Norms {
    double l1 = 0.0;
    double l2_squared = 0.0;
    double linf = 0.0;
};

Norms norms(const CoefVector& v);

Eigen::VectorXd predict(const DesignMatrix& x, const CoefVector& beta);
Eigen::VectorXd residual(const DesignMatrix& x, const ResponseVector& y, const CoefVector& beta);

// Principal blocks of a Gram matrix relative to an index set S:
//   s11 = Sigma(S, S), s12 = Sigma(S, S^c), s21 = s12^T, s22 = Sigma(S^c, S^c).
struct GramPartition {
    Eigen::MatrixXd s11, s12, s21, s22;
    std::vector<int> inside;  // sorted S
    std::vector<int> outside; // sorted complement
};

GramPartition partition_gram(const GramMatrix& sigma, const std::vector<int>& s);
Eigen::MatrixXd reassemble_gram(const GramPartition& part);

// Column subset, keeping ids and the standardized flag.
DesignMatrix select_columns(const DesignMatrix& x, const std::vector<int>& cols);

// Set helpers shared across modules (sorted unique int vectors).
std::vector<int> sorted_union(const std::vector<int>& a, const std::vector<int>& b);
std::vector<int> sorted_intersection(const std::vector<int>& a, const std::vector<int>& b);

} // namespace acl
