#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "acl/model_core.hpp"
#include "acl/partition.hpp"

namespace acl {

// Complete description of a synthetic experiment. Scenario ids ("e1.1",
// "e2.3", "e3", "pseudo") expand into (design, beta_config) pairs with the
// standard dimensions; every field stays overridable.
struct ScenarioConfig {
    std::string design;      // sigma1 | sigma2 | sigma3 | pseudo_real
    std::string beta_config; // e1.1..e1.4 | e2.1..e2.4 | e3 | pseudo
    int num_blocks = 100;    // sigma1 / sigma3
    int block_size = 10;     // sigma1 / sigma2
    double rho = 0.9;
    double sigma = 3.0;
    int n_train = 100;
    int n_val = 100;
    int replicates = 50;
    std::uint64_t master_seed = 0;

    // pseudo-real protocol
    std::string x_csv;
    int top_k = 1000;
    int s0 = 10;

    int dimension() const; // p implied by the design
    void validate() const; // throws IncompatibleConfig

    static ScenarioConfig from_scenario_id(const std::string& id);
    static std::vector<std::string> known_scenarios();
};

struct GeneratedDataset {
    Eigen::MatrixXd x_train, x_val;
    Eigen::VectorXd y_train, y_val;
    CoefVector true_beta;
    std::vector<int> true_support;  // sorted
    GroupPartition true_blocks;     // ground-truth correlation blocks
    std::vector<std::string> column_ids;
    std::uint64_t seed_used = 0;
};

Eigen::MatrixXd make_sigma1(int num_blocks = 100, int block_size = 10, double rho = 0.9);
Eigen::MatrixXd make_sigma2(int p = 1000, int block_size = 30, double rho = 0.9);
Eigen::MatrixXd make_sigma3(int num_blocks = 500, double rho = 0.9);

// Coefficient configurations. Deterministic given the seed; "e3" uses no
// randomness at all.
std::pair<CoefVector, std::vector<int>> make_beta(const std::string& beta_config, int p, double sigma,
                                                  int n, std::uint64_t seed);

// Rows i.i.d. N(0, Sigma) through an eigenvalue factorization of Sigma.
Eigen::MatrixXd sample_gaussian(const Eigen::MatrixXd& sigma, int n, std::uint64_t seed);

// Synthetic-truth protocol on a real predictor matrix: keep the top_k
// highest-variance columns, pick a pivot column at random, group it with
// the s0-1 columns most correlated to it, set beta = 1 on that set.
GeneratedDataset pseudo_real(const Eigen::MatrixXd& x, const std::vector<std::string>& column_ids,
                             int top_k, int s0, double sigma, int n_train, int n_val,
                             std::uint64_t seed);

// Precomputes the covariance factor (or the filtered pseudo-real matrix)
// once so replicates are cheap; generation is pure given (config, index).
class Simulator {
public:
    explicit Simulator(ScenarioConfig config);
    GeneratedDataset generate(int replicate) const;
    const ScenarioConfig& config() const { return config_; }

private:
    GeneratedDataset pseudo_real_replicate(std::uint64_t replicate) const;

    ScenarioConfig config_;
    Eigen::MatrixXd factor_; // Sigma = factor * factor'
    GroupPartition blocks_;
    Eigen::MatrixXd pseudo_x_; // filtered user matrix for pseudo_real
    std::vector<std::string> pseudo_ids_;
};

GeneratedDataset generate(const ScenarioConfig& config, int replicate);

} // namespace acl
