#include "acl/simgen.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "acl/csv.hpp"
#include "acl/rng.hpp"

namespace acl {

namespace {

// stream roles for per-replicate seed derivation
enum SeedRole : std::uint64_t {
    role_x_train = 1,
    role_eps_train = 2,
    role_x_val = 3,
    role_eps_val = 4,
    role_beta = 5,
    role_pivot = 6,
    role_split = 7,
};

Eigen::MatrixXd equicorrelated_blocks(int num_blocks, int block_size, double rho,
                                      int trailing_identity = 0) {
    if (num_blocks < 1 || block_size < 1) throw Error("block layout must be positive");
    if (!(rho > 0.0 && rho < 1.0)) throw Error("rho must be in (0, 1)");
    const int p = num_blocks * block_size + trailing_identity;
    Eigen::MatrixXd sigma = Eigen::MatrixXd::Identity(p, p);
    for (int b = 0; b < num_blocks; ++b) {
        const int off = b * block_size;
        for (int j = 0; j < block_size; ++j)
            for (int k = 0; k < block_size; ++k)
                if (j != k) sigma(off + j, off + k) = rho;
    }
    return sigma;
}

// Fisher-Yates with the raw engine; std::shuffle's distribution is
// implementation defined.
template <class T>
void deterministic_shuffle(std::vector<T>& v, NormalSampler& rng) {
    for (std::size_t i = v.size(); i > 1; --i)
        std::swap(v[i - 1], v[static_cast<std::size_t>(rng.below(i))]);
}

std::vector<double> coefficient_grid() {
    std::vector<double> grid(20);
    for (int k = 0; k < 20; ++k) grid[static_cast<std::size_t>(k)] = 0.1 * (k + 1);
    return grid;
}

void flip_half_signs(Eigen::VectorXd& beta, const std::vector<int>& support, NormalSampler& rng) {
    std::vector<int> order(support);
    deterministic_shuffle(order, rng);
    const std::size_t flips = support.size() / 2;
    for (std::size_t i = 0; i < flips; ++i) beta[order[i]] = -beta[order[i]];
}

std::vector<std::string> default_ids(int p) {
    std::vector<std::string> ids(static_cast<std::size_t>(p));
    for (int j = 0; j < p; ++j) ids[static_cast<std::size_t>(j)] = "V" + std::to_string(j + 1);
    return ids;
}

} // namespace

Eigen::MatrixXd make_sigma1(int num_blocks, int block_size, double rho) {
    return equicorrelated_blocks(num_blocks, block_size, rho);
}

Eigen::MatrixXd make_sigma2(int p, int block_size, double rho) {
    if (block_size > p) throw Error("block_size larger than p");
    return equicorrelated_blocks(1, block_size, rho, p - block_size);
}

Eigen::MatrixXd make_sigma3(int num_blocks, double rho) {
    return equicorrelated_blocks(num_blocks, 2, rho);
}

std::pair<CoefVector, std::vector<int>> make_beta(const std::string& beta_config, int p, double sigma,
                                                  int n, std::uint64_t seed) {
    CoefVector beta;
    beta.values = Eigen::VectorXd::Zero(p);
    std::vector<int> support;
    NormalSampler rng(seed);

    auto grid_values_on = [&](const std::vector<int>& s) {
        std::vector<double> values = coefficient_grid();
        if (values.size() != s.size())
            throw IncompatibleConfig("coefficient grid has " + std::to_string(values.size()) +
                                     " values but the active set has " + std::to_string(s.size()));
        deterministic_shuffle(values, rng);
        for (std::size_t i = 0; i < s.size(); ++i) beta.values[s[i]] = values[i];
    };
    auto require_p = [&](int need) {
        if (p < need)
            throw IncompatibleConfig("beta config " + beta_config + " needs p >= " +
                                     std::to_string(need) + ", got " + std::to_string(p));
    };

    if (beta_config == "e1.1" || beta_config == "e1.3") {
        require_p(20);
        for (int j = 0; j < 20; ++j) support.push_back(j);
        grid_values_on(support);
        if (beta_config == "e1.3") flip_half_signs(beta.values, support, rng);
    } else if (beta_config == "e1.2" || beta_config == "e1.4") {
        require_p(92);
        for (int b = 0; b < 10; ++b) {
            support.push_back(10 * b);
            support.push_back(10 * b + 1);
        }
        std::sort(support.begin(), support.end());
        grid_values_on(support);
        if (beta_config == "e1.4") flip_half_signs(beta.values, support, rng);
    } else if (beta_config == "e2.1" || beta_config == "e2.3") {
        require_p(35);
        for (int j = 0; j < 15; ++j) support.push_back(j);
        for (int j = 30; j < 35; ++j) support.push_back(j);
        grid_values_on(support);
        if (beta_config == "e2.3") flip_half_signs(beta.values, support, rng);
    } else if (beta_config == "e2.2" || beta_config == "e2.4") {
        require_p(45);
        for (int j = 0; j < 5; ++j) support.push_back(j);
        for (int j = 30; j < 45; ++j) support.push_back(j);
        grid_values_on(support);
        if (beta_config == "e2.4") flip_half_signs(beta.values, support, rng);
    } else if (beta_config == "e3") {
        require_p(20);
        if (n <= 0) throw IncompatibleConfig("e3 needs the sample size n");
        const double small =
            (1.0 / 3.0) * std::sqrt(std::log(static_cast<double>(p)) / static_cast<double>(n)) *
            sigma / 1.9;
        for (int j = 0; j < 20; ++j) {
            support.push_back(j);
            beta.values[j] = (j % 2 == 0) ? 2.0 : small; // odd positions (1-based) carry the strong signal
        }
    } else {
        throw IncompatibleConfig("unknown beta config: " + beta_config);
    }
    return {std::move(beta), std::move(support)};
}

Eigen::MatrixXd sample_gaussian(const Eigen::MatrixXd& sigma, int n, std::uint64_t seed) {
    if (sigma.rows() != sigma.cols()) throw Error("covariance must be square");
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(sigma);
    const double max_ev = es.eigenvalues().maxCoeff();
    if (es.eigenvalues().minCoeff() < -1e-8 * std::max(1.0, max_ev))
        throw NotPsd("covariance has eigenvalue " + std::to_string(es.eigenvalues().minCoeff()));
    Eigen::MatrixXd factor = es.eigenvectors() *
                             es.eigenvalues().cwiseMax(0.0).cwiseSqrt().asDiagonal();
    const Eigen::Index p = sigma.rows();
    NormalSampler rng(seed);
    Eigen::MatrixXd z(n, p);
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = 0; j < p; ++j) z(i, j) = rng.normal();
    return z * factor.transpose();
}

int ScenarioConfig::dimension() const {
    if (design == "sigma1") return num_blocks * block_size;
    if (design == "sigma2") return std::max(1000, block_size); // fixed-width design
    if (design == "sigma3") return num_blocks * 2;
    if (design == "pseudo_real") return top_k;
    throw IncompatibleConfig("unknown design: " + design);
}

void ScenarioConfig::validate() const {
    if (design != "sigma1" && design != "sigma2" && design != "sigma3" && design != "pseudo_real")
        throw IncompatibleConfig("unknown design: " + design);
    if (n_train < 2 || n_val < 1) throw IncompatibleConfig("sample sizes must be positive");
    if (replicates < 1) throw IncompatibleConfig("replicates must be positive");
    if (sigma < 0.0) throw IncompatibleConfig("noise level must be nonnegative");
    if (design != "pseudo_real") {
        if (!(rho > 0.0 && rho < 1.0)) throw IncompatibleConfig("rho must be in (0, 1)");
        if (num_blocks < 1 || block_size < 1) throw IncompatibleConfig("block layout must be positive");
    }
    const bool e1 = beta_config.rfind("e1", 0) == 0;
    const bool e2 = beta_config.rfind("e2", 0) == 0;
    if (e1 && design != "sigma1")
        throw IncompatibleConfig("beta config " + beta_config + " requires the sigma1 design");
    if (e2 && design != "sigma2")
        throw IncompatibleConfig("beta config " + beta_config + " requires the sigma2 design");
    if (beta_config == "e3" && design != "sigma3")
        throw IncompatibleConfig("beta config e3 requires the sigma3 design");
    if (beta_config == "pseudo" && design != "pseudo_real")
        throw IncompatibleConfig("beta config pseudo requires the pseudo_real design");
    if (design == "pseudo_real") {
        if (beta_config != "pseudo") throw IncompatibleConfig("pseudo_real design requires beta config pseudo");
        if (x_csv.empty()) throw IncompatibleConfig("pseudo_real design requires a predictor CSV");
        if (top_k < s0) throw IncompatibleConfig("top_k must be at least s0");
    } else {
        // probe the beta config early so bad ids fail at configuration time
        make_beta(beta_config, dimension(), sigma == 0.0 ? 1.0 : sigma, n_train, 0);
    }
}

ScenarioConfig ScenarioConfig::from_scenario_id(const std::string& id) {
    ScenarioConfig cfg;
    if (id.rfind("e1.", 0) == 0 && id.size() == 4) {
        cfg.design = "sigma1";
        cfg.num_blocks = 100;
        cfg.block_size = 10;
    } else if (id.rfind("e2.", 0) == 0 && id.size() == 4) {
        cfg.design = "sigma2";
        cfg.block_size = 30;
    } else if (id == "e3") {
        cfg.design = "sigma3";
        cfg.num_blocks = 500;
    } else if (id == "pseudo") {
        cfg.design = "pseudo_real";
    } else {
        std::string known;
        for (const auto& k : known_scenarios()) known += (known.empty() ? "" : ", ") + k;
        throw IncompatibleConfig("unknown scenario '" + id + "'; valid scenarios: " + known);
    }
    cfg.beta_config = id;
    return cfg;
}

std::vector<std::string> ScenarioConfig::known_scenarios() {
    return {"e1.1", "e1.2", "e1.3", "e1.4", "e2.1", "e2.2", "e2.3", "e2.4", "e3", "pseudo"};
}

namespace {

GroupPartition blocks_for(const ScenarioConfig& cfg) {
    GroupPartition out;
    const int p = cfg.dimension();
    if (cfg.design == "sigma1" || cfg.design == "sigma3") {
        const int bs = cfg.design == "sigma3" ? 2 : cfg.block_size;
        for (int off = 0; off < p; off += bs) {
            std::vector<int> g;
            for (int j = 0; j < bs; ++j) g.push_back(off + j);
            out.groups.push_back(std::move(g));
        }
    } else if (cfg.design == "sigma2") {
        std::vector<int> g;
        for (int j = 0; j < cfg.block_size; ++j) g.push_back(j);
        out.groups.push_back(std::move(g));
        for (int j = cfg.block_size; j < p; ++j) out.groups.push_back({j});
    }
    return out;
}

} // namespace

Simulator::Simulator(ScenarioConfig config) : config_(std::move(config)) {
    config_.validate();
    if (config_.design == "pseudo_real") {
        const CsvTable table = read_csv(config_.x_csv);
        const Eigen::MatrixXd raw = to_matrix(table);
        if (raw.cols() < config_.top_k)
            throw TooFewColumns("pseudo_real needs at least " + std::to_string(config_.top_k) +
                                " columns, got " + std::to_string(raw.cols()));
        // keep the top_k columns with the largest empirical variances
        std::vector<std::pair<double, int>> ranked;
        for (Eigen::Index j = 0; j < raw.cols(); ++j) {
            const double m = raw.col(j).mean();
            const double var = (raw.col(j).array() - m).square().sum() / static_cast<double>(raw.rows());
            ranked.emplace_back(-var, static_cast<int>(j));
        }
        std::sort(ranked.begin(), ranked.end());
        std::vector<int> keep;
        for (int i = 0; i < config_.top_k; ++i) keep.push_back(ranked[static_cast<std::size_t>(i)].second);
        std::sort(keep.begin(), keep.end());
        pseudo_x_.resize(raw.rows(), config_.top_k);
        for (std::size_t i = 0; i < keep.size(); ++i) {
            pseudo_x_.col(static_cast<Eigen::Index>(i)) = raw.col(keep[i]);
            pseudo_ids_.push_back(table.header[static_cast<std::size_t>(keep[i])]);
        }
    } else {
        Eigen::MatrixXd sigma;
        if (config_.design == "sigma1")
            sigma = make_sigma1(config_.num_blocks, config_.block_size, config_.rho);
        else if (config_.design == "sigma2")
            sigma = make_sigma2(config_.dimension(), config_.block_size, config_.rho);
        else
            sigma = make_sigma3(config_.num_blocks, config_.rho);
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(sigma);
        if (es.eigenvalues().minCoeff() < -1e-8) throw NotPsd("design covariance is not PSD");
        factor_ = es.eigenvectors() * es.eigenvalues().cwiseMax(0.0).cwiseSqrt().asDiagonal();
        blocks_ = blocks_for(config_);
    }
}

namespace {

Eigen::MatrixXd gaussian_from_factor(const Eigen::MatrixXd& factor, int n, std::uint64_t seed) {
    NormalSampler rng(seed);
    Eigen::MatrixXd z(n, factor.rows());
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = 0; j < factor.rows(); ++j) z(i, j) = rng.normal();
    return z * factor.transpose();
}

Eigen::VectorXd noise(int n, double sigma, std::uint64_t seed) {
    NormalSampler rng(seed);
    Eigen::VectorXd eps(n);
    for (int i = 0; i < n; ++i) eps[i] = sigma * rng.normal();
    return eps;
}

} // namespace

GeneratedDataset Simulator::generate(int replicate) const {
    if (replicate < 0) throw Error("replicate index must be nonnegative");
    const std::uint64_t master = config_.master_seed;
    const auto rep = static_cast<std::uint64_t>(replicate);

    if (config_.design == "pseudo_real") {
        GeneratedDataset ds = pseudo_real_replicate(rep);
        ds.seed_used = mix_seed(master, rep, role_pivot);
        return ds;
    }

    GeneratedDataset ds;
    const int p = config_.dimension();
    auto [beta, support] = make_beta(config_.beta_config, p, config_.sigma, config_.n_train,
                                     mix_seed(master, rep, role_beta));
    ds.true_beta = std::move(beta);
    ds.true_support = std::move(support);
    ds.true_blocks = blocks_;
    ds.column_ids = default_ids(p);
    ds.seed_used = mix_seed(master, rep, role_x_train);

    ds.x_train = gaussian_from_factor(factor_, config_.n_train, mix_seed(master, rep, role_x_train));
    ds.y_train = ds.x_train * ds.true_beta.values +
                 noise(config_.n_train, config_.sigma, mix_seed(master, rep, role_eps_train));
    ds.x_val = gaussian_from_factor(factor_, config_.n_val, mix_seed(master, rep, role_x_val));
    ds.y_val = ds.x_val * ds.true_beta.values +
               noise(config_.n_val, config_.sigma, mix_seed(master, rep, role_eps_val));
    return ds;
}

GeneratedDataset generate(const ScenarioConfig& config, int replicate) {
    return Simulator(config).generate(replicate);
}

namespace {

GeneratedDataset pseudo_real_core(const Eigen::MatrixXd& x, const std::vector<std::string>& ids,
                                  int s0, double sigma, int n_train, int n_val,
                                  std::uint64_t pivot_seed, std::uint64_t split_seed,
                                  std::uint64_t eps_train_seed, std::uint64_t eps_val_seed) {
    const auto n = static_cast<int>(x.rows());
    const auto p = static_cast<int>(x.cols());
    if (s0 < 1 || s0 > p) throw IncompatibleConfig("s0 must be in [1, p]");
    if (n_train + n_val > n)
        throw IncompatibleConfig("train + validation rows exceed the " + std::to_string(n) +
                                 " available observations");

    NormalSampler pivot_rng(pivot_seed);
    const int pivot = static_cast<int>(pivot_rng.below(static_cast<std::uint64_t>(p)));

    // the s0-1 columns with the highest |corr| to the pivot
    Eigen::VectorXd means(p), sds(p);
    for (int j = 0; j < p; ++j) {
        means[j] = x.col(j).mean();
        sds[j] = std::sqrt((x.col(j).array() - means[j]).square().sum() / static_cast<double>(n));
    }
    std::vector<std::pair<double, int>> ranked;
    for (int j = 0; j < p; ++j) {
        if (j == pivot) continue;
        double c = 0.0;
        if (sds[j] > 0.0 && sds[pivot] > 0.0) {
            c = ((x.col(j).array() - means[j]) * (x.col(pivot).array() - means[pivot])).sum() /
                (static_cast<double>(n) * sds[j] * sds[pivot]);
        }
        ranked.emplace_back(-std::abs(c), j);
    }
    std::sort(ranked.begin(), ranked.end());

    GeneratedDataset ds;
    ds.true_support.push_back(pivot);
    for (int i = 0; i < s0 - 1; ++i) ds.true_support.push_back(ranked[static_cast<std::size_t>(i)].second);
    std::sort(ds.true_support.begin(), ds.true_support.end());
    ds.true_beta.values = Eigen::VectorXd::Zero(p);
    for (int j : ds.true_support) ds.true_beta.values[j] = 1.0;

    // seeded row split: first n_train rows train, next n_val validation
    std::vector<int> rows(static_cast<std::size_t>(n));
    std::iota(rows.begin(), rows.end(), 0);
    NormalSampler split_rng(split_seed);
    deterministic_shuffle(rows, split_rng);

    ds.x_train.resize(n_train, p);
    ds.x_val.resize(n_val, p);
    for (int i = 0; i < n_train; ++i) ds.x_train.row(i) = x.row(rows[static_cast<std::size_t>(i)]);
    for (int i = 0; i < n_val; ++i)
        ds.x_val.row(i) = x.row(rows[static_cast<std::size_t>(n_train + i)]);
    ds.y_train = ds.x_train * ds.true_beta.values + noise(n_train, sigma, eps_train_seed);
    ds.y_val = ds.x_val * ds.true_beta.values + noise(n_val, sigma, eps_val_seed);
    ds.column_ids = ids;
    ds.true_blocks = GroupPartition::singletons(p);
    return ds;
}

} // namespace

GeneratedDataset Simulator::pseudo_real_replicate(std::uint64_t rep) const {
    const std::uint64_t master = config_.master_seed;
    return pseudo_real_core(pseudo_x_, pseudo_ids_, config_.s0, config_.sigma, config_.n_train,
                            config_.n_val, mix_seed(master, rep, role_pivot),
                            mix_seed(master, rep, role_split), mix_seed(master, rep, role_eps_train),
                            mix_seed(master, rep, role_eps_val));
}

GeneratedDataset pseudo_real(const Eigen::MatrixXd& x, const std::vector<std::string>& column_ids,
                             int top_k, int s0, double sigma, int n_train, int n_val,
                             std::uint64_t seed) {
    if (x.cols() < top_k)
        throw TooFewColumns("pseudo_real needs at least " + std::to_string(top_k) + " columns, got " +
                            std::to_string(x.cols()));
    std::vector<std::string> ids = column_ids;
    if (ids.empty()) ids = default_ids(static_cast<int>(x.cols()));
    // variance filter
    std::vector<std::pair<double, int>> ranked;
    for (Eigen::Index j = 0; j < x.cols(); ++j) {
        const double m = x.col(j).mean();
        const double var = (x.col(j).array() - m).square().sum() / static_cast<double>(x.rows());
        ranked.emplace_back(-var, static_cast<int>(j));
    }
    std::sort(ranked.begin(), ranked.end());
    std::vector<int> keep;
    for (int i = 0; i < top_k; ++i) keep.push_back(ranked[static_cast<std::size_t>(i)].second);
    std::sort(keep.begin(), keep.end());
    Eigen::MatrixXd filtered(x.rows(), top_k);
    std::vector<std::string> filtered_ids;
    for (std::size_t i = 0; i < keep.size(); ++i) {
        filtered.col(static_cast<Eigen::Index>(i)) = x.col(keep[i]);
        filtered_ids.push_back(ids[static_cast<std::size_t>(keep[i])]);
    }
    return pseudo_real_core(filtered, filtered_ids, s0, sigma, n_train, n_val,
                            mix_seed(seed, 0, role_pivot), mix_seed(seed, 0, role_split),
                            mix_seed(seed, 0, role_eps_train), mix_seed(seed, 0, role_eps_val));
}

} // namespace acl
