#include "acl/pipeline.hpp"

#include <algorithm>
#include <chrono>
#include <numeric>

namespace acl {

namespace {

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

double validation_mse(const DesignMatrix& x_val, const ResponseVector& y_val,
                      const Eigen::VectorXd& beta) {
    const Eigen::VectorXd r = y_val.values - x_val.values * beta;
    return r.squaredNorm() / static_cast<double>(r.size());
}

std::vector<int> all_columns(Eigen::Index p) {
    std::vector<int> cols(static_cast<std::size_t>(p));
    std::iota(cols.begin(), cols.end(), 0);
    return cols;
}

// Expand a coefficient vector on a column subset to full length.
Eigen::VectorXd expand(const Eigen::VectorXd& reduced, const std::vector<int>& cols, Eigen::Index p) {
    Eigen::VectorXd full = Eigen::VectorXd::Zero(p);
    for (std::size_t i = 0; i < cols.size(); ++i) full[cols[i]] = reduced[static_cast<Eigen::Index>(i)];
    return full;
}

std::vector<int> union_of_groups(const GroupPartition& partition, const std::vector<int>& groups) {
    std::vector<int> out;
    for (int r : groups) {
        const auto& g = partition.groups[static_cast<std::size_t>(r)];
        out.insert(out.end(), g.begin(), g.end());
    }
    std::sort(out.begin(), out.end());
    return out;
}

struct Stage1Outcome {
    ScreenResult screen;
    double lambda1 = std::numeric_limits<double>::quiet_NaN();
    double seconds = 0.0;
};

// Tune the stage-1 selector on the validation set and run the correlation
// screen from its support.
Stage1Outcome run_stage1(const SplitData& data, const PipelineConfig& cfg) {
    const auto t0 = std::chrono::steady_clock::now();
    Stage1Outcome out;

    LambdaPath path = lambda_path(data.x_train, data.y_train, cfg.lambda_grid, cfg.lambda_ratio);
    if (!std::isnan(cfg.lambda1_override)) path.values = {cfg.lambda1_override};
    std::vector<LassoFit> fits = fit_lasso_path(data.x_train, data.y_train, path, cfg.stage1.solver);

    std::vector<CoefVector> candidates;
    std::vector<double> lambdas = path.values;
    switch (cfg.stage1.variant) {
    case Stage1Variant::plain:
        for (const auto& f : fits) candidates.push_back(f.beta);
        break;
    case Stage1Variant::thresholded:
        for (const auto& f : fits) candidates.push_back(threshold_fit(f, cfg.stage1.threshold));
        break;
    case Stage1Variant::adaptive: {
        // weights come from the validation-tuned plain fit, then the
        // reweighted problem is tuned on its own grid
        std::vector<CoefVector> plain;
        for (const auto& f : fits) plain.push_back(f.beta);
        const SelectedLambda init =
            select_lambda_by_validation(lambdas, plain, data.x_val, data.y_val);
        const Eigen::VectorXd w =
            adaptive_weights(fits[static_cast<std::size_t>(init.index)], cfg.stage1.adaptive_delta);
        LambdaPath wpath =
            weighted_lambda_path(data.x_train, data.y_train, w, cfg.lambda_grid, cfg.lambda_ratio);
        if (!std::isnan(cfg.lambda1_override)) wpath.values = {cfg.lambda1_override};
        fits = fit_weighted_lasso_path(data.x_train, data.y_train, w, wpath, cfg.stage1.solver);
        candidates.clear();
        for (const auto& f : fits) candidates.push_back(f.beta);
        lambdas = wpath.values;
        break;
    }
    }

    const SelectedLambda sel = select_lambda_by_validation(lambdas, candidates, data.x_val, data.y_val);
    out.lambda1 = sel.lambda;

    ScreenResult& sr = out.screen;
    sr.lambda1 = sel.lambda;
    sr.rho = cfg.stage1.screen.rho;
    sr.s_lasso = candidates[static_cast<std::size_t>(sel.index)].support();
    if (cfg.force_full_stage1) {
        sr.s1 = all_columns(data.x_train.p());
        std::set_difference(sr.s1.begin(), sr.s1.end(), sr.s_lasso.begin(), sr.s_lasso.end(),
                            std::back_inserter(sr.s_corr));
    } else {
        const auto t1 = std::chrono::steady_clock::now();
        CorrScreenResult scr = correlation_screen(data.x_train, sr.s_lasso, cfg.stage1.screen.rho,
                                                  cfg.stage1.screen.absolute);
        sr.s_corr = scr.selected;
        sr.corr_evaluations = scr.evaluations;
        sr.time_screen = seconds_since(t1);
        sr.s1 = sorted_union(sr.s_lasso, sr.s_corr);
        if (cfg.stage1.screen.transitive) {
            // re-run from the enlarged set until no new members appear
            for (;;) {
                CorrScreenResult more = correlation_screen(data.x_train, sr.s1, cfg.stage1.screen.rho,
                                                           cfg.stage1.screen.absolute);
                sr.corr_evaluations += more.evaluations;
                if (more.selected.empty()) break;
                sr.s_corr = sorted_union(sr.s_corr, more.selected);
                sr.s1 = sorted_union(sr.s1, more.selected);
            }
        }
        if (sr.s1.empty())
            throw EmptyStage1("stage 1 selected no variables; lower lambda1 below the null threshold");
    }
    out.seconds = seconds_since(t0);
    sr.time_lasso = out.seconds - sr.time_screen;
    return out;
}

struct ClusterOutcome {
    GroupPartition local;  // over the reduced design's columns
    GroupPartition global; // mapped back to original column indices
    double seconds = 0.0;
};

ClusterOutcome run_cluster(const DesignMatrix& x_red, const std::vector<int>& cols,
                           const PipelineConfig& cfg) {
    const auto t0 = std::chrono::steady_clock::now();
    ClusterOutcome out;
    if (x_red.p() == 1) {
        out.local.groups = {{0}};
    } else {
        const Eigen::MatrixXd d = corr_distance_matrix(x_red);
        const Dendrogram dendro = hier_cluster(d, cfg.linkage);
        out.local = cut(dendro, cfg.cut_rule);
    }
    for (const auto& g : out.local.groups) {
        std::vector<int> global;
        global.reserve(g.size());
        for (int j : g) global.push_back(cols[static_cast<std::size_t>(j)]);
        out.global.groups.push_back(std::move(global));
    }
    out.seconds = seconds_since(t0);
    return out;
}

// Third stage of the group-penalty estimators: orthonormalize the inferred
// groups, fit the path, tune on validation data.
void group_stage(FitResult& res, const SplitData& data, const PipelineConfig& cfg,
                 const DesignMatrix& x_red, const std::vector<int>& cols,
                 const ClusterOutcome& clusters) {
    const auto t0 = std::chrono::steady_clock::now();
    const Eigen::Index p = data.x_train.p();

    auto [x_ortho, tf] = orthonormalize_groups(x_red, clusters.local);
    LambdaPath path = group_lambda_path(x_ortho, data.y_train, tf.transformed_groups, cfg.lambda_grid,
                                        cfg.lambda_ratio, &tf.penalty_weights);
    if (!std::isnan(cfg.lambda3_override)) path.values = {cfg.lambda3_override};
    const std::vector<GroupLassoFit> fits = fit_group_lasso_path(
        x_ortho, data.y_train, tf.transformed_groups, path, cfg.group_solver, &tf.penalty_weights);

    std::vector<CoefVector> candidates;
    candidates.reserve(fits.size());
    for (const auto& f : fits) {
        const CoefVector reduced = tf.back_transform(f.beta);
        candidates.push_back(CoefVector{expand(reduced.values, cols, p)});
    }
    const SelectedLambda sel =
        select_lambda_by_validation(path.values, candidates, data.x_val, data.y_val);

    const GroupLassoFit& chosen = fits[static_cast<std::size_t>(sel.index)];
    res.partition = clusters.global;
    res.selected_groups = chosen.selected_groups;
    res.selected_vars = union_of_groups(clusters.global, chosen.selected_groups);
    res.beta = candidates[static_cast<std::size_t>(sel.index)];
    res.lambda_stage3 = sel.lambda;
    res.validation_mse = sel.mse;
    for (std::size_t i = 0; i < fits.size(); ++i)
        res.path_supports.emplace_back(path.values[i],
                                       union_of_groups(clusters.global, fits[i].selected_groups));
    res.timings.fit = seconds_since(t0);
}

// Third stage of the representative estimators: one surrogate column per
// cluster, then an l1 path over the surrogates.
void representative_stage(FitResult& res, const SplitData& data, const PipelineConfig& cfg,
                          const DesignMatrix& x_red, const std::vector<int>& cols,
                          const ClusterOutcome& clusters) {
    const auto t0 = std::chrono::steady_clock::now();
    const Eigen::Index p = data.x_train.p();

    const ClusterRepresentatives reps = representatives(x_red, clusters.local);
    const StandardizedRepresentatives sreps = standardize_representatives(reps);
    LambdaPath path = lambda_path(sreps.x, data.y_train, cfg.lambda_grid, cfg.lambda_ratio);
    if (!std::isnan(cfg.lambda3_override)) path.values = {cfg.lambda3_override};
    const std::vector<LassoFit> fits = fit_lasso_path(sreps.x, data.y_train, path, cfg.stage1.solver);

    // a representative coefficient spreads evenly over its cluster:
    // b_r on (1/(m_r s_r)) sum_j X_j  ==  b_r/(m_r s_r) on each member
    auto to_full = [&](const Eigen::VectorXd& rep_beta) {
        Eigen::VectorXd full = Eigen::VectorXd::Zero(p);
        for (int r = 0; r < clusters.local.num_groups(); ++r) {
            const double b = rep_beta[r];
            if (b == 0.0) continue;
            const auto& g = clusters.global.groups[static_cast<std::size_t>(r)];
            const double scale = static_cast<double>(g.size()) * sreps.scale[r];
            for (int j : g) full[j] = b / scale;
        }
        return full;
    };

    std::vector<CoefVector> candidates;
    candidates.reserve(fits.size());
    for (const auto& f : fits) candidates.push_back(CoefVector{to_full(f.beta.values)});
    const SelectedLambda sel =
        select_lambda_by_validation(path.values, candidates, data.x_val, data.y_val);

    res.partition = clusters.global;
    res.selected_groups = fits[static_cast<std::size_t>(sel.index)].beta.support();
    res.selected_vars = union_of_groups(clusters.global, res.selected_groups);
    res.beta = candidates[static_cast<std::size_t>(sel.index)];
    res.lambda_stage3 = sel.lambda;
    res.validation_mse = sel.mse;
    for (std::size_t i = 0; i < fits.size(); ++i)
        res.path_supports.emplace_back(path.values[i],
                                       union_of_groups(clusters.global, fits[i].beta.support()));
    res.timings.fit = seconds_since(t0);
}

FitResult three_stage(const std::string& method, const SplitData& data, const PipelineConfig& cfg,
                      bool do_screen, bool representative) {
    FitResult res;
    res.method = method;

    std::vector<int> cols;
    if (do_screen) {
        Stage1Outcome s1 = run_stage1(data, cfg);
        res.stage1 = s1.screen;
        res.has_stage1 = true;
        res.lambda1 = s1.lambda1;
        res.timings.screen = s1.seconds;
        cols = s1.screen.s1;
    } else {
        cols = all_columns(data.x_train.p());
    }

    const DesignMatrix x_red = select_columns(data.x_train, cols);
    const ClusterOutcome clusters = run_cluster(x_red, cols, cfg);
    res.timings.cluster = clusters.seconds;

    if (representative)
        representative_stage(res, data, cfg, x_red, cols, clusters);
    else
        group_stage(res, data, cfg, x_red, cols, clusters);
    return res;
}

} // namespace

SplitData prepare_data(const Eigen::MatrixXd& x_train, const Eigen::VectorXd& y_train,
                       const Eigen::MatrixXd& x_val, const Eigen::VectorXd& y_val,
                       std::vector<std::string> column_ids) {
    if (x_val.cols() != x_train.cols())
        throw DimensionMismatch("train and validation designs have different p");
    if (y_val.size() != x_val.rows())
        throw DimensionMismatch("validation x and y have different numbers of rows");
    SplitData out;
    StandardizedData std_train = standardize(x_train, y_train, std::move(column_ids));
    out.x_train = std::move(std_train.x);
    out.y_train = std::move(std_train.y);
    out.params = std::move(std_train.params);
    out.x_val = apply_standardization(x_val, out.params, out.x_train.column_ids);
    out.y_val = apply_centering(y_val, out.params);
    return out;
}

SelectedLambda select_lambda_by_validation(const std::vector<double>& lambdas,
                                           const std::vector<CoefVector>& betas,
                                           const DesignMatrix& x_val, const ResponseVector& y_val) {
    if (lambdas.empty() || lambdas.size() != betas.size())
        throw EmptyPath("validation selection needs a nonempty path");
    SelectedLambda best;
    for (std::size_t i = 0; i < lambdas.size(); ++i) {
        const double m = validation_mse(x_val, y_val, betas[i].values);
        if (best.index < 0 || m < best.mse || (m == best.mse && lambdas[i] > best.lambda)) {
            best.index = static_cast<int>(i);
            best.lambda = lambdas[i];
            best.mse = m;
        }
    }
    return best;
}

FitResult fit_acgl(const SplitData& data, const PipelineConfig& config) {
    return three_stage("acgl", data, config, true, false);
}

FitResult fit_acrl(const SplitData& data, const PipelineConfig& config) {
    return three_stage("acrl", data, config, true, true);
}

FitResult fit_cglcor(const SplitData& data, const PipelineConfig& config) {
    return three_stage("cglcor", data, config, false, false);
}

FitResult fit_crlcor(const SplitData& data, const PipelineConfig& config) {
    return three_stage("crlcor", data, config, false, true);
}

FitResult fit_lasso_method(const SplitData& data, const PipelineConfig& config) {
    const auto t0 = std::chrono::steady_clock::now();
    FitResult res;
    res.method = "lasso";
    LambdaPath path = lambda_path(data.x_train, data.y_train, config.lambda_grid, config.lambda_ratio);
    if (!std::isnan(config.lambda3_override)) path.values = {config.lambda3_override};
    const std::vector<LassoFit> fits =
        fit_lasso_path(data.x_train, data.y_train, path, config.stage1.solver);
    std::vector<CoefVector> candidates;
    for (const auto& f : fits) candidates.push_back(f.beta);
    const SelectedLambda sel =
        select_lambda_by_validation(path.values, candidates, data.x_val, data.y_val);
    res.beta = candidates[static_cast<std::size_t>(sel.index)];
    res.selected_vars = res.beta.support();
    res.partition = GroupPartition::singletons(static_cast<int>(data.x_train.p()));
    res.selected_groups = res.selected_vars; // singleton r <-> column r
    res.lambda_stage3 = sel.lambda;
    res.validation_mse = sel.mse;
    for (std::size_t i = 0; i < fits.size(); ++i)
        res.path_supports.emplace_back(path.values[i], fits[i].beta.support());
    res.timings.fit = seconds_since(t0);
    return res;
}

FitResult fit_method(const std::string& method, const SplitData& data, const PipelineConfig& config) {
    if (method == "acgl") return fit_acgl(data, config);
    if (method == "acrl") return fit_acrl(data, config);
    if (method == "cglcor") return fit_cglcor(data, config);
    if (method == "crlcor") return fit_crlcor(data, config);
    if (method == "lasso") return fit_lasso_method(data, config);
    throw IncompatibleConfig("unknown method '" + method +
                             "'; valid methods: acgl, acrl, cglcor, crlcor, lasso");
}

std::vector<std::string> known_methods() { return {"acgl", "acrl", "cglcor", "crlcor", "lasso"}; }

} // namespace acl
