#include "acl/serialize.hpp"

namespace acl {

std::vector<int> one_based(const std::vector<int>& zero_based) {
    std::vector<int> out;
    out.reserve(zero_based.size());
    for (int j : zero_based) out.push_back(j + 1);
    return out;
}

nlohmann::json to_json(const ScreenResult& r) {
    return {{"s_lasso", one_based(r.s_lasso)},
            {"s_corr", one_based(r.s_corr)},
            {"s1", one_based(r.s1)},
            {"rho", r.rho},
            {"lambda1", r.lambda1},
            {"corr_evaluations", r.corr_evaluations},
            {"timings", {{"lasso", r.time_lasso}, {"screen", r.time_screen}}}};
}

nlohmann::json to_json(const FitResult& r) {
    nlohmann::json partition = nlohmann::json::array();
    for (const auto& g : r.partition.groups) partition.push_back(one_based(g));
    nlohmann::json j{{"method", r.method},
                     {"beta", std::vector<double>(r.beta.values.data(),
                                                  r.beta.values.data() + r.beta.values.size())},
                     {"selected_vars", one_based(r.selected_vars)},
                     {"selected_groups", one_based(r.selected_groups)},
                     {"partition", partition},
                     {"lambda_stage3", r.lambda_stage3},
                     {"validation_mse", r.validation_mse},
                     {"timings",
                      {{"screen", r.timings.screen},
                       {"cluster", r.timings.cluster},
                       {"fit", r.timings.fit},
                       {"total", r.timings.total()}}}};
    if (!std::isnan(r.lambda1)) j["lambda1"] = r.lambda1;
    if (r.has_stage1) j["stage1"] = to_json(r.stage1);
    return j;
}

nlohmann::json to_json(const IrReport& r) {
    return {{"theta_exact", r.theta_exact},
            {"theta_bound", r.theta_bound},
            {"min_eigen_s11", r.min_eigen_s11},
            {"holds_strict", r.holds_strict}};
}

nlohmann::json to_json(const GirReport& r) {
    return {{"rw_min_eigen", r.rw_min_eigen},
            {"group_ir_values", r.group_ir_values},
            {"noise_groups", one_based(r.noise_groups)},
            {"holds", r.holds}};
}

nlohmann::json to_json(const ScenarioConfig& c) {
    return {{"design", c.design},
            {"beta_config", c.beta_config},
            {"num_blocks", c.num_blocks},
            {"block_size", c.block_size},
            {"p", c.dimension()},
            {"rho", c.rho},
            {"sigma", c.sigma},
            {"n_train", c.n_train},
            {"n_val", c.n_val},
            {"replicates", c.replicates},
            {"seed", c.master_seed},
            {"x_csv", c.x_csv},
            {"top_k", c.top_k},
            {"s0", c.s0}};
}

namespace {

std::string variant_name(Stage1Variant v) {
    switch (v) {
    case Stage1Variant::plain:
        return "plain";
    case Stage1Variant::adaptive:
        return "adaptive";
    case Stage1Variant::thresholded:
        return "thresholded";
    }
    return "plain";
}

} // namespace

nlohmann::json to_json(const PipelineConfig& c) {
    nlohmann::json j{{"lambda_grid", c.lambda_grid},
                     {"lambda_ratio", c.lambda_ratio},
                     {"stage1_variant", variant_name(c.stage1.variant)},
                     {"stage1_threshold", c.stage1.threshold},
                     {"adaptive_delta", c.stage1.adaptive_delta},
                     {"screen_rho", c.stage1.screen.rho},
                     {"screen_absolute", c.stage1.screen.absolute},
                     {"screen_transitive", c.stage1.screen.transitive},
                     {"lasso_tol", c.stage1.solver.tol},
                     {"lasso_kkt_tol", c.stage1.solver.kkt_tol},
                     {"lasso_max_iter", c.stage1.solver.max_iter},
                     {"group_tol", c.group_solver.tol},
                     {"group_max_iter", c.group_solver.max_iter},
                     {"linkage", c.linkage == Linkage::average ? "average" : "complete"},
                     {"force_full_stage1", c.force_full_stage1}};
    if (c.cut_rule.kind == CutRule::Kind::by_height)
        j["cut_height"] = c.cut_rule.height;
    else
        j["cut_count"] = c.cut_rule.count;
    return j;
}

nlohmann::json to_json(const AggregateRow& r) {
    return {{"scenario", r.scenario},
            {"method", r.method},
            {"sigma", r.sigma},
            {"n_train", r.n_train},
            {"n_val", r.n_val},
            {"replicates", r.replicates},
            {"failures", r.failures},
            {"mean_mse", r.mean_mse},
            {"sd_mse", r.sd_mse},
            {"mean_tpr", r.mean_tpr},
            {"mean_s_hat", r.mean_s_hat},
            {"mean_stage1", r.mean_stage1},
            {"mean_time_screen", r.mean_time_screen},
            {"mean_time_cluster", r.mean_time_cluster},
            {"mean_time_fit", r.mean_time_fit},
            {"mean_time_total", r.mean_time_total}};
}

} // namespace acl
