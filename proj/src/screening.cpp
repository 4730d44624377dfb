#include "acl/screening.hpp"

#include <algorithm>
#include <chrono>

namespace acl {

namespace {

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

} // namespace

CorrScreenResult correlation_screen(const DesignMatrix& x, const std::vector<int>& seed_set,
                                    double rho, bool absolute) {
    if (!x.standardized) throw Error("correlation_screen requires a standardized design");
    if (!(rho > 0.0 && rho < 1.0)) throw Error("rho must be in (0, 1)");
    const Eigen::Index p = x.p();
    const double inv_n = 1.0 / static_cast<double>(x.n());

    std::vector<char> is_seed(static_cast<std::size_t>(p), 0);
    for (int j : seed_set) {
        if (j < 0 || j >= p) throw Error("seed index out of range");
        is_seed[static_cast<std::size_t>(j)] = 1;
    }

    CorrScreenResult out;
    std::vector<char> hit(static_cast<std::size_t>(p), 0);
    std::vector<int> seeds(seed_set);
    std::sort(seeds.begin(), seeds.end());
    for (int j : seeds) {
        for (Eigen::Index k = 0; k < p; ++k) {
            if (is_seed[static_cast<std::size_t>(k)]) continue;
            const double c = x.values.col(j).dot(x.values.col(k)) * inv_n;
            ++out.evaluations;
            const double v = absolute ? std::abs(c) : c;
            if (v > rho) hit[static_cast<std::size_t>(k)] = 1;
        }
    }
    for (Eigen::Index k = 0; k < p; ++k)
        if (hit[static_cast<std::size_t>(k)]) out.selected.push_back(static_cast<int>(k));
    return out;
}

ScreenResult stage1(const DesignMatrix& x, const ResponseVector& y, double lambda1,
                    const Stage1Options& options) {
    ScreenResult out;
    out.rho = options.screen.rho;
    out.lambda1 = lambda1;

    const auto t0 = std::chrono::steady_clock::now();
    LassoFit fit = fit_lasso(x, y, lambda1, options.solver);
    switch (options.variant) {
    case Stage1Variant::plain:
        out.s_lasso = fit.beta.support();
        break;
    case Stage1Variant::adaptive:
        out.s_lasso =
            fit_adaptive_lasso(x, y, lambda1, fit, options.adaptive_delta, options.solver).beta.support();
        break;
    case Stage1Variant::thresholded:
        out.s_lasso = threshold_fit(fit, options.threshold).support();
        break;
    }
    out.time_lasso = seconds_since(t0);

    const auto t1 = std::chrono::steady_clock::now();
    std::vector<int> frontier = out.s_lasso;
    std::vector<char> selected(static_cast<std::size_t>(x.p()), 0);
    for (;;) {
        CorrScreenResult scr = correlation_screen(x, frontier, options.screen.rho, options.screen.absolute);
        out.corr_evaluations += scr.evaluations;
        std::vector<int> fresh;
        for (int k : scr.selected) {
            if (!selected[static_cast<std::size_t>(k)]) {
                selected[static_cast<std::size_t>(k)] = 1;
                fresh.push_back(k);
            }
        }
        if (!options.screen.transitive || fresh.empty()) break;
        frontier = sorted_union(frontier, fresh);
    }
    for (Eigen::Index k = 0; k < x.p(); ++k)
        if (selected[static_cast<std::size_t>(k)]) out.s_corr.push_back(static_cast<int>(k));
    // transitive passes may re-screen earlier hits; keep s_corr disjoint from s_lasso
    std::vector<int> tmp;
    std::set_difference(out.s_corr.begin(), out.s_corr.end(), out.s_lasso.begin(), out.s_lasso.end(),
                        std::back_inserter(tmp));
    out.s_corr = std::move(tmp);
    out.time_screen = seconds_since(t1);

    out.s1 = sorted_union(out.s_lasso, out.s_corr);
    if (out.s1.empty())
        throw EmptyStage1("stage 1 selected no variables; lower lambda1 below the null threshold");
    return out;
}

} // namespace acl
