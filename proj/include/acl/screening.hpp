#pragma once

#include <vector>

#include "acl/lasso.hpp"
#include "acl/model_core.hpp"

namespace acl {

struct ScreenOptions {
    double rho = 0.7;       // strong-correlation threshold
    bool absolute = true;   // screen on |corr| (false restores one-sided corr > rho)
    bool transitive = false; // keep screening from the enlarged set until a fixpoint
};

struct CorrScreenResult {
    std::vector<int> selected; // outside the seed set, sorted
    long evaluations = 0;      // correlation evaluations performed
};

// One pass over seed x non-seed pairs: k is selected when
// corr(X_j, X_k) > rho for at least one seed j (|corr| by default).
// Performs exactly |seeds| * (p - |seeds|) correlation evaluations.
CorrScreenResult correlation_screen(const DesignMatrix& x, const std::vector<int>& seed_set,
                                    double rho, bool absolute = true);

enum class Stage1Variant { plain, adaptive, thresholded };

struct Stage1Options {
    Stage1Variant variant = Stage1Variant::plain;
    double threshold = 0.0;      // thresholded variant
    double adaptive_delta = 1e-3;
    ScreenOptions screen;
    LassoOptions solver;
};

// Stage 1 of the three-stage procedure: an initial sparse selection plus
// its strongly correlated partners.
struct ScreenResult {
    std::vector<int> s_lasso;
    std::vector<int> s_corr; // disjoint from s_lasso
    std::vector<int> s1;     // union of the two
    double rho = 0.0;
    double lambda1 = 0.0;
    long corr_evaluations = 0;
    double time_lasso = 0.0;  // seconds
    double time_screen = 0.0; // seconds
};

ScreenResult stage1(const DesignMatrix& x, const ResponseVector& y, double lambda1,
                    const Stage1Options& options = {});

} // namespace acl
