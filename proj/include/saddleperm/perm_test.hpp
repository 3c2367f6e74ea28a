#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "saddleperm/tail.hpp"

namespace saddleperm {

// One evaluated test: either the observed statistic of a dataset or one grid
// cell of a tail-probability table (where lambda_obs is the cell threshold).
struct TestReport {
    ModelKind kind = ModelKind::KSample;
    GroupDesign design;
    double lambda_obs = 0.0;
    double u_obs = 0.0;
    TailResult tail;
    std::optional<double> comparison;
    std::optional<std::string> comparison_kind;
    int d0 = 0;
    int d1 = 0;
};

// Builders from grouped data. `groups` assigns each row a group index in
// [0, k); sizes are the group counts in index order.
std::pair<TiltingModel, std::vector<int>> build_ksample(const std::vector<int>& groups,
                                                        const Vec& values,
                                                        bool use_ranks);
std::pair<TiltingModel, std::vector<int>> build_twosample(const std::vector<int>& groups,
                                                          const std::vector<Vec>& rows);

// Conditional statistic of one group assignment: per-group score sums over N
// form x1, x0 = p, and (lambda_obs, u_obs) = (Lambda(x) - Lambda_0(x0),
// sqrt(2 lambda_obs)).
std::pair<double, double> observed_statistic(const TiltingModel& model,
                                             const std::vector<int>& assignment);

// The same, reusing a prebuilt conditional context.
std::pair<double, double> observed_statistic(const TiltingModel& model,
                                             const ConditionalContext& ctx,
                                             const std::vector<int>& assignment);

// One report for the observed statistic of an assignment.
TestReport observed_report(const TiltingModel& model, const std::vector<int>& assignment,
                           const TailOptions& options);

// One report per grid level lambda = u^2/2; cell `i` draws its sphere
// directions from the derived seed (seed, grid_cell, i).
std::vector<TestReport> grid_reports(const TiltingModel& model, const Vec& u_grid,
                                     const TailOptions& options);

// K-sample test. Empty u_grid: one report for the observed statistic.
// Nonempty u_grid: one report per level as in grid_reports.
std::vector<TestReport> ksample_test(const std::vector<int>& groups, const Vec& values,
                                     bool use_ranks, const Vec& u_grid,
                                     const TailOptions& options);

// Two-sample multivariate test; same grid convention.
std::vector<TestReport> twosample_test(const std::vector<int>& groups,
                                       const std::vector<Vec>& rows, const Vec& u_grid,
                                       const TailOptions& options);

}  // namespace saddleperm
