#pragma once

#include <string>
#include <utility>
#include <vector>

#include "noisereg/experiments.hpp"

namespace noisereg {

/// Shortest round-trip decimal form; infinities render as "inf"/"-inf" and
/// NaN as "nan".
std::string format_double(double v);

/// Parse a number written by format_double; throws data_error on junk.
double parse_double_field(const std::string& s);

/// Schema: index,train_rmse,test_rmse_mean,test_rmse_analytic,bias2,variance,
/// cond_mean,trials,seed — one row per grid point, in grid order.
void write_curve_csv(const ErrorCurve& curve, const std::string& path);

/// Reads back a curve CSV (aggregate columns only).
ErrorCurve parse_curve_csv(const std::string& path);

void write_coef_csv(const std::vector<CoefSummary>& summaries, long trials,
                    std::uint64_t seed, const std::string& path);

void write_lambda_csv(const LambdaSearchResult& result, const std::string& path);

void write_heatmap_csv(const HeatmapResult& hm, std::uint64_t seed,
                       const std::string& path);

void write_shrinkage_csv(const std::vector<ShrinkagePoint>& points, Sequence seq,
                         long trials, std::uint64_t seed, const std::string& path);

void write_condition_csv(const std::vector<std::pair<Eigen::Index, double>>& points,
                         long trials, std::uint64_t seed, const std::string& path);

} // namespace noisereg
