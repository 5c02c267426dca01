#pragma once

#include <functional>
#include <span>
#include <string>
#include <vector>

#include "semsim/error.hpp"

namespace semsim {

struct BenchmarkPair {
    std::string pair_id;
    std::string sentence1;
    std::string sentence2;
    double gold = 0.0; // [0,4] annotation-average scale
};

struct FeatureRow {
    std::string pair_id;
    std::vector<std::string> names;
    std::vector<double> values;
    double gold = 0.0;

    double feature(std::string_view name) const;
};

struct FusionModel {
    double intercept = 0.0;
    std::vector<std::string> names;
    std::vector<double> coefficients;

    double predict(const FeatureRow& row) const;
};

struct ContradictionPair {
    std::string pair_id;
    std::string sentence1;
    std::string sentence2;
};

struct ContradictionSet {
    std::string label; // similar, negation or antonym
    std::vector<ContradictionPair> pairs;
};

struct SubsetReport {
    std::string label;
    std::size_t n = 0;
    double mean = 0.0;
};

// TSV with header pair_id<TAB>sentence1<TAB>sentence2<TAB>score; order
// preserved. FormatError carries the offending line number; RangeError
// when a score leaves [0,4].
std::vector<BenchmarkPair> load_benchmark(const std::string& path);

// TSV with header pair_id<TAB>subset<TAB>sentence1<TAB>sentence2; returns
// the sets in report order (similar, negation, antonym), empty ones
// omitted.
std::vector<ContradictionSet> load_contradiction_sets(const std::string& path);

struct ExternalColumn {
    std::string name;
    std::vector<std::pair<std::string, double>> values; // pair_id -> value

    const double* find(std::string_view pair_id) const;
};

// TSV with header pair_id<TAB>feature<TAB>value; columns in first-appearance
// order.
std::vector<ExternalColumn> load_external_features(const std::string& path);

using FeatureFn = std::function<double(const BenchmarkPair&)>;

struct FeatureProvider {
    std::string name;
    FeatureFn compute;
};

// Rectangular feature matrix: provider columns in order, then external
// columns. A pair whose provider throws is dropped with a warning (into
// `warnings`, or standard error when null); an external column missing a
// retained pair is a MissingFeatureError.
std::vector<FeatureRow> build_features(const std::vector<BenchmarkPair>& pairs,
                                       const std::vector<FeatureProvider>& providers,
                                       const std::vector<ExternalColumn>& external = {},
                                       std::vector<std::string>* warnings = nullptr);

// Arithmetic mean of the named features of one row.
double mean_hybrid(const FeatureRow& row, const std::vector<std::string>& subset);

// Ordinary least squares of gold on the features (plus intercept), solved
// by column-pivoted QR. Throws InsufficientDataError unless n > p + 1 and
// RankDeficientError when the design matrix loses column rank.
FusionModel fit_ols(const std::vector<FeatureRow>& rows);

struct CvResult {
    std::vector<double> predictions; // out-of-fold, in input row order
    double pearson_r = 0.0;
};

// Leave-one-out cross-validation; needs n >= p + 3 so every fold remains
// fittable.
CvResult loo_cv(const std::vector<FeatureRow>& rows);

// Seeded k-fold alternative (2 <= k <= n).
CvResult kfold_cv(const std::vector<FeatureRow>& rows, std::size_t k, std::uint64_t seed);

double pearson(std::span<const double> x, std::span<const double> y);
double spearman(std::span<const double> x, std::span<const double> y);

// 1-based ranks with ties averaged, as Spearman requires.
std::vector<double> average_ranks(std::span<const double> x);

// Per subset: pair count and mean of `similarity` over its pairs, in the
// loader's order. Errors from `similarity` are rethrown with the pair_id.
std::vector<SubsetReport>
contradiction_report(const std::vector<ContradictionSet>& sets,
                     const std::function<double(const ContradictionPair&)>& similarity);

} // namespace semsim
