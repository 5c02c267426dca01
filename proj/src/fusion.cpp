#include "semsim/fusion.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iostream>
#include <numeric>
#include <random>
#include <sstream>

#include <Eigen/Dense>

namespace semsim {

double FeatureRow::feature(std::string_view name) const {
    for (std::size_t i = 0; i < names.size(); ++i)
        if (names[i] == name)
            return values[i];
    throw MissingFeatureError("pair " + pair_id + " has no feature '" + std::string(name) + "'");
}

double FusionModel::predict(const FeatureRow& row) const {
    double y = intercept;
    for (std::size_t i = 0; i < names.size(); ++i)
        y += coefficients[i] * row.feature(names[i]);
    return y;
}

const double* ExternalColumn::find(std::string_view pair_id) const {
    for (const auto& [id, value] : values)
        if (id == pair_id)
            return &value;
    return nullptr;
}

namespace {

std::vector<std::string> split_tsv(const std::string& line) {
    std::vector<std::string> fields;
    std::size_t start = 0;
    while (true) {
        std::size_t tab = line.find('\t', start);
        if (tab == std::string::npos) {
            std::string last = line.substr(start);
            if (!last.empty() && last.back() == '\r')
                last.pop_back();
            fields.push_back(std::move(last));
            return fields;
        }
        fields.push_back(line.substr(start, tab - start));
        start = tab + 1;
    }
}

double parse_double(const std::string& s, const std::string& path, std::uint64_t line_no) {
    try {
        std::size_t used = 0;
        double v = std::stod(s, &used);
        if (used != s.size() || !std::isfinite(v))
            throw std::invalid_argument(s);
        return v;
    } catch (const std::exception&) {
        throw FormatError(path + ":" + std::to_string(line_no) + ": not a number: '" + s + "'");
    }
}

void expect_header(const std::vector<std::string>& fields, const std::vector<std::string>& want,
                   const std::string& path) {
    if (fields != want) {
        std::string expect;
        for (const std::string& f : want)
            expect += (expect.empty() ? "" : "\t") + f;
        throw FormatError(path + ":1: expected header '" + expect + "'");
    }
}

} // namespace

std::vector<BenchmarkPair> load_benchmark(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw IoError("cannot open benchmark file: " + path);
    std::string line;
    if (!std::getline(in, line))
        throw FormatError(path + ": empty file");
    expect_header(split_tsv(line), {"pair_id", "sentence1", "sentence2", "score"}, path);

    std::vector<BenchmarkPair> pairs;
    std::uint64_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty())
            continue;
        auto fields = split_tsv(line);
        if (fields.size() != 4)
            throw FormatError(path + ":" + std::to_string(line_no) + ": expected 4 fields, got " +
                              std::to_string(fields.size()));
        if (fields[0].empty() || fields[1].empty() || fields[2].empty())
            throw FormatError(path + ":" + std::to_string(line_no) +
                              ": pair id and sentences must be nonempty");
        double gold = parse_double(fields[3], path, line_no);
        if (gold < 0.0 || gold > 4.0)
            throw RangeError(path + ":" + std::to_string(line_no) + ": score " + fields[3] +
                             " outside [0,4]");
        pairs.push_back({std::move(fields[0]), std::move(fields[1]), std::move(fields[2]), gold});
    }
    return pairs;
}

std::vector<ContradictionSet> load_contradiction_sets(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw IoError("cannot open contradiction file: " + path);
    std::string line;
    if (!std::getline(in, line))
        throw FormatError(path + ": empty file");
    expect_header(split_tsv(line), {"pair_id", "subset", "sentence1", "sentence2"}, path);

    const std::vector<std::string> order = {"similar", "negation", "antonym"};
    std::vector<ContradictionSet> sets;
    for (const std::string& label : order)
        sets.push_back({label, {}});

    std::uint64_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty())
            continue;
        auto fields = split_tsv(line);
        if (fields.size() != 4)
            throw FormatError(path + ":" + std::to_string(line_no) + ": expected 4 fields, got " +
                              std::to_string(fields.size()));
        auto it = std::find(order.begin(), order.end(), fields[1]);
        if (it == order.end())
            throw FormatError(path + ":" + std::to_string(line_no) + ": unknown subset '" +
                              fields[1] + "' (valid: similar, negation, antonym)");
        if (fields[0].empty() || fields[2].empty() || fields[3].empty())
            throw FormatError(path + ":" + std::to_string(line_no) +
                              ": pair id and sentences must be nonempty");
        sets[static_cast<std::size_t>(it - order.begin())].pairs.push_back(
            {std::move(fields[0]), std::move(fields[2]), std::move(fields[3])});
    }
    std::erase_if(sets, [](const ContradictionSet& s) { return s.pairs.empty(); });
    if (sets.empty())
        throw FormatError(path + ": no contradiction pairs");
    return sets;
}

std::vector<ExternalColumn> load_external_features(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw IoError("cannot open feature file: " + path);
    std::string line;
    if (!std::getline(in, line))
        throw FormatError(path + ": empty file");
    expect_header(split_tsv(line), {"pair_id", "feature", "value"}, path);

    std::vector<ExternalColumn> columns;
    std::uint64_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty())
            continue;
        auto fields = split_tsv(line);
        if (fields.size() != 3)
            throw FormatError(path + ":" + std::to_string(line_no) + ": expected 3 fields, got " +
                              std::to_string(fields.size()));
        double value = parse_double(fields[2], path, line_no);
        auto it = std::find_if(columns.begin(), columns.end(),
                               [&](const ExternalColumn& c) { return c.name == fields[1]; });
        if (it == columns.end()) {
            columns.push_back({fields[1], {}});
            it = columns.end() - 1;
        }
        if (it->find(fields[0]))
            throw FormatError(path + ":" + std::to_string(line_no) + ": duplicate value for pair '" +
                              fields[0] + "', feature '" + fields[1] + "'");
        it->values.emplace_back(std::move(fields[0]), value);
    }
    return columns;
}

std::vector<FeatureRow> build_features(const std::vector<BenchmarkPair>& pairs,
                                       const std::vector<FeatureProvider>& providers,
                                       const std::vector<ExternalColumn>& external,
                                       std::vector<std::string>* warnings) {
    std::vector<std::string> names;
    for (const FeatureProvider& p : providers)
        names.push_back(p.name);
    for (const ExternalColumn& c : external)
        names.push_back(c.name);
    for (std::size_t i = 0; i < names.size(); ++i)
        for (std::size_t j = i + 1; j < names.size(); ++j)
            if (names[i] == names[j])
                throw Error("duplicate feature name '" + names[i] + "'");

    auto warn = [&](const std::string& message) {
        if (warnings)
            warnings->push_back(message);
        else
            std::cerr << "warning: " << message << '\n';
    };

    std::vector<FeatureRow> rows;
    for (const BenchmarkPair& pair : pairs) {
        FeatureRow row;
        row.pair_id = pair.pair_id;
        row.gold = pair.gold;
        row.names = names;
        bool ok = true;
        for (const FeatureProvider& p : providers) {
            try {
                double v = p.compute(pair);
                if (!std::isfinite(v))
                    throw NonFiniteValueError("non-finite value");
                row.values.push_back(v);
            } catch (const std::exception& e) {
                warn("dropping pair " + pair.pair_id + ": feature '" + p.name + "': " + e.what());
                ok = false;
                break;
            }
        }
        if (!ok)
            continue;
        for (const ExternalColumn& c : external) {
            const double* v = c.find(pair.pair_id);
            if (!v)
                throw MissingFeatureError("external feature '" + c.name + "' has no value for pair " +
                                          pair.pair_id);
            row.values.push_back(*v);
        }
        rows.push_back(std::move(row));
    }
    return rows;
}

double mean_hybrid(const FeatureRow& row, const std::vector<std::string>& subset) {
    if (subset.empty())
        throw MissingFeatureError("mean hybrid needs at least one feature");
    double sum = 0.0;
    for (const std::string& name : subset)
        sum += row.feature(name);
    return sum / static_cast<double>(subset.size());
}

namespace {

void check_rectangular(const std::vector<FeatureRow>& rows) {
    for (const FeatureRow& row : rows) {
        if (row.names != rows.front().names)
            throw Error("feature rows disagree on the feature set (pair " + row.pair_id + ")");
        if (row.values.size() != row.names.size())
            throw Error("feature row width mismatch (pair " + row.pair_id + ")");
    }
}

} // namespace

FusionModel fit_ols(const std::vector<FeatureRow>& rows) {
    if (rows.empty())
        throw InsufficientDataError("no feature rows");
    check_rectangular(rows);
    const std::size_t n = rows.size();
    const std::size_t p = rows.front().names.size();
    if (n <= p + 1)
        throw InsufficientDataError("need more than " + std::to_string(p + 1) + " rows to fit " +
                                    std::to_string(p) + " features, got " + std::to_string(n));

    Eigen::MatrixXd X(n, p + 1);
    Eigen::VectorXd y(n);
    for (std::size_t i = 0; i < n; ++i) {
        X(static_cast<Eigen::Index>(i), 0) = 1.0;
        for (std::size_t j = 0; j < p; ++j)
            X(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j + 1)) = rows[i].values[j];
        y(static_cast<Eigen::Index>(i)) = rows[i].gold;
    }

    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(X);
    qr.setThreshold(1e-10);
    if (qr.rank() < static_cast<Eigen::Index>(p + 1))
        throw RankDeficientError("design matrix is rank deficient (collinear or constant feature)");
    Eigen::VectorXd b = qr.solve(y);

    FusionModel model;
    model.intercept = b(0);
    model.names = rows.front().names;
    model.coefficients.assign(p, 0.0);
    for (std::size_t j = 0; j < p; ++j)
        model.coefficients[j] = b(static_cast<Eigen::Index>(j + 1));
    return model;
}

CvResult loo_cv(const std::vector<FeatureRow>& rows) {
    if (rows.empty())
        throw InsufficientDataError("no feature rows");
    check_rectangular(rows);
    const std::size_t n = rows.size();
    const std::size_t p = rows.front().names.size();
    if (n < p + 3)
        throw InsufficientDataError("leave-one-out needs at least " + std::to_string(p + 3) +
                                    " rows for " + std::to_string(p) + " features, got " +
                                    std::to_string(n));

    CvResult result;
    result.predictions.resize(n);
    std::vector<FeatureRow> fold;
    fold.reserve(n - 1);
    for (std::size_t i = 0; i < n; ++i) {
        fold.clear();
        for (std::size_t j = 0; j < n; ++j)
            if (j != i)
                fold.push_back(rows[j]);
        result.predictions[i] = fit_ols(fold).predict(rows[i]);
    }
    std::vector<double> gold(n);
    for (std::size_t i = 0; i < n; ++i)
        gold[i] = rows[i].gold;
    result.pearson_r = pearson(result.predictions, gold);
    return result;
}

CvResult kfold_cv(const std::vector<FeatureRow>& rows, std::size_t k, std::uint64_t seed) {
    check_rectangular(rows);
    const std::size_t n = rows.size();
    if (k < 2 || k > n)
        throw RangeError("fold count must be in [2, n]");

    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::mt19937 rng(static_cast<std::uint32_t>(seed));
    std::shuffle(order.begin(), order.end(), rng);

    CvResult result;
    result.predictions.assign(n, 0.0);
    for (std::size_t f = 0; f < k; ++f) {
        std::vector<FeatureRow> train;
        std::vector<std::size_t> held;
        for (std::size_t i = 0; i < n; ++i) {
            if (i % k == f)
                held.push_back(order[i]);
            else
                train.push_back(rows[order[i]]);
        }
        if (held.empty())
            continue;
        FusionModel model = fit_ols(train);
        for (std::size_t idx : held)
            result.predictions[idx] = model.predict(rows[idx]);
    }
    std::vector<double> gold(n);
    for (std::size_t i = 0; i < n; ++i)
        gold[i] = rows[i].gold;
    result.pearson_r = pearson(result.predictions, gold);
    return result;
}

double pearson(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size())
        throw DimensionMismatchError("correlation inputs differ in length: " +
                                     std::to_string(x.size()) + " vs " + std::to_string(y.size()));
    const std::size_t n = x.size();
    if (n < 2)
        throw InsufficientDataError("correlation needs at least 2 observations");
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        mx += x[i];
        my += y[i];
    }
    mx /= static_cast<double>(n);
    my /= static_cast<double>(n);
    double sxy = 0.0, sxx = 0.0, syy = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        double dx = x[i] - mx;
        double dy = y[i] - my;
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
    }
    if (sxx == 0.0 || syy == 0.0)
        throw ConstantInputError("correlation is undefined for a constant input");
    double r = sxy / std::sqrt(sxx * syy);
    return r < -1.0 ? -1.0 : (r > 1.0 ? 1.0 : r);
}

std::vector<double> average_ranks(std::span<const double> x) {
    const std::size_t n = x.size();
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return x[a] < x[b]; });
    std::vector<double> ranks(n, 0.0);
    std::size_t i = 0;
    while (i < n) {
        std::size_t j = i;
        while (j + 1 < n && x[order[j + 1]] == x[order[i]])
            ++j;
        double rank = 0.5 * static_cast<double>(i + j) + 1.0; // mean of 1-based ranks i+1..j+1
        for (std::size_t t = i; t <= j; ++t)
            ranks[order[t]] = rank;
        i = j + 1;
    }
    return ranks;
}

double spearman(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size())
        throw DimensionMismatchError("correlation inputs differ in length: " +
                                     std::to_string(x.size()) + " vs " + std::to_string(y.size()));
    std::vector<double> rx = average_ranks(x);
    std::vector<double> ry = average_ranks(y);
    return pearson(rx, ry);
}

std::vector<SubsetReport>
contradiction_report(const std::vector<ContradictionSet>& sets,
                     const std::function<double(const ContradictionPair&)>& similarity) {
    std::vector<SubsetReport> report;
    for (const ContradictionSet& set : sets) {
        SubsetReport entry{set.label, set.pairs.size(), 0.0};
        for (const ContradictionPair& pair : set.pairs) {
            try {
                entry.mean += similarity(pair);
            } catch (const std::exception& e) {
                throw Error("pair " + pair.pair_id + " (" + set.label + "): " + e.what());
            }
        }
        if (!set.pairs.empty())
            entry.mean /= static_cast<double>(set.pairs.size());
        report.push_back(std::move(entry));
    }
    return report;
}

} // namespace semsim
