#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include "semsim/fusion.hpp"
#include "semsim/vocab.hpp"
#include "testutil.hpp"

using namespace semsim;

namespace {

FeatureRow make_row(std::string id, std::vector<double> values, double gold,
                    std::vector<std::string> names) {
    FeatureRow r;
    r.pair_id = std::move(id);
    r.values = std::move(values);
    r.gold = gold;
    r.names = std::move(names);
    return r;
}

std::vector<FeatureRow> rows_from_xy(const std::vector<std::vector<double>>& xs,
                                     const std::vector<double>& ys,
                                     std::vector<std::string> names) {
    std::vector<FeatureRow> rows;
    for (std::size_t i = 0; i < xs.size(); ++i)
        rows.push_back(make_row("p" + std::to_string(i), xs[i], ys[i], names));
    return rows;
}

} // namespace

TEST_CASE("benchmark loader enforces the four-column format") {
    testutil::TempDir dir;
    testutil::write_file(dir.file("b.tsv"),
                         "pair_id\tsentence1\tsentence2\tscore\n"
                         "p1\tAlpha beta.\tGamma delta.\t3.2\n"
                         "p2\tOne two\tThree four\t0\n"
                         "p3\tx\ty\t4\n");
    auto pairs = load_benchmark(dir.file("b.tsv"));
    REQUIRE(pairs.size() == 3);
    CHECK(pairs[0].pair_id == "p1");
    CHECK(pairs[0].sentence1 == "Alpha beta.");
    CHECK(pairs[0].sentence2 == "Gamma delta.");
    CHECK(pairs[0].gold == doctest::Approx(3.2));
    CHECK(pairs[1].gold == doctest::Approx(0.0));
    CHECK(pairs[2].pair_id == "p3"); // input order preserved

    testutil::write_file(dir.file("nohdr.tsv"), "p1\ta\tb\t1.0\n");
    CHECK_THROWS_AS(load_benchmark(dir.file("nohdr.tsv")), FormatError);

    testutil::write_file(dir.file("cols.tsv"),
                         "pair_id\tsentence1\tsentence2\tscore\np1\ta\tb\n");
    CHECK_THROWS_WITH_AS(load_benchmark(dir.file("cols.tsv")),
                         doctest::Contains(":2:"), FormatError);

    testutil::write_file(dir.file("score.tsv"),
                         "pair_id\tsentence1\tsentence2\tscore\np1\ta\tb\tbig\n");
    CHECK_THROWS_AS(load_benchmark(dir.file("score.tsv")), FormatError);

    testutil::write_file(dir.file("range.tsv"),
                         "pair_id\tsentence1\tsentence2\tscore\np1\ta\tb\t4.5\n");
    CHECK_THROWS_AS(load_benchmark(dir.file("range.tsv")), RangeError);

    testutil::write_file(dir.file("blank.tsv"),
                         "pair_id\tsentence1\tsentence2\tscore\np1\t\tb\t1\n");
    CHECK_THROWS_AS(load_benchmark(dir.file("blank.tsv")), FormatError);

    CHECK_THROWS_AS(load_benchmark(dir.file("missing.tsv")), IoError);
}

TEST_CASE("contradiction loader groups into canonical subset order") {
    testutil::TempDir dir;
    testutil::write_file(dir.file("c.tsv"),
                         "pair_id\tsubset\tsentence1\tsentence2\n"
                         "c1\tantonym\thot stuff\tcold stuff\n"
                         "c2\tsimilar\ta b\ta b c\n"
                         "c3\tantonym\tup now\tdown now\n"
                         "c4\tnegation\tit works\tit does not work\n");
    auto sets = load_contradiction_sets(dir.file("c.tsv"));
    REQUIRE(sets.size() == 3);
    CHECK(sets[0].label == "similar");
    CHECK(sets[0].pairs.size() == 1);
    CHECK(sets[1].label == "negation");
    CHECK(sets[2].label == "antonym");
    REQUIRE(sets[2].pairs.size() == 2);
    CHECK(sets[2].pairs[0].pair_id == "c1");
    CHECK(sets[2].pairs[1].pair_id == "c3");

    testutil::write_file(dir.file("one.tsv"),
                         "pair_id\tsubset\tsentence1\tsentence2\n"
                         "c1\tnegation\ta\tb\n");
    auto one = load_contradiction_sets(dir.file("one.tsv"));
    REQUIRE(one.size() == 1); // empty subsets are omitted
    CHECK(one[0].label == "negation");

    testutil::write_file(dir.file("bad.tsv"),
                         "pair_id\tsubset\tsentence1\tsentence2\n"
                         "c1\tsarcasm\ta\tb\n");
    CHECK_THROWS_AS(load_contradiction_sets(dir.file("bad.tsv")), FormatError);
}

TEST_CASE("external feature loader keeps first-appearance column order") {
    testutil::TempDir dir;
    testutil::write_file(dir.file("x.tsv"),
                         "pair_id\tfeature\tvalue\n"
                         "p1\tzldaz\t0.5\n"
                         "p1\tanno\t0.25\n"
                         "p2\tzldaz\t0.75\n"
                         "p2\tanno\t1.5\n");
    auto cols = load_external_features(dir.file("x.tsv"));
    REQUIRE(cols.size() == 2);
    CHECK(cols[0].name == "zldaz"); // not alphabetized
    CHECK(cols[1].name == "anno");
    REQUIRE(cols[0].find("p2") != nullptr);
    CHECK(*cols[0].find("p2") == doctest::Approx(0.75));
    CHECK(cols[0].find("p9") == nullptr);

    testutil::write_file(dir.file("dup.tsv"),
                         "pair_id\tfeature\tvalue\n"
                         "p1\tf\t0.5\n"
                         "p1\tf\t0.6\n");
    CHECK_THROWS_AS(load_external_features(dir.file("dup.tsv")), FormatError);
}

TEST_CASE("build_features assembles provider and external columns") {
    std::vector<BenchmarkPair> pairs = {
        {"p1", "a b", "a c", 3.0},
        {"p2", "q r", "s t", 1.0},
        {"p3", "x", "x", 4.0},
    };
    std::vector<FeatureProvider> providers = {
        {"len1", [](const BenchmarkPair& p) { return double(p.sentence1.size()); }},
        {"boom", [](const BenchmarkPair& p) -> double {
             if (p.pair_id == "p2")
                 throw DegenerateInputError("no tokens");
             return 1.0;
         }},
    };
    ExternalColumn ext;
    ext.name = "anno";
    ext.values = {{"p1", 0.5}, {"p3", 0.75}}; // p2 missing but also dropped

    std::vector<std::string> warnings;
    auto rows = build_features(pairs, providers, {ext}, &warnings);
    REQUIRE(rows.size() == 2); // p2 dropped by the throwing provider
    REQUIRE(warnings.size() == 1);
    CHECK(warnings[0].find("p2") != std::string::npos);
    CHECK(rows[0].pair_id == "p1");
    CHECK(rows[0].names == std::vector<std::string>{"len1", "boom", "anno"});
    CHECK(rows[0].values == std::vector<double>{3.0, 1.0, 0.5});
    CHECK(rows[0].gold == doctest::Approx(3.0));
    CHECK(rows[1].feature("anno") == doctest::Approx(0.75));
    CHECK_THROWS_AS(rows[0].feature("nope"), Error);

    // an external column missing a *retained* pair is fatal
    ExternalColumn sparse;
    sparse.name = "sparse";
    sparse.values = {{"p1", 0.5}};
    CHECK_THROWS_AS(build_features(pairs, providers, {sparse}, &warnings),
                    MissingFeatureError);

    // non-finite provider output drops the pair too
    std::vector<FeatureProvider> nan_provider = {
        {"f", [](const BenchmarkPair& p) {
             return p.pair_id == "p1" ? std::numeric_limits<double>::quiet_NaN() : 0.5;
         }},
    };
    warnings.clear();
    auto clean = build_features(pairs, nan_provider, {}, &warnings);
    CHECK(clean.size() == 2);
    CHECK(warnings.size() == 1);

    // duplicate feature names collide
    std::vector<FeatureProvider> dup = {
        {"same", [](const BenchmarkPair&) { return 0.0; }},
        {"same", [](const BenchmarkPair&) { return 1.0; }},
    };
    CHECK_THROWS_AS(build_features(pairs, dup), Error);
}

TEST_CASE("mean hybrid averages the selected columns") {
    FeatureRow row = make_row("p", {0.2, 0.4, 0.6}, 0.0, {"a", "b", "c"});
    CHECK(mean_hybrid(row, {"a", "b", "c"}) == doctest::Approx(0.4));
    CHECK(mean_hybrid(row, {"a"}) == doctest::Approx(0.2));
    CHECK(mean_hybrid(row, {"c", "a"}) == doctest::Approx(0.4));
    CHECK_THROWS_AS(mean_hybrid(row, {}), Error);
    CHECK_THROWS_AS(mean_hybrid(row, {"zzz"}), Error);
}

TEST_CASE("ols recovers exact linear relationships") {
    SUBCASE("one feature") {
        std::vector<std::vector<double>> xs;
        std::vector<double> ys;
        for (int i = 0; i < 8; ++i) {
            xs.push_back({0.25 * i});
            ys.push_back(1.0 + 2.0 * 0.25 * i);
        }
        FusionModel m = fit_ols(rows_from_xy(xs, ys, {"x"}));
        CHECK(m.intercept == doctest::Approx(1.0).epsilon(1e-8));
        REQUIRE(m.coefficients.size() == 1);
        CHECK(m.coefficients[0] == doctest::Approx(2.0).epsilon(1e-8));
        CHECK(m.predict(make_row("q", {10.0}, 0, {"x"})) ==
              doctest::Approx(21.0).epsilon(1e-8));
    }
    SUBCASE("constant target gives zero slopes") {
        std::vector<std::vector<double>> xs;
        std::vector<double> ys;
        std::mt19937 rng(3);
        for (int i = 0; i < 10; ++i) {
            xs.push_back({uniform01(rng), uniform01(rng)});
            ys.push_back(2.5);
        }
        FusionModel m = fit_ols(rows_from_xy(xs, ys, {"a", "b"}));
        CHECK(m.intercept == doctest::Approx(2.5).epsilon(1e-8));
        CHECK(m.coefficients[0] == doctest::Approx(0.0).epsilon(1e-8));
        CHECK(m.coefficients[1] == doctest::Approx(0.0).epsilon(1e-8));
    }
    SUBCASE("two features on random design") {
        std::mt19937 rng(5);
        std::vector<std::vector<double>> xs;
        std::vector<double> ys;
        for (int i = 0; i < 20; ++i) {
            double x1 = uniform01(rng) * 4 - 2, x2 = uniform01(rng) * 4 - 2;
            xs.push_back({x1, x2});
            ys.push_back(0.5 + 3.0 * x1 - 1.0 * x2);
        }
        auto rows = rows_from_xy(xs, ys, {"x1", "x2"});
        FusionModel m = fit_ols(rows);
        CHECK(m.intercept == doctest::Approx(0.5).epsilon(1e-6));
        CHECK(m.coefficients[0] == doctest::Approx(3.0).epsilon(1e-6));
        CHECK(m.coefficients[1] == doctest::Approx(-1.0).epsilon(1e-6));

        // residuals of a least-squares fit are orthogonal to each column
        for (std::size_t col = 0; col < 2; ++col) {
            double dot = 0.0, rsum = 0.0;
            for (const auto& r : rows) {
                double res = r.gold - m.predict(r);
                dot += res * r.values[col];
                rsum += res;
            }
            CHECK(dot == doctest::Approx(0.0).epsilon(1e-8));
            CHECK(rsum == doctest::Approx(0.0).epsilon(1e-8));
        }
    }
    SUBCASE("insufficient rows") {
        std::vector<std::vector<double>> xs = {{1.0}, {2.0}};
        std::vector<double> ys = {1.0, 2.0};
        CHECK_THROWS_AS(fit_ols(rows_from_xy(xs, ys, {"x"})), InsufficientDataError);
    }
    SUBCASE("collinear features") {
        std::vector<std::vector<double>> xs;
        std::vector<double> ys;
        std::mt19937 rng(7);
        for (int i = 0; i < 12; ++i) {
            double x = uniform01(rng);
            xs.push_back({x, 2.0 * x}); // second column is a multiple
            ys.push_back(x);
        }
        CHECK_THROWS_AS(fit_ols(rows_from_xy(xs, ys, {"a", "b"})), RankDeficientError);
        // a constant feature duplicates the intercept column
        for (auto& row : xs)
            row[1] = 1.0;
        CHECK_THROWS_AS(fit_ols(rows_from_xy(xs, ys, {"a", "b"})), RankDeficientError);
    }
}

TEST_CASE("leave-one-out cross-validation") {
    SUBCASE("exact linear data predicts perfectly") {
        std::vector<std::vector<double>> xs;
        std::vector<double> ys;
        for (int i = 0; i < 12; ++i) {
            xs.push_back({0.1 * i, 0.3 * i * i});
            ys.push_back(2.0 - 0.1 * i + 0.05 * 0.3 * i * i);
        }
        auto rows = rows_from_xy(xs, ys, {"a", "b"});
        CvResult cv = loo_cv(rows);
        REQUIRE(cv.predictions.size() == rows.size());
        for (std::size_t i = 0; i < rows.size(); ++i)
            CHECK(cv.predictions[i] == doctest::Approx(rows[i].gold).epsilon(1e-8));
        CHECK(cv.pearson_r == doctest::Approx(1.0).epsilon(1e-8));
    }
    SUBCASE("noisy monotone signal keeps a high out-of-sample r") {
        std::mt19937 rng(11);
        std::vector<std::vector<double>> xs;
        std::vector<double> ys;
        for (int i = 0; i < 100; ++i) {
            double x = uniform01(rng) * 10;
            xs.push_back({x});
            ys.push_back(0.4 * x + 0.05 * (uniform01(rng) - 0.5));
        }
        CvResult cv = loo_cv(rows_from_xy(xs, ys, {"x"}));
        CHECK(cv.pearson_r > 0.95);
    }
    SUBCASE("row order does not change the prediction multiset") {
        std::mt19937 rng(13);
        std::vector<std::vector<double>> xs;
        std::vector<double> ys;
        for (int i = 0; i < 15; ++i) {
            xs.push_back({uniform01(rng), uniform01(rng)});
            ys.push_back(uniform01(rng) * 4);
        }
        auto rows = rows_from_xy(xs, ys, {"a", "b"});
        CvResult cv1 = loo_cv(rows);
        std::reverse(rows.begin(), rows.end());
        CvResult cv2 = loo_cv(rows);
        std::reverse(cv2.predictions.begin(), cv2.predictions.end());
        for (std::size_t i = 0; i < rows.size(); ++i)
            CHECK(cv1.predictions[i] == doctest::Approx(cv2.predictions[i]).epsilon(1e-10));
    }
    SUBCASE("needs n at least p + 3") {
        std::vector<std::vector<double>> xs = {{1.0}, {2.0}, {3.0}};
        std::vector<double> ys = {1.0, 2.0, 3.5};
        CHECK_THROWS_AS(loo_cv(rows_from_xy(xs, ys, {"x"})), InsufficientDataError);
    }
}

TEST_CASE("k-fold cross-validation is seed deterministic") {
    std::mt19937 rng(17);
    std::vector<std::vector<double>> xs;
    std::vector<double> ys;
    for (int i = 0; i < 30; ++i) {
        double x = uniform01(rng);
        xs.push_back({x});
        ys.push_back(3.0 * x + 0.1 * (uniform01(rng) - 0.5));
    }
    auto rows = rows_from_xy(xs, ys, {"x"});
    CvResult a = kfold_cv(rows, 5, 42);
    CvResult b = kfold_cv(rows, 5, 42);
    CHECK(a.predictions == b.predictions);
    CvResult c = kfold_cv(rows, 5, 43);
    CHECK(a.predictions != c.predictions);
    CHECK(a.pearson_r > 0.9);
    CHECK_THROWS_AS(kfold_cv(rows, 1, 42), Error);
    CHECK_THROWS_AS(kfold_cv(rows, 31, 42), Error);
}

TEST_CASE("pearson correlation") {
    std::vector<double> x{1, 2, 3, 4}, y{1, 3, 2, 4};
    CHECK(pearson(x, y) == doctest::Approx(0.8).epsilon(1e-12));

    SUBCASE("affine invariance") {
        std::mt19937 rng(23);
        for (int it = 0; it < 20; ++it) {
            std::vector<double> a(9), b(9), a2(9);
            for (int i = 0; i < 9; ++i) {
                a[i] = uniform01(rng) * 5;
                b[i] = uniform01(rng) * 5;
                a2[i] = 3.0 * a[i] + 7.0;
            }
            CHECK(pearson(a2, b) == doctest::Approx(pearson(a, b)).epsilon(1e-12));
            for (int i = 0; i < 9; ++i)
                a2[i] = -2.0 * a[i] + 1.0; // negative scale flips the sign
            CHECK(pearson(a2, b) == doctest::Approx(-pearson(a, b)).epsilon(1e-12));
        }
    }
    SUBCASE("perfect correlation clamps to exactly one") {
        std::vector<double> a{0.1, 0.2, 0.7}, b{1.1, 1.2, 1.7};
        CHECK(pearson(a, b) == doctest::Approx(1.0).epsilon(1e-15));
        CHECK(std::abs(pearson(a, b)) <= 1.0);
    }
    SUBCASE("degenerate inputs") {
        std::vector<double> c{2, 2, 2}, v{1, 2, 3}, one{1}, one2{2};
        CHECK_THROWS_AS(pearson(c, v), ConstantInputError);
        CHECK_THROWS_AS(pearson(v, c), ConstantInputError);
        CHECK_THROWS_AS(pearson(one, one2), Error);
        std::vector<double> short2{1, 2}, long3{1, 2, 3};
        CHECK_THROWS_AS(pearson(short2, long3), DimensionMismatchError);
    }
}

TEST_CASE("average ranks with ties") {
    std::vector<double> x{10, 10, 30};
    CHECK(average_ranks(x) == std::vector<double>{1.5, 1.5, 3.0});
    std::vector<double> y{5, 1, 5, 5};
    CHECK(average_ranks(y) == std::vector<double>{3.0, 1.0, 3.0, 3.0});
    std::vector<double> z{4, 3, 2, 1};
    CHECK(average_ranks(z) == std::vector<double>{4.0, 3.0, 2.0, 1.0});
}

TEST_CASE("spearman correlation") {
    std::vector<double> x{1, 2, 3}, y{10, 10, 30};
    CHECK(spearman(x, y) == doctest::Approx(std::sqrt(3.0) / 2.0).epsilon(1e-12));

    SUBCASE("invariant under strictly monotone transforms") {
        std::mt19937 rng(29);
        std::vector<double> a(15), b(15), bt(15);
        for (int i = 0; i < 15; ++i) {
            a[i] = uniform01(rng);
            b[i] = uniform01(rng);
        }
        double base = spearman(a, b);
        for (int i = 0; i < 15; ++i)
            bt[i] = std::exp(3.0 * b[i]) + 10.0;
        CHECK(spearman(a, bt) == doctest::Approx(base).epsilon(1e-12));
        for (int i = 0; i < 15; ++i)
            bt[i] = std::pow(b[i], 3);
        CHECK(spearman(a, bt) == doctest::Approx(base).epsilon(1e-12));
    }
    SUBCASE("monotone sequences hit the bounds") {
        std::vector<double> inc{1, 4, 9, 16}, dec{5, 3, 2, 0};
        CHECK(spearman(inc, dec) == doctest::Approx(-1.0).epsilon(1e-12));
        std::vector<double> sq{1, 2, 3, 4};
        CHECK(spearman(inc, sq) == doctest::Approx(1.0).epsilon(1e-12));
    }
}

TEST_CASE("contradiction report means and error context") {
    std::vector<ContradictionSet> sets(2);
    sets[0].label = "similar";
    for (int i = 0; i < 3; ++i)
        sets[0].pairs.push_back({"s" + std::to_string(i), "a", "b"});
    sets[1].label = "negation";
    for (int i = 0; i < 2; ++i)
        sets[1].pairs.push_back({"n" + std::to_string(i), "a", "b"});

    auto reports = contradiction_report(sets, [](const ContradictionPair& p) {
        return p.pair_id[0] == 's' ? 0.8 : 0.2;
    });
    REQUIRE(reports.size() == 2);
    CHECK(reports[0].label == "similar");
    CHECK(reports[0].n == 3);
    CHECK(reports[0].mean == doctest::Approx(0.8));
    CHECK(reports[1].n == 2);
    CHECK(reports[1].mean == doctest::Approx(0.2));

    CHECK_THROWS_WITH_AS(
        contradiction_report(sets,
                             [](const ContradictionPair& p) -> double {
                                 if (p.pair_id == "n1")
                                     throw DegenerateInputError("empty");
                                 return 0.5;
                             }),
        doctest::Contains("n1"), Error);
}
