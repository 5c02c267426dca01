#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "semsim/metrics.hpp"
#include "semsim/vocab.hpp"

using namespace semsim;

namespace {

// Brute-force Jaccard: explicit set construction, no hashing shortcuts.
double ref_jaccard(const std::vector<std::string>& a, const std::vector<std::string>& b) {
    std::set<std::string> sa(a.begin(), a.end()), sb(b.begin(), b.end());
    std::size_t inter = 0;
    for (const auto& t : sa)
        inter += sb.count(t);
    std::set<std::string> uni = sa;
    uni.insert(sb.begin(), sb.end());
    return static_cast<double>(inter) / static_cast<double>(uni.size());
}

// Brute-force directional q-gram overlap via explicit multisets.
double ref_qgram_dir(const std::string& a, const std::string& b, std::size_t q) {
    auto grams = [&](const std::string& s) {
        std::multiset<std::string> g;
        if (s.size() >= q)
            for (std::size_t i = 0; i + q <= s.size(); ++i)
                g.insert(s.substr(i, q));
        return g;
    };
    std::multiset<std::string> ga = grams(a), gb = grams(b);
    std::size_t inter = 0;
    for (auto it = ga.begin(); it != ga.end(); it = ga.upper_bound(*it))
        inter += std::min(ga.count(*it), gb.count(*it));
    return static_cast<double>(inter) / static_cast<double>(ga.size());
}

std::vector<std::string> random_tokens(std::mt19937& rng, std::size_t max_len) {
    std::vector<std::string> out(rng() % (max_len + 1));
    for (auto& t : out)
        t = std::string(1, static_cast<char>('a' + rng() % 6));
    return out;
}

} // namespace

TEST_CASE("jaccard on worked examples") {
    CHECK(jaccard({"a", "b", "c"}, {"a", "b", "c"}) == doctest::Approx(1.0));
    CHECK(jaccard({"a", "b"}, {"c", "d"}) == doctest::Approx(0.0));
    CHECK(jaccard({"a", "b", "c"}, {"b", "c", "d"}) == doctest::Approx(0.5));
    // duplicates collapse before comparison
    CHECK(jaccard({"a", "a", "b"}, {"a", "b", "b"}) == doctest::Approx(1.0));
    CHECK(jaccard({"a"}, {}) == doctest::Approx(0.0));
    CHECK_THROWS_AS(jaccard({}, {}), DegenerateInputError);
}

TEST_CASE("jaccard matches a set-theoretic oracle on random inputs") {
    std::mt19937 rng(101);
    int compared = 0;
    for (int it = 0; it < 1000; ++it) {
        auto a = random_tokens(rng, 10);
        auto b = random_tokens(rng, 10);
        if (a.empty() && b.empty())
            continue;
        CHECK(jaccard(a, b) == ref_jaccard(a, b)); // exact: same integer ratio
        ++compared;
    }
    CHECK(compared > 900);
}

TEST_CASE("adding a shared token never lowers jaccard") {
    std::mt19937 rng(7);
    for (int it = 0; it < 200; ++it) {
        auto a = random_tokens(rng, 8);
        auto b = random_tokens(rng, 8);
        if (a.empty() || b.empty())
            continue;
        double before = jaccard(a, b);
        std::string shared = "zz" + std::to_string(it);
        a.push_back(shared);
        b.push_back(shared);
        CHECK(jaccard(a, b) >= before - 1e-15);
    }
}

TEST_CASE("q-gram overlap on worked examples") {
    CHECK(qgram_similarity("abcd", "abcd") == doctest::Approx(1.0));
    // "abcde" vs "abcdf": trigrams {abc,bcd,cde} vs {abc,bcd,cdf}
    CHECK(qgram_directional("abcde", "abcdf", 3) == doctest::Approx(2.0 / 3.0));
    CHECK(qgram_directional("abcdf", "abcde", 3) == doctest::Approx(2.0 / 3.0));
    CHECK(qgram_similarity("abcde", "abcdf") == doctest::Approx(2.0 / 3.0));
    CHECK(qgram_similarity("abcdef", "uvwxyz") == doctest::Approx(0.0));
    // asymmetric lengths: symmetric mode averages the two directions
    double d1 = qgram_directional("abcdef", "abc", 3);
    double d2 = qgram_directional("abc", "abcdef", 3);
    CHECK(qgram_similarity("abcdef", "abc") == doctest::Approx(0.5 * (d1 + d2)));
    CHECK(qgram_similarity("abcdef", "abc", 3, false) == doctest::Approx(d1));
    // a string shorter than q yields no grams on the reference side
    CHECK_THROWS_AS(qgram_directional("ab", "abcdef", 3), DegenerateInputError);
    CHECK(qgram_directional("abcdef", "ab", 3) == doctest::Approx(0.0));
}

TEST_CASE("directional q-gram matches a multiset oracle on random strings") {
    std::mt19937 rng(202);
    int compared = 0;
    for (int it = 0; it < 1000; ++it) {
        std::size_t q = 1 + rng() % 4;
        auto make = [&] {
            std::string s(rng() % 12, ' ');
            for (char& c : s)
                c = static_cast<char>('a' + rng() % 4);
            return s;
        };
        std::string a = make(), b = make();
        if (a.size() < q)
            continue;
        CHECK(qgram_directional(a, b, q) == ref_qgram_dir(a, b, q));
        ++compared;
    }
    CHECK(compared > 700);
}

TEST_CASE("cosine on worked examples") {
    std::vector<float> e1{1, 0}, e2{0, 1}, v{1, 2, 3}, w{2, 4, 6}, d{1, 1}, u{1, 0};
    CHECK(cosine(std::span<const float>(e1), std::span<const float>(e2)) ==
          doctest::Approx(0.0).epsilon(1e-6));
    CHECK(cosine(std::span<const float>(v), std::span<const float>(w)) ==
          doctest::Approx(1.0).epsilon(1e-6));
    CHECK(cosine(std::span<const float>(d), std::span<const float>(u)) ==
          doctest::Approx(1.0 / std::sqrt(2.0)).epsilon(1e-6));

    std::vector<float> neg{-1, -2, -3};
    CHECK(cosine(std::span<const float>(v), std::span<const float>(neg)) ==
          doctest::Approx(-1.0).epsilon(1e-6));
}

TEST_CASE("cosine is scale invariant and clamped") {
    std::mt19937 rng(55);
    for (int it = 0; it < 200; ++it) {
        std::vector<double> a(6), b(6);
        for (int j = 0; j < 6; ++j) {
            a[j] = uniform01(rng) * 2 - 1;
            b[j] = uniform01(rng) * 2 - 1;
        }
        double base = cosine(std::span<const double>(a), std::span<const double>(b));
        CHECK(base >= -1.0);
        CHECK(base <= 1.0);
        std::vector<double> a3(a);
        for (double& x : a3)
            x *= 3.0;
        CHECK(cosine(std::span<const double>(a3), std::span<const double>(b)) ==
              doctest::Approx(base).epsilon(1e-12));
        // self-similarity of any nonzero vector is exactly 1 after clamping
        CHECK(cosine(std::span<const double>(a), std::span<const double>(a)) ==
              doctest::Approx(1.0).epsilon(1e-12));
    }
}

TEST_CASE("cosine rejects zero vectors and mismatched dimensions") {
    std::vector<float> z{0, 0}, x{1, 2}, y3{1, 2, 3};
    CHECK_THROWS_AS(cosine(std::span<const float>(z), std::span<const float>(x)),
                    ZeroVectorError);
    CHECK_THROWS_AS(cosine(std::span<const float>(x), std::span<const float>(z)),
                    ZeroVectorError);
    CHECK_THROWS_AS(cosine(std::span<const float>(x), std::span<const float>(y3)),
                    DimensionMismatchError);
}
