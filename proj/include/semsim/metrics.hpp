#pragma once

#include <cmath>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>

#include "semsim/corpus.hpp"
#include "semsim/error.hpp"

namespace semsim {

// |unique(a) n unique(b)| / |unique(a) u unique(b)|.  Both-empty is an
// error (0/0), not 1: callers must filter degenerate sentences.
double jaccard(const SentenceLine& a, const SentenceLine& b);

// Character q-gram multiset of a string; counts occurrences per q-gram.
std::unordered_map<std::string, std::uint32_t> qgram_profile(std::string_view s, std::size_t q);

// Directional: |profile intersection| / |q-grams of a|.  Symmetric mode
// (the default elsewhere) averages both directions.
double qgram_directional(std::string_view a, std::string_view b, std::size_t q);
double qgram_similarity(std::string_view a, std::string_view b, std::size_t q = 3,
                        bool symmetric = true);

// u.v / (|u||v|), accumulated in double, clamped to [-1,1] against
// rounding overshoot.
template <typename T> double cosine(std::span<const T> u, std::span<const T> v) {
    if (u.size() != v.size())
        throw DimensionMismatchError("cosine: vectors of width " + std::to_string(u.size()) +
                                     " and " + std::to_string(v.size()));
    double dot = 0.0, nu = 0.0, nv = 0.0;
    for (std::size_t i = 0; i < u.size(); ++i) {
        double a = static_cast<double>(u[i]);
        double b = static_cast<double>(v[i]);
        dot += a * b;
        nu += a * a;
        nv += b * b;
    }
    if (nu == 0.0 || nv == 0.0)
        throw ZeroVectorError("cosine is undefined for a zero vector");
    double c = dot / (std::sqrt(nu) * std::sqrt(nv));
    return c < -1.0 ? -1.0 : (c > 1.0 ? 1.0 : c);
}

inline double cosine(std::span<const float> u, std::span<const float> v) {
    return cosine<float>(u, v);
}

} // namespace semsim
