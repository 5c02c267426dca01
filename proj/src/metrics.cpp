#include "semsim/metrics.hpp"

#include <unordered_set>

namespace semsim {

double jaccard(const SentenceLine& a, const SentenceLine& b) {
    std::unordered_set<std::string_view> sa(a.begin(), a.end());
    std::unordered_set<std::string_view> sb(b.begin(), b.end());
    if (sa.empty() && sb.empty())
        throw DegenerateInputError("jaccard of two empty token sets is undefined");
    std::size_t shared = 0;
    for (std::string_view tok : sa)
        shared += sb.count(tok);
    std::size_t unioned = sa.size() + sb.size() - shared;
    return static_cast<double>(shared) / static_cast<double>(unioned);
}

std::unordered_map<std::string, std::uint32_t> qgram_profile(std::string_view s, std::size_t q) {
    std::unordered_map<std::string, std::uint32_t> profile;
    if (q == 0 || s.size() < q)
        return profile;
    for (std::size_t i = 0; i + q <= s.size(); ++i)
        ++profile[std::string(s.substr(i, q))];
    return profile;
}

double qgram_directional(std::string_view a, std::string_view b, std::size_t q) {
    if (q == 0)
        throw RangeError("q-gram length must be >= 1");
    auto pa = qgram_profile(a, q);
    if (pa.empty())
        throw DegenerateInputError("first string yields no q-grams (length " +
                                   std::to_string(a.size()) + " < q = " + std::to_string(q) + ")");
    auto pb = qgram_profile(b, q);
    std::uint64_t shared = 0, total = 0;
    for (const auto& [gram, count] : pa) {
        total += count;
        auto it = pb.find(gram);
        if (it != pb.end())
            shared += std::min(count, it->second);
    }
    return static_cast<double>(shared) / static_cast<double>(total);
}

double qgram_similarity(std::string_view a, std::string_view b, std::size_t q, bool symmetric) {
    if (!symmetric)
        return qgram_directional(a, b, q);
    return 0.5 * (qgram_directional(a, b, q) + qgram_directional(b, a, q));
}

} // namespace semsim
