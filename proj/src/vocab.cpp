#include "semsim/vocab.hpp"

#include <algorithm>
#include <cmath>

namespace semsim {

Vocabulary::Vocabulary(std::vector<WordEntry> words, std::uint64_t total_tokens,
                       std::uint64_t min_count)
    : words_(std::move(words)), total_tokens_(total_tokens), min_count_(min_count) {
    index_.reserve(words_.size());
    for (std::size_t i = 0; i < words_.size(); ++i) {
        index_.emplace(words_[i].token, static_cast<std::int32_t>(i));
        retained_tokens_ += words_[i].count;
    }
}

std::int32_t Vocabulary::id_of(std::string_view token) const {
    auto it = index_.find(std::string(token));
    return it == index_.end() ? -1 : it->second;
}

void VocabularyBuilder::add(const SentenceLine& line) {
    for (const std::string& tok : line)
        add_token(tok);
}

void VocabularyBuilder::add_token(std::string_view token) {
    ++counts_[std::string(token)];
    ++total_;
}

void VocabularyBuilder::merge(const VocabularyBuilder& other) {
    for (const auto& [token, count] : other.counts_)
        counts_[token] += count;
    total_ += other.total_;
}

Vocabulary VocabularyBuilder::finish(std::uint64_t min_count) const {
    std::vector<WordEntry> words;
    for (const auto& [token, count] : counts_)
        if (count >= min_count)
            words.push_back({token, count});
    if (words.empty())
        throw EmptyVocabularyError("no token occurs at least " + std::to_string(min_count) +
                                   " times");
    std::sort(words.begin(), words.end(), [](const WordEntry& a, const WordEntry& b) {
        if (a.count != b.count)
            return a.count > b.count;
        return a.token < b.token;
    });
    return Vocabulary(std::move(words), total_, min_count);
}

Vocabulary build_vocab(const std::vector<SentenceLine>& corpus, std::uint64_t min_count) {
    VocabularyBuilder builder;
    for (const SentenceLine& line : corpus)
        builder.add(line);
    return builder.finish(min_count);
}

Vocabulary build_vocab_from_file(const std::string& corpus_path, std::uint64_t min_count) {
    VocabularyBuilder builder;
    for_each_corpus_line(corpus_path, [&](const SentenceLine& line) { builder.add(line); });
    return builder.finish(min_count);
}

double discard_probability(double word_freq, double sample_t) {
    double p = 1.0 - std::sqrt(sample_t / word_freq);
    return p > 0.0 ? p : 0.0;
}

std::uint32_t fnv1a32(std::string_view data) {
    std::uint32_t h = 2166136261u;
    for (char c : data) {
        h ^= static_cast<unsigned char>(c);
        h *= 16777619u;
    }
    return h;
}

namespace {

// Starting byte of a UTF-8 code point (not a continuation byte).
bool is_utf8_lead(unsigned char c) {
    return (c & 0xC0) != 0x80;
}

// Byte offsets of code point boundaries, including the end position.
std::vector<std::size_t> utf8_boundaries(std::string_view s) {
    std::vector<std::size_t> bounds;
    for (std::size_t i = 0; i < s.size(); ++i)
        if (is_utf8_lead(static_cast<unsigned char>(s[i])))
            bounds.push_back(i);
    bounds.push_back(s.size());
    return bounds;
}

} // namespace

std::vector<std::uint32_t> subword_ngrams(std::string_view word, std::uint32_t minn,
                                          std::uint32_t maxn, std::uint64_t bucket) {
    std::string wrapped;
    wrapped.reserve(word.size() + 2);
    wrapped.push_back('<');
    wrapped += word;
    wrapped.push_back('>');

    const std::vector<std::size_t> bounds = utf8_boundaries(wrapped);
    const std::size_t n_chars = bounds.size() - 1;

    std::vector<std::uint32_t> ids;
    if (n_chars < minn)
        return ids;
    const bool whole_is_only_candidate = n_chars == minn;
    for (std::size_t start = 0; start < n_chars; ++start) {
        for (std::uint32_t len = minn; len <= maxn && start + len <= n_chars; ++len) {
            if (len == n_chars && !whole_is_only_candidate)
                continue; // the word id already stands for the whole word
            std::string_view gram(wrapped.data() + bounds[start], bounds[start + len] - bounds[start]);
            ids.push_back(static_cast<std::uint32_t>(fnv1a32(gram) % bucket));
        }
    }
    return ids;
}

std::vector<std::uint32_t> word_ngrams(const SentenceLine& tokens, std::uint32_t max_order,
                                       std::uint64_t bucket) {
    std::vector<std::uint32_t> ids;
    if (max_order < 2 || tokens.size() < 2)
        return ids;
    std::string joined;
    for (std::size_t start = 0; start < tokens.size(); ++start) {
        joined = tokens[start];
        for (std::uint32_t k = 2; k <= max_order && start + k <= tokens.size(); ++k) {
            joined.push_back(' ');
            joined += tokens[start + k - 1];
            ids.push_back(static_cast<std::uint32_t>(fnv1a32(joined) % bucket));
        }
    }
    return ids;
}

NegativeSampler::NegativeSampler(const Vocabulary& vocab, double alpha) {
    if (vocab.empty())
        throw EmptyVocabularyError("negative sampler needs a nonempty vocabulary");
    cumulative_.reserve(vocab.size());
    double sum = 0.0;
    for (const WordEntry& w : vocab.words()) {
        sum += std::pow(static_cast<double>(w.count), alpha);
        cumulative_.push_back(sum);
    }
}

std::int32_t NegativeSampler::sample(std::mt19937& rng) const {
    double u = uniform01(rng) * cumulative_.back();
    auto it = std::upper_bound(cumulative_.begin(), cumulative_.end(), u);
    if (it == cumulative_.end())
        --it;
    return static_cast<std::int32_t>(it - cumulative_.begin());
}

} // namespace semsim
