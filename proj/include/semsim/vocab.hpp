#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "semsim/corpus.hpp"
#include "semsim/error.hpp"

namespace semsim {

struct WordEntry {
    std::string token;
    std::uint64_t count = 0;
};

// Word inventory with dense ids ordered by descending count (ties broken
// lexicographically), built once and immutable afterwards.
class Vocabulary {
  public:
    Vocabulary() = default;
    Vocabulary(std::vector<WordEntry> words, std::uint64_t total_tokens, std::uint64_t min_count);

    std::int32_t id_of(std::string_view token) const; // -1 when absent
    const WordEntry& word(std::int32_t id) const { return words_[static_cast<std::size_t>(id)]; }
    std::size_t size() const { return words_.size(); }
    bool empty() const { return words_.empty(); }

    // Every corpus token seen during the count pass, dropped ones included.
    std::uint64_t total_tokens() const { return total_tokens_; }
    // Occurrences covered by retained words; the unit of training progress.
    std::uint64_t retained_tokens() const { return retained_tokens_; }
    std::uint64_t min_count() const { return min_count_; }

    double frequency(std::int32_t id) const {
        return static_cast<double>(words_[static_cast<std::size_t>(id)].count) /
               static_cast<double>(total_tokens_);
    }

    const std::vector<WordEntry>& words() const { return words_; }

  private:
    std::vector<WordEntry> words_;
    std::unordered_map<std::string, std::int32_t> index_;
    std::uint64_t total_tokens_ = 0;
    std::uint64_t retained_tokens_ = 0;
    std::uint64_t min_count_ = 1;
};

// Token counting with associative merge; the finished vocabulary is
// independent of how lines were partitioned across builders.
class VocabularyBuilder {
  public:
    void add(const SentenceLine& line);
    void add_token(std::string_view token);
    void merge(const VocabularyBuilder& other);
    // Throws EmptyVocabularyError when nothing reaches min_count.
    Vocabulary finish(std::uint64_t min_count) const;

  private:
    std::unordered_map<std::string, std::uint64_t> counts_;
    std::uint64_t total_ = 0;
};

Vocabulary build_vocab(const std::vector<SentenceLine>& corpus, std::uint64_t min_count);
Vocabulary build_vocab_from_file(const std::string& corpus_path, std::uint64_t min_count);

// p(discard) = max(0, 1 - sqrt(t/f)) for a word of corpus frequency f.
double discard_probability(double word_freq, double sample_t);

std::uint32_t fnv1a32(std::string_view data);

// Character n-grams of the boundary-wrapped word `<word>`, lengths
// minn..maxn, hashed into [0, bucket). Counted per occurrence, in position
// order. The n-gram equal to the whole wrapped word is skipped unless it is
// the only candidate, so every word keeps at least one feature when its
// wrapped form reaches minn characters.
std::vector<std::uint32_t> subword_ngrams(std::string_view word, std::uint32_t minn,
                                          std::uint32_t maxn, std::uint64_t bucket);

// Hashed ids of all contiguous token k-grams, k = 2..max_order. Callers
// pass retained-vocabulary tokens only.
std::vector<std::uint32_t> word_ngrams(const SentenceLine& tokens, std::uint32_t max_order,
                                       std::uint64_t bucket);

// Draws word ids with probability proportional to count^alpha via a
// cumulative table. Immutable after construction.
class NegativeSampler {
  public:
    NegativeSampler(const Vocabulary& vocab, double alpha);

    std::int32_t sample(std::mt19937& rng) const;

  private:
    std::vector<double> cumulative_;
};

// Uniform in [0, 1) from the generator's 32-bit output.
inline double uniform01(std::mt19937& rng) {
    return static_cast<double>(rng()) * (1.0 / 4294967296.0);
}

} // namespace semsim
