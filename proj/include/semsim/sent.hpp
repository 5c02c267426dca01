#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "semsim/model.hpp"
#include "semsim/train.hpp"

namespace semsim {

enum class PoolMode : std::uint8_t { min = 0, max = 1, sum = 2, avg = 3 };

std::string_view pool_mode_name(PoolMode mode);
PoolMode pool_mode_from_name(std::string_view name);

enum class SentenceSource : std::uint8_t { pooled = 0, sent2vec = 1, pv_dm = 2, pv_dbow = 3 };

struct SentenceVector {
    std::vector<float> values;
    SentenceSource source = SentenceSource::pooled;
};

// Composed input vector of one token: the word's input row averaged with its
// subword rows when the model has a subword space; out-of-vocabulary tokens
// compose from subwords alone. Returns false when the token has no
// representation at all (then `out` is untouched).
bool compose_word_vector(const EmbeddingModel& model, std::string_view token,
                         std::span<float> out);

// Componentwise min/max/sum/mean over the composed vectors of all
// representable tokens. Throws NoRepresentableTokenError when none is.
SentenceVector pool_sentence(const EmbeddingModel& model, const SentenceLine& line, PoolMode mode);

// Mean of the input rows of all representable tokens plus the rows of their
// word n-gram features (no dropout at inference).
SentenceVector embed_sent2vec(const EmbeddingModel& model, const SentenceLine& line);

// Optimizes a fresh seeded paragraph vector against the frozen model for
// infer_epochs passes over the sentence; infer_epochs = 0 returns the raw
// initialization.
SentenceVector infer_pv(const EmbeddingModel& model, const SentenceLine& line,
                        std::uint32_t infer_epochs, std::uint64_t seed);

// Algorithm-appropriate sentence vector: pooling for word models (cbow,
// skipgram), compositional embedding for sent2vec, inference for the
// paragraph models (2 x training epochs, model seed).
SentenceVector embed_sentence(const EmbeddingModel& model, const SentenceLine& line,
                              PoolMode mode = PoolMode::avg);

EmbeddingModel train_sent2vec(const std::string& corpus_path, Vocabulary vocab,
                              const TrainConfig& config, TrainStats* stats = nullptr);
EmbeddingModel train_pv(const std::string& corpus_path, Vocabulary vocab,
                        const TrainConfig& config, TrainStats* stats = nullptr);

} // namespace semsim
