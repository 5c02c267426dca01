#pragma once

#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

#include "semsim/error.hpp"
#include "semsim/vocab.hpp"

namespace semsim {

enum class Algo : std::uint8_t { cbow = 0, skipgram = 1, sent2vec = 2, pv_dm = 3, pv_dbow = 4 };
enum class PvCombine : std::uint8_t { mean = 0, concat = 1 };

std::string_view algo_name(Algo algo);
Algo algo_from_name(std::string_view name); // throws Error on unknown name

struct TrainConfig {
    Algo algo = Algo::cbow;
    std::uint32_t dim = 100;
    std::uint32_t window = 5;
    std::uint32_t epochs = 5;
    double lr0 = 0.05;
    double lr_min = -1.0; // < 0 resolves to 1e-4 * lr0
    std::uint32_t negatives = 5;
    std::uint32_t min_count = 5;
    double sample_t = 1e-4; // 0 disables frequent-word subsampling
    std::uint32_t word_ngrams = 1; // sent2vec; 1 = unigrams only
    std::uint32_t dropout_k = 0;   // sent2vec n-gram dropout per step
    std::uint64_t bucket = 2000000;
    std::uint32_t minn = 3; // cbow/skipgram subwords; 0 disables
    std::uint32_t maxn = 6;
    PvCombine pv_combine = PvCombine::mean;
    double neg_alpha = 0.75;
    std::uint64_t seed = 1;
    std::uint32_t workers = 1;
    // Pins the dynamic context window at its maximum, making the set of
    // training pairs enumerable for tests.
    bool fixed_window = false;

    void validate() const; // throws Error on an invariant breach
    double resolved_lr_min() const { return lr_min < 0.0 ? 1e-4 * lr0 : lr_min; }

    bool uses_subwords() const {
        return (algo == Algo::cbow || algo == Algo::skipgram) && minn >= 1 && maxn >= minn;
    }
    bool uses_word_ngrams() const { return algo == Algo::sent2vec && word_ngrams >= 2; }
    bool uses_hashed_features() const { return uses_subwords() || uses_word_ngrams(); }
    bool is_paragraph_model() const { return algo == Algo::pv_dm || algo == Algo::pv_dbow; }

    // Width of the output rows; equals dim except for PV-DM with
    // concatenation, where the projection spans window word slots plus the
    // paragraph slot.
    std::uint32_t projection_width() const {
        if (algo == Algo::pv_dm && pv_combine == PvCombine::concat)
            return (window + 1) * dim;
        return dim;
    }
};

// Trained vector tables plus everything needed to reproduce or reuse them.
// input holds word rows first, then hashed-feature rows when the model has
// a subword or word-n-gram space. paragraphs holds one row per training
// sentence for PV variants.
struct EmbeddingModel {
    TrainConfig config;
    Vocabulary vocab;
    std::vector<float> input;      // input_rows() x dim
    std::vector<float> output;     // V x projection_width
    std::vector<float> paragraphs; // n_paragraphs x dim
    std::uint64_t n_paragraphs = 0;

    std::size_t input_rows() const {
        return vocab.size() + (config.uses_hashed_features() ? config.bucket : 0);
    }

    std::span<float> input_row(std::size_t i) {
        return std::span<float>(input.data() + i * config.dim, config.dim);
    }
    std::span<const float> input_row(std::size_t i) const {
        return std::span<const float>(input.data() + i * config.dim, config.dim);
    }
    std::span<float> output_row(std::size_t i) {
        std::size_t w = config.projection_width();
        return std::span<float>(output.data() + i * w, w);
    }
    std::span<const float> output_row(std::size_t i) const {
        std::size_t w = config.projection_width();
        return std::span<const float>(output.data() + i * w, w);
    }
    std::span<float> paragraph_row(std::size_t i) {
        return std::span<float>(paragraphs.data() + i * config.dim, config.dim);
    }
    std::span<const float> paragraph_row(std::size_t i) const {
        return std::span<const float>(paragraphs.data() + i * config.dim, config.dim);
    }

    // Row index of a hashed feature id inside the input table.
    std::size_t feature_row(std::uint32_t feature_id) const { return vocab.size() + feature_id; }
};

} // namespace semsim
