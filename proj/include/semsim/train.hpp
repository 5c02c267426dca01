#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "semsim/model.hpp"

namespace semsim {

template <typename T> inline T sigmoid(T x) {
    return static_cast<T>(1) / (static_cast<T>(1) + std::exp(-x));
}

// One negative-sampling SGD step: the input vector against one positive and
// k negative output vectors.
//
//   loss = -log sigmoid(pos . input) - sum_neg log sigmoid(-neg . input)
//
// Output vectors are updated in place unless update_outputs is false (used
// by paragraph-vector inference, which freezes every shared table). When
// input_grad is empty the input vector is updated in place as well;
// otherwise the input stays untouched and -lr * dloss/dinput is accumulated
// into input_grad, letting callers distribute the step across the rows an
// averaged input was composed from. Returns the pre-update loss. Throws
// NonFiniteValueError when a dot product leaves the finite range.
template <typename T>
double ns_step(std::span<T> input, std::span<T> positive, std::span<const std::span<T>> negatives,
               T lr, std::span<T> input_grad = {}, bool update_outputs = true) {
    const std::size_t dim = input.size();
    if (positive.size() != dim)
        throw DimensionMismatchError("ns_step: positive width mismatch");
    const bool accumulate = !input_grad.empty();
    if (accumulate && input_grad.size() != dim)
        throw DimensionMismatchError("ns_step: gradient buffer width mismatch");

    thread_local std::vector<double> grad_buf;
    grad_buf.assign(dim, 0.0);

    double loss = 0.0;
    auto step_output = [&](std::span<T> out, double label) {
        double f = 0.0;
        for (std::size_t j = 0; j < dim; ++j)
            f += static_cast<double>(out[j]) * static_cast<double>(input[j]);
        if (!std::isfinite(f))
            throw NonFiniteValueError("ns_step: non-finite dot product, lower the learning rate");
        double s = sigmoid(f);
        loss += label > 0.5 ? -std::log(s > 0 ? s : 1e-300) : -std::log(1.0 - s > 0 ? 1.0 - s : 1e-300);
        double g = (label - s) * static_cast<double>(lr);
        for (std::size_t j = 0; j < dim; ++j) {
            grad_buf[j] += g * static_cast<double>(out[j]);
            if (update_outputs)
                out[j] += static_cast<T>(g * static_cast<double>(input[j]));
        }
    };

    step_output(positive, 1.0);
    for (std::span<T> neg : negatives)
        step_output(neg, 0.0);

    if (accumulate) {
        for (std::size_t j = 0; j < dim; ++j)
            input_grad[j] += static_cast<T>(grad_buf[j]);
    } else {
        for (std::size_t j = 0; j < dim; ++j)
            input[j] += static_cast<T>(grad_buf[j]);
    }
    return loss;
}

// Linear decay from lr0 at done=0 to lr_min at done=total, clamped below.
double lr_at(double lr0, double lr_min, std::uint64_t done, std::uint64_t total);

// Context positions for one skip-gram pass over a sentence: (center,
// context) index pairs with a per-center window drawn uniformly from
// 1..window (or pinned at window in fixed mode).
std::vector<std::pair<std::size_t, std::size_t>>
skipgram_pairs(std::size_t len, std::uint32_t window, bool fixed, std::mt19937& rng);

struct TrainStats {
    std::vector<double> epoch_mean_loss; // mean ns_step loss per epoch
    std::uint64_t steps = 0;             // total ns_step invocations
    std::uint64_t n_paragraphs = 0;      // corpus line count
};

// Freshly initialized model: input (and paragraph) rows uniform in
// [-0.5/dim, 0.5/dim] from a generator seeded with config.seed, output rows
// zero. Fully determined by (seed, vocab, config).
EmbeddingModel initialize_model(const TrainConfig& config, Vocabulary vocab,
                                std::uint64_t n_paragraphs);

// Trains any of the five objectives on a one-sentence-per-line corpus file.
// Multi-worker runs use lock-free shared table updates; bitwise
// reproducibility is guaranteed at workers = 1 only.
EmbeddingModel train_model(const std::string& corpus_path, Vocabulary vocab,
                           const TrainConfig& config, TrainStats* stats = nullptr);

EmbeddingModel train_cbow(const std::string& corpus_path, Vocabulary vocab,
                          const TrainConfig& config, TrainStats* stats = nullptr);
EmbeddingModel train_skipgram(const std::string& corpus_path, Vocabulary vocab,
                              const TrainConfig& config, TrainStats* stats = nullptr);

} // namespace semsim
