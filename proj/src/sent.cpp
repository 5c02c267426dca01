#include "semsim/sent.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace semsim {

std::string_view pool_mode_name(PoolMode mode) {
    switch (mode) {
    case PoolMode::min:
        return "min";
    case PoolMode::max:
        return "max";
    case PoolMode::sum:
        return "sum";
    case PoolMode::avg:
        return "avg";
    }
    return "?";
}

PoolMode pool_mode_from_name(std::string_view name) {
    if (name == "min")
        return PoolMode::min;
    if (name == "max")
        return PoolMode::max;
    if (name == "sum")
        return PoolMode::sum;
    if (name == "avg")
        return PoolMode::avg;
    throw Error("unknown pooling mode '" + std::string(name) + "' (valid: min, max, sum, avg)");
}

bool compose_word_vector(const EmbeddingModel& model, std::string_view token,
                         std::span<float> out) {
    const TrainConfig& cfg = model.config;
    const std::size_t dim = cfg.dim;
    if (out.size() != dim)
        throw DimensionMismatchError("compose_word_vector: output buffer width mismatch");
    const std::int32_t id = model.vocab.id_of(token);
    const bool subwords = cfg.uses_subwords();
    if (id < 0 && !subwords)
        return false;

    std::size_t n_rows = 0;
    std::fill(out.begin(), out.end(), 0.0f);
    auto add_row = [&](std::size_t row) {
        auto r = model.input_row(row);
        for (std::size_t j = 0; j < dim; ++j)
            out[j] += r[j];
        ++n_rows;
    };
    if (id >= 0)
        add_row(static_cast<std::size_t>(id));
    if (subwords)
        for (std::uint32_t fid : subword_ngrams(token, cfg.minn, cfg.maxn, cfg.bucket))
            add_row(model.feature_row(fid));
    if (n_rows == 0)
        return false;
    const float inv = 1.0f / static_cast<float>(n_rows);
    for (std::size_t j = 0; j < dim; ++j)
        out[j] *= inv;
    return true;
}

SentenceVector pool_sentence(const EmbeddingModel& model, const SentenceLine& line,
                             PoolMode mode) {
    const std::size_t dim = model.config.dim;
    std::vector<float> word(dim);
    std::vector<float> acc;
    std::size_t n = 0;
    for (const std::string& token : line) {
        if (!compose_word_vector(model, token, word))
            continue;
        if (n == 0) {
            acc = word;
        } else {
            switch (mode) {
            case PoolMode::min:
                for (std::size_t j = 0; j < dim; ++j)
                    acc[j] = std::min(acc[j], word[j]);
                break;
            case PoolMode::max:
                for (std::size_t j = 0; j < dim; ++j)
                    acc[j] = std::max(acc[j], word[j]);
                break;
            case PoolMode::sum:
            case PoolMode::avg:
                for (std::size_t j = 0; j < dim; ++j)
                    acc[j] += word[j];
                break;
            }
        }
        ++n;
    }
    if (n == 0)
        throw NoRepresentableTokenError("no token of the sentence is representable by the model");
    if (mode == PoolMode::avg)
        for (float& v : acc)
            v /= static_cast<float>(n);
    return SentenceVector{std::move(acc), SentenceSource::pooled};
}

SentenceVector embed_sent2vec(const EmbeddingModel& model, const SentenceLine& line) {
    if (model.config.algo != Algo::sent2vec)
        throw Error("embed_sent2vec: model was not trained with sent2vec");
    const TrainConfig& cfg = model.config;
    const std::size_t dim = cfg.dim;

    SentenceLine kept;
    std::vector<std::size_t> rows;
    for (const std::string& token : line) {
        std::int32_t id = model.vocab.id_of(token);
        if (id < 0)
            continue;
        kept.push_back(token);
        rows.push_back(static_cast<std::size_t>(id));
    }
    if (rows.empty())
        throw NoRepresentableTokenError("no token of the sentence is representable by the model");
    if (cfg.uses_word_ngrams())
        for (std::uint32_t fid : word_ngrams(kept, cfg.word_ngrams, cfg.bucket))
            rows.push_back(model.feature_row(fid));

    std::vector<float> acc(dim, 0.0f);
    for (std::size_t row : rows) {
        auto r = model.input_row(row);
        for (std::size_t j = 0; j < dim; ++j)
            acc[j] += r[j];
    }
    const float inv = 1.0f / static_cast<float>(rows.size());
    for (float& v : acc)
        v *= inv;
    return SentenceVector{std::move(acc), SentenceSource::sent2vec};
}

namespace {

// The shared tables are frozen during inference; ns_step receives them
// through non-const spans but never writes (update_outputs = false).
std::span<float> frozen_row(const EmbeddingModel& model, std::size_t i) {
    auto row = model.output_row(i);
    return {const_cast<float*>(row.data()), row.size()};
}

} // namespace

SentenceVector infer_pv(const EmbeddingModel& model, const SentenceLine& line,
                        std::uint32_t infer_epochs, std::uint64_t seed) {
    const TrainConfig& cfg = model.config;
    if (!cfg.is_paragraph_model())
        throw Error("infer_pv: model was not trained with pv-dm or pv-dbow");
    const std::size_t dim = cfg.dim;

    std::vector<std::int32_t> ids;
    for (const std::string& token : line) {
        std::int32_t id = model.vocab.id_of(token);
        if (id >= 0)
            ids.push_back(id);
    }
    if (ids.empty())
        throw NoRepresentableTokenError("no token of the sentence is representable by the model");

    std::mt19937 rng(static_cast<std::uint32_t>(seed));
    std::vector<float> para(dim);
    for (float& v : para)
        v = static_cast<float>((uniform01(rng) - 0.5) / dim);
    SentenceSource source =
        cfg.algo == Algo::pv_dm ? SentenceSource::pv_dm : SentenceSource::pv_dbow;
    if (infer_epochs == 0)
        return SentenceVector{std::move(para), source};

    NegativeSampler sampler(model.vocab, cfg.neg_alpha);
    const double lr_min = cfg.resolved_lr_min();
    const std::size_t len = ids.size();
    const std::uint64_t total = static_cast<std::uint64_t>(infer_epochs) * len;
    std::uint64_t done = 0;

    const std::size_t proj = cfg.projection_width();
    std::vector<float> hidden(proj), grad(proj);
    std::vector<std::span<float>> negatives;
    auto draw_negatives = [&](std::int32_t target) {
        negatives.clear();
        for (std::uint32_t k = 0; k < cfg.negatives; ++k) {
            for (int attempt = 0; attempt < 10; ++attempt) {
                std::int32_t cand = sampler.sample(rng);
                if (cand != target) {
                    negatives.push_back(frozen_row(model, static_cast<std::size_t>(cand)));
                    break;
                }
            }
        }
        return !negatives.empty();
    };

    for (std::uint32_t epoch = 0; epoch < infer_epochs; ++epoch) {
        for (std::size_t t = 0; t < len; ++t) {
            const float lr = static_cast<float>(lr_at(cfg.lr0, lr_min, done++, total));
            if (cfg.algo == Algo::pv_dbow) {
                std::int32_t target = ids[rng() % len];
                if (!draw_negatives(target))
                    continue;
                ns_step<float>(std::span<float>(para),
                               frozen_row(model, static_cast<std::size_t>(target)),
                               std::span<const std::span<float>>(negatives), lr, {}, false);
                continue;
            }
            std::int32_t target = ids[t];
            if (!draw_negatives(target))
                continue;
            if (cfg.pv_combine == PvCombine::mean) {
                std::size_t lo = t >= cfg.window ? t - cfg.window : 0;
                std::size_t n_rows = 1 + (t - lo);
                for (std::size_t j = 0; j < dim; ++j)
                    hidden[j] = para[j];
                for (std::size_t c = lo; c < t; ++c) {
                    auto r = model.input_row(static_cast<std::size_t>(ids[c]));
                    for (std::size_t j = 0; j < dim; ++j)
                        hidden[j] += r[j];
                }
                const float inv = 1.0f / static_cast<float>(n_rows);
                for (std::size_t j = 0; j < dim; ++j)
                    hidden[j] *= inv;
                std::fill(grad.begin(), grad.begin() + static_cast<std::ptrdiff_t>(dim), 0.0f);
                ns_step<float>(std::span<float>(hidden.data(), dim),
                               frozen_row(model, static_cast<std::size_t>(target)),
                               std::span<const std::span<float>>(negatives), lr,
                               std::span<float>(grad.data(), dim), false);
                for (std::size_t j = 0; j < dim; ++j)
                    para[j] += grad[j] * inv;
            } else {
                std::fill(hidden.begin(), hidden.end(), 0.0f);
                for (std::uint32_t slot = 0; slot < cfg.window; ++slot) {
                    std::ptrdiff_t pos = static_cast<std::ptrdiff_t>(t) -
                                         static_cast<std::ptrdiff_t>(cfg.window) + slot;
                    if (pos < 0)
                        continue;
                    auto r = model.input_row(static_cast<std::size_t>(ids[static_cast<std::size_t>(pos)]));
                    std::copy(r.begin(), r.end(),
                              hidden.begin() + static_cast<std::ptrdiff_t>(slot * dim));
                }
                std::copy(para.begin(), para.end(),
                          hidden.begin() + static_cast<std::ptrdiff_t>(cfg.window * dim));
                std::fill(grad.begin(), grad.end(), 0.0f);
                ns_step<float>(std::span<float>(hidden.data(), proj),
                               frozen_row(model, static_cast<std::size_t>(target)),
                               std::span<const std::span<float>>(negatives), lr,
                               std::span<float>(grad.data(), proj), false);
                const float* g = grad.data() + cfg.window * dim;
                for (std::size_t j = 0; j < dim; ++j)
                    para[j] += g[j];
            }
        }
    }
    return SentenceVector{std::move(para), source};
}

SentenceVector embed_sentence(const EmbeddingModel& model, const SentenceLine& line,
                              PoolMode mode) {
    switch (model.config.algo) {
    case Algo::cbow:
    case Algo::skipgram:
        return pool_sentence(model, line, mode);
    case Algo::sent2vec:
        return embed_sent2vec(model, line);
    case Algo::pv_dm:
    case Algo::pv_dbow:
        return infer_pv(model, line, 2 * model.config.epochs, model.config.seed);
    }
    throw Error("embed_sentence: unknown algorithm");
}

EmbeddingModel train_sent2vec(const std::string& corpus_path, Vocabulary vocab,
                              const TrainConfig& config, TrainStats* stats) {
    if (config.algo != Algo::sent2vec)
        throw Error("train_sent2vec: config.algo must be sent2vec");
    return train_model(corpus_path, std::move(vocab), config, stats);
}

EmbeddingModel train_pv(const std::string& corpus_path, Vocabulary vocab,
                        const TrainConfig& config, TrainStats* stats) {
    if (!config.is_paragraph_model())
        throw Error("train_pv: config.algo must be pv-dm or pv-dbow");
    return train_model(corpus_path, std::move(vocab), config, stats);
}

} // namespace semsim
