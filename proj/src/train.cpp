#include "semsim/train.hpp"

#include <algorithm>
#include <atomic>
#include <cassert>
#include <fstream>
#include <thread>

namespace semsim {

std::string_view algo_name(Algo algo) {
    switch (algo) {
    case Algo::cbow:
        return "cbow";
    case Algo::skipgram:
        return "skipgram";
    case Algo::sent2vec:
        return "sent2vec";
    case Algo::pv_dm:
        return "pv-dm";
    case Algo::pv_dbow:
        return "pv-dbow";
    }
    return "?";
}

Algo algo_from_name(std::string_view name) {
    if (name == "cbow")
        return Algo::cbow;
    if (name == "skipgram")
        return Algo::skipgram;
    if (name == "sent2vec")
        return Algo::sent2vec;
    if (name == "pv-dm")
        return Algo::pv_dm;
    if (name == "pv-dbow")
        return Algo::pv_dbow;
    throw Error("unknown algorithm '" + std::string(name) +
                "' (valid: cbow, skipgram, sent2vec, pv-dm, pv-dbow)");
}

void TrainConfig::validate() const {
    if (dim < 1)
        throw Error("config: dim must be >= 1");
    if (window < 1)
        throw Error("config: window must be >= 1");
    if (epochs < 1)
        throw Error("config: epochs must be >= 1");
    if (negatives < 1)
        throw Error("config: negatives must be >= 1");
    if (min_count < 1)
        throw Error("config: min_count must be >= 1");
    if (!(lr0 > resolved_lr_min()) || resolved_lr_min() < 0.0)
        throw Error("config: need lr0 > lr_min >= 0");
    if (sample_t < 0.0)
        throw Error("config: sample threshold must be >= 0");
    if (algo == Algo::sent2vec && word_ngrams < 1)
        throw Error("config: sent2vec needs word_ngrams >= 1");
    if (uses_hashed_features() && bucket < 1)
        throw Error("config: bucket must be >= 1");
    if (neg_alpha <= 0.0 || neg_alpha > 1.0)
        throw Error("config: negative-sampling exponent must be in (0, 1]");
    if (workers < 1)
        throw Error("config: workers must be >= 1");
}

double lr_at(double lr0, double lr_min, std::uint64_t done, std::uint64_t total) {
    if (total == 0)
        return lr0;
    double rho = static_cast<double>(done) / static_cast<double>(total);
    double lr = lr0 + rho * (lr_min - lr0);
    return lr < lr_min ? lr_min : lr;
}

std::vector<std::pair<std::size_t, std::size_t>>
skipgram_pairs(std::size_t len, std::uint32_t window, bool fixed, std::mt19937& rng) {
    std::vector<std::pair<std::size_t, std::size_t>> pairs;
    for (std::size_t t = 0; t < len; ++t) {
        std::size_t b = fixed ? window : 1 + rng() % window;
        std::size_t lo = t >= b ? t - b : 0;
        std::size_t hi = std::min(len, t + b + 1);
        for (std::size_t c = lo; c < hi; ++c)
            if (c != t)
                pairs.emplace_back(t, c);
    }
    return pairs;
}

EmbeddingModel initialize_model(const TrainConfig& config, Vocabulary vocab,
                                std::uint64_t n_paragraphs) {
    config.validate();
    if (vocab.empty())
        throw EmptyVocabularyError("cannot initialize a model over an empty vocabulary");

    EmbeddingModel model;
    model.config = config;
    model.vocab = std::move(vocab);
    model.n_paragraphs = config.is_paragraph_model() ? n_paragraphs : 0;

    std::mt19937 rng(static_cast<std::uint32_t>(config.seed));
    const double scale = 1.0 / config.dim;
    auto init_value = [&] { return static_cast<float>((uniform01(rng) - 0.5) * scale); };

    model.input.resize(model.input_rows() * config.dim);
    for (float& v : model.input)
        v = init_value();
    model.output.assign(model.vocab.size() * config.projection_width(), 0.0f);
    if (config.is_paragraph_model()) {
        model.paragraphs.resize(model.n_paragraphs * config.dim);
        for (float& v : model.paragraphs)
            v = init_value();
    }
    return model;
}

namespace {

std::uint64_t count_lines(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw IoError("cannot open corpus file: " + path);
    std::uint64_t n = 0;
    std::string line;
    while (std::getline(in, line))
        ++n;
    return n;
}

struct WorkerResult {
    std::vector<double> loss_sum;
    std::vector<std::uint64_t> steps;
    std::exception_ptr error;
};

class TrainEngine {
  public:
    TrainEngine(std::string corpus_path, EmbeddingModel& model)
        : path_(std::move(corpus_path)), model_(model), cfg_(model.config),
          sampler_(model.vocab, cfg_.neg_alpha),
          total_work_(model.vocab.retained_tokens() * cfg_.epochs) {
        lr_min_ = cfg_.resolved_lr_min();
        if (cfg_.sample_t > 0.0) {
            keep_prob_.resize(model_.vocab.size());
            for (std::size_t i = 0; i < keep_prob_.size(); ++i)
                keep_prob_[i] =
                    1.0 - discard_probability(model_.vocab.frequency(static_cast<std::int32_t>(i)),
                                              cfg_.sample_t);
        }
        if (cfg_.uses_subwords()) {
            subword_rows_.resize(model_.vocab.size());
            for (std::size_t i = 0; i < subword_rows_.size(); ++i) {
                for (std::uint32_t fid : subword_ngrams(model_.vocab.word(static_cast<std::int32_t>(i)).token,
                                                        cfg_.minn, cfg_.maxn, cfg_.bucket))
                    subword_rows_[i].push_back(model_.feature_row(fid));
            }
        }
    }

    void run(TrainStats* stats) {
        std::vector<WorkerResult> results(cfg_.workers);
        if (cfg_.workers == 1) {
            worker(0, results[0]);
        } else {
            std::vector<std::thread> threads;
            threads.reserve(cfg_.workers);
            for (std::uint32_t w = 0; w < cfg_.workers; ++w)
                threads.emplace_back([this, w, &results] { worker(w, results[w]); });
            for (std::thread& t : threads)
                t.join();
        }
        for (WorkerResult& r : results)
            if (r.error)
                std::rethrow_exception(r.error);
        if (stats) {
            stats->epoch_mean_loss.assign(cfg_.epochs, 0.0);
            stats->steps = 0;
            std::vector<std::uint64_t> epoch_steps(cfg_.epochs, 0);
            for (const WorkerResult& r : results) {
                for (std::uint32_t e = 0; e < cfg_.epochs; ++e) {
                    stats->epoch_mean_loss[e] += r.loss_sum[e];
                    epoch_steps[e] += r.steps[e];
                    stats->steps += r.steps[e];
                }
            }
            for (std::uint32_t e = 0; e < cfg_.epochs; ++e)
                if (epoch_steps[e] > 0)
                    stats->epoch_mean_loss[e] /= static_cast<double>(epoch_steps[e]);
        }
    }

  private:
    struct Scratch {
        std::mt19937 rng;
        std::vector<std::int32_t> ids;             // kept token ids of the sentence
        std::vector<std::span<float>> rows;        // rows the hidden layer averages over
        std::vector<float> hidden;                 // projection_width
        std::vector<float> grad;                   // projection_width
        std::vector<std::span<float>> negatives;
        std::vector<std::size_t> ngram_rows;       // sent2vec, per sentence
        std::vector<std::size_t> kept_ngram_rows;  // after dropout, per step
        SentenceLine kept_tokens;                  // sent2vec n-gram hashing
        std::vector<std::pair<std::size_t, std::size_t>> pairs; // skip-gram
        double loss = 0.0;
        std::uint64_t steps = 0;
        double lr = 0.0;
    };

    void worker(std::uint32_t w, WorkerResult& result) {
        result.loss_sum.assign(cfg_.epochs, 0.0);
        result.steps.assign(cfg_.epochs, 0);
        try {
            Scratch s;
            s.rng.seed(static_cast<std::uint32_t>(cfg_.seed) + w * 2654435761u);
            const std::uint32_t proj = cfg_.projection_width();
            s.hidden.resize(proj);
            s.grad.resize(proj);

            std::string line;
            SentenceLine tokens;
            for (std::uint32_t epoch = 0; epoch < cfg_.epochs; ++epoch) {
                std::ifstream in(path_, std::ios::binary);
                if (!in)
                    throw IoError("cannot open corpus file: " + path_);
                std::uint64_t line_no = 0;
                s.loss = 0.0;
                s.steps = 0;
                while (std::getline(in, line)) {
                    std::uint64_t paragraph = line_no++;
                    if (paragraph % cfg_.workers != w)
                        continue;
                    split_tokens(line, tokens);
                    process_sentence(tokens, paragraph, s);
                }
                result.loss_sum[epoch] = s.loss;
                result.steps[epoch] = s.steps;
            }
        } catch (...) {
            result.error = std::current_exception();
        }
    }

    static void split_tokens(const std::string& line, SentenceLine& tokens) {
        tokens.clear();
        std::size_t start = 0;
        while (start < line.size()) {
            std::size_t end = line.find(' ', start);
            if (end == std::string::npos)
                end = line.size();
            if (end > start) {
                std::string_view tok(line.data() + start, end - start);
                if (tok.back() == '\r')
                    tok.remove_suffix(1);
                if (!tok.empty())
                    tokens.emplace_back(tok);
            }
            start = end + 1;
        }
    }

    void process_sentence(const SentenceLine& tokens, std::uint64_t paragraph, Scratch& s) {
        s.ids.clear();
        std::uint64_t in_vocab = 0;
        for (const std::string& tok : tokens) {
            std::int32_t id = model_.vocab.id_of(tok);
            if (id < 0)
                continue;
            ++in_vocab;
            if (!keep_prob_.empty() && uniform01(s.rng) >= keep_prob_[static_cast<std::size_t>(id)])
                continue;
            s.ids.push_back(id);
        }
        std::uint64_t done = progress_.fetch_add(in_vocab) + in_vocab;
        s.lr = lr_at(cfg_.lr0, lr_min_, done, total_work_);
        if (s.ids.empty())
            return;

        switch (cfg_.algo) {
        case Algo::cbow:
            train_cbow_sentence(s);
            break;
        case Algo::skipgram:
            train_skipgram_sentence(s);
            break;
        case Algo::sent2vec:
            train_sent2vec_sentence(s);
            break;
        case Algo::pv_dm:
            train_pv_dm_sentence(s, paragraph);
            break;
        case Algo::pv_dbow:
            train_pv_dbow_sentence(s, paragraph);
            break;
        }
    }

    void collect_word_rows(std::int32_t id, std::vector<std::span<float>>& rows) {
        rows.push_back(model_.input_row(static_cast<std::size_t>(id)));
        if (!subword_rows_.empty())
            for (std::size_t r : subword_rows_[static_cast<std::size_t>(id)])
                rows.push_back(model_.input_row(r));
    }

    bool draw_negatives(std::int32_t target, Scratch& s) {
        s.negatives.clear();
        for (std::uint32_t k = 0; k < cfg_.negatives; ++k) {
            std::int32_t neg = -1;
            for (int attempt = 0; attempt < 10; ++attempt) {
                std::int32_t cand = sampler_.sample(s.rng);
                if (cand != target) {
                    neg = cand;
                    break;
                }
            }
            if (neg >= 0)
                s.negatives.push_back(model_.output_row(static_cast<std::size_t>(neg)));
        }
        return !s.negatives.empty();
    }

    // hidden = mean of s.rows, one ns_step against `target`, then the
    // hidden-layer step spread equally over the contributing rows.
    void averaged_step(std::int32_t target, Scratch& s) {
        const std::size_t dim = cfg_.dim;
        const std::size_t n = s.rows.size();
        if (n == 0)
            return;
        if (!draw_negatives(target, s))
            return;
        const float inv = 1.0f / static_cast<float>(n);
        for (std::size_t j = 0; j < dim; ++j) {
            float sum = 0.0f;
            for (const std::span<float>& row : s.rows)
                sum += row[j];
            s.hidden[j] = sum * inv;
        }
        std::fill(s.grad.begin(), s.grad.begin() + static_cast<std::ptrdiff_t>(dim), 0.0f);
        s.loss += ns_step<float>(std::span<float>(s.hidden.data(), dim),
                                 model_.output_row(static_cast<std::size_t>(target)),
                                 std::span<const std::span<float>>(s.negatives),
                                 static_cast<float>(s.lr), std::span<float>(s.grad.data(), dim));
        ++s.steps;
        for (std::span<float>& row : s.rows)
            for (std::size_t j = 0; j < dim; ++j)
                row[j] += s.grad[j] * inv;
    }

    void train_cbow_sentence(Scratch& s) {
        const std::size_t len = s.ids.size();
        for (std::size_t t = 0; t < len; ++t) {
            std::size_t b = cfg_.fixed_window ? cfg_.window : 1 + s.rng() % cfg_.window;
            std::size_t lo = t >= b ? t - b : 0;
            std::size_t hi = std::min(len, t + b + 1);
            s.rows.clear();
            for (std::size_t c = lo; c < hi; ++c)
                if (c != t)
                    collect_word_rows(s.ids[c], s.rows);
            averaged_step(s.ids[t], s);
        }
    }

    void train_skipgram_sentence(Scratch& s) {
        s.pairs = skipgram_pairs(s.ids.size(), cfg_.window, cfg_.fixed_window, s.rng);
        for (const auto& [center, context] : s.pairs) {
            s.rows.clear();
            collect_word_rows(s.ids[center], s.rows);
            averaged_step(s.ids[context], s);
        }
    }

    void train_sent2vec_sentence(Scratch& s) {
        const std::size_t len = s.ids.size();
        s.ngram_rows.clear();
        if (cfg_.uses_word_ngrams() && len >= 2) {
            s.kept_tokens.clear();
            for (std::int32_t id : s.ids)
                s.kept_tokens.push_back(model_.vocab.word(id).token);
            for (std::uint32_t fid : word_ngrams(s.kept_tokens, cfg_.word_ngrams, cfg_.bucket))
                s.ngram_rows.push_back(model_.feature_row(fid));
        }
        for (std::size_t t = 0; t < len; ++t) {
            s.rows.clear();
            for (std::size_t c = 0; c < len; ++c)
                if (c != t)
                    s.rows.push_back(model_.input_row(static_cast<std::size_t>(s.ids[c])));
            if (!s.ngram_rows.empty()) {
                // Drop exactly min(dropout_k, available) n-gram features,
                // uniformly without replacement, per training step.
                s.kept_ngram_rows = s.ngram_rows;
                std::size_t drop = std::min<std::size_t>(cfg_.dropout_k, s.kept_ngram_rows.size());
                for (std::size_t d = 0; d < drop; ++d) {
                    std::size_t remaining = s.kept_ngram_rows.size();
                    std::size_t pick = s.rng() % remaining;
                    std::swap(s.kept_ngram_rows[pick], s.kept_ngram_rows[remaining - 1]);
                    s.kept_ngram_rows.pop_back();
                }
                for (std::size_t r : s.kept_ngram_rows)
                    s.rows.push_back(model_.input_row(r));
            }
            averaged_step(s.ids[t], s);
        }
    }

    void train_pv_dm_sentence(Scratch& s, std::uint64_t paragraph) {
        const std::size_t len = s.ids.size();
        if (cfg_.pv_combine == PvCombine::mean) {
            for (std::size_t t = 0; t < len; ++t) {
                s.rows.clear();
                s.rows.push_back(model_.paragraph_row(paragraph));
                std::size_t lo = t >= cfg_.window ? t - cfg_.window : 0;
                for (std::size_t c = lo; c < t; ++c)
                    s.rows.push_back(model_.input_row(static_cast<std::size_t>(s.ids[c])));
                averaged_step(s.ids[t], s);
            }
            return;
        }
        // Concatenation: projection = [w_{t-window} .. w_{t-1}, paragraph],
        // with missing predecessors left as zero slots.  Each filled slot
        // receives its own gradient slice undivided.
        const std::size_t dim = cfg_.dim;
        const std::size_t proj = cfg_.projection_width();
        for (std::size_t t = 0; t < len; ++t) {
            if (!draw_negatives(s.ids[t], s))
                continue;
            std::fill(s.hidden.begin(), s.hidden.end(), 0.0f);
            s.rows.clear(); // slot-aligned: s.rows[i] lives at offset slot*dim
            std::vector<std::uint32_t> slots;
            for (std::uint32_t slot = 0; slot < cfg_.window; ++slot) {
                std::ptrdiff_t pos =
                    static_cast<std::ptrdiff_t>(t) - static_cast<std::ptrdiff_t>(cfg_.window) + slot;
                if (pos < 0)
                    continue;
                auto row = model_.input_row(static_cast<std::size_t>(s.ids[static_cast<std::size_t>(pos)]));
                std::copy(row.begin(), row.end(),
                          s.hidden.begin() + static_cast<std::ptrdiff_t>(slot * dim));
                s.rows.push_back(row);
                slots.push_back(slot);
            }
            auto para = model_.paragraph_row(paragraph);
            std::copy(para.begin(), para.end(),
                      s.hidden.begin() + static_cast<std::ptrdiff_t>(cfg_.window * dim));
            s.rows.push_back(para);
            slots.push_back(cfg_.window);

            std::fill(s.grad.begin(), s.grad.end(), 0.0f);
            s.loss += ns_step<float>(std::span<float>(s.hidden.data(), proj),
                                     model_.output_row(static_cast<std::size_t>(s.ids[t])),
                                     std::span<const std::span<float>>(s.negatives),
                                     static_cast<float>(s.lr), std::span<float>(s.grad.data(), proj));
            ++s.steps;
            for (std::size_t i = 0; i < s.rows.size(); ++i) {
                const float* g = s.grad.data() + slots[i] * dim;
                for (std::size_t j = 0; j < dim; ++j)
                    s.rows[i][j] += g[j];
            }
        }
    }

    void train_pv_dbow_sentence(Scratch& s, std::uint64_t paragraph) {
        const std::size_t len = s.ids.size();
        for (std::size_t step = 0; step < len; ++step) {
            std::int32_t target = s.ids[s.rng() % len];
            s.rows.clear();
            s.rows.push_back(model_.paragraph_row(paragraph));
            averaged_step(target, s);
        }
    }

    std::string path_;
    EmbeddingModel& model_;
    const TrainConfig& cfg_;
    NegativeSampler sampler_;
    std::uint64_t total_work_;
    double lr_min_ = 0.0;
    std::vector<double> keep_prob_;
    std::vector<std::vector<std::size_t>> subword_rows_;
    std::atomic<std::uint64_t> progress_{0};
};

} // namespace

EmbeddingModel train_model(const std::string& corpus_path, Vocabulary vocab,
                           const TrainConfig& config, TrainStats* stats) {
    config.validate();
    std::uint64_t n_paragraphs =
        config.is_paragraph_model() ? count_lines(corpus_path) : 0;
    EmbeddingModel model = initialize_model(config, std::move(vocab), n_paragraphs);
    TrainEngine engine(corpus_path, model);
    TrainStats local;
    engine.run(stats ? stats : &local);
    if (stats)
        stats->n_paragraphs = n_paragraphs;
    return model;
}

EmbeddingModel train_cbow(const std::string& corpus_path, Vocabulary vocab,
                          const TrainConfig& config, TrainStats* stats) {
    if (config.algo != Algo::cbow)
        throw Error("train_cbow: config.algo must be cbow");
    return train_model(corpus_path, std::move(vocab), config, stats);
}

EmbeddingModel train_skipgram(const std::string& corpus_path, Vocabulary vocab,
                              const TrainConfig& config, TrainStats* stats) {
    if (config.algo != Algo::skipgram)
        throw Error("train_skipgram: config.algo must be skipgram");
    return train_model(corpus_path, std::move(vocab), config, stats);
}

} // namespace semsim
