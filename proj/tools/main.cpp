// semsim: corpus preparation, embedding training, sentence similarity and
// benchmark evaluation in one binary.
//
// Exit codes: 0 success, 1 runtime failure (I/O, format, numerics),
// 2 usage error.

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <thread>

#include <CLI11.hpp>
#include <json.hpp>

#include "semsim/corpus.hpp"
#include "semsim/fusion.hpp"
#include "semsim/metrics.hpp"
#include "semsim/model_io.hpp"
#include "semsim/sent.hpp"
#include "semsim/train.hpp"
#include "semsim/vocab.hpp"

namespace {

using namespace semsim;

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

std::string fixed6(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.6f", v);
    return buf;
}

std::string compact6(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.6g", v);
    return buf;
}

std::ofstream open_output(const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw IoError("cannot open output file for writing: " + path);
    return out;
}

std::vector<std::string> split_fields(const std::string& line) {
    std::vector<std::string> fields;
    std::size_t start = 0;
    while (true) {
        std::size_t tab = line.find('\t', start);
        if (tab == std::string::npos) {
            std::string last = line.substr(start);
            if (!last.empty() && last.back() == '\r')
                last.pop_back();
            fields.push_back(std::move(last));
            return fields;
        }
        fields.push_back(line.substr(start, tab - start));
        start = tab + 1;
    }
}

// Benchmark sentences arrive raw; models and string metrics both consume
// the corpus tokenization with hyphen compounds split.
SentenceLine vector_tokens(const std::string& sentence) {
    return split_hyphen_compounds(tokenize(sentence));
}

SentenceLine string_metric_tokens(const std::string& sentence) {
    return normalize_for_string_metrics(vector_tokens(sentence), builtin_stopwords());
}

// ---------------------------------------------------------------- preprocess

struct PreprocessOpts {
    std::string input;
    std::string output;
    std::string abbrev_file;
    std::size_t max_line_chars = 200;
    bool split_hyphens = false;
};

std::unordered_set<std::string> load_abbreviations(const std::string& path) {
    std::unordered_set<std::string> set;
    std::string blob = read_file(path);
    std::string word;
    std::istringstream in(blob);
    while (std::getline(in, word)) {
        while (!word.empty() &&
               (word.back() == '\r' || word.back() == ' ' || word.back() == '.'))
            word.pop_back();
        std::transform(word.begin(), word.end(), word.begin(),
                       [](unsigned char c) { return std::tolower(c); });
        if (!word.empty())
            set.insert(word);
    }
    if (set.empty())
        throw FormatError("abbreviation file holds no entries: " + path);
    return set;
}

int run_preprocess(const PreprocessOpts& o) {
    SentenceSegmenter segmenter = o.abbrev_file.empty()
                                      ? SentenceSegmenter()
                                      : SentenceSegmenter(load_abbreviations(o.abbrev_file));
    std::vector<std::string> files = collect_input_files(o.input);
    std::ofstream out = open_output(o.output);

    std::uint64_t n_sentences = 0, n_kept = 0;
    for (const std::string& file : files) {
        std::string text = read_file(file);
        for (const std::string& sentence : segmenter.segment(text)) {
            ++n_sentences;
            SentenceLine line = tokenize(sentence);
            if (o.split_hyphens)
                line = split_hyphen_compounds(line);
            if (line.empty() || !within_line_limit(line, o.max_line_chars))
                continue;
            out << join_tokens(line) << '\n';
            ++n_kept;
        }
    }
    if (!out.flush())
        throw IoError("write failed: " + o.output);
    std::cerr << files.size() << " file(s), " << n_sentences << " sentences, " << n_kept
              << " lines kept\n";
    return 0;
}

// --------------------------------------------------------------------- stats

int run_stats(const std::string& corpus) {
    CorpusStatsAccumulator acc;
    for_each_corpus_line(corpus, [&](const SentenceLine& line) { acc.add(line); });
    CorpusStats s = acc.finish();
    std::cout << "metric\tvalue\n";
    std::cout << "n_sentences\t" << s.n_sentences << '\n';
    std::cout << "n_tokens\t" << s.n_tokens << '\n';
    std::cout << "n_unique_words\t" << s.n_unique_words << '\n';
    std::cout << "avg_line_chars\t" << fixed6(s.avg_line_chars) << '\n';
    std::cout << "max_line_chars\t" << s.max_line_chars << '\n';
    return 0;
}

// --------------------------------------------------------------------- train

struct TrainOpts {
    std::string algo;
    std::string corpus;
    std::string out;
    TrainConfig config;
    double lr = 0.05;
    bool lr_given = false;
    bool workers_given = false;
};

int run_train(const TrainOpts& o) {
    TrainConfig config = o.config;
    config.algo = algo_from_name(o.algo);
    config.lr0 = o.lr_given ? o.lr : (config.algo == Algo::skipgram ? 0.025 : 0.05);
    if (!o.workers_given) {
        unsigned hw = std::thread::hardware_concurrency();
        config.workers = hw == 0 ? 1 : hw;
    }
    config.validate();

    Vocabulary vocab = build_vocab_from_file(o.corpus, config.min_count);
    std::cerr << "vocabulary: " << vocab.size() << " words, " << vocab.retained_tokens()
              << " of " << vocab.total_tokens() << " tokens retained\n";

    TrainStats stats;
    EmbeddingModel model = train_model(o.corpus, std::move(vocab), config, &stats);
    for (std::size_t e = 0; e < stats.epoch_mean_loss.size(); ++e)
        std::cerr << "epoch " << e + 1 << '/' << stats.epoch_mean_loss.size() << ": mean loss "
                  << fixed6(stats.epoch_mean_loss[e]) << '\n';
    save_model(model, o.out);
    std::cerr << "model written to " << o.out << '\n';
    return 0;
}

// --------------------------------------------------------------------- embed

struct EmbedOpts {
    std::string model;
    std::string input;
    std::string out;
    std::string pool = "avg";
    std::int64_t infer_epochs = -1; // -1: twice the model's training epochs
};

int run_embed(const EmbedOpts& o) {
    EmbeddingModel model = load_any_model(o.model);
    PoolMode mode = pool_mode_from_name(o.pool);
    std::uint32_t infer_epochs = o.infer_epochs < 0
                                     ? 2 * model.config.epochs
                                     : static_cast<std::uint32_t>(o.infer_epochs);
    std::ofstream out = open_output(o.out);

    std::uint64_t line_no = 0;
    for_each_corpus_line(o.input, [&](const SentenceLine& line) {
        ++line_no;
        SentenceVector vec;
        try {
            if (model.config.is_paragraph_model())
                vec = infer_pv(model, line, infer_epochs, model.config.seed);
            else
                vec = embed_sentence(model, line, mode);
        } catch (const Error& e) {
            throw Error("input line " + std::to_string(line_no) + ": " + e.what());
        }
        out << line_no << '\t';
        for (std::size_t j = 0; j < vec.values.size(); ++j)
            out << (j ? " " : "") << compact6(vec.values[j]);
        out << '\n';
    });
    if (!out.flush())
        throw IoError("write failed: " + o.out);
    std::cerr << line_no << " sentences embedded\n";
    return 0;
}

// ---------------------------------------------------------------- similarity

struct SimilarityOpts {
    std::string pairs;
    std::string metric = "cosine";
    std::string model_path;
    std::size_t q = 3;
    bool directional = false;
};

std::vector<BenchmarkPair> load_pairs_lenient(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw IoError("cannot open pair file: " + path);
    std::string line;
    if (!std::getline(in, line))
        throw FormatError(path + ": empty file");
    auto header = split_fields(line);
    if (header == std::vector<std::string>{"pair_id", "sentence1", "sentence2", "score"})
        return load_benchmark(path);
    if (header != std::vector<std::string>{"pair_id", "sentence1", "sentence2"})
        throw FormatError(path + ":1: expected header 'pair_id\tsentence1\tsentence2[\tscore]'");

    std::vector<BenchmarkPair> pairs;
    std::uint64_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty())
            continue;
        auto fields = split_fields(line);
        if (fields.size() != 3)
            throw FormatError(path + ":" + std::to_string(line_no) + ": expected 3 fields, got " +
                              std::to_string(fields.size()));
        if (fields[0].empty() || fields[1].empty() || fields[2].empty())
            throw FormatError(path + ":" + std::to_string(line_no) +
                              ": pair id and sentences must be nonempty");
        pairs.push_back({std::move(fields[0]), std::move(fields[1]), std::move(fields[2]), 0.0});
    }
    return pairs;
}

int run_similarity(const SimilarityOpts& o) {
    if (o.metric != "cosine" && o.metric != "jaccard" && o.metric != "qgram")
        throw UsageError("--metric must be cosine, jaccard or qgram");
    std::optional<EmbeddingModel> model;
    if (o.metric == "cosine") {
        if (o.model_path.empty())
            throw UsageError("--metric cosine requires --model");
        model = load_any_model(o.model_path);
    }

    std::vector<BenchmarkPair> pairs = load_pairs_lenient(o.pairs);
    for (const BenchmarkPair& pair : pairs) {
        double value = 0.0;
        try {
            if (o.metric == "jaccard") {
                value = jaccard(string_metric_tokens(pair.sentence1),
                                string_metric_tokens(pair.sentence2));
            } else if (o.metric == "qgram") {
                value = qgram_similarity(join_tokens(string_metric_tokens(pair.sentence1)),
                                         join_tokens(string_metric_tokens(pair.sentence2)), o.q,
                                         !o.directional);
            } else {
                SentenceVector a = embed_sentence(*model, vector_tokens(pair.sentence1));
                SentenceVector b = embed_sentence(*model, vector_tokens(pair.sentence2));
                value = cosine(std::span<const float>(a.values), std::span<const float>(b.values));
            }
        } catch (const Error& e) {
            throw Error("pair " + pair.pair_id + ": " + e.what());
        }
        std::cout << pair.pair_id << '\t' << o.metric << '\t' << fixed6(value) << '\n';
    }
    return 0;
}

// ------------------------------------------------------------------ evaluate

struct EvaluateOpts {
    std::string benchmark;
    std::string external_file;
    std::string mode = "mean";
    std::vector<std::string> features; // empty: all available
    std::vector<std::string> model_paths;
    bool json = false;
};

int run_evaluate(const EvaluateOpts& o) {
    if (o.mode != "single" && o.mode != "mean" && o.mode != "ols-loo" && o.mode != "ols-insample")
        throw UsageError("--mode must be single, mean, ols-loo or ols-insample");

    std::vector<BenchmarkPair> pairs = load_benchmark(o.benchmark);

    std::vector<FeatureProvider> providers;
    providers.push_back({"jaccard", [](const BenchmarkPair& p) {
                             return jaccard(string_metric_tokens(p.sentence1),
                                            string_metric_tokens(p.sentence2));
                         }});
    providers.push_back({"qgram", [](const BenchmarkPair& p) {
                             return qgram_similarity(join_tokens(string_metric_tokens(p.sentence1)),
                                                     join_tokens(string_metric_tokens(p.sentence2)));
                         }});

    // Each model contributes a cosine feature named after its algorithm.
    std::vector<std::shared_ptr<EmbeddingModel>> models;
    for (const std::string& path : o.model_paths) {
        auto model = std::make_shared<EmbeddingModel>(load_any_model(path));
        std::string base(algo_name(model->config.algo));
        std::string name = base;
        int suffix = 2;
        auto taken = [&](const std::string& n) {
            return std::any_of(providers.begin(), providers.end(),
                               [&](const FeatureProvider& p) { return p.name == n; });
        };
        while (taken(name))
            name = base + "-" + std::to_string(suffix++);
        providers.push_back({name, [model](const BenchmarkPair& p) {
                                 SentenceVector a = embed_sentence(*model, vector_tokens(p.sentence1));
                                 SentenceVector b = embed_sentence(*model, vector_tokens(p.sentence2));
                                 return cosine(std::span<const float>(a.values),
                                               std::span<const float>(b.values));
                             }});
        models.push_back(std::move(model));
    }

    std::vector<ExternalColumn> external;
    if (!o.external_file.empty())
        external = load_external_features(o.external_file);

    // --features selects and orders the columns.
    if (!o.features.empty()) {
        std::vector<FeatureProvider> chosen_providers;
        std::vector<ExternalColumn> chosen_external;
        for (const std::string& name : o.features) {
            auto pit = std::find_if(providers.begin(), providers.end(),
                                    [&](const FeatureProvider& p) { return p.name == name; });
            if (pit != providers.end()) {
                chosen_providers.push_back(*pit);
                continue;
            }
            auto eit = std::find_if(external.begin(), external.end(),
                                    [&](const ExternalColumn& c) { return c.name == name; });
            if (eit != external.end()) {
                chosen_external.push_back(*eit);
                continue;
            }
            std::string available;
            for (const FeatureProvider& p : providers)
                available += (available.empty() ? "" : ", ") + p.name;
            for (const ExternalColumn& c : external)
                available += (available.empty() ? "" : ", ") + c.name;
            throw UsageError("unknown feature '" + name + "' (available: " + available +
                             "; model features need --model)");
        }
        providers = std::move(chosen_providers);
        external = std::move(chosen_external);
    }
    if (o.mode == "single" && providers.size() + external.size() != 1)
        throw UsageError("--mode single needs exactly one feature, got " +
                         std::to_string(providers.size() + external.size()));

    std::vector<FeatureRow> rows = build_features(pairs, providers, external);
    if (rows.size() < 2)
        throw InsufficientDataError("fewer than 2 usable benchmark pairs");

    std::vector<std::string> names = rows.front().names;
    std::vector<double> gold(rows.size());
    for (std::size_t i = 0; i < rows.size(); ++i)
        gold[i] = rows[i].gold;

    std::vector<double> scores(rows.size());
    std::optional<FusionModel> fitted;
    if (o.mode == "single") {
        for (std::size_t i = 0; i < rows.size(); ++i)
            scores[i] = rows[i].values[0];
    } else if (o.mode == "mean") {
        for (std::size_t i = 0; i < rows.size(); ++i)
            scores[i] = mean_hybrid(rows[i], names);
    } else if (o.mode == "ols-loo") {
        scores = loo_cv(rows).predictions;
    } else {
        fitted = fit_ols(rows);
        for (std::size_t i = 0; i < rows.size(); ++i)
            scores[i] = fitted->predict(rows[i]);
    }

    double r = pearson(scores, gold);
    double rho = spearman(scores, gold);

    std::string feature_list;
    for (const std::string& name : names)
        feature_list += (feature_list.empty() ? "" : ",") + name;

    if (o.json) {
        nlohmann::json j;
        j["mode"] = o.mode;
        j["features"] = names;
        j["n"] = rows.size();
        j["pearson"] = r;
        j["spearman"] = rho;
        if (fitted) {
            j["intercept"] = fitted->intercept;
            nlohmann::json coefs = nlohmann::json::object();
            for (std::size_t i = 0; i < fitted->names.size(); ++i)
                coefs[fitted->names[i]] = fitted->coefficients[i];
            j["coefficients"] = coefs;
        }
        std::cout << j.dump(2) << '\n';
        return 0;
    }
    std::cout << "mode\t" << o.mode << '\n';
    std::cout << "features\t" << feature_list << '\n';
    std::cout << "n\t" << rows.size() << '\n';
    std::cout << "pearson\t" << fixed6(r) << '\n';
    std::cout << "spearman\t" << fixed6(rho) << '\n';
    if (fitted) {
        std::cout << "intercept\t" << fixed6(fitted->intercept) << '\n';
        for (std::size_t i = 0; i < fitted->names.size(); ++i)
            std::cout << "coef_" << fitted->names[i] << '\t' << fixed6(fitted->coefficients[i])
                      << '\n';
    }
    return 0;
}

// ------------------------------------------------------------- contradiction

struct ContradictionOpts {
    std::string subsets;
    std::string model_path;
    bool json = false;
};

int run_contradiction(const ContradictionOpts& o) {
    std::vector<ContradictionSet> sets = load_contradiction_sets(o.subsets);
    EmbeddingModel model = load_any_model(o.model_path);
    auto similarity = [&](const ContradictionPair& pair) {
        SentenceVector a = embed_sentence(model, vector_tokens(pair.sentence1));
        SentenceVector b = embed_sentence(model, vector_tokens(pair.sentence2));
        return cosine(std::span<const float>(a.values), std::span<const float>(b.values));
    };
    std::vector<SubsetReport> report = contradiction_report(sets, similarity);

    if (o.json) {
        nlohmann::json j;
        j["subsets"] = nlohmann::json::array();
        for (const SubsetReport& entry : report)
            j["subsets"].push_back(
                {{"subset", entry.label}, {"n", entry.n}, {"mean", entry.mean}});
        std::cout << j.dump(2) << '\n';
        return 0;
    }
    std::cout << "subset\tn\tmean\n";
    for (const SubsetReport& entry : report)
        std::cout << entry.label << '\t' << entry.n << '\t' << fixed6(entry.mean) << '\n';
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"sentence-similarity toolkit: corpus preparation, embedding training "
                 "and benchmark evaluation"};
    app.require_subcommand(1);

    auto preprocess = std::make_shared<PreprocessOpts>();
    CLI::App* pre = app.add_subcommand(
        "preprocess", "Turn raw text into a one-sentence-per-line training corpus");
    pre->add_option("--input", preprocess->input, "Input .txt file or directory tree")->required();
    pre->add_option("--output", preprocess->output, "Corpus file to write")->required();
    pre->add_option("--max-line-chars", preprocess->max_line_chars,
                    "Keep only lines shorter than this many characters")
        ->capture_default_str();
    pre->add_flag("--split-hyphens", preprocess->split_hyphens,
                  "Split hyphenated compounds into their parts");
    pre->add_option("--abbrev", preprocess->abbrev_file,
                    "Abbreviation list for the sentence splitter (one entry per line; "
                    "default: bundled list)");

    std::string stats_corpus;
    CLI::App* stats = app.add_subcommand("stats", "Corpus statistics as a metric/value TSV");
    stats->add_option("--corpus", stats_corpus, "One-sentence-per-line corpus file")->required();

    auto train = std::make_shared<TrainOpts>();
    CLI::App* tr = app.add_subcommand("train", "Train an embedding model on a corpus");
    tr->add_option("--algo", train->algo, "Algorithm: cbow, skipgram, sent2vec, pv-dm, pv-dbow")
        ->required()
        ->check(CLI::IsMember({"cbow", "skipgram", "sent2vec", "pv-dm", "pv-dbow"}));
    tr->add_option("--corpus", train->corpus, "One-sentence-per-line corpus file")->required();
    tr->add_option("--out", train->out, "Model file to write")->required();
    tr->add_option("--dim", train->config.dim, "Embedding dimension")->capture_default_str();
    tr->add_option("--window", train->config.window, "Maximum context window half-width")
        ->capture_default_str();
    tr->add_option("--epochs", train->config.epochs, "Training passes over the corpus")
        ->capture_default_str();
    tr->add_option("--min-count", train->config.min_count, "Drop words seen fewer times than this")
        ->capture_default_str();
    tr->add_option("--neg", train->config.negatives, "Negative samples per step")
        ->capture_default_str();
    tr->add_option("--lr", train->lr,
                   "Initial learning rate (default: 0.05, or 0.025 for skipgram)");
    tr->add_option("--sample", train->config.sample_t,
                   "Frequent-word subsampling threshold (0 disables)")
        ->capture_default_str();
    tr->add_option("--word-ngrams", train->config.word_ngrams,
                   "Max word n-gram order for sent2vec (1 = unigrams only)")
        ->capture_default_str();
    tr->add_option("--dropout-k", train->config.dropout_k,
                   "Word n-grams dropped per sent2vec step")
        ->capture_default_str();
    tr->add_option("--bucket", train->config.bucket, "Hashed feature table size")
        ->capture_default_str();
    tr->add_option("--minn", train->config.minn,
                   "Shortest subword n-gram for cbow/skipgram (0 disables subwords)")
        ->capture_default_str();
    tr->add_option("--maxn", train->config.maxn, "Longest subword n-gram")->capture_default_str();
    tr->add_option("--pv-combine", train->config.pv_combine,
                   "pv-dm context combination: mean or concat")
        ->transform(CLI::CheckedTransformer(
            std::map<std::string, PvCombine>{{"mean", PvCombine::mean},
                                             {"concat", PvCombine::concat}}))
        ->default_str("mean");
    tr->add_option("--seed", train->config.seed, "Random seed")->capture_default_str();
    tr->add_option("--workers", train->config.workers,
                   "Training threads (default: available cores; results are "
                   "byte-reproducible only with 1)");

    auto embed = std::make_shared<EmbedOpts>();
    CLI::App* em = app.add_subcommand("embed", "Write one sentence vector per corpus line");
    em->add_option("--model", embed->model, "Trained model file (native or text vectors)")
        ->required();
    em->add_option("--input", embed->input, "One-sentence-per-line corpus file")->required();
    em->add_option("--out", embed->out, "TSV file to write")->required();
    em->add_option("--pool", embed->pool, "Pooling for word models: avg, min, max, sum")
        ->capture_default_str()
        ->check(CLI::IsMember({"avg", "min", "max", "sum"}));
    em->add_option("--infer-epochs", embed->infer_epochs,
                   "Inference passes for paragraph models (default: 2x training epochs)");

    auto sim = std::make_shared<SimilarityOpts>();
    CLI::App* si = app.add_subcommand("similarity",
                                      "Per-pair similarity scores for a sentence-pair TSV");
    si->add_option("--pairs", sim->pairs, "Pair TSV (pair_id, sentence1, sentence2[, score])")
        ->required();
    si->add_option("--metric", sim->metric, "cosine, jaccard or qgram")->capture_default_str();
    si->add_option("--model", sim->model_path, "Model file (required for cosine)");
    si->add_option("--q", sim->q, "q-gram length")->capture_default_str();
    si->add_flag("--directional", sim->directional,
                 "Literal directional q-gram score instead of the symmetric mean");

    auto eval = std::make_shared<EvaluateOpts>();
    CLI::App* ev = app.add_subcommand("evaluate", "Correlate similarity features with gold scores");
    ev->add_option("--benchmark", eval->benchmark,
                   "Benchmark TSV (pair_id, sentence1, sentence2, score)")
        ->required();
    ev->add_option("--features", eval->features,
                   "Comma-separated feature subset/order (default: all available)")
        ->delimiter(',');
    ev->add_option("--external", eval->external_file,
                   "External feature TSV (pair_id, feature, value)");
    ev->add_option("--mode", eval->mode, "single, mean, ols-loo or ols-insample")
        ->capture_default_str();
    ev->add_option("--model", eval->model_paths,
                   "Model file contributing a cosine feature (repeatable)");
    ev->add_flag("--json", eval->json, "Emit one JSON object instead of TSV");

    auto contra = std::make_shared<ContradictionOpts>();
    CLI::App* co = app.add_subcommand("contradiction",
                                      "Mean similarity per contradiction subset");
    co->add_option("--subsets", contra->subsets,
                   "Subset TSV (pair_id, subset, sentence1, sentence2)")
        ->required();
    co->add_option("--model", contra->model_path, "Model file")->required();
    co->add_flag("--json", contra->json, "Emit one JSON object instead of TSV");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (pre->parsed())
            return run_preprocess(*preprocess);
        if (stats->parsed())
            return run_stats(stats_corpus);
        if (tr->parsed()) {
            train->lr_given = tr->count("--lr") > 0;
            train->workers_given = tr->count("--workers") > 0;
            return run_train(*train);
        }
        if (em->parsed())
            return run_embed(*embed);
        if (si->parsed())
            return run_similarity(*sim);
        if (ev->parsed())
            return run_evaluate(*eval);
        if (co->parsed())
            return run_contradiction(*contra);
        std::cerr << "error: no subcommand\n";
        return 2;
    } catch (const UsageError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
}
