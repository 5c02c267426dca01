#include "semsim/model_io.hpp"

#include <bit>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>
#include <type_traits>

#include "semsim/sent.hpp"

static_assert(std::endian::native == std::endian::little,
              "model files are little-endian; big-endian hosts are unsupported");
static_assert(sizeof(float) == 4);

namespace semsim {

namespace {

constexpr char kMagic[4] = {'S', 'E', 'M', 'B'};
constexpr std::uint8_t kVersion = 1;

class Writer {
  public:
    explicit Writer(const std::string& path) : out_(path, std::ios::binary), path_(path) {
        if (!out_)
            throw IoError("cannot open model file for writing: " + path);
    }
    void bytes(const void* data, std::size_t n) {
        out_.write(static_cast<const char*>(data), static_cast<std::streamsize>(n));
        if (!out_)
            throw IoError("write failed: " + path_);
    }
    template <typename T> void put(T v) {
        static_assert(std::is_trivially_copyable_v<T>);
        bytes(&v, sizeof v);
    }
    void put_string(const std::string& s) {
        put<std::uint32_t>(static_cast<std::uint32_t>(s.size()));
        bytes(s.data(), s.size());
    }

  private:
    std::ofstream out_;
    std::string path_;
};

class Reader {
  public:
    explicit Reader(const std::string& path) : in_(path, std::ios::binary), path_(path) {
        if (!in_)
            throw IoError("cannot open model file: " + path);
    }
    void bytes(void* data, std::size_t n) {
        in_.read(static_cast<char*>(data), static_cast<std::streamsize>(n));
        if (static_cast<std::size_t>(in_.gcount()) != n)
            throw FormatError("truncated model file: " + path_);
    }
    template <typename T> T get() {
        static_assert(std::is_trivially_copyable_v<T>);
        T v;
        bytes(&v, sizeof v);
        return v;
    }
    std::string get_string() {
        auto n = get<std::uint32_t>();
        std::string s(n, '\0');
        bytes(s.data(), n);
        return s;
    }
    bool at_end() {
        return in_.peek() == std::ifstream::traits_type::eof();
    }

  private:
    std::ifstream in_;
    std::string path_;
};

} // namespace

void save_model(const EmbeddingModel& model, const std::string& path) {
    const TrainConfig& c = model.config;
    Writer w(path);
    w.bytes(kMagic, sizeof kMagic);
    w.put(kVersion);

    w.put(static_cast<std::uint8_t>(c.algo));
    w.put(static_cast<std::uint8_t>(c.pv_combine));
    w.put(static_cast<std::uint8_t>(c.fixed_window ? 1 : 0));
    w.put(c.dim);
    w.put(c.window);
    w.put(c.epochs);
    w.put(c.negatives);
    w.put(c.word_ngrams);
    w.put(c.dropout_k);
    w.put(c.bucket);
    w.put(c.minn);
    w.put(c.maxn);
    w.put(c.workers);
    w.put(c.min_count);
    w.put(c.lr0);
    w.put(c.lr_min);
    w.put(c.sample_t);
    w.put(c.neg_alpha);
    w.put(c.seed);

    w.put(static_cast<std::uint64_t>(model.vocab.size()));
    w.put(model.vocab.total_tokens());
    for (std::size_t i = 0; i < model.vocab.size(); ++i) {
        const WordEntry& e = model.vocab.word(static_cast<std::int32_t>(i));
        w.put_string(e.token);
        w.put(e.count);
    }
    w.put(model.n_paragraphs);

    w.bytes(model.input.data(), model.input.size() * sizeof(float));
    w.bytes(model.output.data(), model.output.size() * sizeof(float));
    w.bytes(model.paragraphs.data(), model.paragraphs.size() * sizeof(float));
}

EmbeddingModel load_model(const std::string& path) {
    Reader r(path);
    char magic[4];
    r.bytes(magic, sizeof magic);
    if (std::memcmp(magic, kMagic, sizeof kMagic) != 0)
        throw FormatError("not a native model file (bad magic): " + path);
    auto version = r.get<std::uint8_t>();
    if (version != kVersion)
        throw FormatError("unsupported model file version " + std::to_string(version) + ": " +
                          path);

    TrainConfig c;
    c.algo = static_cast<Algo>(r.get<std::uint8_t>());
    c.pv_combine = static_cast<PvCombine>(r.get<std::uint8_t>());
    c.fixed_window = r.get<std::uint8_t>() != 0;
    c.dim = r.get<std::uint32_t>();
    c.window = r.get<std::uint32_t>();
    c.epochs = r.get<std::uint32_t>();
    c.negatives = r.get<std::uint32_t>();
    c.word_ngrams = r.get<std::uint32_t>();
    c.dropout_k = r.get<std::uint32_t>();
    c.bucket = r.get<std::uint64_t>();
    c.minn = r.get<std::uint32_t>();
    c.maxn = r.get<std::uint32_t>();
    c.workers = r.get<std::uint32_t>();
    c.min_count = r.get<std::uint32_t>();
    c.lr0 = r.get<double>();
    c.lr_min = r.get<double>();
    c.sample_t = r.get<double>();
    c.neg_alpha = r.get<double>();
    c.seed = r.get<std::uint64_t>();

    auto n_words = r.get<std::uint64_t>();
    auto total_tokens = r.get<std::uint64_t>();
    std::vector<WordEntry> words;
    words.reserve(n_words);
    for (std::uint64_t i = 0; i < n_words; ++i) {
        std::string token = r.get_string();
        auto count = r.get<std::uint64_t>();
        words.push_back({std::move(token), count});
    }

    EmbeddingModel model;
    model.config = c;
    model.vocab = Vocabulary(std::move(words), total_tokens, c.min_count);
    model.n_paragraphs = r.get<std::uint64_t>();

    model.input.resize(model.input_rows() * c.dim);
    model.output.resize(model.vocab.size() * c.projection_width());
    model.paragraphs.resize(model.n_paragraphs * c.dim);
    r.bytes(model.input.data(), model.input.size() * sizeof(float));
    r.bytes(model.output.data(), model.output.size() * sizeof(float));
    r.bytes(model.paragraphs.data(), model.paragraphs.size() * sizeof(float));
    if (!r.at_end())
        throw FormatError("trailing bytes after model data: " + path);
    return model;
}

bool is_native_model_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw IoError("cannot open model file: " + path);
    char magic[4] = {0, 0, 0, 0};
    in.read(magic, sizeof magic);
    return in.gcount() == sizeof magic && std::memcmp(magic, kMagic, sizeof magic) == 0;
}

void export_text_vectors(const EmbeddingModel& model, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw IoError("cannot open vector file for writing: " + path);
    const std::size_t dim = model.config.dim;
    out << model.vocab.size() << ' ' << dim << '\n';
    std::vector<float> vec(dim);
    char buf[64];
    for (std::size_t i = 0; i < model.vocab.size(); ++i) {
        const std::string& token = model.vocab.word(static_cast<std::int32_t>(i)).token;
        compose_word_vector(model, token, vec);
        out << token;
        for (std::size_t j = 0; j < dim; ++j) {
            std::snprintf(buf, sizeof buf, " %.6g", static_cast<double>(vec[j]));
            out << buf;
        }
        out << '\n';
    }
    if (!out)
        throw IoError("write failed: " + path);
}

EmbeddingModel import_text_vectors(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw IoError("cannot open vector file: " + path);
    std::string line;
    if (!std::getline(in, line))
        throw FormatError("empty vector file: " + path);
    std::istringstream header(line);
    std::uint64_t n_words = 0;
    std::uint32_t dim = 0;
    if (!(header >> n_words >> dim) || n_words == 0 || dim == 0)
        throw FormatError("bad vector file header (want \"<V> <dim>\"): " + path);

    TrainConfig c;
    c.algo = Algo::cbow;
    c.dim = dim;
    c.minn = 0;
    c.maxn = 0;
    c.min_count = 1;

    std::vector<WordEntry> words;
    std::vector<float> input;
    words.reserve(n_words);
    input.reserve(n_words * dim);
    std::uint64_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty())
            continue;
        std::istringstream row(line);
        std::string token;
        if (!(row >> token))
            throw FormatError(path + ":" + std::to_string(line_no) + ": missing token");
        for (std::uint32_t j = 0; j < dim; ++j) {
            float v;
            if (!(row >> v))
                throw FormatError(path + ":" + std::to_string(line_no) + ": expected " +
                                  std::to_string(dim) + " values for '" + token + "'");
            input.push_back(v);
        }
        float extra;
        if (row >> extra)
            throw FormatError(path + ":" + std::to_string(line_no) + ": more than " +
                              std::to_string(dim) + " values for '" + token + "'");
        words.push_back({std::move(token), 1});
    }
    if (words.size() != n_words)
        throw FormatError(path + ": header promises " + std::to_string(n_words) +
                          " words, file holds " + std::to_string(words.size()));

    EmbeddingModel model;
    model.config = c;
    model.vocab = Vocabulary(std::move(words), n_words, 1);
    model.input = std::move(input);
    model.output.assign(model.vocab.size() * dim, 0.0f);
    return model;
}

EmbeddingModel load_any_model(const std::string& path) {
    return is_native_model_file(path) ? load_model(path) : import_text_vectors(path);
}

} // namespace semsim
