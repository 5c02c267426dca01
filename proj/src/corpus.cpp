#include "semsim/corpus.hpp"

#include <algorithm>
#include <cctype>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "stopwords.inc"
#include "abbreviations.inc"

namespace semsim {

namespace {

bool is_ascii_space(char c) {
    return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v';
}

bool is_ascii_alnum(char c) {
    return std::isalnum(static_cast<unsigned char>(c)) != 0;
}

bool is_ascii_digit(char c) {
    return c >= '0' && c <= '9';
}

bool is_sentence_terminator(char c) {
    return c == '.' || c == '?' || c == '!';
}

// UTF-8 en dash (U+2013) and em dash (U+2014).
constexpr std::string_view kEnDash = "\xe2\x80\x93";
constexpr std::string_view kEmDash = "\xe2\x80\x94";

std::vector<std::string> split_lines(std::string_view text) {
    std::vector<std::string> out;
    std::size_t start = 0;
    while (start <= text.size()) {
        std::size_t end = text.find('\n', start);
        if (end == std::string_view::npos) {
            if (start < text.size())
                out.emplace_back(text.substr(start));
            break;
        }
        out.emplace_back(text.substr(start, end - start));
        start = end + 1;
    }
    return out;
}

std::string collapse_whitespace(std::string_view s) {
    std::string out;
    out.reserve(s.size());
    bool pending_space = false;
    for (char c : s) {
        if (is_ascii_space(c)) {
            if (!out.empty())
                pending_space = true;
        } else {
            if (pending_space)
                out.push_back(' ');
            pending_space = false;
            out.push_back(c);
        }
    }
    return out;
}

} // namespace

SentenceSegmenter::SentenceSegmenter() : abbrev_(builtin_abbreviations()) {}

SentenceSegmenter::SentenceSegmenter(std::unordered_set<std::string> abbreviations)
    : abbrev_(std::move(abbreviations)) {}

bool SentenceSegmenter::is_abbreviation_before(std::string_view text, std::size_t dot_pos) const {
    // Collect the word in front of the dot; interior dots are kept so that
    // "e.g." and "i.e." match their list entries.
    std::size_t begin = dot_pos;
    while (begin > 0) {
        char c = text[begin - 1];
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '.')
            --begin;
        else
            break;
    }
    if (begin == dot_pos)
        return false;
    std::string word(text.substr(begin, dot_pos - begin));
    while (!word.empty() && word.back() == '.')
        word.pop_back();
    while (!word.empty() && word.front() == '.')
        word.erase(word.begin());
    std::transform(word.begin(), word.end(), word.begin(),
                   [](unsigned char c) { return std::tolower(c); });
    return abbrev_.count(word) > 0;
}

std::vector<std::string> SentenceSegmenter::segment(std::string_view text) const {
    std::vector<std::string> sentences;
    std::size_t start = 0;
    for (std::size_t i = 0; i < text.size(); ++i) {
        if (!is_sentence_terminator(text[i]))
            continue;
        // Look past the terminator: whitespace, then uppercase or digit.
        std::size_t j = i + 1;
        if (j >= text.size() || !is_ascii_space(text[j]))
            continue;
        while (j < text.size() && is_ascii_space(text[j]))
            ++j;
        if (j >= text.size())
            continue;
        char next = text[j];
        bool starts_new = std::isupper(static_cast<unsigned char>(next)) || is_ascii_digit(next);
        if (!starts_new)
            continue;
        if (text[i] == '.' && is_abbreviation_before(text, i))
            continue;
        std::string sentence = collapse_whitespace(text.substr(start, i + 1 - start));
        if (!sentence.empty())
            sentences.push_back(std::move(sentence));
        start = j;
    }
    if (start < text.size()) {
        std::string tail = collapse_whitespace(text.substr(start));
        if (!tail.empty())
            sentences.push_back(std::move(tail));
    }
    return sentences;
}

namespace {

// A '.' or ',' is part of a number when flanked by digits on both sides;
// '-' stays inside a token when flanked by alphanumerics, so that compound
// splitting remains a separate, optional step.
bool keeps_char_inside_token(std::string_view run, std::size_t pos) {
    char c = run[pos];
    bool has_prev = pos > 0;
    bool has_next = pos + 1 < run.size();
    if (c == '-')
        return has_prev && has_next && is_ascii_alnum(run[pos - 1]) && is_ascii_alnum(run[pos + 1]);
    if (c == '.' || c == ',')
        return has_prev && has_next && is_ascii_digit(run[pos - 1]) && is_ascii_digit(run[pos + 1]);
    return false;
}

bool is_splitting_punct(char c) {
    return std::ispunct(static_cast<unsigned char>(c)) != 0;
}

} // namespace

SentenceLine tokenize(std::string_view sentence) {
    std::string lowered(sentence);
    std::transform(lowered.begin(), lowered.end(), lowered.begin(), [](unsigned char c) {
        return c < 0x80 ? static_cast<char>(std::tolower(c)) : static_cast<char>(c);
    });

    SentenceLine tokens;
    std::size_t i = 0;
    const std::string_view text = lowered;
    while (i < text.size()) {
        if (is_ascii_space(text[i])) {
            ++i;
            continue;
        }
        std::size_t run_end = i;
        while (run_end < text.size() && !is_ascii_space(text[run_end]))
            ++run_end;
        std::string_view run = text.substr(i, run_end - i);

        std::string current;
        for (std::size_t k = 0; k < run.size(); ++k) {
            char c = run[k];
            if (is_splitting_punct(c) && !keeps_char_inside_token(run, k)) {
                if (!current.empty()) {
                    tokens.push_back(std::move(current));
                    current.clear();
                }
                tokens.emplace_back(1, c);
            } else {
                current.push_back(c);
            }
        }
        if (!current.empty())
            tokens.push_back(std::move(current));
        i = run_end;
    }
    return tokens;
}

SentenceLine split_hyphen_compounds(const SentenceLine& line) {
    SentenceLine out;
    out.reserve(line.size());
    for (const std::string& tok : line) {
        if (tok.find('-') == std::string::npos) {
            out.push_back(tok);
            continue;
        }
        bool interior = false;
        for (std::size_t i = 1; i + 1 < tok.size(); ++i) {
            if (tok[i] == '-' && is_ascii_alnum(tok[i - 1]) && is_ascii_alnum(tok[i + 1])) {
                interior = true;
                break;
            }
        }
        if (interior) {
            std::size_t start = 0;
            while (start <= tok.size()) {
                std::size_t end = tok.find('-', start);
                if (end == std::string::npos)
                    end = tok.size();
                if (end > start)
                    out.emplace_back(tok.substr(start, end - start));
                start = end + 1;
            }
        } else {
            std::size_t b = 0, e = tok.size();
            while (b < e && tok[b] == '-')
                ++b;
            while (e > b && tok[e - 1] == '-')
                --e;
            if (e > b)
                out.emplace_back(tok.substr(b, e - b));
        }
    }
    return out;
}

std::size_t line_chars(const SentenceLine& line) {
    if (line.empty())
        return 0;
    std::size_t chars = line.size() - 1; // joining spaces
    for (const std::string& tok : line)
        chars += tok.size();
    return chars;
}

std::string join_tokens(const SentenceLine& line) {
    std::string out;
    out.reserve(line_chars(line));
    for (std::size_t i = 0; i < line.size(); ++i) {
        if (i > 0)
            out.push_back(' ');
        out += line[i];
    }
    return out;
}

bool within_line_limit(const SentenceLine& line, std::size_t max_chars) {
    return line_chars(line) < max_chars;
}

std::vector<SentenceLine> filter_long_lines(const std::vector<SentenceLine>& corpus,
                                            std::size_t max_chars) {
    std::vector<SentenceLine> out;
    out.reserve(corpus.size());
    for (const SentenceLine& line : corpus)
        if (within_line_limit(line, max_chars))
            out.push_back(line);
    return out;
}

SentenceLine normalize_for_string_metrics(const SentenceLine& line,
                                          const std::unordered_set<std::string>& stopwords) {
    static const std::unordered_set<std::string> punct = {
        ".", ",", ":", ";", "?", "!", "/", "-", std::string(kEnDash), std::string(kEmDash)};
    SentenceLine out;
    out.reserve(line.size());
    for (const std::string& tok : line) {
        if (punct.count(tok) || stopwords.count(tok))
            continue;
        out.push_back(tok);
    }
    return out;
}

void CorpusStatsAccumulator::add(const SentenceLine& line) {
    ++n_sentences_;
    n_tokens_ += line.size();
    std::uint64_t chars = line_chars(line);
    total_chars_ += chars;
    max_chars_ = std::max(max_chars_, chars);
    for (const std::string& tok : line)
        unique_.insert(tok);
}

void CorpusStatsAccumulator::merge(const CorpusStatsAccumulator& other) {
    n_sentences_ += other.n_sentences_;
    n_tokens_ += other.n_tokens_;
    total_chars_ += other.total_chars_;
    max_chars_ = std::max(max_chars_, other.max_chars_);
    unique_.insert(other.unique_.begin(), other.unique_.end());
}

CorpusStats CorpusStatsAccumulator::finish() const {
    CorpusStats stats;
    stats.n_sentences = n_sentences_;
    stats.n_tokens = n_tokens_;
    stats.n_unique_words = unique_.size();
    stats.max_line_chars = max_chars_;
    stats.avg_line_chars =
        n_sentences_ == 0 ? 0.0 : static_cast<double>(total_chars_) / static_cast<double>(n_sentences_);
    return stats;
}

CorpusStats corpus_stats(const std::vector<SentenceLine>& corpus) {
    CorpusStatsAccumulator acc;
    for (const SentenceLine& line : corpus)
        acc.add(line);
    return acc.finish();
}

void for_each_corpus_line(const std::string& path,
                          const std::function<void(const SentenceLine&)>& fn) {
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw IoError("cannot open corpus file: " + path);
    std::string line;
    SentenceLine tokens;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r')
            line.pop_back();
        tokens.clear();
        std::size_t start = 0;
        while (start < line.size()) {
            std::size_t end = line.find(' ', start);
            if (end == std::string::npos)
                end = line.size();
            if (end > start)
                tokens.emplace_back(line.substr(start, end - start));
            start = end + 1;
        }
        fn(tokens);
    }
}

std::vector<std::string> collect_input_files(const std::string& path) {
    namespace fs = std::filesystem;
    std::vector<std::string> files;
    fs::path p(path);
    if (!fs::exists(p))
        throw IoError("input path does not exist: " + path);
    if (fs::is_directory(p)) {
        for (const auto& entry : fs::recursive_directory_iterator(p)) {
            if (entry.is_regular_file() && entry.path().extension() == ".txt")
                files.push_back(entry.path().string());
        }
        std::sort(files.begin(), files.end());
    } else {
        files.push_back(p.string());
    }
    return files;
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw IoError("cannot open file: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

namespace {

std::vector<std::string> parse_word_list(std::string_view blob) {
    std::vector<std::string> words;
    for (std::string& line : split_lines(blob)) {
        while (!line.empty() && (line.back() == '\r' || line.back() == ' '))
            line.pop_back();
        if (!line.empty())
            words.push_back(std::move(line));
    }
    return words;
}

} // namespace

const std::vector<std::string>& builtin_stopword_list() {
    static const std::vector<std::string> list = parse_word_list(kStopwordsData);
    return list;
}

const std::unordered_set<std::string>& builtin_stopwords() {
    static const std::unordered_set<std::string> set(builtin_stopword_list().begin(),
                                                     builtin_stopword_list().end());
    return set;
}

const std::unordered_set<std::string>& builtin_abbreviations() {
    static const std::unordered_set<std::string> set = [] {
        std::vector<std::string> list = parse_word_list(kAbbreviationsData);
        return std::unordered_set<std::string>(list.begin(), list.end());
    }();
    return set;
}

} // namespace semsim
