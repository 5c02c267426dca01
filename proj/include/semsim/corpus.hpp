#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <string>
#include <string_view>
#include <unordered_set>
#include <vector>

#include "semsim/error.hpp"

namespace semsim {

// One sentence as an ordered list of whitespace-free tokens.
using SentenceLine = std::vector<std::string>;

struct RawDocument {
    std::string doc_id;
    std::string text; // UTF-8
};

struct CorpusStats {
    std::uint64_t n_sentences = 0;
    std::uint64_t n_tokens = 0;
    std::uint64_t n_unique_words = 0;
    double avg_line_chars = 0.0; // 0 for an empty corpus
    std::uint64_t max_line_chars = 0;
};

// Rule-based sentence boundary detector: splits after '.', '?' or '!'
// followed by whitespace and an uppercase letter or digit, unless the word
// in front of a '.' is a known abbreviation. Output sentences are trimmed
// and have internal whitespace runs collapsed to single spaces.
class SentenceSegmenter {
  public:
    SentenceSegmenter(); // bundled abbreviation list
    explicit SentenceSegmenter(std::unordered_set<std::string> abbreviations);

    std::vector<std::string> segment(std::string_view text) const;

  private:
    bool is_abbreviation_before(std::string_view text, std::size_t dot_pos) const;

    std::unordered_set<std::string> abbrev_; // lowercase, no trailing dot
};

// Lowercases and splits into tokens. Tokens are maximal runs of
// non-whitespace characters with punctuation split into single-character
// tokens, except that '-' between alphanumerics and '.'/',' between digits
// stay inside their token ("anti-her2", "3.5").
SentenceLine tokenize(std::string_view sentence);

// Replaces every token holding an interior hyphen between alphanumerics by
// its hyphen-separated parts; leading/trailing hyphens are stripped. Tokens
// reduced to nothing (a bare "-") are dropped.
SentenceLine split_hyphen_compounds(const SentenceLine& line);

// Character length of the canonical form: tokens joined by single spaces.
std::size_t line_chars(const SentenceLine& line);

std::string join_tokens(const SentenceLine& line);

// Keeps exactly the lines with line_chars(line) < max_chars, in order.
bool within_line_limit(const SentenceLine& line, std::size_t max_chars);
std::vector<SentenceLine> filter_long_lines(const std::vector<SentenceLine>& corpus,
                                            std::size_t max_chars);

// Drops stopwords and the punctuation tokens . , : ; ? ! / - (plus en/em
// dashes); order preserved. Stopwords must be lowercase.
SentenceLine normalize_for_string_metrics(const SentenceLine& line,
                                          const std::unordered_set<std::string>& stopwords);

// Streaming corpus statistics with associative merge, so partial
// aggregates over disjoint line ranges combine to the same result.
class CorpusStatsAccumulator {
  public:
    void add(const SentenceLine& line);
    void merge(const CorpusStatsAccumulator& other);
    CorpusStats finish() const;

  private:
    std::uint64_t n_sentences_ = 0;
    std::uint64_t n_tokens_ = 0;
    std::uint64_t total_chars_ = 0;
    std::uint64_t max_chars_ = 0;
    std::unordered_set<std::string> unique_;
};

CorpusStats corpus_stats(const std::vector<SentenceLine>& corpus);

// Streams a one-sentence-per-line corpus file, splitting each line on
// single spaces. Throws IoError if the file cannot be opened.
void for_each_corpus_line(const std::string& path,
                          const std::function<void(const SentenceLine&)>& fn);

// A single .txt file, or every *.txt under a directory tree in sorted order.
std::vector<std::string> collect_input_files(const std::string& path);

std::string read_file(const std::string& path);

// Bundled data files, compiled in (see data/).
const std::vector<std::string>& builtin_stopword_list();
const std::unordered_set<std::string>& builtin_stopwords();
const std::unordered_set<std::string>& builtin_abbreviations();

} // namespace semsim
