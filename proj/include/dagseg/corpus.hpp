#pragma once

#include <cstdint>
#include <string>
#include <unordered_map>
#include <vector>

#include "dagseg/tensor.hpp"

namespace dagseg {

// Character-position tags: begin / middle / end of a word, or single-char word.
// The numeric order B<M<E<S is fixed; decoding and the transition matrix index by it.
enum class Tag : int { B = 0, M = 1, E = 2, S = 3 };
inline constexpr int kNumTags = 4;

char tag_letter(Tag t);

// Word span over character positions, 1-based, both ends inclusive.
struct Span {
    int begin = 0;
    int end = 0;
    friend bool operator==(const Span& a, const Span& b) {
        return a.begin == b.begin && a.end == b.end;
    }
};

struct Sentence {
    std::vector<char32_t> chars;
    std::vector<Span> spans; // gold segmentation; empty when unlabeled
    bool has_gold() const { return !spans.empty(); }
};

// Word-id table. Ids 0..2 are reserved for <OOV>/<BOS>/<EOS>; real entries are
// dense from 3 in insertion order. Entries carry whether they came from the
// training corpus (OOV-recall denominator) and whether they were injected
// after training (external entries have no embedding row of their own).
class Vocabulary {
public:
    static constexpr int kOov = 0;
    static constexpr int kBos = 1;
    static constexpr int kEos = 2;
    static constexpr int kFirstWord = 3;

    struct Entry {
        std::u32string text;
        bool from_train = false;
        bool external = false;
    };

    Vocabulary();

    // Returns the id, inserting if absent. Re-adding an existing word keeps
    // its id and original flags.
    int add(const std::u32string& word, bool from_train, bool external = false);

    int find(const std::u32string& word) const; // -1 if absent
    int id_or_oov(const std::u32string& word) const;
    int char_id(char32_t c) const;
    bool contains(const std::u32string& word) const { return find(word) >= 0; }
    bool is_train_word(const std::u32string& word) const;

    const Entry& entry(int id) const;
    int size() const { return static_cast<int>(entries_.size()); }

    // Embedding-table row for a word id: external entries map to <OOV> since
    // the table is sized at training time and never grows.
    int embedding_id(int id) const;

private:
    std::vector<Entry> entries_;
    std::unordered_map<std::u32string, int> index_;
};

struct SegMetrics {
    double precision = 0.0;
    double recall = 0.0;
    double f_value = 0.0;
    double oov_recall = 0.0;
};

// Strict UTF-8: rejects truncated sequences, overlong forms, surrogates and
// codepoints past U+10FFFF. line_no > 0 is included in error messages.
std::vector<char32_t> decode_utf8(const std::string& bytes, int line_no = 0);
std::string encode_utf8(const std::u32string& s);
std::string encode_utf8(char32_t c);

std::u32string span_text(const Sentence& s, const Span& sp);

// One sentence per line, words separated by ASCII space or tab, empty lines skipped.
std::vector<Sentence> load_corpus(const std::string& path);

std::vector<Tag> spans_to_tags(const std::vector<Span>& spans);

// Total inverse of spans_to_tags: ill-formed tag sequences are repaired, never
// rejected. A word opens at any position without an open word and closes at
// E or S, at the last position, or when the next tag is B or S.
std::vector<Span> tags_to_spans(const std::vector<Tag>& tags);

// Exact span matching. oov_recall counts gold words whose string is not a
// from-train vocabulary entry; an empty denominator yields 0.
SegMetrics evaluate(const std::vector<Sentence>& gold,
                    const std::vector<std::vector<Span>>& pred,
                    const Vocabulary& train_vocab);

// Every character first, then every gold word, per sentence in corpus order.
Vocabulary build_train_vocab(const std::vector<Sentence>& corpus);

// word2vec text format: header "count dim", then "token v1 .. v_dim" lines.
// Fills rows of `table` for matching vocabulary entries; returns the fraction
// of non-special entries that received a row.
double load_embeddings(const std::string& path, const Vocabulary& vocab, Tensor& table);

std::string render_segmentation(const std::vector<char32_t>& chars,
                                const std::vector<Span>& spans);

} // namespace dagseg
