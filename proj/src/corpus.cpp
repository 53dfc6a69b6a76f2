#include "dagseg/corpus.hpp"

#include <fstream>
#include <sstream>
#include <unordered_set>

#include "dagseg/errors.hpp"

namespace dagseg {

char tag_letter(Tag t) {
    switch (t) {
    case Tag::B: return 'B';
    case Tag::M: return 'M';
    case Tag::E: return 'E';
    case Tag::S: return 'S';
    }
    return '?';
}

Vocabulary::Vocabulary() {
    entries_.resize(kFirstWord); // reserved slots for <OOV>, <BOS>, <EOS>
}

int Vocabulary::add(const std::u32string& word, bool from_train, bool external) {
    if (word.empty()) throw DataError("empty vocabulary entry");
    auto it = index_.find(word);
    if (it != index_.end()) return it->second;
    int id = static_cast<int>(entries_.size());
    entries_.push_back(Entry{word, from_train, external});
    index_.emplace(word, id);
    return id;
}

int Vocabulary::find(const std::u32string& word) const {
    auto it = index_.find(word);
    return it == index_.end() ? -1 : it->second;
}

int Vocabulary::id_or_oov(const std::u32string& word) const {
    int id = find(word);
    return id < 0 ? kOov : id;
}

int Vocabulary::char_id(char32_t c) const { return id_or_oov(std::u32string(1, c)); }

bool Vocabulary::is_train_word(const std::u32string& word) const {
    int id = find(word);
    return id >= 0 && entries_[static_cast<std::size_t>(id)].from_train;
}

const Vocabulary::Entry& Vocabulary::entry(int id) const {
    return entries_.at(static_cast<std::size_t>(id));
}

int Vocabulary::embedding_id(int id) const {
    return entry(id).external ? kOov : id;
}

[[noreturn]] static void utf8_fail(std::size_t at, int line_no) {
    std::string where = line_no > 0 ? "line " + std::to_string(line_no) + ": " : "";
    throw DataError(where + "invalid UTF-8 at byte offset " + std::to_string(at));
}

std::vector<char32_t> decode_utf8(const std::string& bytes, int line_no) {
    std::vector<char32_t> out;
    std::size_t i = 0;
    while (i < bytes.size()) {
        unsigned char b0 = static_cast<unsigned char>(bytes[i]);
        if (b0 < 0x80) {
            out.push_back(b0);
            ++i;
            continue;
        }
        std::size_t len;
        char32_t cp, min;
        if ((b0 & 0xE0) == 0xC0) {
            len = 2; cp = b0 & 0x1Fu; min = 0x80;
        } else if ((b0 & 0xF0) == 0xE0) {
            len = 3; cp = b0 & 0x0Fu; min = 0x800;
        } else if ((b0 & 0xF8) == 0xF0) {
            len = 4; cp = b0 & 0x07u; min = 0x10000;
        } else {
            utf8_fail(i, line_no);
        }
        if (i + len > bytes.size()) utf8_fail(i, line_no);
        for (std::size_t k = 1; k < len; ++k) {
            unsigned char bk = static_cast<unsigned char>(bytes[i + k]);
            if ((bk & 0xC0) != 0x80) utf8_fail(i, line_no);
            cp = (cp << 6) | (bk & 0x3Fu);
        }
        if (cp < min || cp > 0x10FFFF || (cp >= 0xD800 && cp <= 0xDFFF))
            utf8_fail(i, line_no);
        out.push_back(cp);
        i += len;
    }
    return out;
}

std::string encode_utf8(char32_t c) {
    std::string out;
    if (c < 0x80) {
        out.push_back(static_cast<char>(c));
    } else if (c < 0x800) {
        out.push_back(static_cast<char>(0xC0 | (c >> 6)));
        out.push_back(static_cast<char>(0x80 | (c & 0x3F)));
    } else if (c < 0x10000) {
        out.push_back(static_cast<char>(0xE0 | (c >> 12)));
        out.push_back(static_cast<char>(0x80 | ((c >> 6) & 0x3F)));
        out.push_back(static_cast<char>(0x80 | (c & 0x3F)));
    } else {
        out.push_back(static_cast<char>(0xF0 | (c >> 18)));
        out.push_back(static_cast<char>(0x80 | ((c >> 12) & 0x3F)));
        out.push_back(static_cast<char>(0x80 | ((c >> 6) & 0x3F)));
        out.push_back(static_cast<char>(0x80 | (c & 0x3F)));
    }
    return out;
}

std::string encode_utf8(const std::u32string& s) {
    std::string out;
    for (char32_t c : s) out += encode_utf8(c);
    return out;
}

std::u32string span_text(const Sentence& s, const Span& sp) {
    std::u32string w;
    for (int i = sp.begin; i <= sp.end; ++i)
        w.push_back(s.chars[static_cast<std::size_t>(i - 1)]);
    return w;
}

std::vector<Sentence> load_corpus(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open corpus file: " + path);
    std::vector<Sentence> out;
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        std::vector<char32_t> cps = decode_utf8(line, line_no);
        Sentence s;
        std::size_t i = 0;
        while (i < cps.size()) {
            if (cps[i] == U' ' || cps[i] == U'\t') {
                ++i;
                continue;
            }
            int begin = static_cast<int>(s.chars.size()) + 1;
            while (i < cps.size() && cps[i] != U' ' && cps[i] != U'\t')
                s.chars.push_back(cps[i++]);
            s.spans.push_back(Span{begin, static_cast<int>(s.chars.size())});
        }
        if (!s.chars.empty()) out.push_back(std::move(s));
    }
    return out;
}

std::vector<Tag> spans_to_tags(const std::vector<Span>& spans) {
    if (spans.empty()) throw DataError("empty span set");
    std::vector<Tag> tags;
    int expect = 1;
    for (const Span& sp : spans) {
        if (sp.begin != expect || sp.end < sp.begin)
            throw DataError("spans must tile positions 1..n without gaps or overlaps");
        if (sp.begin == sp.end) {
            tags.push_back(Tag::S);
        } else {
            tags.push_back(Tag::B);
            for (int i = sp.begin + 1; i < sp.end; ++i) tags.push_back(Tag::M);
            tags.push_back(Tag::E);
        }
        expect = sp.end + 1;
    }
    return tags;
}

std::vector<Span> tags_to_spans(const std::vector<Tag>& tags) {
    std::vector<Span> spans;
    int n = static_cast<int>(tags.size());
    int open = 0; // begin of the current word, 0 if none
    for (int i = 1; i <= n; ++i) {
        Tag t = tags[static_cast<std::size_t>(i - 1)];
        if (open == 0) open = i;
        bool close = (t == Tag::E || t == Tag::S || i == n);
        if (!close) {
            Tag next = tags[static_cast<std::size_t>(i)];
            close = (next == Tag::B || next == Tag::S);
        }
        if (close) {
            spans.push_back(Span{open, i});
            open = 0;
        }
    }
    return spans;
}

static std::uint64_t span_key(const Span& sp) {
    return (static_cast<std::uint64_t>(static_cast<std::uint32_t>(sp.begin)) << 32) |
           static_cast<std::uint32_t>(sp.end);
}

SegMetrics evaluate(const std::vector<Sentence>& gold,
                    const std::vector<std::vector<Span>>& pred,
                    const Vocabulary& train_vocab) {
    if (gold.size() != pred.size())
        throw DataError("evaluate: sentence count mismatch (" + std::to_string(gold.size()) +
                        " gold vs " + std::to_string(pred.size()) + " predicted)");
    long matched = 0, gold_total = 0, pred_total = 0;
    long oov_matched = 0, oov_total = 0;
    for (std::size_t k = 0; k < gold.size(); ++k) {
        const Sentence& s = gold[k];
        if (!s.has_gold()) throw DataError("evaluate: sentence without gold segmentation");
        int n = static_cast<int>(s.chars.size());
        int expect = 1;
        for (const Span& sp : pred[k]) {
            if (sp.begin != expect || sp.end < sp.begin)
                throw DataError("evaluate: predicted spans do not tile the sentence");
            expect = sp.end + 1;
        }
        if (expect != n + 1)
            throw DataError("evaluate: predicted spans cover " + std::to_string(expect - 1) +
                            " of " + std::to_string(n) + " characters");
        std::unordered_set<std::uint64_t> pred_set;
        for (const Span& sp : pred[k]) pred_set.insert(span_key(sp));
        pred_total += static_cast<long>(pred[k].size());
        gold_total += static_cast<long>(s.spans.size());
        for (const Span& sp : s.spans) {
            bool hit = pred_set.count(span_key(sp)) > 0;
            if (hit) ++matched;
            if (!train_vocab.is_train_word(span_text(s, sp))) {
                ++oov_total;
                if (hit) ++oov_matched;
            }
        }
    }
    SegMetrics m;
    m.precision = pred_total > 0 ? static_cast<double>(matched) / pred_total : 0.0;
    m.recall = gold_total > 0 ? static_cast<double>(matched) / gold_total : 0.0;
    m.f_value = (m.precision + m.recall) > 0.0
                    ? 2.0 * m.precision * m.recall / (m.precision + m.recall)
                    : 0.0;
    m.oov_recall = oov_total > 0 ? static_cast<double>(oov_matched) / oov_total : 0.0;
    return m;
}

Vocabulary build_train_vocab(const std::vector<Sentence>& corpus) {
    Vocabulary v;
    for (const Sentence& s : corpus) {
        for (char32_t c : s.chars) v.add(std::u32string(1, c), true);
        for (const Span& sp : s.spans) v.add(span_text(s, sp), true);
    }
    return v;
}

double load_embeddings(const std::string& path, const Vocabulary& vocab, Tensor& table) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open embedding file: " + path);
    std::string line;
    if (!std::getline(in, line)) throw DataError("embedding file is empty");
    long count = 0;
    int dim = 0;
    {
        std::istringstream hdr(line);
        std::string extra;
        if (!(hdr >> count >> dim) || (hdr >> extra))
            throw DataError("line 1: malformed embedding header, expected \"count dim\"");
    }
    if (dim != table.cols)
        throw ConfigError("embedding dimension " + std::to_string(dim) +
                          " does not match configured " + std::to_string(table.cols));
    std::unordered_set<int> covered;
    int line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        std::istringstream ls(line);
        std::string token;
        ls >> token;
        std::vector<double> vals;
        vals.reserve(static_cast<std::size_t>(dim));
        std::string field;
        while (ls >> field) {
            try {
                std::size_t used = 0;
                double x = std::stod(field, &used);
                if (used != field.size()) throw std::invalid_argument(field);
                vals.push_back(x);
            } catch (const std::exception&) {
                throw DataError("line " + std::to_string(line_no) +
                                ": malformed embedding value \"" + field + "\"");
            }
        }
        if (static_cast<int>(vals.size()) != dim)
            throw DataError("line " + std::to_string(line_no) + ": expected " +
                            std::to_string(dim) + " values, got " +
                            std::to_string(vals.size()));
        std::vector<char32_t> cps = decode_utf8(token, line_no);
        int id = vocab.find(std::u32string(cps.begin(), cps.end()));
        if (id < Vocabulary::kFirstWord || vocab.entry(id).external || id >= table.rows)
            continue;
        for (int j = 0; j < dim; ++j) table.at(id, j) = vals[static_cast<std::size_t>(j)];
        covered.insert(id);
    }
    int eligible = 0;
    for (int id = Vocabulary::kFirstWord; id < vocab.size(); ++id)
        if (!vocab.entry(id).external && id < table.rows) ++eligible;
    return eligible > 0 ? static_cast<double>(covered.size()) / eligible : 0.0;
}

std::string render_segmentation(const std::vector<char32_t>& chars,
                                const std::vector<Span>& spans) {
    std::string out;
    for (std::size_t k = 0; k < spans.size(); ++k) {
        if (k > 0) out.push_back(' ');
        for (int i = spans[k].begin; i <= spans[k].end; ++i)
            out += encode_utf8(chars[static_cast<std::size_t>(i - 1)]);
    }
    return out;
}

} // namespace dagseg
