#include "dagseg/model_io.hpp"

#include <bit>
#include <cstring>
#include <fstream>

#include "dagseg/errors.hpp"
#include "dagseg/rng.hpp"

namespace dagseg {

namespace {

constexpr char kMagic[4] = {'D', 'S', 'G', 'M'};
constexpr std::uint32_t kVersion = 1;

void put_u8(std::string& b, std::uint8_t v) { b.push_back(static_cast<char>(v)); }

void put_u32(std::string& b, std::uint32_t v) {
    for (int i = 0; i < 4; ++i) b.push_back(static_cast<char>((v >> (8 * i)) & 0xFF));
}

void put_u64(std::string& b, std::uint64_t v) {
    for (int i = 0; i < 8; ++i) b.push_back(static_cast<char>((v >> (8 * i)) & 0xFF));
}

void put_f64(std::string& b, double v) { put_u64(b, std::bit_cast<std::uint64_t>(v)); }

struct Reader {
    const std::string& buf;
    std::size_t at = 0;

    void need(std::size_t n) const {
        if (at + n > buf.size()) throw DataError("truncated model file");
    }
    std::uint8_t u8() {
        need(1);
        return static_cast<std::uint8_t>(buf[at++]);
    }
    std::uint32_t u32() {
        need(4);
        std::uint32_t v = 0;
        for (int i = 0; i < 4; ++i)
            v |= static_cast<std::uint32_t>(static_cast<std::uint8_t>(buf[at + static_cast<std::size_t>(i)]))
                 << (8 * i);
        at += 4;
        return v;
    }
    std::uint64_t u64() {
        need(8);
        std::uint64_t v = 0;
        for (int i = 0; i < 8; ++i)
            v |= static_cast<std::uint64_t>(static_cast<std::uint8_t>(buf[at + static_cast<std::size_t>(i)]))
                 << (8 * i);
        at += 8;
        return v;
    }
    double f64() { return std::bit_cast<double>(u64()); }
    std::string bytes(std::size_t n) {
        need(n);
        std::string s = buf.substr(at, n);
        at += n;
        return s;
    }
};

} // namespace

void save_model(const SegModel& model, const std::string& path) {
    std::string b;
    b.append(kMagic, 4);
    put_u32(b, kVersion);
    put_u8(b, static_cast<std::uint8_t>(model.variant));

    const TrainConfig& c = model.cfg;
    put_u32(b, static_cast<std::uint32_t>(c.embed_dim));
    put_u32(b, static_cast<std::uint32_t>(c.hidden_dim));
    put_f64(b, c.learning_rate);
    put_f64(b, c.l2);
    put_f64(b, c.margin);
    put_f64(b, c.dropout);
    put_f64(b, c.iv_dropout);
    put_u32(b, static_cast<std::uint32_t>(c.batch_size));
    put_u64(b, c.seed);
    put_u32(b, static_cast<std::uint32_t>(c.epochs));
    put_u32(b, static_cast<std::uint32_t>(c.l_max));
    put_u32(b, static_cast<std::uint32_t>(c.max_word_len));
    put_f64(b, c.dev_fraction);
    put_f64(b, c.clip_norm);
    put_f64(b, c.adagrad_eps);
    put_u8(b, c.plain_decode_train ? 1 : 0);
    put_u8(b, c.l2_embeddings ? 1 : 0);
    put_u8(b, c.stop_on_zero_loss ? 1 : 0);

    put_u32(b, static_cast<std::uint32_t>(model.vocab.size() - Vocabulary::kFirstWord));
    for (int id = Vocabulary::kFirstWord; id < model.vocab.size(); ++id) {
        const Vocabulary::Entry& e = model.vocab.entry(id);
        std::string utf8 = encode_utf8(e.text);
        put_u32(b, static_cast<std::uint32_t>(utf8.size()));
        b += utf8;
        put_u8(b, static_cast<std::uint8_t>((e.from_train ? 1 : 0) | (e.external ? 2 : 0)));
    }

    put_u32(b, static_cast<std::uint32_t>(model.bigrams.size() - 1));
    for (int id = 1; id < model.bigrams.size(); ++id)
        put_u64(b, model.bigrams.keys()[static_cast<std::size_t>(id)]);

    put_u32(b, static_cast<std::uint32_t>(model.store.size()));
    for (std::size_t i = 0; i < model.store.size(); ++i) {
        const Param& p = model.store.at(i);
        put_u32(b, static_cast<std::uint32_t>(p.name.size()));
        b += p.name;
        put_u8(b, p.trainable ? 1 : 0);
        put_u8(b, p.weight_decay ? 1 : 0);
        put_u32(b, static_cast<std::uint32_t>(p.value.rows));
        put_u32(b, static_cast<std::uint32_t>(p.value.cols));
        for (double v : p.value.v) put_f64(b, v);
    }

    put_u64(b, fnv1a64(b));

    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open model file for writing: " + path);
    out.write(b.data(), static_cast<std::streamsize>(b.size()));
    out.flush();
    if (!out) throw IoError("failed writing model file: " + path);
}

SegModel load_model(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open model file: " + path);
    std::string buf((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());

    if (buf.size() < 4 || std::memcmp(buf.data(), kMagic, 4) != 0)
        throw DataError("not a model file (bad magic): " + path);
    if (buf.size() < 16) throw DataError("truncated model file");
    std::string body = buf.substr(0, buf.size() - 8);
    Reader tail{buf, buf.size() - 8};
    if (tail.u64() != fnv1a64(body)) throw DataError("model file checksum mismatch");

    Reader r{body, 4};
    std::uint32_t version = r.u32();
    if (version != kVersion)
        throw ConfigError("unsupported model format version " + std::to_string(version));

    SegModel m;
    std::uint8_t variant_byte = r.u8();
    if (variant_byte > 3) throw DataError("model file declares an unknown variant");
    m.variant = static_cast<Variant>(variant_byte);

    TrainConfig& c = m.cfg;
    c.embed_dim = static_cast<int>(r.u32());
    c.hidden_dim = static_cast<int>(r.u32());
    c.learning_rate = r.f64();
    c.l2 = r.f64();
    c.margin = r.f64();
    c.dropout = r.f64();
    c.iv_dropout = r.f64();
    c.batch_size = static_cast<int>(r.u32());
    c.seed = r.u64();
    c.epochs = static_cast<int>(r.u32());
    c.l_max = static_cast<int>(r.u32());
    c.max_word_len = static_cast<int>(r.u32());
    c.dev_fraction = r.f64();
    c.clip_norm = r.f64();
    c.adagrad_eps = r.f64();
    c.plain_decode_train = r.u8() != 0;
    c.l2_embeddings = r.u8() != 0;
    c.stop_on_zero_loss = r.u8() != 0;

    std::uint32_t words = r.u32();
    for (std::uint32_t i = 0; i < words; ++i) {
        std::uint32_t len = r.u32();
        std::string utf8 = r.bytes(len);
        std::uint8_t flags = r.u8();
        std::vector<char32_t> cps = decode_utf8(utf8);
        m.vocab.add(std::u32string(cps.begin(), cps.end()), (flags & 1) != 0,
                    (flags & 2) != 0);
    }

    std::uint32_t pairs = r.u32();
    for (std::uint32_t i = 0; i < pairs; ++i) m.bigrams.add(r.u64());

    std::uint32_t tensors = r.u32();
    for (std::uint32_t i = 0; i < tensors; ++i) {
        std::uint32_t name_len = r.u32();
        std::string name = r.bytes(name_len);
        bool trainable = r.u8() != 0;
        bool decay = r.u8() != 0;
        int rows = static_cast<int>(r.u32());
        int cols = static_cast<int>(r.u32());
        if (rows < 1 || cols < 1) throw DataError("model file tensor has bad shape");
        Param& p = m.store.add(name, rows, cols, trainable);
        p.weight_decay = decay;
        for (double& v : p.value.v) v = r.f64();
    }
    if (r.at != body.size()) throw DataError("model file has trailing bytes");

    m.rebuild_automaton();
    return m;
}

int inject_external_vocab(SegModel& model, const std::vector<std::u32string>& words) {
    if (!model.is_dag())
        throw ConfigError("external vocabulary needs a dag variant; this model is " +
                          std::string(variant_name(model.variant)));
    int added = 0;
    for (const std::u32string& w : words) {
        if (w.empty() || model.vocab.contains(w)) continue;
        model.vocab.add(w, false, true);
        ++added;
    }
    if (added > 0) model.rebuild_automaton();
    return added;
}

std::vector<std::u32string> load_wordlist(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open word list: " + path);
    std::vector<std::u32string> out;
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        std::vector<char32_t> cps = decode_utf8(line, line_no);
        out.emplace_back(cps.begin(), cps.end());
    }
    return out;
}

} // namespace dagseg
