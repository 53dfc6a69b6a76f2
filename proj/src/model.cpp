#include "dagseg/model.hpp"

#include "dagseg/errors.hpp"

namespace dagseg {

const char* variant_name(Variant v) {
    switch (v) {
    case Variant::Unigram: return "unigram";
    case Variant::Bigram: return "bigram";
    case Variant::WsDag: return "ws-dag";
    case Variant::WiDag: return "wi-dag";
    }
    return "?";
}

Variant variant_from_name(const std::string& name) {
    if (name == "unigram") return Variant::Unigram;
    if (name == "bigram") return Variant::Bigram;
    if (name == "ws-dag") return Variant::WsDag;
    if (name == "wi-dag") return Variant::WiDag;
    throw ConfigError("unknown encoder variant \"" + name +
                      "\" (expected unigram, bigram, ws-dag or wi-dag)");
}

bool is_dag_variant(Variant v) { return v == Variant::WsDag || v == Variant::WiDag; }

void TrainConfig::validate() const {
    if (embed_dim < 1) throw ConfigError("embed_dim must be positive");
    if (hidden_dim < 1) throw ConfigError("hidden_dim must be positive");
    if (!(learning_rate > 0.0)) throw ConfigError("learning_rate must be positive");
    if (l2 < 0.0) throw ConfigError("l2 must be nonnegative");
    if (margin < 0.0) throw ConfigError("margin must be nonnegative");
    if (dropout < 0.0 || dropout >= 1.0) throw ConfigError("dropout must be in [0, 1)");
    if (iv_dropout < 0.0 || iv_dropout > 1.0)
        throw ConfigError("iv_dropout must be in [0, 1]");
    if (batch_size < 1) throw ConfigError("batch_size must be positive");
    if (epochs < 1) throw ConfigError("epochs must be positive");
    if (l_max < 1) throw ConfigError("l_max must be positive");
    if (max_word_len < 0) throw ConfigError("max_word_len must be nonnegative");
    if (dev_fraction < 0.0 || dev_fraction >= 1.0)
        throw ConfigError("dev_fraction must be in [0, 1)");
    if (clip_norm < 0.0) throw ConfigError("clip_norm must be nonnegative");
    if (adagrad_eps < 0.0) throw ConfigError("adagrad_eps must be nonnegative");
}

static void add_gate_set(ParamStore& store, const std::string& prefix, int in_dim,
                         int hid_dim) {
    for (const char* gate : {"i", "o", "f", "c"}) {
        store.add(prefix + ".W" + gate, hid_dim, in_dim);
        store.add(prefix + ".U" + gate, hid_dim, hid_dim);
        store.add(prefix + ".b" + gate, hid_dim, 1);
    }
}

static void add_wi_gate_set(ParamStore& store, const std::string& prefix, int in_dim,
                            int hid_dim, int l_max) {
    for (int l = 1; l <= l_max; ++l) {
        std::string lp = prefix + ".l" + std::to_string(l);
        for (const char* gate : {"i", "o", "f", "c"}) {
            store.add(lp + ".W" + gate, hid_dim, in_dim);
            store.add(lp + ".U" + gate, hid_dim, hid_dim);
        }
    }
    for (const char* gate : {"i", "o", "f", "c"})
        store.add(prefix + ".b" + gate, hid_dim, 1);
}

SegModel SegModel::create(Variant v, const TrainConfig& cfg, Vocabulary vocab,
                          BigramVocab bigrams) {
    cfg.validate();
    SegModel m;
    m.variant = v;
    m.cfg = cfg;
    m.vocab = std::move(vocab);
    m.bigrams = std::move(bigrams);

    int de = cfg.embed_dim;
    int dh = cfg.hidden_dim;
    m.store.add("E.word", m.vocab.size(), de).weight_decay = cfg.l2_embeddings;
    int in_dim = de;
    if (v == Variant::Bigram) {
        m.store.add("E.bigram", m.bigrams.size(), de).weight_decay = cfg.l2_embeddings;
        in_dim = 3 * de;
    }
    for (const char* dir : {"fwd", "bwd"}) {
        if (v == Variant::WiDag)
            add_wi_gate_set(m.store, dir, in_dim, dh, cfg.l_max);
        else
            add_gate_set(m.store, dir, in_dim, dh);
    }
    m.store.add("A", kNumTags, kNumTags);
    m.store.add("A.start", kNumTags, 1);
    m.store.add("Ws", kNumTags, 2 * dh);
    m.store.add("bs", kNumTags, 1);

    m.rebuild_automaton();
    return m;
}

GateParams SegModel::gates(bool backward) {
    std::string p = backward ? "bwd" : "fwd";
    GateParams g;
    g.Wi = &store.get(p + ".Wi");
    g.Ui = &store.get(p + ".Ui");
    g.bi = &store.get(p + ".bi");
    g.Wo = &store.get(p + ".Wo");
    g.Uo = &store.get(p + ".Uo");
    g.bo = &store.get(p + ".bo");
    g.Wf = &store.get(p + ".Wf");
    g.Uf = &store.get(p + ".Uf");
    g.bf = &store.get(p + ".bf");
    g.Wc = &store.get(p + ".Wc");
    g.Uc = &store.get(p + ".Uc");
    g.bc = &store.get(p + ".bc");
    return g;
}

WiGateParams SegModel::wi_gate_set(bool backward) {
    std::string p = backward ? "bwd" : "fwd";
    WiGateParams g;
    for (int l = 1; l <= cfg.l_max; ++l) {
        std::string lp = p + ".l" + std::to_string(l);
        g.Wi.push_back(&store.get(lp + ".Wi"));
        g.Ui.push_back(&store.get(lp + ".Ui"));
        g.Wo.push_back(&store.get(lp + ".Wo"));
        g.Uo.push_back(&store.get(lp + ".Uo"));
        g.Wf.push_back(&store.get(lp + ".Wf"));
        g.Uf.push_back(&store.get(lp + ".Uf"));
        g.Wc.push_back(&store.get(lp + ".Wc"));
        g.Uc.push_back(&store.get(lp + ".Uc"));
    }
    g.bi = &store.get(p + ".bi");
    g.bo = &store.get(p + ".bo");
    g.bf = &store.get(p + ".bf");
    g.bc = &store.get(p + ".bc");
    return g;
}

Lattice SegModel::make_lattice(const std::vector<char32_t>& chars) const {
    return build_lattice(chars, automaton, vocab, cfg.max_word_len);
}

std::vector<NodeId> SegModel::build_emissions(Graph& g, const std::vector<char32_t>& chars,
                                              const Lattice* lat, bool train_mode, Rng* rng,
                                              const EdgeInputIds* edge_ids) {
    if (chars.empty()) throw DataError("cannot segment an empty sentence");
    double p = train_mode ? cfg.dropout : 0.0;
    std::vector<NodeId> states;
    if (!is_dag()) {
        std::vector<NodeId> z =
            variant == Variant::Unigram
                ? embed_unigram(g, chars, vocab, word_table())
                : embed_bigram(g, chars, vocab, bigrams, word_table(), bigram_table());
        if (p > 0.0 && rng)
            for (NodeId& zi : z) zi = apply_dropout(g, zi, p, *rng);
        std::vector<NodeId> fh = lstm_chain(g, z, gates(false), false);
        std::vector<NodeId> bh = lstm_chain(g, z, gates(true), true);
        states = bilstm_concat(g, fh, bh);
    } else {
        if (!lat) throw GraphError("dag variants need a lattice to build emissions");
        EdgeInputIds local;
        if (!edge_ids) {
            bool map_multi = !train_mode && cfg.iv_dropout >= 1.0;
            local = edge_input_ids(*lat, vocab, map_multi);
            edge_ids = &local;
        }
        EdgeNodes z = edge_nodes(g, *lat, *edge_ids, word_table(), p, rng);
        std::vector<NodeId> fh, bh;
        if (variant == Variant::WsDag) {
            fh = ws_dag_lstm(g, *lat, z.fwd, gates(false), false);
            bh = ws_dag_lstm(g, *lat, z.bwd, gates(true), true);
        } else {
            fh = wi_dag_lstm(g, *lat, z.fwd, wi_gate_set(false), false);
            bh = wi_dag_lstm(g, *lat, z.bwd, wi_gate_set(true), true);
        }
        states = bilstm_concat(g, fh, bh);
    }
    return emissions(g, states, emit_w(), emit_b());
}

TagPath SegModel::decode(const std::vector<char32_t>& chars, const Lattice* lat) {
    Graph g;
    Lattice local;
    if (is_dag() && !lat) {
        local = make_lattice(chars);
        lat = &local;
    }
    std::vector<NodeId> em = build_emissions(g, chars, lat, false, nullptr, nullptr);
    EmissionTable f = emission_values(g, em);
    return viterbi(f, transitions().value, start_row().value);
}

std::vector<Span> SegModel::segment(const std::vector<char32_t>& chars) {
    return tags_to_spans(decode(chars).tags);
}

} // namespace dagseg
