#include "dagseg/encoders.hpp"

#include <algorithm>

#include "dagseg/errors.hpp"

namespace dagseg {

int BigramVocab::add(std::uint64_t key) {
    auto it = index_.find(key);
    if (it != index_.end()) return it->second;
    int id = static_cast<int>(keys_.size());
    keys_.push_back(key);
    index_.emplace(key, id);
    return id;
}

int BigramVocab::find(std::uint64_t key) const {
    auto it = index_.find(key);
    return it == index_.end() ? kOov : it->second;
}

BigramVocab build_bigram_vocab(const std::vector<Sentence>& corpus) {
    BigramVocab bv;
    for (const Sentence& s : corpus) {
        if (s.chars.empty()) continue;
        bv.add(BigramVocab::pair_key(BigramVocab::kBosMark, s.chars.front()));
        for (std::size_t i = 1; i < s.chars.size(); ++i)
            bv.add(BigramVocab::pair_key(s.chars[i - 1], s.chars[i]));
        bv.add(BigramVocab::pair_key(s.chars.back(), BigramVocab::kEosMark));
    }
    return bv;
}

std::vector<std::pair<int, int>> bigram_ids(const std::vector<char32_t>& chars,
                                            const BigramVocab& bv) {
    std::vector<std::pair<int, int>> out;
    std::size_t n = chars.size();
    for (std::size_t i = 0; i < n; ++i) {
        std::uint64_t left = i == 0 ? BigramVocab::pair_key(BigramVocab::kBosMark, chars[0])
                                    : BigramVocab::pair_key(chars[i - 1], chars[i]);
        std::uint64_t right = i + 1 == n
                                  ? BigramVocab::pair_key(chars[i], BigramVocab::kEosMark)
                                  : BigramVocab::pair_key(chars[i], chars[i + 1]);
        out.emplace_back(bv.find(left), bv.find(right));
    }
    return out;
}

std::vector<NodeId> embed_unigram(Graph& g, const std::vector<char32_t>& chars,
                                  const Vocabulary& vocab, Param& table) {
    std::vector<NodeId> z;
    z.reserve(chars.size());
    for (char32_t c : chars)
        z.push_back(g.row(table, vocab.embedding_id(vocab.char_id(c))));
    return z;
}

std::vector<NodeId> embed_bigram(Graph& g, const std::vector<char32_t>& chars,
                                 const Vocabulary& vocab, const BigramVocab& bv,
                                 Param& char_table, Param& bigram_table) {
    std::vector<std::pair<int, int>> pairs = bigram_ids(chars, bv);
    std::vector<NodeId> z;
    z.reserve(chars.size());
    for (std::size_t i = 0; i < chars.size(); ++i) {
        NodeId ec = g.row(char_table, vocab.embedding_id(vocab.char_id(chars[i])));
        NodeId el = g.row(bigram_table, pairs[i].first);
        NodeId er = g.row(bigram_table, pairs[i].second);
        z.push_back(g.concat({ec, el, er}));
    }
    return z;
}

EdgeInputIds edge_input_ids(const Lattice& lat, const Vocabulary& vocab,
                            bool map_multi_to_oov) {
    EdgeInputIds ids;
    ids.fwd.resize(lat.fwd.size());
    ids.bwd.resize(lat.bwd.size());
    for (int i = 1; i <= lat.n; ++i) {
        for (const LatticeEdge& e : lat.fwd[static_cast<std::size_t>(i)])
            ids.fwd[static_cast<std::size_t>(i)].push_back(
                map_multi_to_oov && e.len > 1 ? Vocabulary::kOov : vocab.embedding_id(e.word));
        for (const LatticeEdge& e : lat.bwd[static_cast<std::size_t>(i)])
            ids.bwd[static_cast<std::size_t>(i)].push_back(
                map_multi_to_oov && e.len > 1 ? Vocabulary::kOov : vocab.embedding_id(e.word));
    }
    return ids;
}

void apply_iv_word_dropout(EdgeInputIds& ids, const Lattice& lat, Rng& rng, double p_iv) {
    if (p_iv <= 0.0) return;
    for (int i = 1; i <= lat.n; ++i) {
        const auto& edges = lat.fwd[static_cast<std::size_t>(i)];
        for (std::size_t k = 0; k < edges.size(); ++k) {
            if (edges[k].len <= 1) continue;
            if (!rng.bernoulli(p_iv)) continue;
            ids.fwd[static_cast<std::size_t>(i)][k] = Vocabulary::kOov;
            int start = i - edges[k].len + 1;
            const auto& bedges = lat.bwd[static_cast<std::size_t>(start)];
            for (std::size_t j = 0; j < bedges.size(); ++j)
                if (bedges[j].len == edges[k].len)
                    ids.bwd[static_cast<std::size_t>(start)][j] = Vocabulary::kOov;
        }
    }
}

NodeId apply_dropout(Graph& g, NodeId x, double p, Rng& rng) {
    if (p <= 0.0) return x;
    const Tensor& v = g.value(x);
    Tensor mask(v.rows, v.cols);
    double scale = 1.0 / (1.0 - p);
    for (double& m : mask.v) m = rng.bernoulli(p) ? 0.0 : scale;
    return g.mul(x, g.input(std::move(mask)));
}

EdgeNodes edge_nodes(Graph& g, const Lattice& lat, const EdgeInputIds& ids, Param& table,
                     double dropout_p, Rng* rng) {
    EdgeNodes z;
    z.fwd.resize(lat.fwd.size());
    z.bwd.resize(lat.bwd.size());
    for (int i = 1; i <= lat.n; ++i)
        z.bwd[static_cast<std::size_t>(i)].assign(lat.bwd[static_cast<std::size_t>(i)].size(),
                                                  -1);
    for (int i = 1; i <= lat.n; ++i) {
        const auto& edges = lat.fwd[static_cast<std::size_t>(i)];
        for (std::size_t k = 0; k < edges.size(); ++k) {
            NodeId node = g.row(table, ids.fwd[static_cast<std::size_t>(i)][k]);
            if (dropout_p > 0.0 && rng) node = apply_dropout(g, node, dropout_p, *rng);
            z.fwd[static_cast<std::size_t>(i)].push_back(node);
            int start = i - edges[k].len + 1;
            const auto& bedges = lat.bwd[static_cast<std::size_t>(start)];
            for (std::size_t j = 0; j < bedges.size(); ++j)
                if (bedges[j].len == edges[k].len)
                    z.bwd[static_cast<std::size_t>(start)][j] = node;
        }
    }
    return z;
}

std::vector<NodeId> lstm_chain(Graph& g, const std::vector<NodeId>& inputs,
                               const GateParams& p, bool backward) {
    int n = static_cast<int>(inputs.size());
    int dh = p.bi->value.rows;
    std::vector<NodeId> h(static_cast<std::size_t>(n), -1);
    NodeId h_prev = g.zeros(dh);
    NodeId c_prev = g.zeros(dh);
    for (int step = 0; step < n; ++step) {
        int pos = backward ? n - 1 - step : step;
        NodeId z = inputs[static_cast<std::size_t>(pos)];
        auto pre = [&](Param* W, Param* U, Param* b) {
            return g.add(g.add(g.matvec(g.param(*W), z), g.matvec(g.param(*U), h_prev)),
                         g.param(*b));
        };
        NodeId ig = g.sigmoid(pre(p.Wi, p.Ui, p.bi));
        NodeId og = g.sigmoid(pre(p.Wo, p.Uo, p.bo));
        NodeId cc = g.tanh(pre(p.Wc, p.Uc, p.bc));
        NodeId fg = g.sigmoid(pre(p.Wf, p.Uf, p.bf));
        NodeId c = g.add(g.mul(cc, ig), g.mul(c_prev, fg));
        NodeId hh = g.mul(og, g.tanh(c));
        h[static_cast<std::size_t>(pos)] = hh;
        h_prev = hh;
        c_prev = c;
    }
    return h;
}

std::vector<NodeId> ws_dag_lstm(Graph& g, const Lattice& lat,
                                const std::vector<std::vector<NodeId>>& z_edges,
                                const GateParams& p, bool backward) {
    int n = lat.n;
    int dh = p.bi->value.rows;
    const auto& edge_lists = backward ? lat.bwd : lat.fwd;
    std::vector<NodeId> h(static_cast<std::size_t>(n) + 2, -1);
    std::vector<NodeId> c(static_cast<std::size_t>(n) + 2, -1);
    NodeId zero = g.zeros(dh);
    for (int step = 0; step < n; ++step) {
        int pos = backward ? n - step : 1 + step;
        const auto& edges = edge_lists[static_cast<std::size_t>(pos)];
        if (edges.empty()) throw GraphError("lattice position without incoming edges");
        std::vector<NodeId> zs, hs, cs;
        for (std::size_t k = 0; k < edges.size(); ++k) {
            int pre_pos = backward ? pos + edges[k].len : pos - edges[k].len;
            bool sentinel = pre_pos < 1 || pre_pos > n;
            zs.push_back(z_edges[static_cast<std::size_t>(pos)][k]);
            hs.push_back(sentinel ? zero : h[static_cast<std::size_t>(pre_pos)]);
            cs.push_back(sentinel ? zero : c[static_cast<std::size_t>(pre_pos)]);
        }
        NodeId z_agg = g.sum(zs);
        NodeId h_agg = g.sum(hs);
        auto pre = [&](Param* W, Param* U, Param* b) {
            return g.add(g.add(g.matvec(g.param(*W), z_agg), g.matvec(g.param(*U), h_agg)),
                         g.param(*b));
        };
        NodeId ig = g.sigmoid(pre(p.Wi, p.Ui, p.bi));
        NodeId og = g.sigmoid(pre(p.Wo, p.Uo, p.bo));
        NodeId cc = g.tanh(pre(p.Wc, p.Uc, p.bc));
        std::vector<NodeId> c_terms;
        for (std::size_t k = 0; k < edges.size(); ++k) {
            NodeId fk = g.sigmoid(
                g.add(g.add(g.matvec(g.param(*p.Wf), zs[k]), g.matvec(g.param(*p.Uf), hs[k])),
                      g.param(*p.bf)));
            c_terms.push_back(g.mul(cs[k], fk));
        }
        NodeId ci = g.add(g.mul(cc, ig), g.sum(c_terms));
        c[static_cast<std::size_t>(pos)] = ci;
        h[static_cast<std::size_t>(pos)] = g.mul(og, g.tanh(ci));
    }
    std::vector<NodeId> out;
    out.reserve(static_cast<std::size_t>(n));
    for (int i = 1; i <= n; ++i) out.push_back(h[static_cast<std::size_t>(i)]);
    return out;
}

std::vector<NodeId> wi_dag_lstm(Graph& g, const Lattice& lat,
                                const std::vector<std::vector<NodeId>>& z_edges,
                                const WiGateParams& p, bool backward) {
    int n = lat.n;
    int dh = p.bi->value.rows;
    const auto& edge_lists = backward ? lat.bwd : lat.fwd;
    std::vector<NodeId> h(static_cast<std::size_t>(n) + 2, -1);
    std::vector<NodeId> c(static_cast<std::size_t>(n) + 2, -1);
    NodeId zero = g.zeros(dh);
    auto at = [](const std::vector<Param*>& family, int len) {
        std::size_t idx = std::min<std::size_t>(static_cast<std::size_t>(len), family.size());
        return family[idx - 1];
    };
    for (int step = 0; step < n; ++step) {
        int pos = backward ? n - step : 1 + step;
        const auto& edges = edge_lists[static_cast<std::size_t>(pos)];
        if (edges.empty()) throw GraphError("lattice position without incoming edges");
        std::vector<NodeId> zs, hs, cs;
        std::vector<int> lens;
        for (std::size_t k = 0; k < edges.size(); ++k) {
            int pre_pos = backward ? pos + edges[k].len : pos - edges[k].len;
            bool sentinel = pre_pos < 1 || pre_pos > n;
            zs.push_back(z_edges[static_cast<std::size_t>(pos)][k]);
            hs.push_back(sentinel ? zero : h[static_cast<std::size_t>(pre_pos)]);
            cs.push_back(sentinel ? zero : c[static_cast<std::size_t>(pre_pos)]);
            lens.push_back(edges[k].len);
        }
        auto pre = [&](const std::vector<Param*>& Wl, const std::vector<Param*>& Ul,
                       Param* b) {
            std::vector<NodeId> terms;
            for (std::size_t k = 0; k < zs.size(); ++k)
                terms.push_back(g.add(g.matvec(g.param(*at(Wl, lens[k])), zs[k]),
                                      g.matvec(g.param(*at(Ul, lens[k])), hs[k])));
            return g.add(g.sum(terms), g.param(*b));
        };
        NodeId ig = g.sigmoid(pre(p.Wi, p.Ui, p.bi));
        NodeId og = g.sigmoid(pre(p.Wo, p.Uo, p.bo));
        NodeId cc = g.tanh(pre(p.Wc, p.Uc, p.bc));
        std::vector<NodeId> c_terms;
        for (std::size_t k = 0; k < zs.size(); ++k) {
            NodeId fk = g.sigmoid(g.add(g.add(g.matvec(g.param(*at(p.Wf, lens[k])), zs[k]),
                                              g.matvec(g.param(*at(p.Uf, lens[k])), hs[k])),
                                        g.param(*p.bf)));
            c_terms.push_back(g.mul(cs[k], fk));
        }
        NodeId ci = g.add(g.mul(cc, ig), g.sum(c_terms));
        c[static_cast<std::size_t>(pos)] = ci;
        h[static_cast<std::size_t>(pos)] = g.mul(og, g.tanh(ci));
    }
    std::vector<NodeId> out;
    out.reserve(static_cast<std::size_t>(n));
    for (int i = 1; i <= n; ++i) out.push_back(h[static_cast<std::size_t>(i)]);
    return out;
}

std::vector<NodeId> bilstm_concat(Graph& g, const std::vector<NodeId>& fwd_h,
                                  const std::vector<NodeId>& bwd_h) {
    if (fwd_h.size() != bwd_h.size())
        throw GraphError("direction state lengths differ");
    std::vector<NodeId> h;
    h.reserve(fwd_h.size());
    for (std::size_t i = 0; i < fwd_h.size(); ++i)
        h.push_back(g.concat({fwd_h[i], bwd_h[i]}));
    return h;
}

} // namespace dagseg
