#pragma once

#include <cstdint>
#include <unordered_map>
#include <utility>
#include <vector>

#include "dagseg/corpus.hpp"
#include "dagseg/graph.hpp"
#include "dagseg/lattice.hpp"
#include "dagseg/rng.hpp"

namespace dagseg {

// Id table for consecutive-character units. Keys pack the left and right unit
// into one 64-bit value; sentence boundaries use reserved marks that cannot
// collide with Unicode scalar values.
class BigramVocab {
public:
    static constexpr int kOov = 0;
    static constexpr std::uint32_t kBosMark = 0xFFFFFFFEu;
    static constexpr std::uint32_t kEosMark = 0xFFFFFFFFu;

    BigramVocab() : keys_(1, 0) {} // id 0 reserved for unseen pairs

    static std::uint64_t pair_key(std::uint32_t left, std::uint32_t right) {
        return (static_cast<std::uint64_t>(left) << 32) | right;
    }

    int add(std::uint64_t key);
    int find(std::uint64_t key) const; // kOov if absent
    int size() const { return static_cast<int>(keys_.size()); }
    const std::vector<std::uint64_t>& keys() const { return keys_; }

private:
    std::vector<std::uint64_t> keys_;
    std::unordered_map<std::uint64_t, int> index_;
};

// All consecutive pairs of the corpus, including (<BOS>, x_1) and (x_n, <EOS>).
BigramVocab build_bigram_vocab(const std::vector<Sentence>& corpus);

// (left pair id, right pair id) per position.
std::vector<std::pair<int, int>> bigram_ids(const std::vector<char32_t>& chars,
                                            const BigramVocab& bv);

// One gate set for one direction: W (d_h x input_dim), U (d_h x d_h), b (d_h)
// for the input, output, forget and cell-candidate gates.
struct GateParams {
    Param *Wi = nullptr, *Ui = nullptr, *bi = nullptr;
    Param *Wo = nullptr, *Uo = nullptr, *bo = nullptr;
    Param *Wf = nullptr, *Uf = nullptr, *bf = nullptr;
    Param *Wc = nullptr, *Uc = nullptr, *bc = nullptr;
};

// Length-indexed gate weights (index 0 holds l=1; lengths past the family size
// clamp to the last index). Biases stay shared across lengths.
struct WiGateParams {
    std::vector<Param*> Wi, Ui, Wo, Uo, Wf, Uf, Wc, Uc;
    Param *bi = nullptr, *bo = nullptr, *bf = nullptr, *bc = nullptr;
};

std::vector<NodeId> embed_unigram(Graph& g, const std::vector<char32_t>& chars,
                                  const Vocabulary& vocab, Param& table);

// z_i = e(x_i) ++ e(x_{i-1}, x_i) ++ e(x_i, x_{i+1}), dimension 3 * d_e.
std::vector<NodeId> embed_bigram(Graph& g, const std::vector<char32_t>& chars,
                                 const Vocabulary& vocab, const BigramVocab& bv,
                                 Param& char_table, Param& bigram_table);

// Embedding-table row per lattice edge, indexed like Lattice::fwd / bwd.
struct EdgeInputIds {
    std::vector<std::vector<int>> fwd, bwd;
};

// map_multi_to_oov sends every multi-character edge to the <OOV> row (the
// in-vocabulary dropout rate 1.0 decode behaviour).
EdgeInputIds edge_input_ids(const Lattice& lat, const Vocabulary& vocab,
                            bool map_multi_to_oov = false);

// Remaps multi-character edges to <OOV> with probability p_iv, the same
// decision for an occurrence in both directions. Draw order: position
// ascending, edge length ascending, forward list.
void apply_iv_word_dropout(EdgeInputIds& ids, const Lattice& lat, Rng& rng, double p_iv);

// Inverted dropout: multiplies by a 0 / (1/(1-p)) mask drawn from rng.
// p <= 0 returns x unchanged and draws nothing.
NodeId apply_dropout(Graph& g, NodeId x, double p, Rng& rng);

// Edge input nodes for both directions. A word occurrence (the edge ending
// at i with length l, equally the edge starting at i-l+1) gets ONE embedding
// node, referenced from both edge tables, so a dropout mask covers the
// occurrence as a whole. Masks draw in forward order: position ascending,
// then length ascending; dropout_p <= 0 draws nothing.
struct EdgeNodes {
    std::vector<std::vector<NodeId>> fwd, bwd;
};
EdgeNodes edge_nodes(Graph& g, const Lattice& lat, const EdgeInputIds& ids, Param& table,
                     double dropout_p, Rng* rng);

// Standard LSTM over the input sequence; returns h per position (index 0 is
// position 1 regardless of direction). Initial h and c are zero.
std::vector<NodeId> lstm_chain(Graph& g, const std::vector<NodeId>& inputs,
                               const GateParams& p, bool backward);

// Shared-weight DAG-LSTM. Input, output and cell-candidate gates read the
// sums of the incoming edge inputs and prestates; each edge carries its own
// forget gate; cells combine as c = ctilde*i + sum_l c_prestate*f_l.
std::vector<NodeId> ws_dag_lstm(Graph& g, const Lattice& lat,
                                const std::vector<std::vector<NodeId>>& z_edges,
                                const GateParams& p, bool backward);

// Length-dependent weights: gate preactivations sum W_l*z + U_l*h over edges,
// sharing one bias; forget gates stay per edge with the edge's length weights.
std::vector<NodeId> wi_dag_lstm(Graph& g, const Lattice& lat,
                                const std::vector<std::vector<NodeId>>& z_edges,
                                const WiGateParams& p, bool backward);

// h_i = fwd_h_i ++ bwd_h_i.
std::vector<NodeId> bilstm_concat(Graph& g, const std::vector<NodeId>& fwd_h,
                                  const std::vector<NodeId>& bwd_h);

} // namespace dagseg
