#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "dagseg/corpus.hpp"
#include "dagseg/encoders.hpp"
#include "dagseg/inference.hpp"
#include "dagseg/lattice.hpp"
#include "dagseg/params.hpp"

namespace dagseg {

enum class Variant : int { Unigram = 0, Bigram = 1, WsDag = 2, WiDag = 3 };

const char* variant_name(Variant v);
Variant variant_from_name(const std::string& name);
bool is_dag_variant(Variant v);

struct TrainConfig {
    int embed_dim = 100;
    int hidden_dim = 150;
    double learning_rate = 0.2;
    double l2 = 0.05;
    double margin = 0.2;      // per-position cost added for a wrong tag
    double dropout = 0.20;    // embedding-output dropout rate
    double iv_dropout = 0.50; // in-vocabulary word dropout rate
    int batch_size = 128;
    std::uint64_t seed = 1;
    int epochs = 30;
    int l_max = 4;        // length clamp for length-indexed weights
    int max_word_len = 0; // lattice edge length cap; 0 = uncapped
    double dev_fraction = 0.1;
    double clip_norm = 0.0; // 0 = no gradient clipping
    double adagrad_eps = 1e-6;
    bool plain_decode_train = false; // decode without the margin during training
    bool l2_embeddings = true;
    bool stop_on_zero_loss = false;

    void validate() const; // throws ConfigError
};

// A segmenter: hyperparameters, vocabularies, parameters, and the matcher
// used to build lattices. Create fresh with create(), or through model_io.
struct SegModel {
    Variant variant = Variant::Unigram;
    TrainConfig cfg;
    Vocabulary vocab;
    BigramVocab bigrams;
    ParamStore store;
    Automaton automaton;

    // Registers all parameters (zero-valued) for the variant and builds the
    // automaton. The embedding table is sized by the vocabulary at this
    // moment; words added later are external and share the <OOV> row.
    static SegModel create(Variant v, const TrainConfig& cfg, Vocabulary vocab,
                           BigramVocab bigrams = BigramVocab());

    void rebuild_automaton() { automaton = Automaton(vocab); }
    bool is_dag() const { return is_dag_variant(variant); }

    Param& word_table() { return store.get("E.word"); }
    Param& bigram_table() { return store.get("E.bigram"); }
    GateParams gates(bool backward);
    WiGateParams wi_gate_set(bool backward);
    Param& transitions() { return store.get("A"); }
    Param& start_row() { return store.get("A.start"); }
    Param& emit_w() { return store.get("Ws"); }
    Param& emit_b() { return store.get("bs"); }

    Lattice make_lattice(const std::vector<char32_t>& chars) const;

    // Emission nodes f_1..f_n. DAG variants require `lat`. In train mode,
    // rng drives the dropout masks; edge_ids overrides the edge inputs (the
    // trainer passes in-vocabulary-dropped ids). Outside train mode with
    // iv_dropout >= 1, every multi-character edge reads the <OOV> row.
    std::vector<NodeId> build_emissions(Graph& g, const std::vector<char32_t>& chars,
                                        const Lattice* lat, bool train_mode, Rng* rng,
                                        const EdgeInputIds* edge_ids);

    TagPath decode(const std::vector<char32_t>& chars, const Lattice* lat = nullptr);
    std::vector<Span> segment(const std::vector<char32_t>& chars);
};

} // namespace dagseg
