#include "dagseg/trainer.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <ostream>
#include <sstream>

#include "dagseg/errors.hpp"

namespace dagseg {

NodeId sentence_loss(Graph& g, SegModel& model, const std::vector<char32_t>& chars,
                     const std::vector<Tag>& gold, const Lattice* lat, Rng* rng,
                     bool train_mode) {
    const TrainConfig& cfg = model.cfg;
    EdgeInputIds ids;
    const EdgeInputIds* ids_ptr = nullptr;
    if (model.is_dag() && train_mode) {
        if (!lat) throw GraphError("dag variants need a lattice to train on");
        ids = edge_input_ids(*lat, model.vocab);
        if (rng) apply_iv_word_dropout(ids, *lat, *rng, cfg.iv_dropout);
        ids_ptr = &ids;
    }
    std::vector<NodeId> em = model.build_emissions(g, chars, lat, train_mode, rng, ids_ptr);
    EmissionTable f = emission_values(g, em);
    const Tensor& A = model.transitions().value;
    const Tensor& start = model.start_row().value;

    TagPath pred = cfg.plain_decode_train
                       ? viterbi(f, A, start)
                       : viterbi_cost_augmented(f, A, start, gold, cfg.margin);
    double delta = cfg.margin * tag_disagreements(pred.tags, gold);
    double pred_score = score_path_values(f, A, start, pred.tags);
    double gold_score = score_path_values(f, A, start, gold);
    if (pred_score + delta - gold_score <= 0.0) return -1;

    NodeId s_pred = score_path_nodes(g, em, model.transitions(), model.start_row(), pred.tags);
    NodeId s_gold = score_path_nodes(g, em, model.transitions(), model.start_row(), gold);
    return g.hinge(g.add_const(g.sub(s_pred, s_gold), delta));
}

static std::string format_epoch_line(const EpochStats& st) {
    std::ostringstream os;
    os << st.epoch << '\t' << std::setprecision(6) << std::fixed << st.train_loss << '\t'
       << st.dev.precision << '\t' << st.dev.recall << '\t' << st.dev.f_value << '\t'
       << st.dev.oov_recall;
    return os.str();
}

TrainResult train(SegModel& model, const std::vector<Sentence>& corpus,
                  const std::string& embeddings_path, std::ostream* log,
                  const TrainHooks* hooks) {
    const TrainConfig& cfg = model.cfg;
    cfg.validate();
    if (corpus.empty()) throw DataError("training corpus is empty");
    for (const Sentence& s : corpus)
        if (!s.has_gold()) throw DataError("training corpus contains unsegmented sentences");

    TrainResult result;
    init_uniform(model.store, -0.05, 0.05, cfg.seed);
    if (!embeddings_path.empty())
        result.embedding_coverage =
            load_embeddings(embeddings_path, model.vocab, model.word_table().value);

    std::size_t total = corpus.size();
    std::vector<std::vector<Tag>> gold(total);
    std::vector<Lattice> lattices;
    for (std::size_t i = 0; i < total; ++i) gold[i] = spans_to_tags(corpus[i].spans);
    if (model.is_dag()) {
        lattices.resize(total);
        for (std::size_t i = 0; i < total; ++i) lattices[i] = model.make_lattice(corpus[i].chars);
    }

    std::vector<std::size_t> order(total);
    for (std::size_t i = 0; i < total; ++i) order[i] = i;
    Rng split_rng(mix_seed(cfg.seed, "shuffle"));
    split_rng.shuffle(order);
    std::size_t dev_count = static_cast<std::size_t>(cfg.dev_fraction * static_cast<double>(total));
    std::vector<std::size_t> train_idx(order.begin(), order.end() - static_cast<long>(dev_count));
    std::vector<std::size_t> dev_idx(order.end() - static_cast<long>(dev_count), order.end());
    if (train_idx.empty()) throw DataError("dev split leaves no training sentences");

    std::vector<Sentence> dev_gold;
    for (std::size_t i : dev_idx) dev_gold.push_back(corpus[i]);

    Rng epoch_rng(mix_seed(cfg.seed, "epochs"));
    Rng draw_rng(mix_seed(cfg.seed, "train"));
    std::vector<Tensor> best_values;
    result.best_dev_f = -1.0;

    for (int epoch = 1; epoch <= cfg.epochs; ++epoch) {
        epoch_rng.shuffle(train_idx);
        double loss_sum = 0.0;
        for (std::size_t at = 0; at < train_idx.size(); at += static_cast<std::size_t>(cfg.batch_size)) {
            std::size_t batch_end = std::min(train_idx.size(),
                                             at + static_cast<std::size_t>(cfg.batch_size));
            double batch_m = static_cast<double>(batch_end - at);
            model.store.zero_grads();
            for (std::size_t b = at; b < batch_end; ++b) {
                std::size_t i = train_idx[b];
                const Lattice* lat = model.is_dag() ? &lattices[i] : nullptr;
                Graph g;
                NodeId loss = sentence_loss(g, model, corpus[i].chars, gold[i], lat,
                                            &draw_rng, true);
                if (loss < 0) continue;
                loss_sum += g.scalar(loss);
                g.backward(loss, 1.0 / batch_m);
            }
            if (hooks && hooks->after_batch_backward) hooks->after_batch_backward(model.store);
            if (cfg.clip_norm > 0.0) clip_gradients(model.store, cfg.clip_norm);
            adagrad_step(model.store, cfg.learning_rate, cfg.l2, cfg.adagrad_eps);
            for (std::size_t p = 0; p < model.store.size(); ++p)
                if (!model.store.at(p).value.finite())
                    throw NumericError("training diverged: parameter " +
                                       model.store.at(p).name + " is not finite (epoch " +
                                       std::to_string(epoch) + ")");
        }
        if (!std::isfinite(loss_sum))
            throw NumericError("training diverged: loss is not finite (epoch " +
                               std::to_string(epoch) + ")");

        EpochStats st;
        st.epoch = epoch;
        st.train_loss = loss_sum / static_cast<double>(train_idx.size());
        if (!dev_idx.empty()) {
            std::vector<std::vector<Span>> pred;
            for (std::size_t i : dev_idx) {
                const Lattice* lat = model.is_dag() ? &lattices[i] : nullptr;
                pred.push_back(tags_to_spans(model.decode(corpus[i].chars, lat).tags));
            }
            st.dev = evaluate(dev_gold, pred, model.vocab);
            if (st.dev.f_value > result.best_dev_f) {
                result.best_dev_f = st.dev.f_value;
                result.best_epoch = epoch;
                best_values = model.store.snapshot_values();
            }
        }
        result.epochs.push_back(st);
        if (log) *log << format_epoch_line(st) << '\n';
        if (cfg.stop_on_zero_loss && loss_sum == 0.0) break;
    }

    if (!dev_idx.empty() && !best_values.empty()) model.store.restore_values(best_values);
    if (dev_idx.empty()) {
        result.best_epoch = 0;
        result.best_dev_f = 0.0;
    }
    return result;
}

} // namespace dagseg
