#pragma once

#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

#include "dagseg/model.hpp"

namespace dagseg {

struct EpochStats {
    int epoch = 0;
    double train_loss = 0.0; // mean hinge loss per training sentence
    SegMetrics dev;
};

struct TrainResult {
    std::vector<EpochStats> epochs;
    int best_epoch = 0;      // 0 when there is no dev split
    double best_dev_f = 0.0;
    double embedding_coverage = -1.0; // -1 when no embedding file was given
};

// Per-batch instrumentation. after_batch_backward runs once per minibatch
// with gradients accumulated but the optimizer step not yet taken.
struct TrainHooks {
    std::function<void(const ParamStore&)> after_batch_backward;
};

// Hinge loss max(0, s(decoded) + margin * disagreements - s(gold)) for one
// sentence. Returns -1 without building score nodes when the loss is zero
// (the zero branch carries no gradient). In train mode, rng drives the
// in-vocabulary word dropout and the embedding dropout masks; lat is required
// for DAG variants.
NodeId sentence_loss(Graph& g, SegModel& model, const std::vector<char32_t>& chars,
                     const std::vector<Tag>& gold, const Lattice* lat, Rng* rng,
                     bool train_mode);

// Initializes parameters, splits off the dev set, runs minibatch epochs with
// AdaGrad, logs one line per epoch (epoch, loss, dev P/R/F/OOV, tab
// separated), and leaves the model at the best-dev-F checkpoint. A non-empty
// embeddings_path preloads word vectors over the random initialization.
TrainResult train(SegModel& model, const std::vector<Sentence>& corpus,
                  const std::string& embeddings_path = "", std::ostream* log = nullptr,
                  const TrainHooks* hooks = nullptr);

} // namespace dagseg
