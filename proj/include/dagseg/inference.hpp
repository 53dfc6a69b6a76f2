#pragma once

#include <array>
#include <vector>

#include "dagseg/corpus.hpp"
#include "dagseg/graph.hpp"

namespace dagseg {

// Per-position tag scores, indexed [position-1][tag].
using EmissionTable = std::vector<std::array<double, kNumTags>>;

struct TagPath {
    std::vector<Tag> tags;
    double score = 0.0;
};

// f_i = Ws * h_i + bs per position, as graph nodes.
std::vector<NodeId> emissions(Graph& g, const std::vector<NodeId>& states, Param& Ws,
                              Param& bs);

EmissionTable emission_values(const Graph& g, const std::vector<NodeId>& emission_nodes);

// start[y_1] + f_1[y_1] + sum_{i>=2} (A[y_{i-1}][y_i] + f_i[y_i]), accumulated
// left to right in exactly that term order.
double score_path_values(const EmissionTable& f, const Tensor& A, const Tensor& start,
                         const std::vector<Tag>& tags);

// Same sum as graph nodes, in the same association order.
NodeId score_path_nodes(Graph& g, const std::vector<NodeId>& emission_nodes, Param& A,
                        Param& A_start, const std::vector<Tag>& tags);

// Copy of f with eta added to every entry that disagrees with the gold tag.
EmissionTable augment_emissions(const EmissionTable& f, const std::vector<Tag>& gold,
                                double eta);

// Exact decoder. Among maximizing paths returns the lexicographically
// smallest by tag index; the reported score is recomputed with
// score_path_values so it matches a left-to-right summation bit for bit.
TagPath viterbi(const EmissionTable& f, const Tensor& A, const Tensor& start);

// Maximizes path score plus eta per disagreement with gold, by folding the
// margin into the emission table. The returned score includes the margin.
TagPath viterbi_cost_augmented(const EmissionTable& f, const Tensor& A,
                               const Tensor& start, const std::vector<Tag>& gold,
                               double eta);

int tag_disagreements(const std::vector<Tag>& a, const std::vector<Tag>& b);

} // namespace dagseg
