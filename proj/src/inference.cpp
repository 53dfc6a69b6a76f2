#include "dagseg/inference.hpp"

#include "dagseg/errors.hpp"

namespace dagseg {

std::vector<NodeId> emissions(Graph& g, const std::vector<NodeId>& states, Param& Ws,
                              Param& bs) {
    std::vector<NodeId> out;
    out.reserve(states.size());
    for (NodeId h : states) out.push_back(g.add(g.matvec(g.param(Ws), h), g.param(bs)));
    return out;
}

EmissionTable emission_values(const Graph& g, const std::vector<NodeId>& emission_nodes) {
    EmissionTable f(emission_nodes.size());
    for (std::size_t i = 0; i < emission_nodes.size(); ++i) {
        const Tensor& v = g.value(emission_nodes[i]);
        if (v.rows != kNumTags || v.cols != 1)
            throw GraphError("emission node is not a tag-score vector");
        for (int t = 0; t < kNumTags; ++t) f[i][static_cast<std::size_t>(t)] = v[t];
    }
    return f;
}

double score_path_values(const EmissionTable& f, const Tensor& A, const Tensor& start,
                         const std::vector<Tag>& tags) {
    if (tags.empty() || tags.size() != f.size())
        throw GraphError("path length does not match emission table");
    double s = start[static_cast<int>(tags[0])];
    s += f[0][static_cast<std::size_t>(tags[0])];
    for (std::size_t i = 1; i < tags.size(); ++i) {
        s += A.at(static_cast<int>(tags[i - 1]), static_cast<int>(tags[i]));
        s += f[i][static_cast<std::size_t>(tags[i])];
    }
    return s;
}

NodeId score_path_nodes(Graph& g, const std::vector<NodeId>& emission_nodes, Param& A,
                        Param& A_start, const std::vector<Tag>& tags) {
    if (tags.empty() || tags.size() != emission_nodes.size())
        throw GraphError("path length does not match emission nodes");
    NodeId a = g.param(A);
    NodeId a0 = g.param(A_start);
    NodeId s = g.elem(a0, static_cast<int>(tags[0]), 0);
    s = g.add(s, g.elem(emission_nodes[0], static_cast<int>(tags[0]), 0));
    for (std::size_t i = 1; i < tags.size(); ++i) {
        s = g.add(s, g.elem(a, static_cast<int>(tags[i - 1]), static_cast<int>(tags[i])));
        s = g.add(s, g.elem(emission_nodes[i], static_cast<int>(tags[i]), 0));
    }
    return s;
}

EmissionTable augment_emissions(const EmissionTable& f, const std::vector<Tag>& gold,
                                double eta) {
    if (gold.size() != f.size())
        throw GraphError("gold path length does not match emission table");
    EmissionTable out = f;
    for (std::size_t i = 0; i < out.size(); ++i)
        for (int t = 0; t < kNumTags; ++t)
            if (t != static_cast<int>(gold[i])) out[i][static_cast<std::size_t>(t)] += eta;
    return out;
}

TagPath viterbi(const EmissionTable& f, const Tensor& A, const Tensor& start) {
    int n = static_cast<int>(f.size());
    if (n < 1) throw GraphError("viterbi on an empty sentence");
    // beta[i][t]: best achievable score of the path suffix i..n that starts
    // with tag t (emission at i included, transition into i excluded).
    std::vector<std::array<double, kNumTags>> beta(static_cast<std::size_t>(n));
    for (int t = 0; t < kNumTags; ++t)
        beta[static_cast<std::size_t>(n - 1)][static_cast<std::size_t>(t)] =
            f[static_cast<std::size_t>(n - 1)][static_cast<std::size_t>(t)];
    for (int i = n - 2; i >= 0; --i) {
        for (int t = 0; t < kNumTags; ++t) {
            double best = A.at(t, 0) + beta[static_cast<std::size_t>(i + 1)][0];
            for (int u = 1; u < kNumTags; ++u) {
                double cand = A.at(t, u) + beta[static_cast<std::size_t>(i + 1)][static_cast<std::size_t>(u)];
                if (cand > best) best = cand;
            }
            beta[static_cast<std::size_t>(i)][static_cast<std::size_t>(t)] =
                f[static_cast<std::size_t>(i)][static_cast<std::size_t>(t)] + best;
        }
    }
    // Left-to-right reconstruction; preferring the smallest tag at every step
    // yields the lexicographically smallest maximizing path.
    TagPath path;
    path.tags.resize(static_cast<std::size_t>(n));
    int prev = 0;
    {
        double best = start[0] + beta[0][0];
        int arg = 0;
        for (int t = 1; t < kNumTags; ++t) {
            double cand = start[t] + beta[0][static_cast<std::size_t>(t)];
            if (cand > best) {
                best = cand;
                arg = t;
            }
        }
        path.tags[0] = static_cast<Tag>(arg);
        prev = arg;
    }
    for (int i = 1; i < n; ++i) {
        double best = A.at(prev, 0) + beta[static_cast<std::size_t>(i)][0];
        int arg = 0;
        for (int u = 1; u < kNumTags; ++u) {
            double cand = A.at(prev, u) + beta[static_cast<std::size_t>(i)][static_cast<std::size_t>(u)];
            if (cand > best) {
                best = cand;
                arg = u;
            }
        }
        path.tags[static_cast<std::size_t>(i)] = static_cast<Tag>(arg);
        prev = arg;
    }
    path.score = score_path_values(f, A, start, path.tags);
    return path;
}

TagPath viterbi_cost_augmented(const EmissionTable& f, const Tensor& A,
                               const Tensor& start, const std::vector<Tag>& gold,
                               double eta) {
    return viterbi(augment_emissions(f, gold, eta), A, start);
}

int tag_disagreements(const std::vector<Tag>& a, const std::vector<Tag>& b) {
    if (a.size() != b.size()) throw GraphError("tag sequences differ in length");
    int d = 0;
    for (std::size_t i = 0; i < a.size(); ++i)
        if (a[i] != b[i]) ++d;
    return d;
}

} // namespace dagseg
