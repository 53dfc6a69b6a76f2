#include "dagseg/lattice.hpp"

#include <algorithm>
#include <deque>

#include "dagseg/errors.hpp"

namespace dagseg {

Automaton::Automaton(const Vocabulary& vocab) {
    nodes_.emplace_back(); // root
    for (int id = Vocabulary::kFirstWord; id < vocab.size(); ++id) {
        const std::u32string& w = vocab.entry(id).text;
        int u = 0;
        for (char32_t c : w) {
            auto it = nodes_[static_cast<std::size_t>(u)].next.find(c);
            if (it == nodes_[static_cast<std::size_t>(u)].next.end()) {
                int v = static_cast<int>(nodes_.size());
                nodes_.emplace_back();
                nodes_.back().depth = nodes_[static_cast<std::size_t>(u)].depth + 1;
                nodes_[static_cast<std::size_t>(u)].next.emplace(c, v);
                u = v;
            } else {
                u = it->second;
            }
        }
        nodes_[static_cast<std::size_t>(u)].word = id;
    }
    std::deque<int> queue;
    for (auto& [c, v] : nodes_[0].next) {
        (void)c;
        nodes_[static_cast<std::size_t>(v)].fail = 0;
        queue.push_back(v);
    }
    while (!queue.empty()) {
        int u = queue.front();
        queue.pop_front();
        Node& un = nodes_[static_cast<std::size_t>(u)];
        un.olink = nodes_[static_cast<std::size_t>(un.fail)].word >= 0
                       ? un.fail
                       : nodes_[static_cast<std::size_t>(un.fail)].olink;
        for (auto& [c, v] : un.next) {
            int f = un.fail;
            while (f != 0 && !nodes_[static_cast<std::size_t>(f)].next.count(c))
                f = nodes_[static_cast<std::size_t>(f)].fail;
            auto it = nodes_[static_cast<std::size_t>(f)].next.find(c);
            nodes_[static_cast<std::size_t>(v)].fail =
                (it != nodes_[static_cast<std::size_t>(f)].next.end() && it->second != v)
                    ? it->second
                    : 0;
            queue.push_back(v);
        }
    }
}

long Automaton::scan(const std::vector<char32_t>& chars, std::vector<Match>& out) const {
    if (nodes_.empty()) return 0;
    long transitions = 0;
    int state = 0;
    for (std::size_t k = 0; k < chars.size(); ++k) {
        char32_t c = chars[k];
        while (state != 0 && !nodes_[static_cast<std::size_t>(state)].next.count(c)) {
            state = nodes_[static_cast<std::size_t>(state)].fail;
            ++transitions;
        }
        auto it = nodes_[static_cast<std::size_t>(state)].next.find(c);
        state = it == nodes_[static_cast<std::size_t>(state)].next.end() ? 0 : it->second;
        ++transitions;
        int end = static_cast<int>(k) + 1;
        int u = nodes_[static_cast<std::size_t>(state)].word >= 0
                    ? state
                    : nodes_[static_cast<std::size_t>(state)].olink;
        while (u >= 0) {
            const Node& n = nodes_[static_cast<std::size_t>(u)];
            out.push_back(Match{end, n.depth, n.word});
            u = n.olink;
        }
    }
    return transitions;
}

Lattice build_lattice(const std::vector<char32_t>& chars, const Automaton& ac,
                      const Vocabulary& vocab, int max_word_len) {
    if (chars.empty()) throw DataError("cannot build a lattice for an empty sentence");
    Lattice lat;
    lat.n = static_cast<int>(chars.size());
    lat.fwd.assign(static_cast<std::size_t>(lat.n) + 1, {});
    lat.bwd.assign(static_cast<std::size_t>(lat.n) + 1, {});
    std::vector<Automaton::Match> matches;
    lat.scan_transitions = ac.scan(chars, matches);
    for (const auto& m : matches) {
        if (max_word_len > 0 && m.len > max_word_len) continue;
        lat.fwd[static_cast<std::size_t>(m.end)].push_back(LatticeEdge{m.len, m.word});
        lat.bwd[static_cast<std::size_t>(m.end - m.len + 1)].push_back(
            LatticeEdge{m.len, m.word});
    }
    for (int i = 1; i <= lat.n; ++i) {
        auto& fe = lat.fwd[static_cast<std::size_t>(i)];
        auto& be = lat.bwd[static_cast<std::size_t>(i)];
        std::sort(fe.begin(), fe.end(),
                  [](const LatticeEdge& a, const LatticeEdge& b) { return a.len < b.len; });
        std::sort(be.begin(), be.end(),
                  [](const LatticeEdge& a, const LatticeEdge& b) { return a.len < b.len; });
        int cid = vocab.char_id(chars[static_cast<std::size_t>(i - 1)]);
        if (fe.empty() || fe.front().len != 1) fe.insert(fe.begin(), LatticeEdge{1, cid});
        if (be.empty() || be.front().len != 1) be.insert(be.begin(), LatticeEdge{1, cid});
    }
    return lat;
}

std::map<int, long> lattice_stats(const Lattice& lat) {
    std::map<int, long> counts;
    for (int i = 1; i <= lat.n; ++i)
        for (const LatticeEdge& e : lat.fwd[static_cast<std::size_t>(i)]) ++counts[e.len];
    return counts;
}

std::string dump_lattice(const Lattice& lat, const std::vector<char32_t>& chars,
                         bool backward) {
    std::string out;
    for (int i = 1; i <= lat.n; ++i) {
        const auto& edges = backward ? lat.bwd[static_cast<std::size_t>(i)]
                                     : lat.fwd[static_cast<std::size_t>(i)];
        for (const LatticeEdge& e : edges) {
            int begin = backward ? i : i - e.len + 1;
            std::u32string w(chars.begin() + (begin - 1), chars.begin() + (begin - 1) + e.len);
            out += std::to_string(i) + " " + std::to_string(e.len) + " " + encode_utf8(w) + "\n";
        }
    }
    return out;
}

} // namespace dagseg
