#pragma once

#include <map>
#include <string>
#include <vector>

#include "dagseg/corpus.hpp"

namespace dagseg {

// Aho-Corasick matcher over all vocabulary entries (ids >= kFirstWord,
// external entries included). Immutable after construction; rebuild when the
// vocabulary changes.
class Automaton {
public:
    struct Match {
        int end;  // 1-based position of the last character
        int len;
        int word; // vocabulary id
    };

    Automaton() = default;
    explicit Automaton(const Vocabulary& vocab);

    // Appends every vocabulary match in `chars` to `out`; returns the number
    // of automaton transitions taken (goto steps plus fail-link follows).
    long scan(const std::vector<char32_t>& chars, std::vector<Match>& out) const;

    std::size_t node_count() const { return nodes_.size(); }

private:
    struct Node {
        std::map<char32_t, int> next;
        int fail = 0;
        int word = -1;  // entry ending exactly here
        int olink = -1; // nearest fail ancestor with word >= 0
        int depth = 0;
    };
    std::vector<Node> nodes_;
};

struct LatticeEdge {
    int len;
    int word; // vocabulary id; <OOV> for guaranteed single-char edges
    friend bool operator==(const LatticeEdge& a, const LatticeEdge& b) {
        return a.len == b.len && a.word == b.word;
    }
};

// Word DAGs over a sentence of n characters, indexed 1..n. fwd[i] holds the
// words ending at position i (prestate i-len in the forward recurrence);
// bwd[i] holds the words starting at i (prestate i+len going right to left).
// Every position carries at least its single-character edge.
struct Lattice {
    int n = 0;
    std::vector<std::vector<LatticeEdge>> fwd;
    std::vector<std::vector<LatticeEdge>> bwd;
    long scan_transitions = 0;
};

// One automaton pass fills both directions. Edges longer than max_word_len
// are dropped when the cap is positive; single-character edges always stay.
Lattice build_lattice(const std::vector<char32_t>& chars, const Automaton& ac,
                      const Vocabulary& vocab, int max_word_len = 0);

// Forward-edge counts keyed by edge length.
std::map<int, long> lattice_stats(const Lattice& lat);

// One edge per line, "i l word", positions ascending then length ascending.
std::string dump_lattice(const Lattice& lat, const std::vector<char32_t>& chars,
                         bool backward = false);

} // namespace dagseg
