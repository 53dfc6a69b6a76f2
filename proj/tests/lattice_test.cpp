#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <string>
#include <vector>

#include "dagseg/corpus.hpp"
#include "dagseg/errors.hpp"
#include "dagseg/lattice.hpp"
#include "dagseg/rng.hpp"

#include "oracles.hpp"

using namespace dagseg;

namespace {

Vocabulary make_vocab(const std::vector<std::u32string>& words) {
    Vocabulary v;
    for (const auto& w : words) v.add(w, true);
    return v;
}

std::vector<char32_t> chars_of(const std::u32string& s) {
    return std::vector<char32_t>(s.begin(), s.end());
}

} // namespace

TEST_CASE("automaton finds all overlapping vocabulary matches") {
    Vocabulary v = make_vocab({U"a", U"b", U"ab", U"bab"});
    Automaton ac(v);
    std::vector<Automaton::Match> ms;
    ac.scan(chars_of(U"abab"), ms);
    // a@1, ab@2, b@2, a@3, bab@4, ab@4, b@4
    CHECK(ms.size() == 7);
    auto has = [&](int end, int len, const std::u32string& w) {
        for (const auto& m : ms)
            if (m.end == end && m.len == len && m.word == v.find(w)) return true;
        return false;
    };
    CHECK(has(1, 1, U"a"));
    CHECK(has(2, 2, U"ab"));
    CHECK(has(2, 1, U"b"));
    CHECK(has(3, 1, U"a"));
    CHECK(has(4, 3, U"bab"));
    CHECK(has(4, 2, U"ab"));
    CHECK(has(4, 1, U"b"));
}

TEST_CASE("scan transition count is linear in the text length") {
    Vocabulary v = make_vocab({U"a", U"aa", U"aaa", U"ab", U"ba"});
    Automaton ac(v);
    for (int n : {10, 20, 40, 80}) {
        std::vector<char32_t> text;
        Rng rng(static_cast<std::uint64_t>(n));
        for (int i = 0; i < n; ++i) text.push_back(rng.below(2) ? U'a' : U'b');
        std::vector<Automaton::Match> ms;
        long steps = ac.scan(text, ms);
        CHECK(steps <= 2 * n);
        CHECK(steps >= n);
    }
}

TEST_CASE("lattice for a worked three-character example") {
    Vocabulary v = make_vocab({U"a", U"b", U"ab"});
    Automaton ac(v);
    Lattice lat = build_lattice(chars_of(U"cab"), ac, v);
    REQUIRE(lat.n == 3);
    // forward: words ending at each position
    REQUIRE(lat.fwd[1].size() == 1);
    CHECK(lat.fwd[1][0] == LatticeEdge{1, Vocabulary::kOov}); // 'c' unseen
    REQUIRE(lat.fwd[2].size() == 1);
    CHECK(lat.fwd[2][0] == LatticeEdge{1, v.find(U"a")});
    REQUIRE(lat.fwd[3].size() == 2);
    CHECK(lat.fwd[3][0] == LatticeEdge{1, v.find(U"b")});
    CHECK(lat.fwd[3][1] == LatticeEdge{2, v.find(U"ab")});
    // backward: words starting at each position
    REQUIRE(lat.bwd[2].size() == 2);
    CHECK(lat.bwd[2][0] == LatticeEdge{1, v.find(U"a")});
    CHECK(lat.bwd[2][1] == LatticeEdge{2, v.find(U"ab")});
    REQUIRE(lat.bwd[3].size() == 1);

    auto stats = lattice_stats(lat);
    CHECK(stats[1] == 3);
    CHECK(stats[2] == 1);
}

TEST_CASE("a position can collect several incoming lengths") {
    // five characters where position 5 ends words of length 1, 2 and 4
    Vocabulary v = make_vocab({U"p", U"q", U"r", U"s", U"t", U"st", U"qrst"});
    Automaton ac(v);
    Lattice lat = build_lattice(chars_of(U"pqrst"), ac, v);
    REQUIRE(lat.fwd[5].size() == 3);
    CHECK(lat.fwd[5][0].len == 1);
    CHECK(lat.fwd[5][1].len == 2);
    CHECK(lat.fwd[5][2].len == 4);
    // the same words seen from their start positions
    CHECK(lat.bwd[4].size() == 2); // "s", "st"
    CHECK(lat.bwd[2].size() == 2); // "q", "qrst"
}

TEST_CASE("max word length drops long edges but never singles") {
    Vocabulary v = make_vocab({U"a", U"b", U"ab", U"ba", U"aba"});
    Automaton ac(v);
    Lattice capped = build_lattice(chars_of(U"aba"), ac, v, 2);
    for (int i = 1; i <= 3; ++i) {
        for (const auto& e : capped.fwd[i]) CHECK(e.len <= 2);
        CHECK(capped.fwd[i][0].len == 1);
    }
    Lattice full = build_lattice(chars_of(U"aba"), ac, v);
    CHECK(full.fwd[3].size() == 3);
    CHECK(capped.fwd[3].size() == 2);
}

TEST_CASE("external vocabulary entries produce edges after a rebuild") {
    Vocabulary v = make_vocab({U"a", U"b"});
    Automaton before(v);
    Lattice l0 = build_lattice(chars_of(U"ab"), before, v);
    CHECK(l0.fwd[2].size() == 1);
    v.add(U"ab", false, true);
    Automaton after(v);
    Lattice l1 = build_lattice(chars_of(U"ab"), after, v);
    REQUIRE(l1.fwd[2].size() == 2);
    CHECK(l1.fwd[2][1].word == v.find(U"ab"));
}

TEST_CASE("empty input is rejected") {
    Vocabulary v = make_vocab({U"a"});
    Automaton ac(v);
    CHECK_THROWS_AS(build_lattice({}, ac, v), DataError);
}

TEST_CASE("lattices match a naive substring scan on random text") {
    Vocabulary v;
    Rng vocab_rng(99);
    // a small alphabet plus random words up to length 4, some chars left unseen
    std::vector<char32_t> alphabet = {U'a', U'b', U'c', U'd', U'e'};
    for (char32_t c : {U'a', U'b', U'c'}) v.add(std::u32string(1, c), true);
    for (int w = 0; w < 30; ++w) {
        int len = 2 + static_cast<int>(vocab_rng.below(3));
        std::u32string word;
        for (int i = 0; i < len; ++i) word += alphabet[vocab_rng.below(alphabet.size())];
        v.add(word, true);
    }
    Automaton ac(v);
    Rng rng(7);
    for (int it = 0; it < 100; ++it) {
        int n = 1 + static_cast<int>(rng.below(16));
        std::vector<char32_t> text;
        for (int i = 0; i < n; ++i) text.push_back(alphabet[rng.below(alphabet.size())]);
        int cap = (it % 3 == 0) ? 2 : 0;
        Lattice lat = build_lattice(text, ac, v, cap);
        auto ref = oracles::naive_lattice(text, v, cap);
        CHECK(oracles::lattice_matches(lat, ref));
    }
}

TEST_CASE("lattice dump lists positions then lengths") {
    Vocabulary v = make_vocab({U"a", U"b", U"ab"});
    Automaton ac(v);
    Lattice lat = build_lattice(chars_of(U"cab"), ac, v);
    std::vector<char32_t> text = chars_of(U"cab");
    CHECK(dump_lattice(lat, text) == "1 1 c\n2 1 a\n3 1 b\n3 2 ab\n");
    CHECK(dump_lattice(lat, text, true) == "1 1 c\n2 1 a\n2 2 ab\n3 1 b\n");
}
