#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <sstream>
#include <string>
#include <vector>

#include "dagseg/errors.hpp"
#include "dagseg/model.hpp"
#include "dagseg/trainer.hpp"

#include "oracles.hpp"

using namespace dagseg;

namespace {

Sentence make_sentence(const std::u32string& text, const std::vector<Span>& spans) {
    Sentence s;
    s.chars.assign(text.begin(), text.end());
    s.spans = spans;
    return s;
}

// six sentences over {a,b,c} with "ab" as the only multi-char word
std::vector<Sentence> tiny_corpus() {
    return {
        make_sentence(U"abc", {{1, 2}, {3, 3}}),   make_sentence(U"cab", {{1, 1}, {2, 3}}),
        make_sentence(U"abab", {{1, 2}, {3, 4}}),  make_sentence(U"cc", {{1, 1}, {2, 2}}),
        make_sentence(U"abcc", {{1, 2}, {3, 3}, {4, 4}}),
        make_sentence(U"bca", {{1, 1}, {2, 2}, {3, 3}}),
    };
}

TrainConfig tiny_config() {
    TrainConfig cfg;
    cfg.embed_dim = 6;
    cfg.hidden_dim = 8;
    cfg.dropout = 0.0;
    cfg.iv_dropout = 0.0;
    cfg.l2 = 0.0;
    cfg.batch_size = 4;
    cfg.epochs = 25;
    cfg.dev_fraction = 0.0;
    cfg.seed = 7;
    cfg.stop_on_zero_loss = true;
    return cfg;
}

double store_norm(const ParamStore& s) {
    double sq = 0.0;
    for (std::size_t i = 0; i < s.size(); ++i) sq += s.at(i).value.l2_norm_sq();
    return std::sqrt(sq);
}

} // namespace

TEST_CASE("config validation rejects out-of-range values") {
    TrainConfig cfg;
    cfg.validate();
    TrainConfig bad = cfg;
    bad.learning_rate = 0.0;
    CHECK_THROWS_AS(bad.validate(), ConfigError);
    bad = cfg;
    bad.dropout = 1.0;
    CHECK_THROWS_AS(bad.validate(), ConfigError);
    bad = cfg;
    bad.iv_dropout = 1.5;
    CHECK_THROWS_AS(bad.validate(), ConfigError);
    bad = cfg;
    bad.dev_fraction = 1.0;
    CHECK_THROWS_AS(bad.validate(), ConfigError);
    bad = cfg;
    bad.epochs = 0;
    CHECK_THROWS_AS(bad.validate(), ConfigError);
}

TEST_CASE("a blank model with no margin has zero loss everywhere") {
    auto corpus = tiny_corpus();
    TrainConfig cfg = tiny_config();
    cfg.margin = 0.0;
    SegModel m = SegModel::create(Variant::Unigram, cfg, build_train_vocab(corpus));
    // all parameters zero: every path scores 0, gold ties, no hinge violation
    Graph g;
    auto gold = spans_to_tags(corpus[0].spans);
    CHECK(sentence_loss(g, m, corpus[0].chars, gold, nullptr, nullptr, false) == -1);
}

TEST_CASE("a blank model with a margin is charged per wrong position") {
    auto corpus = tiny_corpus();
    TrainConfig cfg = tiny_config();
    cfg.margin = 0.2;
    SegModel m = SegModel::create(Variant::Unigram, cfg, build_train_vocab(corpus));
    Sentence s = make_sentence(U"cc", {{1, 1}, {2, 2}}); // gold S,S
    Graph g;
    NodeId loss = sentence_loss(g, m, s.chars, spans_to_tags(s.spans), nullptr, nullptr, false);
    REQUIRE(loss >= 0);
    // all scores zero: the worst path disagrees at both positions
    CHECK(g.scalar(loss) == doctest::Approx(0.4).epsilon(1e-12));
}

TEST_CASE("sentence loss equals the exhaustive hinge for chain and dag variants") {
    auto corpus = tiny_corpus();
    Vocabulary vocab = build_train_vocab(corpus);
    TrainConfig cfg = tiny_config();
    cfg.embed_dim = 3;
    cfg.hidden_dim = 3;
    for (Variant var : {Variant::Unigram, Variant::WsDag, Variant::WiDag}) {
        SegModel m = SegModel::create(var, cfg, vocab);
        init_uniform(m.store, -0.3, 0.3, 19);
        for (const Sentence& s : {corpus[0], corpus[1]}) {
            auto gold = spans_to_tags(s.spans);
            Lattice lat = m.make_lattice(s.chars);
            const Lattice* lp = m.is_dag() ? &lat : nullptr;

            Graph g;
            NodeId loss = sentence_loss(g, m, s.chars, gold, lp, nullptr, true);
            double got = loss < 0 ? 0.0 : g.scalar(loss);

            Graph g2;
            auto em = m.build_emissions(g2, s.chars, lp, true, nullptr, nullptr);
            EmissionTable f = emission_values(g2, em);
            TagPath best = oracles::enumerate_best(f, m.transitions().value,
                                                   m.start_row().value, &gold, cfg.margin);
            double gold_score =
                score_path_values(f, m.transitions().value, m.start_row().value, gold);
            double want = std::max(0.0, best.score - gold_score);
            CHECK(got == doctest::Approx(want).epsilon(1e-10));
        }
    }
}

TEST_CASE("training rejects empty or unlabeled corpora") {
    TrainConfig cfg = tiny_config();
    SegModel m = SegModel::create(Variant::Unigram, cfg, Vocabulary());
    CHECK_THROWS_AS(train(m, {}), DataError);
    Sentence bare;
    bare.chars = {U'a'};
    SegModel m2 = SegModel::create(Variant::Unigram, cfg, Vocabulary());
    CHECK_THROWS_AS(train(m2, {bare}), DataError);
}

TEST_CASE("a small corpus is memorized to zero loss") {
    auto corpus = tiny_corpus();
    TrainConfig cfg = tiny_config();
    SegModel m = SegModel::create(Variant::WsDag, cfg, build_train_vocab(corpus));
    TrainResult r = train(m, corpus);
    REQUIRE(!r.epochs.empty());
    CHECK(r.epochs.back().train_loss == 0.0);
    for (const Sentence& s : corpus) CHECK(m.segment(s.chars) == s.spans);
}

TEST_CASE("strong weight decay shrinks the parameter norm") {
    auto corpus = tiny_corpus();
    TrainConfig cfg = tiny_config();
    cfg.l2 = 10.0;
    cfg.learning_rate = 0.005;
    cfg.epochs = 3;
    cfg.stop_on_zero_loss = false;
    SegModel trained = SegModel::create(Variant::Unigram, cfg, build_train_vocab(corpus));
    SegModel fresh = SegModel::create(Variant::Unigram, cfg, build_train_vocab(corpus));
    init_uniform(fresh.store, -0.05, 0.05, cfg.seed); // what train() starts from
    train(trained, corpus);
    CHECK(store_norm(trained.store) < store_norm(fresh.store));
}

TEST_CASE("identical seeds give bitwise-identical training runs") {
    auto corpus = tiny_corpus();
    TrainConfig cfg = tiny_config();
    cfg.epochs = 4;
    cfg.stop_on_zero_loss = false;
    cfg.dropout = 0.3;
    cfg.iv_dropout = 0.5;
    cfg.dev_fraction = 0.2;
    std::ostringstream log_a, log_b;
    SegModel a = SegModel::create(Variant::WsDag, cfg, build_train_vocab(corpus));
    SegModel b = SegModel::create(Variant::WsDag, cfg, build_train_vocab(corpus));
    TrainResult ra = train(a, corpus, "", &log_a);
    TrainResult rb = train(b, corpus, "", &log_b);
    CHECK(log_a.str() == log_b.str());
    CHECK(ra.best_epoch == rb.best_epoch);
    REQUIRE(a.store.size() == b.store.size());
    for (std::size_t i = 0; i < a.store.size(); ++i)
        CHECK(a.store.at(i).value.v == b.store.at(i).value.v);

    // a different seed must actually change something
    TrainConfig other = cfg;
    other.seed = 99;
    SegModel c = SegModel::create(Variant::WsDag, other, build_train_vocab(corpus));
    train(c, corpus);
    bool any_diff = false;
    for (std::size_t i = 0; i < a.store.size() && !any_diff; ++i)
        any_diff = a.store.at(i).value.v != c.store.at(i).value.v;
    CHECK(any_diff);
}

TEST_CASE("an absurd learning rate is reported as divergence") {
    auto corpus = tiny_corpus();
    TrainConfig cfg = tiny_config();
    cfg.learning_rate = 1e308;
    cfg.adagrad_eps = 0.0;
    cfg.batch_size = 1;
    cfg.epochs = 3;
    cfg.stop_on_zero_loss = false;
    SegModel m = SegModel::create(Variant::Unigram, cfg, build_train_vocab(corpus));
    CHECK_THROWS_AS(train(m, corpus), NumericError);
}

TEST_CASE("dev sentences never contribute gradients") {
    // ten sentences over pairwise-disjoint alphabets; with no weight decay the
    // embedding rows of the held-out sentence must stay at initialization
    std::vector<Sentence> corpus;
    for (int k = 0; k < 10; ++k) {
        char32_t c0 = static_cast<char32_t>(U'a' + 2 * k);
        char32_t c1 = static_cast<char32_t>(U'a' + 2 * k + 1);
        Sentence s;
        s.chars = {c0, c1, c0};
        s.spans = {{1, 2}, {3, 3}};
        corpus.push_back(s);
    }
    TrainConfig cfg = tiny_config();
    cfg.dev_fraction = 0.1;
    cfg.epochs = 3;
    cfg.stop_on_zero_loss = false;
    Vocabulary vocab = build_train_vocab(corpus);
    SegModel m = SegModel::create(Variant::WsDag, cfg, vocab);
    SegModel ref = SegModel::create(Variant::WsDag, cfg, vocab);
    init_uniform(ref.store, -0.05, 0.05, cfg.seed);
    train(m, corpus);

    // replicate the split to find the held-out sentence
    std::vector<std::size_t> order;
    for (std::size_t i = 0; i < corpus.size(); ++i) order.push_back(i);
    Rng split_rng(mix_seed(cfg.seed, "shuffle"));
    split_rng.shuffle(order);
    std::size_t dev_i = order.back();

    const Tensor& trained = m.word_table().value;
    const Tensor& initial = ref.word_table().value;
    int changed_train_rows = 0;
    for (std::size_t i = 0; i < corpus.size(); ++i) {
        for (char32_t c : corpus[i].chars) {
            int row = vocab.char_id(c);
            bool same = true;
            for (int j = 0; j < trained.cols; ++j)
                same = same && trained.at(row, j) == initial.at(row, j);
            if (i == dev_i)
                CHECK(same); // held out: untouched, bit for bit
            else if (!same)
                ++changed_train_rows;
        }
    }
    CHECK(changed_train_rows > 0);
}

TEST_CASE("epoch log lines carry six tab-separated fields") {
    auto corpus = tiny_corpus();
    TrainConfig cfg = tiny_config();
    cfg.epochs = 3;
    cfg.stop_on_zero_loss = false;
    cfg.dev_fraction = 0.2;
    SegModel m = SegModel::create(Variant::Unigram, cfg, build_train_vocab(corpus));
    std::ostringstream log;
    TrainResult r = train(m, corpus, "", &log);
    std::istringstream in(log.str());
    std::string line;
    int lines = 0;
    while (std::getline(in, line)) {
        ++lines;
        std::istringstream fields(line);
        std::string field;
        std::vector<std::string> parts;
        while (std::getline(fields, field, '\t')) parts.push_back(field);
        REQUIRE(parts.size() == 6);
        CHECK(std::stoi(parts[0]) == lines);
        for (std::size_t k = 1; k < parts.size(); ++k) {
            double v = std::stod(parts[k]);
            CHECK(v >= 0.0);
            CHECK(parts[k].find('.') != std::string::npos); // fixed-point format
        }
    }
    CHECK(lines == 3);
    CHECK(static_cast<int>(r.epochs.size()) == 3);
}

TEST_CASE("the best dev checkpoint is kept and reported") {
    auto corpus = tiny_corpus();
    TrainConfig cfg = tiny_config();
    cfg.epochs = 8;
    cfg.stop_on_zero_loss = false;
    cfg.dev_fraction = 0.34; // two dev sentences
    SegModel m = SegModel::create(Variant::Unigram, cfg, build_train_vocab(corpus));
    TrainResult r = train(m, corpus);
    REQUIRE(r.epochs.size() == 8);
    double best = -1.0;
    int best_epoch = 0;
    for (const EpochStats& st : r.epochs)
        if (st.dev.f_value > best) {
            best = st.dev.f_value;
            best_epoch = st.epoch;
        }
    CHECK(r.best_dev_f == best);
    CHECK(r.best_epoch == best_epoch);

    // the restored parameters reproduce the best dev score exactly
    std::vector<std::size_t> order;
    for (std::size_t i = 0; i < corpus.size(); ++i) order.push_back(i);
    Rng split_rng(mix_seed(cfg.seed, "shuffle"));
    split_rng.shuffle(order);
    std::vector<Sentence> dev;
    std::vector<std::vector<Span>> pred;
    for (std::size_t k = order.size() - 2; k < order.size(); ++k) {
        dev.push_back(corpus[order[k]]);
        pred.push_back(m.segment(corpus[order[k]].chars));
    }
    CHECK(evaluate(dev, pred, m.vocab).f_value == r.best_dev_f);
}

TEST_CASE("without a dev split the final parameters are kept") {
    auto corpus = tiny_corpus();
    TrainConfig cfg = tiny_config();
    cfg.dev_fraction = 0.0;
    cfg.epochs = 2;
    cfg.stop_on_zero_loss = false;
    SegModel m = SegModel::create(Variant::Unigram, cfg, build_train_vocab(corpus));
    TrainResult r = train(m, corpus);
    CHECK(r.best_epoch == 0);
    CHECK(r.best_dev_f == 0.0);
    for (const EpochStats& st : r.epochs) CHECK(st.dev.f_value == 0.0);
}

TEST_CASE("full word dropout starves multi-character embedding rows") {
    auto corpus = tiny_corpus();
    TrainConfig cfg = tiny_config();
    cfg.iv_dropout = 1.0;
    cfg.epochs = 3;
    cfg.stop_on_zero_loss = false;
    Vocabulary vocab = build_train_vocab(corpus);
    std::vector<int> multi_rows;
    for (int id = Vocabulary::kFirstWord; id < vocab.size(); ++id)
        if (vocab.entry(id).text.size() > 1) multi_rows.push_back(id);
    REQUIRE(!multi_rows.empty());

    SegModel m = SegModel::create(Variant::WsDag, cfg, vocab);
    int batches = 0;
    TrainHooks hooks;
    hooks.after_batch_backward = [&](const ParamStore& store) {
        ++batches;
        const Tensor& g = store.get("E.word").grad;
        for (int row : multi_rows)
            for (int j = 0; j < g.cols; ++j) REQUIRE(g.at(row, j) == 0.0);
    };
    train(m, corpus, "", nullptr, &hooks);
    CHECK(batches > 0);
}

TEST_CASE("training the dag variant uses word dropout draws deterministically") {
    // with 0 < p < 1 the run must still be reproducible end to end
    auto corpus = tiny_corpus();
    TrainConfig cfg = tiny_config();
    cfg.iv_dropout = 0.5;
    cfg.dropout = 0.2;
    cfg.epochs = 3;
    cfg.stop_on_zero_loss = false;
    SegModel a = SegModel::create(Variant::WiDag, cfg, build_train_vocab(corpus));
    SegModel b = SegModel::create(Variant::WiDag, cfg, build_train_vocab(corpus));
    std::ostringstream la, lb;
    train(a, corpus, "", &la);
    train(b, corpus, "", &lb);
    CHECK(la.str() == lb.str());
    for (std::size_t i = 0; i < a.store.size(); ++i)
        CHECK(a.store.at(i).value.v == b.store.at(i).value.v);
}
