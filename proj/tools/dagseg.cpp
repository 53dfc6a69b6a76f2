#include <cstdio>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "dagseg/errors.hpp"
#include "dagseg/model.hpp"
#include "dagseg/model_io.hpp"
#include "dagseg/trainer.hpp"

using namespace dagseg;

namespace {

// Raw text line -> characters, dropping ASCII separators so pre-tokenized
// input and plain text segment the same way.
std::vector<char32_t> line_chars(const std::string& line, int line_no) {
    std::vector<char32_t> cps = decode_utf8(line, line_no);
    std::vector<char32_t> out;
    for (char32_t c : cps)
        if (c != U' ' && c != U'\t') out.push_back(c);
    return out;
}

struct TrainArgs {
    std::string train_path, out_path = "model.bin", variant = "ws-dag", embeddings;
    std::string config_path;
    TrainConfig cfg;
};

std::string trim(const std::string& s) {
    std::size_t b = s.find_first_not_of(" \t");
    if (b == std::string::npos) return "";
    std::size_t e = s.find_last_not_of(" \t");
    return s.substr(b, e - b + 1);
}

// Applies key=value lines to the subcommand's options. Values given on the
// command line keep priority; unknown keys are rejected.
void apply_config_file(CLI::App* cmd, const std::string& path) {
    if (path.empty()) return;
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open config: " + path);
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        std::string entry = trim(line);
        if (entry.empty() || entry[0] == '#') continue;
        std::size_t eq = entry.find('=');
        if (eq == std::string::npos)
            throw ConfigError("config line " + std::to_string(line_no) + " is not key=value");
        std::string key = trim(entry.substr(0, eq));
        std::string value = trim(entry.substr(eq + 1));
        CLI::Option* opt =
            key == "config" ? nullptr : cmd->get_option_no_throw("--" + key);
        if (opt == nullptr) throw ConfigError("unknown config key: " + key);
        if (opt->count() > 0) continue;
        try {
            opt->add_result(value)->run_callback();
        } catch (const CLI::Error& e) {
            throw ConfigError("config key " + key + ": " + e.what());
        }
    }
}

void add_config_options(CLI::App* cmd, TrainArgs& a) {
    cmd->add_option("--variant", a.variant, "encoder: unigram, bigram, ws-dag, wi-dag");
    cmd->add_option("--embed-dim", a.cfg.embed_dim, "embedding size");
    cmd->add_option("--hidden-dim", a.cfg.hidden_dim, "LSTM state size per direction");
    cmd->add_option("--learning-rate", a.cfg.learning_rate, "AdaGrad learning rate");
    cmd->add_option("--l2", a.cfg.l2, "L2 regularization strength");
    cmd->add_option("--margin", a.cfg.margin, "per-position margin cost");
    cmd->add_option("--dropout", a.cfg.dropout, "embedding dropout rate");
    cmd->add_option("--iv-dropout", a.cfg.iv_dropout, "in-vocabulary word dropout rate");
    cmd->add_option("--batch-size", a.cfg.batch_size, "minibatch size");
    cmd->add_option("--seed", a.cfg.seed, "run seed");
    cmd->add_option("--epochs", a.cfg.epochs, "epoch budget");
    cmd->add_option("--l-max", a.cfg.l_max, "length clamp for length-indexed weights");
    cmd->add_option("--max-word-len", a.cfg.max_word_len, "lattice edge length cap (0 = off)");
    cmd->add_option("--dev-fraction", a.cfg.dev_fraction, "held-out fraction of the train set");
    cmd->add_option("--clip-norm", a.cfg.clip_norm, "gradient norm clip (0 = off)");
    cmd->add_option("--adagrad-eps", a.cfg.adagrad_eps, "AdaGrad denominator epsilon");
    cmd->add_flag("--plain-decode-train", a.cfg.plain_decode_train,
                  "decode without the margin during training");
    cmd->add_flag("--l2-embeddings,!--no-l2-embeddings", a.cfg.l2_embeddings,
                  "apply L2 to embedding tables");
    cmd->add_flag("--stop-on-zero-loss", a.cfg.stop_on_zero_loss,
                  "stop when an epoch's loss reaches zero");
    cmd->add_option("--embeddings", a.embeddings, "pre-trained word2vec text file");
    cmd->add_option("--config", a.config_path, "flat key=value config file; flags override");
}

void echo_config(const TrainArgs& a, std::size_t sentences, std::size_t dev) {
    const TrainConfig& c = a.cfg;
    std::cout << "# variant=" << a.variant << "\n# train=" << a.train_path
              << "\n# sentences=" << sentences << "\n# dev_sentences=" << dev
              << "\n# embed_dim=" << c.embed_dim << "\n# hidden_dim=" << c.hidden_dim
              << "\n# learning_rate=" << c.learning_rate << "\n# l2=" << c.l2
              << "\n# margin=" << c.margin << "\n# dropout=" << c.dropout
              << "\n# iv_dropout=" << c.iv_dropout << "\n# batch_size=" << c.batch_size
              << "\n# seed=" << c.seed << "\n# epochs=" << c.epochs
              << "\n# l_max=" << c.l_max << "\n# max_word_len=" << c.max_word_len
              << "\n# dev_fraction=" << c.dev_fraction << "\n# clip_norm=" << c.clip_norm
              << "\n# adagrad_eps=" << c.adagrad_eps
              << "\n# plain_decode_train=" << (c.plain_decode_train ? 1 : 0)
              << "\n# l2_embeddings=" << (c.l2_embeddings ? 1 : 0)
              << "\n# stop_on_zero_loss=" << (c.stop_on_zero_loss ? 1 : 0) << "\n";
}

SegModel build_fresh_model(const TrainArgs& a, const std::vector<Sentence>& corpus) {
    Variant v = variant_from_name(a.variant);
    Vocabulary vocab = build_train_vocab(corpus);
    BigramVocab bg;
    if (v == Variant::Bigram) bg = build_bigram_vocab(corpus);
    return SegModel::create(v, a.cfg, std::move(vocab), std::move(bg));
}

int cmd_train(const TrainArgs& a) {
    std::vector<Sentence> corpus = load_corpus(a.train_path);
    if (corpus.empty()) throw DataError("training corpus is empty: " + a.train_path);
    SegModel model = build_fresh_model(a, corpus);
    std::size_t dev = static_cast<std::size_t>(a.cfg.dev_fraction *
                                               static_cast<double>(corpus.size()));
    echo_config(a, corpus.size(), dev);
    TrainResult res = train(model, corpus, a.embeddings, &std::cout);
    if (res.embedding_coverage >= 0.0)
        std::cout << "# embedding_coverage=" << res.embedding_coverage << "\n";
    if (res.best_epoch > 0)
        std::cout << "# best_epoch=" << res.best_epoch << "\n# best_dev_f=" << res.best_dev_f
                  << "\n";
    save_model(model, a.out_path);
    std::cout << "# model=" << a.out_path << "\n";
    return 0;
}

int cmd_segment(const std::string& model_path, const std::string& input,
                const std::string& output, const std::string& extra_vocab) {
    SegModel model = load_model(model_path);
    if (!extra_vocab.empty()) inject_external_vocab(model, load_wordlist(extra_vocab));

    std::ifstream fin;
    std::istream* in = &std::cin;
    if (!input.empty()) {
        fin.open(input, std::ios::binary);
        if (!fin) throw IoError("cannot open input: " + input);
        in = &fin;
    }
    std::ofstream fout;
    std::ostream* out = &std::cout;
    if (!output.empty()) {
        fout.open(output, std::ios::binary | std::ios::trunc);
        if (!fout) throw IoError("cannot open output: " + output);
        out = &fout;
    }

    std::string line;
    int line_no = 0;
    while (std::getline(*in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        std::vector<char32_t> chars = line_chars(line, line_no);
        if (chars.empty()) continue;
        *out << render_segmentation(chars, model.segment(chars)) << "\n";
    }
    out->flush();
    if (!output.empty() && !fout) throw IoError("failed writing output: " + output);
    return 0;
}

int cmd_eval(const std::string& model_path, const std::string& gold_path,
             const std::string& extra_vocab) {
    SegModel model = load_model(model_path);
    if (!extra_vocab.empty()) inject_external_vocab(model, load_wordlist(extra_vocab));
    std::vector<Sentence> gold = load_corpus(gold_path);
    if (gold.empty()) throw DataError("evaluation corpus is empty: " + gold_path);
    std::vector<std::vector<Span>> pred;
    pred.reserve(gold.size());
    for (const Sentence& s : gold) pred.push_back(model.segment(s.chars));
    SegMetrics m = evaluate(gold, pred, model.vocab);
    std::printf("%.2f\t%.2f\t%.2f\t%.2f\n", 100.0 * m.precision, 100.0 * m.recall,
                100.0 * m.f_value, 100.0 * m.oov_recall);
    return 0;
}

int cmd_sweep(const TrainArgs& base, const std::vector<double>& grid) {
    if (base.cfg.dev_fraction <= 0.0)
        throw ConfigError("sweep needs a dev split; set --dev-fraction above zero");
    std::vector<Sentence> corpus = load_corpus(base.train_path);
    if (corpus.empty()) throw DataError("training corpus is empty: " + base.train_path);
    std::cout << "# sweep=iv_dropout\n# variant=" << base.variant
              << "\n# base_seed=" << base.cfg.seed << "\n";
    for (std::size_t i = 0; i < grid.size(); ++i) {
        TrainArgs a = base;
        a.cfg.iv_dropout = grid[i];
        a.cfg.seed = base.cfg.seed + i;
        SegModel model = build_fresh_model(a, corpus);
        TrainResult res = train(model, corpus, a.embeddings);
        std::printf("%.2f\t%.4f\n", grid[i], res.best_dev_f);
        std::fflush(stdout);
    }
    return 0;
}

int cmd_lattice_dump(const std::string& words_path, const std::string& model_path,
                     const std::string& text, bool backward, int max_word_len) {
    Vocabulary vocab;
    if (!model_path.empty()) {
        vocab = load_model(model_path).vocab;
    } else {
        for (const std::u32string& w : load_wordlist(words_path)) vocab.add(w, true);
    }
    std::vector<char32_t> chars = line_chars(text, 0);
    if (chars.empty()) throw DataError("no characters to build a lattice over");
    Automaton ac(vocab);
    Lattice lat = build_lattice(chars, ac, vocab, max_word_len);
    std::cout << dump_lattice(lat, chars, backward);
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"DAG-LSTM neural word segmenter"};
    app.require_subcommand(1);

    TrainArgs train_args;
    CLI::App* train_cmd = app.add_subcommand("train", "train a model");
    train_cmd->add_option("--train", train_args.train_path, "segmented training corpus")
        ->required();
    train_cmd->add_option("--out", train_args.out_path, "model output path");
    add_config_options(train_cmd, train_args);

    std::string seg_model, seg_input, seg_output, seg_extra;
    CLI::App* seg_cmd = app.add_subcommand("segment", "segment raw text");
    seg_cmd->add_option("--model", seg_model, "model file")->required();
    seg_cmd->add_option("--input", seg_input, "input text file (default stdin)");
    seg_cmd->add_option("--output", seg_output, "output file (default stdout)");
    seg_cmd->add_option("--extra-vocab", seg_extra, "external word list (dag variants)");

    std::string eval_model, eval_gold, eval_extra;
    CLI::App* eval_cmd = app.add_subcommand("eval", "score against a gold corpus");
    eval_cmd->add_option("--model", eval_model, "model file")->required();
    eval_cmd->add_option("--gold", eval_gold, "gold segmented corpus")->required();
    eval_cmd->add_option("--extra-vocab", eval_extra, "external word list (dag variants)");

    TrainArgs sweep_args;
    std::vector<double> sweep_grid{0.0, 0.25, 0.5, 0.75, 1.0};
    CLI::App* sweep_cmd = app.add_subcommand("sweep", "dev F across iv-dropout rates");
    sweep_cmd->add_option("--train", sweep_args.train_path, "segmented training corpus")
        ->required();
    sweep_cmd->add_option("--grid", sweep_grid, "iv-dropout rates to try")->delimiter(',');
    add_config_options(sweep_cmd, sweep_args);

    std::string dump_words, dump_model, dump_text;
    bool dump_backward = false;
    int dump_cap = 0;
    CLI::App* dump_cmd = app.add_subcommand("lattice-dump", "print a sentence's word lattice");
    dump_cmd->add_option("--words", dump_words, "word list file");
    dump_cmd->add_option("--model", dump_model, "take the vocabulary from a model file");
    dump_cmd->add_option("--text", dump_text, "sentence")->required();
    dump_cmd->add_flag("--backward", dump_backward, "dump the backward direction");
    dump_cmd->add_option("--max-word-len", dump_cap, "edge length cap (0 = off)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return app.exit(e);
        std::cerr << "error: config: " << e.what() << "\n";
        return 2;
    }

    try {
        if (train_cmd->parsed()) {
            apply_config_file(train_cmd, train_args.config_path);
            return cmd_train(train_args);
        }
        if (seg_cmd->parsed()) return cmd_segment(seg_model, seg_input, seg_output, seg_extra);
        if (eval_cmd->parsed()) return cmd_eval(eval_model, eval_gold, eval_extra);
        if (sweep_cmd->parsed()) {
            apply_config_file(sweep_cmd, sweep_args.config_path);
            return cmd_sweep(sweep_args, sweep_grid);
        }
        if (dump_cmd->parsed()) {
            if (dump_words.empty() && dump_model.empty())
                throw ConfigError("lattice-dump needs --words or --model");
            return cmd_lattice_dump(dump_words, dump_model, dump_text, dump_backward,
                                    dump_cap);
        }
    } catch (const ConfigError& e) {
        std::cerr << "error: config: " << e.what() << "\n";
        return 2;
    } catch (const IoError& e) {
        std::cerr << "error: io: " << e.what() << "\n";
        return 3;
    } catch (const DataError& e) {
        std::cerr << "error: data: " << e.what() << "\n";
        return 4;
    } catch (const NumericError& e) {
        std::cerr << "error: numeric: " << e.what() << "\n";
        return 5;
    } catch (const std::exception& e) {
        std::cerr << "error: internal: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
