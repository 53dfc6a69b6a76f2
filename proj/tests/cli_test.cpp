#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>
#include <sys/wait.h>
#include <vector>

#include "dagseg/corpus.hpp"
#include "dagseg/model.hpp"
#include "dagseg/model_io.hpp"

using namespace dagseg;

namespace {

struct RunResult {
    int code = -1;
    std::string out, err;
};

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

void spit(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    out << content;
}

const char* binary() {
    const char* bin = std::getenv("DAGSEG_BIN");
    REQUIRE_MESSAGE(bin != nullptr, "DAGSEG_BIN must point at the CLI binary");
    return bin;
}

RunResult run(const std::string& args, const std::string& stdin_data = "") {
    std::string cmd = std::string(binary()) + " " + args;
    if (!stdin_data.empty()) {
        spit("cli_stdin.tmp", stdin_data);
        cmd += " < cli_stdin.tmp";
    } else {
        cmd += " < /dev/null";
    }
    cmd += " > cli_stdout.tmp 2> cli_stderr.tmp";
    int rc = std::system(cmd.c_str());
    RunResult r;
    r.code = WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
    r.out = slurp("cli_stdout.tmp");
    r.err = slurp("cli_stderr.tmp");
    return r;
}

const char* kCorpus = "ab c\nc ab\nab ab\nc c\nab c c\nb c a\n";
const char* kTrainFlags =
    " --variant ws-dag --embed-dim 6 --hidden-dim 8 --dropout 0 --iv-dropout 0"
    " --l2 0 --batch-size 4 --epochs 25 --dev-fraction 0 --seed 7 --stop-on-zero-loss";

bool contains(const std::string& hay, const std::string& needle) {
    return hay.find(needle) != std::string::npos;
}

} // namespace

TEST_CASE("help exits cleanly") {
    RunResult r = run("--help");
    CHECK(r.code == 0);
    CHECK(contains(r.out, "train"));
    CHECK(contains(r.out, "segment"));
}

TEST_CASE("training writes a model and echoes its configuration") {
    spit("cli_corpus.tmp", kCorpus);
    RunResult r = run("train --train cli_corpus.tmp --out cli_model.tmp" +
                      std::string(kTrainFlags));
    CHECK(r.code == 0);
    CHECK(r.err.empty());
    CHECK(contains(r.out, "# variant=ws-dag"));
    CHECK(contains(r.out, "# seed=7"));
    CHECK(contains(r.out, "# sentences=6"));
    CHECK(contains(r.out, "# dev_sentences=0"));
    CHECK(contains(r.out, "# model=cli_model.tmp"));
    CHECK(contains(r.out, "\n1\t")); // first epoch log line
    std::ifstream model("cli_model.tmp", std::ios::binary);
    CHECK(model.good());
}

TEST_CASE("segmenting a file reproduces the library's spans") {
    spit("cli_raw.tmp", "abc\n\ncab\n");
    RunResult r = run("segment --model cli_model.tmp --input cli_raw.tmp --output cli_seg.tmp");
    CHECK(r.code == 0);
    auto parsed = load_corpus("cli_seg.tmp");
    REQUIRE(parsed.size() == 2); // the empty line vanished
    SegModel m = load_model("cli_model.tmp");
    std::vector<std::u32string> raw = {U"abc", U"cab"};
    for (std::size_t i = 0; i < parsed.size(); ++i) {
        std::vector<char32_t> chars(raw[i].begin(), raw[i].end());
        CHECK(parsed[i].chars == chars);
        CHECK(parsed[i].spans == m.segment(chars));
    }
}

TEST_CASE("segmenting from stdin writes to stdout and ignores input spaces") {
    RunResult plain = run("segment --model cli_model.tmp", "abc\n");
    CHECK(plain.code == 0);
    RunResult spaced = run("segment --model cli_model.tmp", "a b\tc\n");
    CHECK(spaced.code == 0);
    CHECK(plain.out == spaced.out);
    CHECK(!plain.out.empty());
    // output words re-join to the input characters
    std::string no_spaces;
    for (char c : plain.out)
        if (c != ' ' && c != '\n') no_spaces += c;
    CHECK(no_spaces == "abc");
}

TEST_CASE("evaluating the memorized training corpus prints perfect percentages") {
    RunResult r = run("eval --model cli_model.tmp --gold cli_corpus.tmp");
    CHECK(r.code == 0);
    CHECK(r.out == "100.00\t100.00\t100.00\t0.00\n");
}

TEST_CASE("an empty extra vocabulary changes nothing") {
    spit("cli_empty_words.tmp", "\n");
    spit("cli_raw.tmp", "abc\ncab\n");
    RunResult base = run("segment --model cli_model.tmp --input cli_raw.tmp");
    RunResult extra = run(
        "segment --model cli_model.tmp --input cli_raw.tmp --extra-vocab cli_empty_words.tmp");
    CHECK(base.code == 0);
    CHECK(extra.code == 0);
    CHECK(base.out == extra.out);
}

TEST_CASE("config files feed the same keys as the flags") {
    spit("cli_cfg.tmp", "epochs=2\nembed-dim=4\nhidden-dim=4\ndropout=0\niv-dropout=0\n"
                        "dev-fraction=0\nseed=3\nbatch-size=4\n");
    RunResult r = run("train --train cli_corpus.tmp --out cli_model2.tmp --config cli_cfg.tmp");
    CHECK(r.code == 0);
    CHECK(contains(r.out, "# epochs=2"));
    CHECK(contains(r.out, "# embed_dim=4"));
    CHECK(contains(r.out, "# seed=3"));
    std::remove("cli_model2.tmp");
}

TEST_CASE("a sweep prints one row per grid point") {
    RunResult r = run("sweep --train cli_corpus.tmp --grid 0,1 --variant ws-dag"
                      " --embed-dim 4 --hidden-dim 4 --dropout 0 --epochs 2"
                      " --batch-size 4 --dev-fraction 0.2 --seed 5");
    CHECK(r.code == 0);
    CHECK(contains(r.out, "# sweep=iv_dropout"));
    CHECK(contains(r.out, "# base_seed=5"));
    std::istringstream in(r.out);
    std::string line;
    std::vector<std::string> rows;
    while (std::getline(in, line))
        if (!line.empty() && line[0] != '#') rows.push_back(line);
    REQUIRE(rows.size() == 2);
    CHECK(rows[0].substr(0, 5) == "0.00\t");
    CHECK(rows[1].substr(0, 5) == "1.00\t");

    RunResult bad = run("sweep --train cli_corpus.tmp --dev-fraction 0");
    CHECK(bad.code == 2);
}

TEST_CASE("lattice dumps match the documented format") {
    spit("cli_words.tmp", "a\nb\nab\n");
    RunResult fwd = run("lattice-dump --words cli_words.tmp --text cab");
    CHECK(fwd.code == 0);
    CHECK(fwd.out == "1 1 c\n2 1 a\n3 1 b\n3 2 ab\n");
    RunResult bwd = run("lattice-dump --words cli_words.tmp --text cab --backward");
    CHECK(bwd.code == 0);
    CHECK(bwd.out == "1 1 c\n2 1 a\n2 2 ab\n3 1 b\n");
    RunResult capped = run("lattice-dump --words cli_words.tmp --text cab --max-word-len 1");
    CHECK(capped.code == 0);
    CHECK(capped.out == "1 1 c\n2 1 a\n3 1 b\n");
    RunResult from_model = run("lattice-dump --model cli_model.tmp --text cab");
    CHECK(from_model.code == 0);
    CHECK(from_model.out == fwd.out);
    RunResult neither = run("lattice-dump --text cab");
    CHECK(neither.code == 2);
}

TEST_CASE("failures map to documented exit codes") {
    RunResult io = run("train --train cli_missing_corpus.tmp");
    CHECK(io.code == 3);
    CHECK(contains(io.err, "error: io:"));

    RunResult cfg = run("train --train cli_corpus.tmp --variant bogus");
    CHECK(cfg.code == 2);
    CHECK(contains(cfg.err, "error: config:"));

    RunResult parse = run("train --train cli_corpus.tmp --no-such-flag");
    CHECK(parse.code == 2);

    RunResult nosub = run("");
    CHECK(nosub.code == 2);

    spit("cli_bad_utf8.tmp", "ok\nbr\x80ken\n");
    RunResult data = run("eval --model cli_model.tmp --gold cli_bad_utf8.tmp");
    CHECK(data.code == 4);
    CHECK(contains(data.err, "error: data:"));

    RunResult nomodel = run("segment --model cli_no_model.tmp", "abc\n");
    CHECK(nomodel.code == 3);
}

TEST_CASE("cleanup") {
    for (const char* f :
         {"cli_corpus.tmp", "cli_model.tmp", "cli_raw.tmp", "cli_seg.tmp", "cli_cfg.tmp",
          "cli_words.tmp", "cli_empty_words.tmp", "cli_bad_utf8.tmp", "cli_stdin.tmp",
          "cli_stdout.tmp", "cli_stderr.tmp"})
        std::remove(f);
    CHECK(true);
}
