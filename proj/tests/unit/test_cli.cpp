#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <doctest.h>
#include <json.hpp>

namespace fs = std::filesystem;

namespace {

int run(const std::string& args) {
    const std::string cmd = std::string(HMLC_CLI_BIN) + " " + args + " >/dev/null 2>&1";
    const int status = std::system(cmd.c_str());
    return WEXITSTATUS(status);
}

std::string read_bytes(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    REQUIRE(in.good());
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

struct TempDir {
    fs::path path;
    TempDir(const char* tag) {
        path = fs::temp_directory_path() / (std::string("hmlc_cli_") + tag);
        fs::remove_all(path);
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
    std::string operator/(const char* name) const { return (path / name).string(); }
};

} // namespace

TEST_CASE("gen writes the dataset bundle and a parseable manifest") {
    TempDir dir("gen");
    REQUIRE(run("gen --out " + (dir / "d") + " --n 40 --eval-n 20 --rho 0.2 --seed 5") == 0);
    for (const char* f : {"train.csv", "train_features.csv", "valid.csv", "valid_features.csv",
                          "oracle.csv", "manifest.json"})
        CHECK(fs::exists(dir.path / "d" / f));

    const auto doc = nlohmann::json::parse(read_bytes(dir.path / "d" / "manifest.json"));
    CHECK(doc["subcommand"] == "gen");
    CHECK(doc["seed"] == 5);
    CHECK(doc["config"]["n"] == 40);
    CHECK(doc["config"]["rho"] == 0.2);
    CHECK(doc["config"]["hierarchy"] == "builtin");
    CHECK(doc["outputs"].size() == 5);
}

TEST_CASE("train, predict and eval round-trip through the binary") {
    TempDir dir("roundtrip");
    REQUIRE(run("gen --out " + (dir / "d") + " --n 200 --eval-n 80 --seed 3") == 0);
    REQUIRE(run("train --data " + (dir / "d") + "/train.csv --features " + (dir / "d") +
                "/train_features.csv --out " + (dir / "m.ckpt") +
                " --policy u-zeros --conditional --lr 0.02 --lr-decay 0.7"
                " --epochs-p1 3 --epochs-p2 2 --seed 4") == 0);
    REQUIRE(run("predict --model " + (dir / "m.ckpt") + " --features " + (dir / "d") +
                "/valid_features.csv --out " + (dir / "pred.csv")) == 0);
    REQUIRE(run("eval --pred " + (dir / "pred.csv") + " --data " + (dir / "d") +
                "/valid.csv --out " + (dir / "report.txt") + " --csv " + (dir / "report.csv")) ==
            0);

    const std::string report = read_bytes(dir.path / "report.txt");
    CHECK(report.find("mean AUC over 5 labels") != std::string::npos);
    CHECK(read_bytes(dir.path / "report.csv").rfind("label,auc,pos,neg", 0) == 0);

    const auto doc = nlohmann::json::parse(read_bytes(dir.path / "m.ckpt.manifest.json"));
    CHECK(doc["stats"]["phase1_negative_parent"] == 0);
    CHECK(doc["stats"]["epochs"].size() == 5);
}

TEST_CASE("ensemble averages the listed checkpoints") {
    TempDir dir("ens");
    REQUIRE(run("gen --out " + (dir / "d") + " --n 150 --eval-n 50 --seed 8") == 0);
    const std::string base = "--data " + (dir / "d") + "/train.csv --features " + (dir / "d") +
                             "/train_features.csv --epochs-p1 2 --epochs-p2 1 --lr 0.02";
    REQUIRE(run("train " + base + " --out " + (dir / "a.ckpt") + " --seed 1") == 0);
    REQUIRE(run("train " + base + " --out " + (dir / "b.ckpt") + " --seed 2") == 0);
    REQUIRE(run("ensemble --models " + (dir / "a.ckpt") + " " + (dir / "b.ckpt") +
                " --features " + (dir / "d") + "/valid_features.csv --out " +
                (dir / "pred.csv")) == 0);
    CHECK(fs::exists(dir.path / "pred.csv"));
    CHECK(fs::exists(dir.path / "pred.csv.manifest.json"));
}

TEST_CASE("exit codes separate usage, validation and hierarchy mismatches") {
    TempDir dir("codes");
    CHECK(run("definitely-not-a-subcommand") == 2);
    CHECK(run("train --data x.csv") == 2);                        // missing required flags
    CHECK(run("train --data " + (dir / "nope.csv") + " --features " + (dir / "nope2.csv") +
              " --out " + (dir / "m.ckpt")) == 3);                // missing file
    CHECK(run("ablate --out " + (dir / "a") + " --matrix exotic") == 3);

    // a checkpoint trained against a different forest is rejected at predict
    std::ofstream(dir.path / "flat.hier") << "Only Label\n";
    REQUIRE(run("gen --out " + (dir / "d") + " --n 30 --seed 1") == 0);
    REQUIRE(run("train --data " + (dir / "d") + "/train.csv --features " + (dir / "d") +
                "/train_features.csv --out " + (dir / "m.ckpt") +
                " --epochs-p1 1 --epochs-p2 0 --seed 1") == 0);
    CHECK(run("predict --model " + (dir / "m.ckpt") + " --features " + (dir / "d") +
              "/valid_features.csv --out " + (dir / "p.csv") + " --hierarchy " +
              (dir / "flat.hier")) == 3);
}

TEST_CASE("config files fill in defaults but never override explicit flags") {
    TempDir dir("ini");
    std::ofstream(dir.path / "run.ini") << "[gen]\nn=25\nseed=9\n";
    REQUIRE(run("gen --config " + (dir / "run.ini") + " --out " + (dir / "a")) == 0);
    auto doc = nlohmann::json::parse(read_bytes(dir.path / "a" / "manifest.json"));
    CHECK(doc["config"]["n"] == 25);
    CHECK(doc["seed"] == 9);

    REQUIRE(run("gen --config " + (dir / "run.ini") + " --n 31 --out " + (dir / "b")) == 0);
    doc = nlohmann::json::parse(read_bytes(dir.path / "b" / "manifest.json"));
    CHECK(doc["config"]["n"] == 31);
    CHECK(run("gen --config " + (dir / "missing.ini") + " --out " + (dir / "c")) == 2);
}

TEST_CASE("preprocess fills an output directory with tensors and a match list") {
    TempDir dir("pre");
    fs::create_directories(dir.path / "imgs");
    for (int n = 0; n < 2; ++n) {
        std::ofstream out(dir.path / "imgs" / ("i" + std::to_string(n) + ".pgm"),
                          std::ios::binary);
        out << "P5\n40 40\n255\n";
        for (int i = 0; i < 1600; ++i) out.put(static_cast<char>((i * 7 + n * 13) % 256));
    }
    REQUIRE(run("preprocess --in " + (dir / "imgs") + " --out " + (dir / "t") +
                " --resize 32 --crop 16") == 0);
    CHECK(fs::exists(dir.path / "t" / "i0.hmlt"));
    CHECK(fs::exists(dir.path / "t" / "i1.hmlt"));
    const std::string matches = read_bytes(dir.path / "t" / "match_manifest.csv");
    CHECK(matches.rfind("file,row,col,ncc", 0) == 0);
}
