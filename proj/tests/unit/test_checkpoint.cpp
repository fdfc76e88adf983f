#include <doctest.h>

#include <filesystem>
#include <fstream>

#include "hmlc/checkpoint.hpp"
#include "hmlc/errors.hpp"

using namespace hmlc;
namespace fs = std::filesystem;

namespace {

ModelParams sample_model() {
    ModelParams m = init_model(6, 3, ArchConfig{{5, 4}}, 2024);
    m.hierarchy_digest = "0123456789abcdef";
    m.policy_name = "u-ones-lsr";
    m.seed = 2024;
    // Exercise non-trivial bit patterns.
    m.layers[0].w[0] = -0.0;
    m.layers[0].w[1] = 1e-308;
    m.layers[1].b[0] = 3.141592653589793;
    return m;
}

std::string slurp(const fs::path& p) {
    std::ifstream f(p, std::ios::binary);
    return {std::istreambuf_iterator<char>(f), std::istreambuf_iterator<char>()};
}

} // namespace

TEST_CASE("checkpoints round-trip bit for bit") {
    const ModelParams m = sample_model();
    const fs::path p1 = fs::temp_directory_path() / "ckpt_a.bin";
    const fs::path p2 = fs::temp_directory_path() / "ckpt_b.bin";

    save_checkpoint(p1, m);
    const ModelParams back = load_checkpoint(p1);
    save_checkpoint(p2, back);

    CHECK(slurp(p1) == slurp(p2));
    REQUIRE(back.layers.size() == m.layers.size());
    for (std::size_t l = 0; l < m.layers.size(); ++l) {
        CHECK(back.layers[l].w == m.layers[l].w);
        CHECK(back.layers[l].b == m.layers[l].b);
        CHECK(back.layers[l].in == m.layers[l].in);
        CHECK(back.layers[l].out == m.layers[l].out);
        CHECK(back.layers[l].act == m.layers[l].act);
    }
    CHECK(back.hierarchy_digest == m.hierarchy_digest);
    CHECK(back.policy_name == m.policy_name);
    CHECK(back.seed == m.seed);
}

TEST_CASE("repeated saves of the same model are identical bytes") {
    const ModelParams m = sample_model();
    const fs::path p1 = fs::temp_directory_path() / "ckpt_rep1.bin";
    const fs::path p2 = fs::temp_directory_path() / "ckpt_rep2.bin";
    save_checkpoint(p1, m);
    save_checkpoint(p2, m);
    CHECK(slurp(p1) == slurp(p2));
}

TEST_CASE("corrupted files are rejected with a clear error") {
    const ModelParams m = sample_model();
    const fs::path good = fs::temp_directory_path() / "ckpt_good.bin";
    save_checkpoint(good, m);
    const std::string bytes = slurp(good);

    SUBCASE("bad magic") {
        const fs::path p = fs::temp_directory_path() / "ckpt_magic.bin";
        std::string tampered = bytes;
        tampered[0] = 'X';
        std::ofstream(p, std::ios::binary) << tampered;
        CHECK_THROWS_WITH_AS(load_checkpoint(p), doctest::Contains("magic"), ValidationError);
    }
    SUBCASE("truncated payload") {
        const fs::path p = fs::temp_directory_path() / "ckpt_trunc.bin";
        std::ofstream(p, std::ios::binary) << bytes.substr(0, bytes.size() - 9);
        CHECK_THROWS_WITH_AS(load_checkpoint(p), doctest::Contains("truncated"), ValidationError);
    }
    SUBCASE("trailing garbage") {
        const fs::path p = fs::temp_directory_path() / "ckpt_trail.bin";
        std::ofstream(p, std::ios::binary) << bytes << "zz";
        CHECK_THROWS_WITH_AS(load_checkpoint(p), doctest::Contains("trailing"), ValidationError);
    }
    SUBCASE("missing file") {
        CHECK_THROWS_AS(load_checkpoint("/nonexistent/model.bin"), ValidationError);
    }
}
