#include <doctest.h>

#include <cstdio>
#include <fstream>
#include <string>

#include "qiplane/checkpoint.hpp"

using namespace qip;

namespace {

struct TempFile {
    std::string path;
    explicit TempFile(std::string p) : path(std::move(p)) {}
    ~TempFile() { std::remove(path.c_str()); }
};

Checkpoint sample() {
    return {
        {"circuit_params", {0.1, -2.5, 3.14159, 0.0}},
        {"head_weights", {1e-300, 1e300, -0.0}},
        {"empty_block", {}},
    };
}

}  // namespace

TEST_CASE("binary checkpoint round trip") {
    TempFile f("ckpt_test.bin");
    const Checkpoint data = sample();
    save_checkpoint(f.path, data, CheckpointFormat::Binary);
    const Checkpoint back = load_checkpoint(f.path);
    REQUIRE(back.size() == data.size());
    for (const auto& [name, values] : data) {
        REQUIRE(back.count(name) == 1);
        const auto& loaded = back.at(name);
        REQUIRE(loaded.size() == values.size());
        for (size_t i = 0; i < values.size(); ++i) {
            CHECK(loaded[i] == values[i]);  // bit-exact
        }
    }
    // File starts with the binary magic.
    std::ifstream in(f.path, std::ios::binary);
    char magic[8];
    in.read(magic, 8);
    CHECK(std::string(magic, 8) == "QIPCKPT1");
}

TEST_CASE("csv checkpoint round trip") {
    TempFile f("ckpt_test.csv");
    const Checkpoint data = sample();
    save_checkpoint(f.path, data, CheckpointFormat::Csv);
    const Checkpoint back = load_checkpoint(f.path);
    REQUIRE(back.size() == data.size());
    for (const auto& [name, values] : data) {
        const auto& loaded = back.at(name);
        REQUIRE(loaded.size() == values.size());
        for (size_t i = 0; i < values.size(); ++i) {
            CHECK(loaded[i] == doctest::Approx(values[i]).epsilon(1e-15));
        }
    }
    // Versioned header on the first line.
    std::ifstream in(f.path);
    std::string line;
    std::getline(in, line);
    CHECK(line.rfind("qiplane_checkpoint,1", 0) == 0);
}

TEST_CASE("format is detected on load, not from the extension") {
    TempFile bin("ckpt_misnamed.csv");
    save_checkpoint(bin.path, sample(), CheckpointFormat::Binary);
    CHECK(load_checkpoint(bin.path).count("circuit_params") == 1);

    TempFile csv("ckpt_misnamed.bin");
    save_checkpoint(csv.path, sample(), CheckpointFormat::Csv);
    CHECK(load_checkpoint(csv.path).count("head_weights") == 1);
}

TEST_CASE("unreadable or unrecognized files are rejected") {
    CHECK_THROWS(load_checkpoint("definitely_missing_checkpoint_file"));
    TempFile junk("ckpt_junk.bin");
    {
        std::ofstream out(junk.path);
        out << "neither format\n";
    }
    CHECK_THROWS(load_checkpoint(junk.path));
}
