#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "levcode/datasets.hpp"
#include "levcode/leverage.hpp"
#include "test_util.hpp"

using namespace levcode;
using namespace levcode::testutil;

namespace {

std::filesystem::path tmp_dir() {
    const auto dir = std::filesystem::temp_directory_path() / "levcode_data_tests";
    std::filesystem::create_directories(dir);
    return dir;
}

struct IdxFixture {
    std::string images;
    std::string labels;
};

// three hand-picked images with distinct corner markers
IdxFixture write_small_fixture() {
    const auto dir = tmp_dir();
    IdxFixture fx{(dir / "fixture-images-idx3-ubyte").string(),
                  (dir / "fixture-labels-idx1-ubyte").string()};
    std::vector<std::vector<std::uint8_t>> images(3, std::vector<std::uint8_t>(784, 0));
    images[0][0] = 255;
    images[1][100] = 128;
    images[2][783] = 7;
    write_idx_images(fx.images, images);
    write_idx_labels(fx.labels, {4, 9, 4});
    return fx;
}

}  // namespace

TEST_CASE("synthetic regression has the documented shape and block ranges") {
    const SynthRegression synth = synth_regression(1);
    CHECK(synth.data.X.rows() == 1000);
    CHECK(synth.data.X.cols() == 20);
    CHECK(synth.data.y.size() == 1000);
    CHECK(synth.theta_true.size() == 20);
    CHECK(synth.noise.size() == 1000);

    std::vector<std::size_t> per_block(20, 0);
    double global_max = 0.0;
    for (std::size_t i = 0; i < 1000; ++i) {
        const std::size_t block = synth.block_of_row[i];
        REQUIRE(block < 20);
        ++per_block[block];
        const double bound = 15.0 * static_cast<double>(block + 1);
        for (double v : synth.data.X.row(i)) {
            CHECK(v == std::floor(v));  // integer entries
            CHECK(std::abs(v) <= bound);
            global_max = std::max(global_max, std::abs(v));
        }
    }
    for (std::size_t b = 0; b < 20; ++b) CHECK(per_block[b] == 50);
    CHECK(global_max > 285.0);  // the widest block is realized near its bound

    // block 1 rows stay within +-15
    for (std::size_t i = 0; i < 1000; ++i)
        if (synth.block_of_row[i] == 0)
            for (double v : synth.data.X.row(i)) CHECK(std::abs(v) <= 15.0);
}

TEST_CASE("targets are the noisy linear responses") {
    const SynthRegression synth = synth_regression(2);
    const Vec clean = matvec(synth.data.X, synth.theta_true);
    for (std::size_t i = 0; i < 1000; ++i)
        CHECK(synth.data.y[i] == clean[i] + synth.noise[i]);
}

TEST_CASE("synthetic generation is bit-reproducible per seed") {
    const SynthRegression a = synth_regression(77);
    const SynthRegression b = synth_regression(77);
    CHECK(a.data.X.data() == b.data.X.data());
    CHECK(a.data.y == b.data.y);
    CHECK(a.theta_true == b.theta_true);
    const SynthRegression c = synth_regression(78);
    CHECK(a.data.X.data() != c.data.X.data());
}

TEST_CASE("the generator produces markedly nonuniform leverage scores") {
    std::size_t nonuniform = 0;
    for (std::uint64_t seed = 0; seed < 100; ++seed) {
        const SynthRegression synth = synth_regression(seed);
        const Vec pi = normalize_scores(leverage_scores(synth.data.X));
        double mx = 0.0, mn = 1.0;
        for (double v : pi) {
            mx = std::max(mx, v);
            mn = std::min(mn, v);
        }
        if (mn > 0.0 && mx / mn > 2.0) ++nonuniform;
    }
    CHECK(nonuniform >= 95);
}

TEST_CASE("IDX fixture round-trips exactly") {
    const IdxFixture fx = write_small_fixture();
    const Dataset ds = load_mnist(fx.images, fx.labels, {4, 9}, 10);
    REQUIRE(ds.X.rows() == 3);
    CHECK(ds.X.cols() == 784);
    CHECK(ds.X(0, 0) == 255.0 / 255.0);
    CHECK(ds.X(1, 100) == 128.0 / 255.0);
    CHECK(ds.X(2, 783) == 7.0 / 255.0);
    CHECK(ds.X(0, 1) == 0.0);
    CHECK(ds.y == Vec{1.0, -1.0, 1.0});
}

TEST_CASE("limit truncates after class filtering and rejects zero") {
    const IdxFixture fx = write_small_fixture();
    const Dataset ds = load_mnist(fx.images, fx.labels, {4, 9}, 2);
    CHECK(ds.X.rows() == 2);
    CHECK(ds.y == Vec{1.0, -1.0});
    CHECK_THROWS_AS(load_mnist(fx.images, fx.labels, {4, 9}, 0), InvalidInputError);
}

TEST_CASE("an absent class is an error") {
    const IdxFixture fx = write_small_fixture();
    CHECK_THROWS_AS(load_mnist(fx.images, fx.labels, {4, 7}, 10), EmptyClassError);
}

TEST_CASE("malformed IDX files report the failing byte offset") {
    const auto dir = tmp_dir();
    const std::string bad = (dir / "bad-images").string();
    {
        std::ofstream out(bad, std::ios::binary);
        const char junk[4] = {0x12, 0x34, 0x56, 0x78};
        out.write(junk, 4);
    }
    const IdxFixture fx = write_small_fixture();
    try {
        load_mnist(bad, fx.labels, {4, 9}, 10);
        FAIL("expected FormatError");
    } catch (const FormatError& e) {
        CHECK(e.byte_offset == 0);
    }

    const std::string truncated = (dir / "truncated-images").string();
    {
        std::ofstream out(truncated, std::ios::binary);
        const unsigned char header[8] = {0, 0, 8, 3, 0, 0, 0, 2};
        out.write(reinterpret_cast<const char*>(header), 8);
    }
    try {
        load_mnist(truncated, fx.labels, {4, 9}, 10);
        FAIL("expected FormatError");
    } catch (const FormatError& e) {
        CHECK(e.byte_offset == 8);
    }
}

TEST_CASE("image/label count mismatch is rejected") {
    const auto dir = tmp_dir();
    const IdxFixture fx = write_small_fixture();
    const std::string labels2 = (dir / "two-labels-idx1-ubyte").string();
    write_idx_labels(labels2, {4, 9});
    CHECK_THROWS_AS(load_mnist(fx.images, labels2, {4, 9}, 10), ArityError);
}

TEST_CASE("truncate_to_multiple keeps the leading rows") {
    Dataset ds;
    ds.X = random_matrix(10, 2, 5);
    ds.y = random_vec(10, 6);
    const Mat original = ds.X;
    const Dataset cut = truncate_to_multiple(std::move(ds), 4);
    CHECK(cut.X.rows() == 8);
    CHECK(cut.y.size() == 8);
    for (std::size_t i = 0; i < 8; ++i)
        CHECK(max_abs_diff_vec(cut.X.row(i), original.row(i)) == 0.0);

    Dataset tiny;
    tiny.X = random_matrix(3, 2, 7);
    tiny.y = random_vec(3, 8);
    CHECK_THROWS_AS(truncate_to_multiple(std::move(tiny), 16), InvalidInputError);
}

TEST_CASE("CSV export writes the documented header and exact values") {
    Dataset ds;
    ds.X = Mat(2, 2, Vec{1.0, 0.5, -2.0, 0.25});
    ds.y = Vec{3.0, -1.0};
    std::ostringstream out;
    write_dataset_csv(ds, out);
    CHECK(out.str() == "x_0,x_1,y\n1,0.5,3\n-2,0.25,-1\n");
}
