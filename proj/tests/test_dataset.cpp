#include <algorithm>
#include <random>

#include "doctest.h"
#include "oss/dataset.hpp"
#include "oss/errors.hpp"
#include "support/synthetic.hpp"

using namespace oss;

namespace {

std::vector<std::uint8_t> header(std::uint32_t magic, std::initializer_list<std::uint32_t> dims) {
    std::vector<std::uint8_t> out;
    auto be = [&](std::uint32_t v) {
        for (int s = 24; s >= 0; s -= 8) {
            out.push_back(static_cast<std::uint8_t>(v >> s));
        }
    };
    be(magic);
    for (auto d : dims) {
        be(d);
    }
    return out;
}

ImageSet random_images(std::size_t count, std::size_t rows, std::size_t cols, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<int> px(0, 255);
    ImageSet s{rows, cols, std::vector<std::uint8_t>(count * rows * cols)};
    for (auto& p : s.pixels) {
        p = static_cast<std::uint8_t>(px(rng));
    }
    return s;
}

// Independent index oracle: position of pixel (r, c) of the padded image in
// the dual-orientation stream.
std::vector<double> expected_sequence(const ImageView& img, std::size_t n) {
    const std::size_t gr = (img.rows + n - 1) / n;
    const std::size_t gc = (img.cols + n - 1) / n;
    auto px = [&](std::size_t r, std::size_t c) -> double {
        return (r < img.rows && c < img.cols) ? img.at(r, c) / 255.0 : 0.0;
    };
    std::vector<double> out(2 * gr * gc * n * n);
    for (std::size_t p = 0; p < gr * gc; ++p) {
        const std::size_t r0 = (p / gc) * n;
        const std::size_t c0 = (p % gc) * n;
        const std::size_t base = p * 2 * n * n;
        for (std::size_t idx = 0; idx < n * n; ++idx) {
            out[base + idx] = px(r0 + idx % n, c0 + idx / n);
            out[base + n * n + idx] = px(r0 + idx / n, c0 + idx % n);
        }
    }
    return out;
}

}  // namespace

TEST_CASE("parse_idx_images reads the documented byte layout") {
    auto bytes = header(0x00000803, {2, 2, 2});
    for (std::uint8_t b = 0; b < 8; ++b) {
        bytes.push_back(b);
    }
    const ImageSet set = parse_idx_images(bytes);
    REQUIRE(set.size() == 2);
    CHECK(set.rows == 2);
    CHECK(set.cols == 2);
    CHECK(set.image(0).at(0, 0) == 0);
    CHECK(set.image(0).at(0, 1) == 1);
    CHECK(set.image(0).at(1, 0) == 2);
    CHECK(set.image(0).at(1, 1) == 3);
    CHECK(set.image(1).at(0, 0) == 4);
    CHECK(set.image(1).at(1, 1) == 7);
}

TEST_CASE("parse_idx_images rejects wrong magic and truncation") {
    auto labels = header(0x00000801, {2, 2, 2});
    labels.resize(labels.size() + 8);
    CHECK_THROWS_AS(parse_idx_images(labels), FormatError);

    auto bytes = header(0x00000803, {2, 2, 2});
    bytes.resize(bytes.size() + 7);
    CHECK_THROWS_AS(parse_idx_images(bytes), LengthError);
    CHECK_THROWS_AS(parse_idx_images(std::vector<std::uint8_t>{0, 0, 8}), LengthError);
}

TEST_CASE("parse_idx_labels") {
    auto bytes = header(0x00000801, {3});
    bytes.insert(bytes.end(), {7, 2, 1});
    CHECK(parse_idx_labels(bytes).labels == std::vector<std::uint8_t>{7, 2, 1});

    auto bad = header(0x00000801, {1});
    bad.push_back(12);
    CHECK_THROWS_AS(parse_idx_labels(bad), RangeError);

    auto wrong = header(0x00000803, {1});
    wrong.push_back(1);
    CHECK_THROWS_AS(parse_idx_labels(wrong), FormatError);

    auto short_payload = header(0x00000801, {4});
    short_payload.push_back(1);
    CHECK_THROWS_AS(parse_idx_labels(short_payload), LengthError);
}

TEST_CASE("IDX round trip through files, plain and gzip") {
    const ImageSet images = random_images(5, 28, 28, 3);
    const LabelSet labels{{0, 1, 9, 4, 4}};
    const auto dir = testing::scratch_dir("idx");
    testing::write_bytes(dir / "img", encode_idx_images(images));
    testing::write_bytes(dir / "lbl", encode_idx_labels(labels));
    CHECK(load_idx_images(dir / "img").pixels == images.pixels);
    CHECK(load_idx_labels(dir / "lbl").labels == labels.labels);

    const std::string cmd = "gzip -k -f " + (dir / "img").string();
    if (std::system(cmd.c_str()) == 0) {
        const auto gz = read_maybe_gzip(dir / "img.gz");
        CHECK(gz == encode_idx_images(images));
        CHECK(load_idx_images(dir / "img.gz").pixels == images.pixels);
    }
}

TEST_CASE("patchify geometry") {
    const ImageSet set = random_images(1, 28, 28, 1);
    SUBCASE("n = 4 divides 28") {
        const PatchGrid g = patchify(set.image(0), 4);
        CHECK(g.grid_rows == 7);
        CHECK(g.grid_cols == 7);
        CHECK(g.pad_rows == 0);
        CHECK(g.pad_cols == 0);
    }
    SUBCASE("n = 3 pads bottom/right by two") {
        const PatchGrid g = patchify(set.image(0), 3);
        CHECK(g.grid_rows == 10);
        CHECK(g.grid_cols == 10);
        CHECK(g.pad_rows == 2);
        CHECK(g.pad_cols == 2);
        // exhaustive: every padded position maps back to the source or to zero
        std::size_t blocks = 0;
        for (std::size_t pr = 0; pr < g.grid_rows; ++pr) {
            for (std::size_t pc = 0; pc < g.grid_cols; ++pc, ++blocks) {
                for (std::size_t i = 0; i < 3; ++i) {
                    for (std::size_t j = 0; j < 3; ++j) {
                        const std::size_t r = pr * 3 + i;
                        const std::size_t c = pc * 3 + j;
                        const std::uint8_t want = (r < 28 && c < 28) ? set.image(0).at(r, c) : 0;
                        REQUIRE(g.pixel(pr, pc, i, j) == want);
                    }
                }
            }
        }
        CHECK(blocks == 100);
    }
    SUBCASE("2x2 image with n = 2 is a single patch") {
        const std::vector<std::uint8_t> px{10, 20, 30, 40};
        const PatchGrid g = patchify(ImageView{px, 2, 2}, 2);
        CHECK(g.patch_count() == 1);
        CHECK(g.padded == px);
    }
    CHECK_THROWS_AS(patchify(set.image(0), 0), ArgumentError);
}

TEST_CASE("serialize_dual_orientation emits A (column-wise) then B (row-wise)") {
    const std::vector<std::uint8_t> px{1, 2, 3, 4};  // [[a,b],[c,d]]
    const PixelSequence s = serialize_dual_orientation(patchify(ImageView{px, 2, 2}, 2));
    const std::vector<double> want{1 / 255.0, 3 / 255.0, 2 / 255.0, 4 / 255.0,
                                   1 / 255.0, 2 / 255.0, 3 / 255.0, 4 / 255.0};
    REQUIRE(s.values.size() == want.size());
    for (std::size_t k = 0; k < want.size(); ++k) {
        CHECK(s.values[k] == want[k]);
    }
}

TEST_CASE("serialized length and index oracle") {
    const ImageSet set = random_images(3, 28, 28, 11);
    for (std::size_t n : {1, 2, 3, 4, 5, 7}) {
        CAPTURE(n);
        const PixelSequence s = serialize_dual_orientation(patchify(set.image(0), n));
        CHECK(s.length() == sequence_length(28, 28, n));
        CHECK(s.values == expected_sequence(set.image(0), n));
    }
    CHECK(sequence_length(28, 28, 4) == 1568);
    CHECK(sequence_length(28, 28, 3) == 2 * 30 * 30);

    const std::vector<std::uint8_t> zeros(28 * 28, 0);
    const PixelSequence z = serialize_dual_orientation(patchify(ImageView{zeros, 28, 28}, 5));
    CHECK(z.length() == 2 * 30 * 30);
    CHECK(std::all_of(z.values.begin(), z.values.end(), [](double v) { return v == 0.0; }));
}

TEST_CASE("property: A and B segments hold the same multiset; A alone reconstructs the image") {
    std::mt19937_64 rng(99);
    for (int trial = 0; trial < 50; ++trial) {
        const std::size_t rows = 1 + rng() % 20;
        const std::size_t cols = 1 + rng() % 20;
        const std::size_t n = 1 + rng() % 6;
        const ImageSet set = random_images(1, rows, cols, rng());
        const PatchGrid g = patchify(set.image(0), n);
        const PixelSequence s = serialize_dual_orientation(g);
        REQUIRE(s.length() == 2 * g.padded.size());

        std::vector<std::uint8_t> rebuilt(g.padded.size());
        const std::size_t width = g.padded_cols();
        for (std::size_t p = 0; p < g.patch_count(); ++p) {
            const auto a_begin = s.values.begin() + static_cast<std::ptrdiff_t>(p * 2 * n * n);
            std::vector<double> a(a_begin, a_begin + static_cast<std::ptrdiff_t>(n * n));
            std::vector<double> b(a_begin + static_cast<std::ptrdiff_t>(n * n),
                                  a_begin + static_cast<std::ptrdiff_t>(2 * n * n));
            for (std::size_t idx = 0; idx < n * n; ++idx) {
                const std::size_t r = (p / g.grid_cols) * n + idx % n;
                const std::size_t c = (p % g.grid_cols) * n + idx / n;
                rebuilt[r * width + c] = static_cast<std::uint8_t>(std::lround(a[idx] * 255.0));
            }
            std::sort(a.begin(), a.end());
            std::sort(b.begin(), b.end());
            REQUIRE(a == b);
        }
        REQUIRE(rebuilt == g.padded);
        for (double v : s.values) {
            REQUIRE((v >= 0.0 && v <= 1.0));
        }
    }
}
