#include "oss/dataset.hpp"

#include <zlib.h>

#include <cstdio>
#include <fstream>
#include <iterator>
#include <string>

#include "oss/errors.hpp"

namespace oss {
namespace {

std::uint32_t read_be32(std::span<const std::uint8_t> bytes, std::size_t offset) {
    if (bytes.size() < offset + 4) {
        throw LengthError("IDX header truncated at byte " + std::to_string(offset));
    }
    return (std::uint32_t{bytes[offset]} << 24) | (std::uint32_t{bytes[offset + 1]} << 16) |
           (std::uint32_t{bytes[offset + 2]} << 8) | std::uint32_t{bytes[offset + 3]};
}

void write_be32(std::vector<std::uint8_t>& out, std::uint32_t v) {
    out.push_back(static_cast<std::uint8_t>(v >> 24));
    out.push_back(static_cast<std::uint8_t>(v >> 16));
    out.push_back(static_cast<std::uint8_t>(v >> 8));
    out.push_back(static_cast<std::uint8_t>(v));
}

void expect_magic(std::uint32_t got, std::uint32_t want) {
    if (got != want) {
        char buf[64];
        std::snprintf(buf, sizeof buf, "bad IDX magic 0x%08x (expected 0x%08x)", got, want);
        throw FormatError(buf);
    }
}

std::vector<std::uint8_t> gunzip(const std::vector<std::uint8_t>& in) {
    z_stream zs{};
    // 16 + MAX_WBITS selects gzip decoding.
    if (inflateInit2(&zs, 16 + MAX_WBITS) != Z_OK) {
        throw FormatError("inflateInit2 failed");
    }
    zs.next_in = const_cast<Bytef*>(in.data());
    zs.avail_in = static_cast<uInt>(in.size());

    std::vector<std::uint8_t> out;
    std::uint8_t chunk[1 << 16];
    int rc = Z_OK;
    while (rc != Z_STREAM_END) {
        zs.next_out = chunk;
        zs.avail_out = sizeof chunk;
        rc = inflate(&zs, Z_NO_FLUSH);
        if (rc != Z_OK && rc != Z_STREAM_END) {
            inflateEnd(&zs);
            throw FormatError("corrupt gzip stream");
        }
        out.insert(out.end(), chunk, chunk + (sizeof chunk - zs.avail_out));
        if (rc == Z_OK && zs.avail_in == 0 && zs.avail_out != 0) {
            inflateEnd(&zs);
            throw LengthError("gzip stream truncated");
        }
    }
    inflateEnd(&zs);
    return out;
}

}  // namespace

ImageSet parse_idx_images(std::span<const std::uint8_t> bytes) {
    expect_magic(read_be32(bytes, 0), kIdxImageMagic);
    const std::size_t items = read_be32(bytes, 4);
    const std::size_t rows = read_be32(bytes, 8);
    const std::size_t cols = read_be32(bytes, 12);
    const std::size_t payload = items * rows * cols;
    if (bytes.size() < 16 + payload) {
        throw LengthError("IDX image payload has " + std::to_string(bytes.size() - 16) +
                          " bytes, header promises " + std::to_string(payload));
    }
    ImageSet set;
    set.rows = rows;
    set.cols = cols;
    set.pixels.assign(bytes.begin() + 16, bytes.begin() + 16 + static_cast<std::ptrdiff_t>(payload));
    return set;
}

LabelSet parse_idx_labels(std::span<const std::uint8_t> bytes) {
    expect_magic(read_be32(bytes, 0), kIdxLabelMagic);
    const std::size_t items = read_be32(bytes, 4);
    if (bytes.size() < 8 + items) {
        throw LengthError("IDX label payload has " + std::to_string(bytes.size() - 8) +
                          " bytes, header promises " + std::to_string(items));
    }
    LabelSet set;
    set.labels.assign(bytes.begin() + 8, bytes.begin() + 8 + static_cast<std::ptrdiff_t>(items));
    for (std::size_t i = 0; i < items; ++i) {
        if (set.labels[i] > 9) {
            throw RangeError("label " + std::to_string(set.labels[i]) + " at index " +
                             std::to_string(i) + " is not a digit class");
        }
    }
    return set;
}

std::vector<std::uint8_t> encode_idx_images(const ImageSet& images) {
    std::vector<std::uint8_t> out;
    out.reserve(16 + images.pixels.size());
    write_be32(out, kIdxImageMagic);
    write_be32(out, static_cast<std::uint32_t>(images.size()));
    write_be32(out, static_cast<std::uint32_t>(images.rows));
    write_be32(out, static_cast<std::uint32_t>(images.cols));
    out.insert(out.end(), images.pixels.begin(), images.pixels.end());
    return out;
}

std::vector<std::uint8_t> encode_idx_labels(const LabelSet& labels) {
    std::vector<std::uint8_t> out;
    out.reserve(8 + labels.size());
    write_be32(out, kIdxLabelMagic);
    write_be32(out, static_cast<std::uint32_t>(labels.size()));
    out.insert(out.end(), labels.labels.begin(), labels.labels.end());
    return out;
}

std::vector<std::uint8_t> read_maybe_gzip(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw Error("cannot open " + path.string());
    }
    std::vector<std::uint8_t> raw{std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
    if (raw.size() >= 2 && raw[0] == 0x1F && raw[1] == 0x8B) {
        return gunzip(raw);
    }
    return raw;
}

ImageSet load_idx_images(const std::filesystem::path& path) {
    return parse_idx_images(read_maybe_gzip(path));
}

LabelSet load_idx_labels(const std::filesystem::path& path) {
    return parse_idx_labels(read_maybe_gzip(path));
}

PatchGrid patchify(const ImageView& image, std::size_t n) {
    if (n == 0) {
        throw ArgumentError("patch edge must be >= 1");
    }
    PatchGrid grid;
    grid.n = n;
    grid.grid_rows = (image.rows + n - 1) / n;
    grid.grid_cols = (image.cols + n - 1) / n;
    grid.pad_rows = grid.grid_rows * n - image.rows;
    grid.pad_cols = grid.grid_cols * n - image.cols;

    const std::size_t width = grid.padded_cols();
    grid.padded.assign(grid.grid_rows * n * width, 0);
    for (std::size_t r = 0; r < image.rows; ++r) {
        for (std::size_t c = 0; c < image.cols; ++c) {
            grid.padded[r * width + c] = image.at(r, c);
        }
    }
    return grid;
}

PixelSequence serialize_dual_orientation(const PatchGrid& grid) {
    const std::size_t n = grid.n;
    PixelSequence seq;
    seq.n = n;
    seq.values.reserve(2 * grid.patch_count() * n * n);
    for (std::size_t pr = 0; pr < grid.grid_rows; ++pr) {
        for (std::size_t pc = 0; pc < grid.grid_cols; ++pc) {
            // A: column-wise
            for (std::size_t j = 0; j < n; ++j) {
                for (std::size_t i = 0; i < n; ++i) {
                    seq.values.push_back(grid.pixel(pr, pc, i, j) / 255.0);
                }
            }
            // B: row-wise
            for (std::size_t i = 0; i < n; ++i) {
                for (std::size_t j = 0; j < n; ++j) {
                    seq.values.push_back(grid.pixel(pr, pc, i, j) / 255.0);
                }
            }
        }
    }
    return seq;
}

std::size_t sequence_length(std::size_t rows, std::size_t cols, std::size_t n) {
    if (n == 0) {
        throw ArgumentError("patch edge must be >= 1");
    }
    return 2 * ((rows + n - 1) / n) * n * ((cols + n - 1) / n) * n;
}

}  // namespace oss
