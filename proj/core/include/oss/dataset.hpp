#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

namespace oss {

inline constexpr std::uint32_t kIdxImageMagic = 0x00000803;
inline constexpr std::uint32_t kIdxLabelMagic = 0x00000801;

/// Non-owning view of one grayscale image, row-major.
struct ImageView {
    std::span<const std::uint8_t> pixels;
    std::size_t rows = 0;
    std::size_t cols = 0;

    std::uint8_t at(std::size_t r, std::size_t c) const { return pixels[r * cols + c]; }
};

/// A set of equally sized grayscale images stored contiguously.
struct ImageSet {
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::vector<std::uint8_t> pixels;

    std::size_t size() const { return rows * cols == 0 ? 0 : pixels.size() / (rows * cols); }
    std::size_t image_size() const { return rows * cols; }
    ImageView image(std::size_t i) const {
        return {std::span(pixels).subspan(i * rows * cols, rows * cols), rows, cols};
    }
};

struct LabelSet {
    std::vector<std::uint8_t> labels;

    std::size_t size() const { return labels.size(); }
};

/// Parses an IDX3 image container (magic 0x00000803).
/// Throws FormatError on a wrong magic and LengthError on a short payload.
ImageSet parse_idx_images(std::span<const std::uint8_t> bytes);

/// Parses an IDX1 label container (magic 0x00000801); labels must be in [0, 9].
LabelSet parse_idx_labels(std::span<const std::uint8_t> bytes);

std::vector<std::uint8_t> encode_idx_images(const ImageSet& images);
std::vector<std::uint8_t> encode_idx_labels(const LabelSet& labels);

/// Reads a whole file, transparently inflating it when it starts with the
/// gzip signature 0x1F 0x8B.
std::vector<std::uint8_t> read_maybe_gzip(const std::filesystem::path& path);

ImageSet load_idx_images(const std::filesystem::path& path);
LabelSet load_idx_labels(const std::filesystem::path& path);

/// Zero-padded image cut into a row-major grid of n x n blocks.
struct PatchGrid {
    std::size_t n = 0;
    std::size_t grid_rows = 0;
    std::size_t grid_cols = 0;
    std::size_t pad_rows = 0;
    std::size_t pad_cols = 0;
    /// Padded image, (grid_rows * n) x (grid_cols * n), row-major.
    std::vector<std::uint8_t> padded;

    std::size_t patch_count() const { return grid_rows * grid_cols; }
    std::size_t padded_cols() const { return grid_cols * n; }

    /// Pixel (i, j) of the patch at grid position (pr, pc).
    std::uint8_t pixel(std::size_t pr, std::size_t pc, std::size_t i, std::size_t j) const {
        return padded[(pr * n + i) * padded_cols() + pc * n + j];
    }
};

/// Serialized pixel stream of one image, values in [0, 1].
struct PixelSequence {
    std::size_t n = 0;
    std::vector<double> values;

    std::size_t length() const { return values.size(); }
};

/// Pads bottom/right with zeros to the next multiple of n and cuts the image
/// into non-overlapping n x n patches. Throws ArgumentError for n == 0.
PatchGrid patchify(const ImageView& image, std::size_t n);

/// Visits patches row-major; each patch contributes its pixels column-wise
/// (orientation A) followed by the same pixels row-wise (orientation B).
PixelSequence serialize_dual_orientation(const PatchGrid& grid);

/// Length of the dual-orientation sequence for a rows x cols image.
std::size_t sequence_length(std::size_t rows, std::size_t cols, std::size_t n);

}  // namespace oss
