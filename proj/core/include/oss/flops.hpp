#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace oss {

// Counting convention: one MAC = 2 FLOPs (multiply + add) for convolution and
// dense layers; pooling costs window^2 FLOPs per output element; an
// elementwise activation costs 1 FLOP per element.

struct ConvLayer {
    std::uint64_t in_channels, out_channels, kernel, out_h, out_w;
};
struct PoolLayer {
    std::uint64_t channels, out_h, out_w, window;
};
struct DenseLayer {
    std::uint64_t in_features, out_features;
};
struct ActivationLayer {
    std::uint64_t elements;
};

using Layer = std::variant<ConvLayer, PoolLayer, DenseLayer, ActivationLayer>;
using Architecture = std::vector<Layer>;

std::uint64_t count_flops(const Layer& layer);
std::uint64_t count_flops(const Architecture& arch);

/// Parses a whitespace/semicolon separated list of `kind:a,b,...` tokens:
///   conv:in,out,k,oh,ow  pool:ch,oh,ow,window  fc:in,out  act:elements
/// Throws ArgumentError on an unknown kind or a malformed token.
Architecture parse_architecture(std::string_view text);

std::string describe(const Architecture& arch);

/// LeNet-5 feature extractor (28x28 input padded to 32x32) with one dense head 120 -> 10.
Architecture lenet5_single_head();

/// The digital stage behind the optical accelerator: a single dense layer dim -> 10.
Architecture oss_head(std::uint64_t feature_dim);

inline constexpr std::uint64_t kReportedLenet5Flops = 736'000;
inline constexpr std::uint64_t kReportedOssFlops = 14'600;
inline constexpr const char* kFlopsConvention =
    "2 FLOPs per MAC (conv, fc); window^2 per pooled output; 1 per activation element";

}  // namespace oss
