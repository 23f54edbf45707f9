#include "oss/flops.hpp"

#include <charconv>
#include <sstream>

#include "oss/errors.hpp"

namespace oss {
namespace {

template <class... Ts>
struct overloaded : Ts... {
    using Ts::operator()...;
};

std::vector<std::uint64_t> parse_args(std::string_view args, std::string_view token) {
    std::vector<std::uint64_t> out;
    while (!args.empty()) {
        const auto comma = args.find(',');
        const std::string_view piece = args.substr(0, comma);
        std::uint64_t v = 0;
        const auto [ptr, ec] = std::from_chars(piece.data(), piece.data() + piece.size(), v);
        if (ec != std::errc{} || ptr != piece.data() + piece.size() || piece.empty()) {
            throw ArgumentError("bad layer argument in '" + std::string(token) + "'");
        }
        out.push_back(v);
        if (comma == std::string_view::npos) {
            break;
        }
        args.remove_prefix(comma + 1);
    }
    return out;
}

}  // namespace

std::uint64_t count_flops(const Layer& layer) {
    return std::visit(
        overloaded{
            [](const ConvLayer& l) {
                return 2 * l.kernel * l.kernel * l.in_channels * l.out_channels * l.out_h * l.out_w;
            },
            [](const PoolLayer& l) { return l.window * l.window * l.channels * l.out_h * l.out_w; },
            [](const DenseLayer& l) { return 2 * l.in_features * l.out_features; },
            [](const ActivationLayer& l) { return l.elements; },
        },
        layer);
}

std::uint64_t count_flops(const Architecture& arch) {
    std::uint64_t total = 0;
    for (const Layer& l : arch) {
        total += count_flops(l);
    }
    return total;
}

Architecture parse_architecture(std::string_view text) {
    Architecture arch;
    std::size_t pos = 0;
    while (pos < text.size()) {
        const auto start = text.find_first_not_of(" \t\n;", pos);
        if (start == std::string_view::npos) {
            break;
        }
        const auto end = text.find_first_of(" \t\n;", start);
        const std::string_view token = text.substr(start, end - start);
        pos = end == std::string_view::npos ? text.size() : end;

        const auto colon = token.find(':');
        const std::string_view kind = token.substr(0, colon);
        const auto args = colon == std::string_view::npos ? std::vector<std::uint64_t>{}
                                                          : parse_args(token.substr(colon + 1), token);
        auto need = [&](std::size_t n) {
            if (args.size() != n) {
                throw ArgumentError("layer '" + std::string(token) + "' expects " +
                                    std::to_string(n) + " arguments");
            }
        };
        if (kind == "conv") {
            need(5);
            arch.emplace_back(ConvLayer{args[0], args[1], args[2], args[3], args[4]});
        } else if (kind == "pool") {
            need(4);
            arch.emplace_back(PoolLayer{args[0], args[1], args[2], args[3]});
        } else if (kind == "fc") {
            need(2);
            arch.emplace_back(DenseLayer{args[0], args[1]});
        } else if (kind == "act") {
            need(1);
            arch.emplace_back(ActivationLayer{args[0]});
        } else {
            throw ArgumentError("unknown layer kind '" + std::string(kind) + "'");
        }
    }
    return arch;
}

std::string describe(const Architecture& arch) {
    std::ostringstream os;
    bool first = true;
    for (const Layer& layer : arch) {
        if (!first) {
            os << ' ';
        }
        first = false;
        std::visit(overloaded{
                       [&](const ConvLayer& l) {
                           os << "conv:" << l.in_channels << ',' << l.out_channels << ',' << l.kernel
                              << ',' << l.out_h << ',' << l.out_w;
                       },
                       [&](const PoolLayer& l) {
                           os << "pool:" << l.channels << ',' << l.out_h << ',' << l.out_w << ','
                              << l.window;
                       },
                       [&](const DenseLayer& l) { os << "fc:" << l.in_features << ',' << l.out_features; },
                       [&](const ActivationLayer& l) { os << "act:" << l.elements; },
                   },
                   layer);
    }
    return os.str();
}

Architecture lenet5_single_head() {
    return {
        ConvLayer{1, 6, 5, 28, 28},   ActivationLayer{6 * 28 * 28}, PoolLayer{6, 14, 14, 2},
        ConvLayer{6, 16, 5, 10, 10},  ActivationLayer{16 * 10 * 10}, PoolLayer{16, 5, 5, 2},
        ConvLayer{16, 120, 5, 1, 1},  ActivationLayer{120},          DenseLayer{120, 10},
    };
}

Architecture oss_head(std::uint64_t feature_dim) {
    return {DenseLayer{feature_dim, 10}};
}

}  // namespace oss
