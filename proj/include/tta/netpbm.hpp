#pragma once

// Binary Netpbm (P5 graymap / P6 pixmap) with maxval <= 255.

#include <cctype>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <iterator>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "tta/error.hpp"
#include "tta/image.hpp"

namespace tta {

namespace detail {

class PnmHeaderReader {
public:
    explicit PnmHeaderReader(std::span<const std::uint8_t> bytes) : bytes_(bytes) {}

    // Skips whitespace and '#' comments, then reads one decimal token.
    unsigned long next_number(const char* what) {
        skip_space_and_comments();
        const std::size_t start = pos_;
        unsigned long value = 0;
        while (pos_ < bytes_.size() && std::isdigit(bytes_[pos_])) {
            value = value * 10 + (bytes_[pos_] - '0');
            if (value > 1'000'000) throw DataError(std::string("netpbm: ") + what + " too large");
            ++pos_;
        }
        if (pos_ == start) throw DataError(std::string("netpbm: malformed header, expected ") + what);
        return value;
    }

    // Exactly one whitespace byte separates maxval from the raster.
    void end_of_header() {
        if (pos_ >= bytes_.size() || !std::isspace(bytes_[pos_]))
            throw DataError("netpbm: malformed header, expected whitespace after maxval");
        ++pos_;
    }

    std::size_t position() const noexcept { return pos_; }

private:
    void skip_space_and_comments() {
        while (pos_ < bytes_.size()) {
            if (std::isspace(bytes_[pos_])) {
                ++pos_;
            } else if (bytes_[pos_] == '#') {
                while (pos_ < bytes_.size() && bytes_[pos_] != '\n') ++pos_;
            } else {
                break;
            }
        }
    }

    std::span<const std::uint8_t> bytes_;
    std::size_t pos_ = 2;
};

}  // namespace detail

inline RasterImage load_netpbm(std::span<const std::uint8_t> bytes) {
    if (bytes.size() < 2 || bytes[0] != 'P') throw DataError("netpbm: bad magic number");
    std::size_t channels = 0;
    if (bytes[1] == '5') channels = 1;
    else if (bytes[1] == '6') channels = 3;
    else throw DataError("netpbm: unsupported format P" + std::string(1, static_cast<char>(bytes[1])));

    detail::PnmHeaderReader header(bytes);
    const auto width = header.next_number("width");
    const auto height = header.next_number("height");
    const auto maxval = header.next_number("maxval");
    if (width == 0 || height == 0) throw DataError("netpbm: zero image dimension");
    if (maxval == 0 || maxval > 255) throw DataError("netpbm: maxval must be in [1, 255]");
    header.end_of_header();

    const std::size_t count = width * height * channels;
    if (bytes.size() - header.position() < count) throw DataError("netpbm: truncated payload");
    std::vector<double> pixels(count);
    const auto payload = bytes.subspan(header.position(), count);
    for (std::size_t i = 0; i < count; ++i) {
        if (payload[i] > maxval) throw DataError("netpbm: sample exceeds maxval");
        pixels[i] = static_cast<double>(payload[i]) / static_cast<double>(maxval);
    }
    return RasterImage(width, height, channels, std::move(pixels));
}

/// Emits "P5\n<w> <h>\n255\n" (or P6) followed by the raster; samples are
/// round(v * 255).
inline std::vector<std::uint8_t> save_netpbm(const RasterImage& image) {
    const std::string header = std::string(image.channels() == 1 ? "P5" : "P6") + "\n" +
                               std::to_string(image.width()) + " " + std::to_string(image.height()) +
                               "\n255\n";
    std::vector<std::uint8_t> out(header.begin(), header.end());
    out.reserve(header.size() + image.pixels().size());
    for (double v : image.pixels()) {
        const double q = std::round(v * 255.0);
        out.push_back(static_cast<std::uint8_t>(std::clamp(q, 0.0, 255.0)));
    }
    return out;
}

inline RasterImage read_netpbm_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot open '" + path + "'");
    std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    try {
        return load_netpbm(bytes);
    } catch (const DataError& e) {
        throw DataError(path + ": " + e.what());
    }
}

inline void write_netpbm_file(const std::string& path, const RasterImage& image) {
    const auto bytes = save_netpbm(image);
    std::ofstream out(path, std::ios::binary);
    if (!out) throw DataError("cannot write '" + path + "'");
    out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
    if (!out) throw DataError("write failed for '" + path + "'");
}

}  // namespace tta
