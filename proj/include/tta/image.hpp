#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numbers>
#include <span>
#include <string>
#include <type_traits>
#include <utility>
#include <variant>
#include <vector>

#include "tta/error.hpp"
#include "tta/transform_dsl.hpp"

namespace tta {

/// Row-major floating point raster with 1 or 3 interleaved channels and
/// values in [0, 1].
class RasterImage {
public:
    RasterImage() = default;

    RasterImage(std::size_t width, std::size_t height, std::size_t channels, double fill = 0.0)
        : RasterImage(width, height, channels, std::vector<double>(width * height * channels, fill)) {}

    RasterImage(std::size_t width, std::size_t height, std::size_t channels, std::vector<double> pixels)
        : width_(width), height_(height), channels_(channels), pixels_(std::move(pixels)) {
        if (width == 0 || height == 0) throw DataError("image dimensions must be positive");
        if (channels != 1 && channels != 3) throw DataError("image must have 1 or 3 channels");
        if (pixels_.size() != width * height * channels) throw DataError("pixel count does not match dimensions");
        for (double v : pixels_)
            if (!(v >= 0.0 && v <= 1.0)) throw DataError("pixel value outside [0, 1]");
    }

    std::size_t width() const noexcept { return width_; }
    std::size_t height() const noexcept { return height_; }
    std::size_t channels() const noexcept { return channels_; }
    bool empty() const noexcept { return pixels_.empty(); }

    std::span<const double> pixels() const noexcept { return pixels_; }

    double at(std::size_t x, std::size_t y, std::size_t c = 0) const noexcept {
        return pixels_[(y * width_ + x) * channels_ + c];
    }

    bool same_shape(const RasterImage& o) const noexcept {
        return width_ == o.width_ && height_ == o.height_ && channels_ == o.channels_;
    }

    bool operator==(const RasterImage&) const = default;

private:
    friend class ImageBuilder;

    std::size_t width_ = 0;
    std::size_t height_ = 0;
    std::size_t channels_ = 0;
    std::vector<double> pixels_;
};

/// Mutable pixel buffer used while producing a RasterImage. Values are
/// clamped to [0, 1] on `finish()`.
class ImageBuilder {
public:
    ImageBuilder(std::size_t width, std::size_t height, std::size_t channels)
        : img_() {
        img_.width_ = width;
        img_.height_ = height;
        img_.channels_ = channels;
        img_.pixels_.assign(width * height * channels, 0.0);
    }

    double& at(std::size_t x, std::size_t y, std::size_t c = 0) noexcept {
        return img_.pixels_[(y * img_.width_ + x) * img_.channels_ + c];
    }

    RasterImage finish() && {
        for (double& v : img_.pixels_) v = std::clamp(v, 0.0, 1.0);
        return std::move(img_);
    }

private:
    RasterImage img_;
};

namespace detail {

inline double sample_clamped(const RasterImage& img, long x, long y, std::size_t c) noexcept {
    const long w = static_cast<long>(img.width());
    const long h = static_cast<long>(img.height());
    return img.at(static_cast<std::size_t>(std::clamp(x, 0L, w - 1)),
                  static_cast<std::size_t>(std::clamp(y, 0L, h - 1)), c);
}

// Bilinear sample at continuous pixel-center coordinates, edge replicated.
inline double sample_bilinear(const RasterImage& img, double x, double y, std::size_t c) noexcept {
    const double fx = std::floor(x);
    const double fy = std::floor(y);
    const double ax = x - fx;
    const double ay = y - fy;
    const long x0 = static_cast<long>(fx);
    const long y0 = static_cast<long>(fy);
    const double v00 = sample_clamped(img, x0, y0, c);
    const double v10 = sample_clamped(img, x0 + 1, y0, c);
    const double v01 = sample_clamped(img, x0, y0 + 1, c);
    const double v11 = sample_clamped(img, x0 + 1, y0 + 1, c);
    const double top = v00 + ax * (v10 - v00);
    const double bottom = v01 + ax * (v11 - v01);
    return top + ay * (bottom - top);
}

inline RasterImage flip(const RasterImage& img, bool horizontal) {
    const std::size_t w = img.width(), h = img.height(), ch = img.channels();
    ImageBuilder out(w, h, ch);
    for (std::size_t y = 0; y < h; ++y)
        for (std::size_t x = 0; x < w; ++x)
            for (std::size_t c = 0; c < ch; ++c)
                out.at(x, y, c) = horizontal ? img.at(w - 1 - x, y, c) : img.at(x, h - 1 - y, c);
    return std::move(out).finish();
}

inline RasterImage channel_reverse(const RasterImage& img) {
    if (img.channels() != 3) throw DataError("bgr requires 3 channels");
    ImageBuilder out(img.width(), img.height(), 3);
    for (std::size_t y = 0; y < img.height(); ++y)
        for (std::size_t x = 0; x < img.width(); ++x)
            for (std::size_t c = 0; c < 3; ++c) out.at(x, y, c) = img.at(x, y, 2 - c);
    return std::move(out).finish();
}

inline RasterImage shift(const RasterImage& img, Shift s) {
    const long w = static_cast<long>(img.width()), h = static_cast<long>(img.height());
    if (std::abs(static_cast<long>(s.dx)) >= w || std::abs(static_cast<long>(s.dy)) >= h)
        throw DataError("shift moves the whole image out of frame");
    ImageBuilder out(img.width(), img.height(), img.channels());
    // Row 0 is the top row, so moving content up reads from a lower row.
    for (long y = 0; y < h; ++y)
        for (long x = 0; x < w; ++x)
            for (std::size_t c = 0; c < img.channels(); ++c)
                out.at(static_cast<std::size_t>(x), static_cast<std::size_t>(y), c) =
                    sample_clamped(img, x - s.dx, y + s.dy, c);
    return std::move(out).finish();
}

inline RasterImage rotate(const RasterImage& img, double degrees) {
    const double theta = degrees * std::numbers::pi / 180.0;
    const double cs = std::cos(theta), sn = std::sin(theta);
    const double cx = (static_cast<double>(img.width()) - 1.0) / 2.0;
    const double cy = (static_cast<double>(img.height()) - 1.0) / 2.0;
    ImageBuilder out(img.width(), img.height(), img.channels());
    // Inverse mapping; with y pointing down, positive theta turns content clockwise.
    for (std::size_t y = 0; y < img.height(); ++y) {
        const double ry = static_cast<double>(y) - cy;
        for (std::size_t x = 0; x < img.width(); ++x) {
            const double rx = static_cast<double>(x) - cx;
            const double sx = cx + cs * rx + sn * ry;
            const double sy = cy - sn * rx + cs * ry;
            for (std::size_t c = 0; c < img.channels(); ++c) out.at(x, y, c) = sample_bilinear(img, sx, sy, c);
        }
    }
    return std::move(out).finish();
}

// Factor 1.0 is accepted here (identity) even though the grammar rejects it.
inline RasterImage zoom(const RasterImage& img, double factor) {
    if (!(factor >= 1.0) || !std::isfinite(factor)) throw DataError("zoom factor must be >= 1");
    const std::size_t w = img.width(), h = img.height();
    const auto big_w = static_cast<std::size_t>(std::ceil(factor * static_cast<double>(w)));
    const auto big_h = static_cast<std::size_t>(std::ceil(factor * static_cast<double>(h)));
    const std::size_t off_x = (big_w - w) / 2;
    const std::size_t off_y = (big_h - h) / 2;
    const double scale_x = static_cast<double>(w) / static_cast<double>(big_w);
    const double scale_y = static_cast<double>(h) / static_cast<double>(big_h);
    ImageBuilder out(w, h, img.channels());
    for (std::size_t y = 0; y < h; ++y) {
        const double sy = (static_cast<double>(y + off_y) + 0.5) * scale_y - 0.5;
        for (std::size_t x = 0; x < w; ++x) {
            const double sx = (static_cast<double>(x + off_x) + 0.5) * scale_x - 0.5;
            for (std::size_t c = 0; c < img.channels(); ++c) out.at(x, y, c) = sample_bilinear(img, sx, sy, c);
        }
    }
    return std::move(out).finish();
}

inline RasterImage gamma(const RasterImage& img, double g) {
    if (!(g > 0.0)) throw DataError("gamma must be > 0");
    ImageBuilder out(img.width(), img.height(), img.channels());
    const auto src = img.pixels();
    for (std::size_t y = 0, i = 0; y < img.height(); ++y)
        for (std::size_t x = 0; x < img.width(); ++x)
            for (std::size_t c = 0; c < img.channels(); ++c, ++i) out.at(x, y, c) = std::pow(src[i], g);
    return std::move(out).finish();
}

}  // namespace detail

/// Applies one primitive. Output always has the input's shape; geometric
/// operations replicate edge pixels for samples that fall outside the frame.
inline RasterImage apply_primitive(const RasterImage& image, const PrimitiveTransform& t) {
    return std::visit(
        [&](const auto& p) -> RasterImage {
            using P = std::decay_t<decltype(p)>;
            if constexpr (std::is_same_v<P, HFlip>) return detail::flip(image, true);
            else if constexpr (std::is_same_v<P, VFlip>) return detail::flip(image, false);
            else if constexpr (std::is_same_v<P, ChannelReverse>) return detail::channel_reverse(image);
            else if constexpr (std::is_same_v<P, Shift>) return detail::shift(image, p);
            else if constexpr (std::is_same_v<P, Rotate>) return detail::rotate(image, p.degrees);
            else if constexpr (std::is_same_v<P, Zoom>) return detail::zoom(image, p.factor);
            else if constexpr (std::is_same_v<P, Gamma>) return detail::gamma(image, p.gamma);
            else return image;
        },
        t);
}

/// Error raised while applying a chain; records which primitive failed.
class TransformError : public DataError {
public:
    TransformError(const std::string& message, std::size_t index)
        : DataError(message), index_(index) {}
    std::size_t index() const noexcept { return index_; }

private:
    std::size_t index_;
};

inline RasterImage apply_chain(const RasterImage& image, const TransformChain& chain) {
    RasterImage current = image;
    for (std::size_t i = 0; i < chain.primitives.size(); ++i) {
        try {
            current = apply_primitive(current, chain.primitives[i]);
        } catch (const DataError& e) {
            throw TransformError("primitive " + std::to_string(i) + " (" +
                                     format_primitive(chain.primitives[i]) + "): " + e.what(),
                                 i);
        }
    }
    return current;
}

/// Materializes the augmented image set: element 0 is the input, element
/// i >= 1 is the result of chain i - 1. On failure the thrown
/// TransformError's index is the chain index.
inline std::vector<RasterImage> generate_variants(const RasterImage& image, const TransformSet& set) {
    std::vector<RasterImage> out;
    out.reserve(set.variant_count());
    out.push_back(image);
    for (std::size_t i = 0; i < set.chains.size(); ++i) {
        try {
            out.push_back(apply_chain(image, set.chains[i]));
        } catch (const DataError& e) {
            throw TransformError("chain " + std::to_string(i) + " '" + format_chain(set.chains[i]) +
                                     "': " + e.what(),
                                 i);
        }
    }
    return out;
}

}  // namespace tta
