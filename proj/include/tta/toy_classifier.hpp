#pragma once

// Nearest-centroid classifier with a softmax over negative squared distances,
// plus a generator of synthetic shape images. Lets the whole pipeline run
// without an external ML framework.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <istream>
#include <limits>
#include <numbers>
#include <ostream>
#include <random>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "tta/error.hpp"
#include "tta/image.hpp"

namespace tta {

enum class ShapeKind { HBar, VBar, Diagonal, Disc };

inline ShapeKind parse_shape_kind(std::string_view s) {
    if (s == "h_bar") return ShapeKind::HBar;
    if (s == "v_bar") return ShapeKind::VBar;
    if (s == "diagonal") return ShapeKind::Diagonal;
    if (s == "disc") return ShapeKind::Disc;
    throw UsageError("unknown shape kind '" + std::string(s) + "'");
}

struct SyntheticSpec {
    std::size_t width = 16;
    std::size_t height = 16;
    std::vector<ShapeKind> classes;
    double noise_sigma = 0.0;
    std::size_t jitter_px = 0;
    std::size_t per_class_count = 1;
    std::uint64_t seed = 0;

    void validate() const {
        if (width == 0 || height == 0) throw UsageError("image size must be positive");
        if (classes.size() < 2) throw UsageError("need at least 2 classes");
        if (!(noise_sigma >= 0.0)) throw UsageError("noise_sigma must be >= 0");
        if (2 * jitter_px >= std::min(width, height)) throw UsageError("jitter_px must be < min(width, height) / 2");
        if (per_class_count == 0) throw UsageError("per_class_count must be positive");
    }
};

struct LabeledImage {
    std::string id;
    std::size_t label;
    RasterImage image;
};

namespace detail {

inline double shape_intensity(ShapeKind kind, double x, double y, double cx, double cy, double w, double h) {
    const double half = std::min(w, h) / 8.0;
    const double dx = x - cx, dy = y - cy;
    switch (kind) {
        case ShapeKind::HBar: return std::abs(dy) <= half ? 1.0 : 0.0;
        case ShapeKind::VBar: return std::abs(dx) <= half ? 1.0 : 0.0;
        case ShapeKind::Diagonal: return std::abs(dx - dy) / std::numbers::sqrt2 <= half ? 1.0 : 0.0;
        case ShapeKind::Disc: return std::hypot(dx, dy) <= std::min(w, h) / 4.0 ? 1.0 : 0.0;
    }
    return 0.0;
}

// Box-Muller on top of mt19937_64 so the stream is identical on every
// standard library (std::normal_distribution is implementation defined).
class GaussianSource {
public:
    explicit GaussianSource(std::uint64_t seed) : engine_(seed) {}

    double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

    double normal() {
        if (has_spare_) {
            has_spare_ = false;
            return spare_;
        }
        double u1 = 0.0;
        while (u1 == 0.0) u1 = uniform();
        const double u2 = uniform();
        const double r = std::sqrt(-2.0 * std::log(u1));
        spare_ = r * std::sin(2.0 * std::numbers::pi * u2);
        has_spare_ = true;
        return r * std::cos(2.0 * std::numbers::pi * u2);
    }

    long uniform_int(long lo, long hi) {
        const auto span = static_cast<std::uint64_t>(hi - lo + 1);
        return lo + static_cast<long>(static_cast<std::uint64_t>((static_cast<unsigned __int128>(engine_()) * span) >> 64));
    }

private:
    std::mt19937_64 engine_;
    bool has_spare_ = false;
    double spare_ = 0.0;
};

}  // namespace detail

/// Renders `per_class_count` images per class, interleaved by class, with ids
/// "img00000", "img00001", ... Fully determined by `spec`, seed included.
inline std::vector<LabeledImage> generate_dataset(const SyntheticSpec& spec) {
    spec.validate();
    detail::GaussianSource rng(spec.seed);
    const double w = static_cast<double>(spec.width), h = static_cast<double>(spec.height);
    const long jitter = static_cast<long>(spec.jitter_px);
    std::vector<LabeledImage> out;
    std::size_t serial = 0;
    for (std::size_t i = 0; i < spec.per_class_count; ++i) {
        for (std::size_t label = 0; label < spec.classes.size(); ++label) {
            const double cx = (w - 1.0) / 2.0 + static_cast<double>(rng.uniform_int(-jitter, jitter));
            const double cy = (h - 1.0) / 2.0 + static_cast<double>(rng.uniform_int(-jitter, jitter));
            ImageBuilder img(spec.width, spec.height, 1);
            for (std::size_t y = 0; y < spec.height; ++y)
                for (std::size_t x = 0; x < spec.width; ++x) {
                    double v = detail::shape_intensity(spec.classes[label], static_cast<double>(x),
                                                       static_cast<double>(y), cx, cy, w, h);
                    if (spec.noise_sigma > 0.0) v += spec.noise_sigma * rng.normal();
                    img.at(x, y) = v;
                }
            char id[32];
            std::snprintf(id, sizeof id, "img%05zu", serial++);
            out.push_back({id, label, std::move(img).finish()});
        }
    }
    return out;
}

class CentroidModel {
public:
    CentroidModel(std::vector<RasterImage> centroids, double beta)
        : centroids_(std::move(centroids)), beta_(beta) {
        if (centroids_.size() < 2) throw DataError("centroid model needs at least 2 classes");
        for (const auto& c : centroids_)
            if (!c.same_shape(centroids_.front())) throw DataError("centroid shapes differ");
        if (!(beta_ >= 0.0) || !std::isfinite(beta_)) throw DataError("beta must be finite and >= 0");
    }

    std::size_t num_classes() const noexcept { return centroids_.size(); }
    double beta() const noexcept { return beta_; }
    const std::vector<RasterImage>& centroids() const noexcept { return centroids_; }

    /// Softmax of -beta * mean squared distance to each centroid.
    std::vector<double> classify(const RasterImage& image) const {
        if (!image.same_shape(centroids_.front())) throw DataError("image shape does not match model");
        const auto px = image.pixels();
        std::vector<double> d(centroids_.size());
        for (std::size_t c = 0; c < centroids_.size(); ++c) {
            const auto cp = centroids_[c].pixels();
            double s = 0.0;
            for (std::size_t i = 0; i < px.size(); ++i) s += (px[i] - cp[i]) * (px[i] - cp[i]);
            d[c] = s / static_cast<double>(px.size());
        }
        const double dmin = *std::min_element(d.begin(), d.end());
        double z = 0.0;
        for (double& v : d) {
            v = std::exp(-beta_ * (v - dmin));
            z += v;
        }
        for (double& v : d) v /= z;
        return d;
    }

private:
    std::vector<RasterImage> centroids_;
    double beta_;
};

/// Pixel-wise class means of the labeled images.
inline CentroidModel train_centroids(const std::vector<LabeledImage>& data, std::size_t num_classes, double beta) {
    if (data.empty()) throw DataError("no training images");
    const auto& ref = data.front().image;
    std::vector<std::vector<double>> sums(num_classes, std::vector<double>(ref.pixels().size(), 0.0));
    std::vector<std::size_t> counts(num_classes, 0);
    for (const auto& item : data) {
        if (item.label >= num_classes) throw DataError("label out of range for '" + item.id + "'");
        if (!item.image.same_shape(ref)) throw DataError("training image shapes differ");
        const auto px = item.image.pixels();
        for (std::size_t i = 0; i < px.size(); ++i) sums[item.label][i] += px[i];
        ++counts[item.label];
    }
    std::vector<RasterImage> centroids;
    for (std::size_t c = 0; c < num_classes; ++c) {
        if (counts[c] == 0) throw DataError("class " + std::to_string(c) + " has no training images");
        for (double& v : sums[c]) v = std::clamp(v / static_cast<double>(counts[c]), 0.0, 1.0);
        centroids.emplace_back(ref.width(), ref.height(), ref.channels(), std::move(sums[c]));
    }
    return CentroidModel(std::move(centroids), beta);
}

// Model file:
//   tta-centroid-model
//   <C> <width> <height> <channels> <beta>
//   then for each centroid, <height> lines of width*channels decimals.

inline void write_model(std::ostream& os, const CentroidModel& m) {
    const auto& ref = m.centroids().front();
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", m.beta());
    os << "tta-centroid-model\n"
       << m.num_classes() << ' ' << ref.width() << ' ' << ref.height() << ' ' << ref.channels() << ' ' << buf << '\n';
    const std::size_t row = ref.width() * ref.channels();
    for (const auto& c : m.centroids()) {
        const auto px = c.pixels();
        for (std::size_t y = 0; y < ref.height(); ++y) {
            for (std::size_t i = 0; i < row; ++i) {
                std::snprintf(buf, sizeof buf, "%.17g", px[y * row + i]);
                os << (i ? " " : "") << buf;
            }
            os << '\n';
        }
    }
}

inline CentroidModel read_model(std::istream& is) {
    std::string magic;
    if (!std::getline(is, magic) || magic != "tta-centroid-model") throw DataError("model: bad magic line");
    std::size_t c = 0, w = 0, h = 0, ch = 0;
    double beta = 0.0;
    if (!(is >> c >> w >> h >> ch >> beta)) throw DataError("model: malformed header");
    if (c < 2 || w == 0 || h == 0 || (ch != 1 && ch != 3) || w * h * ch > 100'000'000)
        throw DataError("model: invalid header values");
    std::vector<RasterImage> centroids;
    for (std::size_t k = 0; k < c; ++k) {
        std::vector<double> px(w * h * ch);
        for (double& v : px)
            if (!(is >> v)) throw DataError("model: truncated centroid data");
        centroids.emplace_back(w, h, ch, std::move(px));
    }
    return CentroidModel(std::move(centroids), beta);
}

}  // namespace tta
