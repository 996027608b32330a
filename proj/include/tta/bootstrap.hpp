#pragma once

// Bootstrap resampling of an image's augmented set and the sliding-window
// plurality ranking that turns per-image score lists into one ordering.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "tta/confidence.hpp"
#include "tta/error.hpp"
#include "tta/random.hpp"

namespace tta {

struct BootstrapConfig {
    std::optional<std::size_t> n_bs;  // nullopt = derive from the set size
    std::optional<std::size_t> w_bs;  // nullopt = n_bs
    std::uint64_t seed = 0;
};

struct BootstrapScores {
    std::string image_id;
    std::vector<double> scores;
};

/// Ranked image ids; position 0 is the most confident.
struct RankedList {
    std::vector<std::string> entries;
};

/// Number of distinct multisets of size t drawn from t items,
/// (2t-1)! / (t! (t-1)!), evaluated in log space.
inline double resampling_options(std::size_t t_size) {
    const double t = static_cast<double>(t_size);
    return std::exp(std::lgamma(2.0 * t) - std::lgamma(t + 1.0) - std::lgamma(t));
}

/// Default resample count for a transformation set of size `t_size`:
/// floor(min(1000, max(100, 0.001 * options))).
inline std::size_t default_n_bs(std::size_t t_size) {
    if (t_size == 0) throw UsageError("transformation set size must be >= 1");
    const double g = resampling_options(t_size);
    return static_cast<std::size_t>(std::floor(std::min(1000.0, std::max(100.0, 0.001 * g))));
}

struct ResolvedBootstrap {
    std::size_t n_bs;
    std::size_t w_bs;
};

/// `variant_count` is |D_chi| (identity included), used as the set size for
/// the default resample count.
inline ResolvedBootstrap resolve(const BootstrapConfig& cfg, std::size_t variant_count) {
    const std::size_t n = cfg.n_bs ? *cfg.n_bs : default_n_bs(variant_count);
    if (n < 1 || n > 1'000'000) throw UsageError("n_bs must be in [1, 1000000]");
    const std::size_t w = cfg.w_bs ? *cfg.w_bs : n;
    if (w < 1) throw UsageError("w_bs must be >= 1");
    return {n, w};
}

/// Draws `n_bs` resamples of the records (with replacement, same size) and
/// scores each with the averaged softmax of the fixed predicted classes.
/// Draw j of resample b comes from counter (b, j) of the stream keyed by
/// (seed, image id).
inline BootstrapScores bootstrap_scores(std::span<const SoftmaxRecord> records,
                                        std::span<const std::size_t> predicted, std::size_t n_bs,
                                        std::uint64_t seed) {
    if (records.empty()) throw DataError("bootstrap needs at least one record");
    const std::size_t c = detail::num_classes(records);
    for (std::size_t p : predicted)
        if (p >= c) throw DataError("class index out of range");

    // Per-variant score of the predicted classes, in variant order.
    std::vector<const SoftmaxRecord*> ordered;
    for (const auto& r : records) ordered.push_back(&r);
    std::stable_sort(ordered.begin(), ordered.end(),
                     [](const SoftmaxRecord* a, const SoftmaxRecord* b) { return a->variant_id < b->variant_id; });
    std::vector<double> per_variant;
    for (const auto* r : ordered) {
        double s = 0.0;
        for (std::size_t p : predicted) s += r->probs[p];
        per_variant.push_back(s);
    }

    const std::size_t n = per_variant.size();
    const KeyedStream stream(seed, records.front().image_id);
    BootstrapScores out{records.front().image_id, {}};
    out.scores.reserve(n_bs);
    for (std::size_t b = 0; b < n_bs; ++b) {
        double sum = 0.0;
        for (std::size_t j = 0; j < n; ++j)
            sum += per_variant[stream.index(static_cast<std::uint32_t>(b), static_cast<std::uint32_t>(j), n)];
        out.scores.push_back(std::clamp(sum / static_cast<double>(n), 0.0, 1.0));
    }
    return out;
}

inline BootstrapScores bootstrap_scores(std::span<const SoftmaxRecord> records, std::size_t cls,
                                        std::size_t n_bs, std::uint64_t seed) {
    return bootstrap_scores(records, std::span<const std::size_t>(&cls, 1), n_bs, seed);
}

struct Interval {
    double lo;
    double hi;
};

/// Percentile interval at `level` with linear interpolation between order
/// statistics (position p * (n - 1) in the sorted sample).
inline Interval confidence_interval(std::span<const double> scores, double level) {
    if (!(level > 0.0 && level < 1.0)) throw UsageError("level must be in (0, 1)");
    if (scores.size() < 2) throw DataError("confidence interval needs at least 2 scores");
    std::vector<double> s(scores.begin(), scores.end());
    std::sort(s.begin(), s.end());
    auto quantile = [&](double p) {
        const double pos = p * static_cast<double>(s.size() - 1);
        const auto lo = static_cast<std::size_t>(std::floor(pos));
        const std::size_t hi = std::min(lo + 1, s.size() - 1);
        return s[lo] + (pos - static_cast<double>(lo)) * (s[hi] - s[lo]);
    };
    const double tail = (1.0 - level) / 2.0;
    return {quantile(tail), quantile(1.0 - tail)};
}

/// Sliding-window plurality ranking.
///
/// All N * n_bs (score, image) pairs are sorted by descending score (ties:
/// smaller image id, then smaller resample index). Repeatedly, the first
/// `w_bs` surviving entries are inspected, the image occurring most often
/// there receives the next rank, and every entry of that image is removed.
/// Count ties go to the image whose first occurrence in the window is
/// earliest. A window longer than the remainder covers the whole remainder.
inline RankedList plurality_rank(std::span<const BootstrapScores> all, std::size_t w_bs) {
    if (all.empty()) return {};
    if (w_bs == 0) throw UsageError("w_bs must be >= 1");
    const std::size_t n_bs = all.front().scores.size();
    for (const auto& s : all)
        if (s.scores.size() != n_bs) throw DataError("mismatched n_bs for '" + s.image_id + "'");
    if (n_bs == 0) throw DataError("empty bootstrap score list");

    // Image indices follow lexicographic id order so index comparison doubles
    // as the id tie-break.
    std::vector<std::size_t> by_id(all.size());
    for (std::size_t i = 0; i < all.size(); ++i) by_id[i] = i;
    std::sort(by_id.begin(), by_id.end(), [&](std::size_t a, std::size_t b) { return all[a].image_id < all[b].image_id; });
    for (std::size_t i = 1; i < by_id.size(); ++i)
        if (all[by_id[i]].image_id == all[by_id[i - 1]].image_id)
            throw DataError("duplicate image id '" + all[by_id[i]].image_id + "'");

    struct Entry {
        double score;
        std::uint32_t image;
        std::uint32_t b;
    };
    std::vector<Entry> list;
    list.reserve(all.size() * n_bs);
    for (std::size_t rank = 0; rank < by_id.size(); ++rank)
        for (std::size_t b = 0; b < n_bs; ++b)
            list.push_back({all[by_id[rank]].scores[b], static_cast<std::uint32_t>(rank), static_cast<std::uint32_t>(b)});
    std::sort(list.begin(), list.end(), [](const Entry& a, const Entry& b) {
        if (a.score != b.score) return a.score > b.score;
        if (a.image != b.image) return a.image < b.image;
        return a.b < b.b;
    });

    // Doubly linked list over sorted positions; removal keeps survivor order.
    const std::size_t m = list.size();
    const std::size_t nil = m;
    std::vector<std::size_t> next(m), prev(m);
    std::vector<std::vector<std::size_t>> positions(all.size());
    for (std::size_t i = 0; i < m; ++i) {
        next[i] = i + 1;
        prev[i] = i == 0 ? nil : i - 1;
        positions[list[i].image].push_back(i);
    }
    std::size_t head = m == 0 ? nil : 0;

    std::vector<std::size_t> count(all.size(), 0);
    std::vector<std::size_t> touched;
    RankedList out;
    out.entries.reserve(all.size());
    while (head != nil) {
        touched.clear();
        std::size_t best = 0, best_count = 0;
        std::size_t seen = 0;
        for (std::size_t p = head; p != nil && seen < w_bs; p = next[p], ++seen) {
            const std::size_t img = list[p].image;
            if (count[img]++ == 0) touched.push_back(img);
        }
        // `touched` is in first-occurrence order, so strict > keeps the earliest on ties.
        for (std::size_t img : touched) {
            if (count[img] > best_count) {
                best = img;
                best_count = count[img];
            }
        }
        for (std::size_t img : touched) count[img] = 0;

        out.entries.push_back(all[by_id[best]].image_id);
        for (std::size_t p : positions[best]) {
            if (prev[p] != nil) next[prev[p]] = next[p];
            else head = next[p];
            if (next[p] != nil) prev[next[p]] = prev[p];
        }
    }
    return out;
}

/// Plain ordering by descending score, ties by smaller image id.
inline RankedList rank_from_scores(const std::map<std::string, double>& scores) {
    std::vector<std::pair<std::string, double>> v(scores.begin(), scores.end());
    std::stable_sort(v.begin(), v.end(), [](const auto& a, const auto& b) { return a.second > b.second; });
    RankedList out;
    for (auto& [id, s] : v) out.entries.push_back(id);
    return out;
}

}  // namespace tta
