#pragma once

// Predictions and confidence scores from per-variant softmax vectors.
//
// For one image x the records hold s(x_0), ..., s(x_{n-1}), where x_0 is the
// untransformed image. The single-image prediction is argmax s(x_0); the
// augmented prediction is argmax of the summed softmax. Confidence is the
// predicted class's softmax averaged over all records.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <map>
#include <numeric>
#include <span>
#include <string>
#include <vector>

#include "tta/error.hpp"

namespace tta {

struct SoftmaxRecord {
    std::string image_id;
    std::size_t variant_id = 0;
    std::vector<double> probs;
};

/// Validates a probability vector. Sums within 1e-6 of one are kept as is,
/// sums within 1e-3 are renormalized, anything else is rejected.
inline SoftmaxRecord make_record(std::string image_id, std::size_t variant_id, std::vector<double> probs) {
    if (probs.size() < 2) throw DataError("softmax vector needs at least 2 classes");
    double sum = 0.0;
    for (double p : probs) {
        if (!std::isfinite(p) || p < 0.0) throw DataError("softmax entries must be finite and >= 0");
        sum += p;
    }
    const double dev = std::abs(sum - 1.0);
    if (dev > 1e-3) throw DataError("softmax vector for '" + image_id + "' sums to " + std::to_string(sum));
    if (dev > 1e-6)
        for (double& p : probs) p /= sum;
    return SoftmaxRecord{std::move(image_id), variant_id, std::move(probs)};
}

enum class PredictionMode { SingleImage, Augmented };

/// Top-1 or top-5 task. `k` must be below the number of classes.
struct TaskMode {
    std::size_t k = 1;

    static TaskMode checked(std::size_t k, std::size_t num_classes) {
        if (k != 1 && k != 5) throw UsageError("topk must be 1 or 5");
        if (k >= num_classes) throw UsageError("topk must be < C");
        return TaskMode{k};
    }
};

struct ConfidenceResult {
    std::string image_id;
    std::vector<std::size_t> predicted;
    double confidence = 0.0;
    double msr_baseline = 0.0;
};

namespace detail {

inline std::size_t num_classes(std::span<const SoftmaxRecord> records) {
    if (records.empty()) throw DataError("no softmax records");
    const std::size_t c = records.front().probs.size();
    for (const auto& r : records)
        if (r.probs.size() != c) throw DataError("inconsistent class count for '" + r.image_id + "'");
    return c;
}

inline const SoftmaxRecord& identity_record(std::span<const SoftmaxRecord> records) {
    for (const auto& r : records)
        if (r.variant_id == 0) return r;
    throw DataError("missing variant 0 for '" + (records.empty() ? std::string() : records.front().image_id) + "'");
}

// Indices of the k largest entries, descending; ties go to the lower index.
inline std::vector<std::size_t> top_k(std::span<const double> values, std::size_t k) {
    std::vector<std::size_t> idx(values.size());
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    k = std::min(k, idx.size());
    std::partial_sort(idx.begin(), idx.begin() + static_cast<std::ptrdiff_t>(k), idx.end(),
                      [&](std::size_t a, std::size_t b) {
                          return values[a] > values[b] || (values[a] == values[b] && a < b);
                      });
    idx.resize(k);
    return idx;
}

// Column sums in variant order so the result does not depend on record order.
inline std::vector<double> summed_probs(std::span<const SoftmaxRecord> records, std::size_t c) {
    std::vector<const SoftmaxRecord*> ordered;
    ordered.reserve(records.size());
    for (const auto& r : records) ordered.push_back(&r);
    std::stable_sort(ordered.begin(), ordered.end(),
                     [](const SoftmaxRecord* a, const SoftmaxRecord* b) { return a->variant_id < b->variant_id; });
    std::vector<double> sum(c, 0.0);
    for (const auto* r : ordered)
        for (std::size_t j = 0; j < c; ++j) sum[j] += r->probs[j];
    return sum;
}

}  // namespace detail

/// Returns the k predicted classes, most likely first.
inline std::vector<std::size_t> predict(std::span<const SoftmaxRecord> records, PredictionMode mode, TaskMode task) {
    const std::size_t c = detail::num_classes(records);
    const auto& x0 = detail::identity_record(records);
    if (mode == PredictionMode::SingleImage) return detail::top_k(x0.probs, task.k);
    return detail::top_k(detail::summed_probs(records, c), task.k);
}

/// Mean over all records of the softmax entry for `cls`.
inline double aggregate_confidence(std::span<const SoftmaxRecord> records, std::size_t cls) {
    const std::size_t c = detail::num_classes(records);
    if (cls >= c) throw DataError("class index out of range");
    return detail::summed_probs(records, c)[cls] / static_cast<double>(records.size());
}

/// Maximal softmax response of the identity variant; for k = 5 the sum of
/// the five largest entries.
inline double msr_baseline(const SoftmaxRecord& identity, TaskMode task) {
    const auto idx = detail::top_k(identity.probs, task.k);
    double s = 0.0;
    for (std::size_t i : idx) s += identity.probs[i];
    return s;
}

/// Sum over the predicted classes of their averaged softmax. Reduces to
/// aggregate_confidence for a single class.
inline double topk_confidence(std::span<const SoftmaxRecord> records, std::span<const std::size_t> predicted) {
    const std::size_t c = detail::num_classes(records);
    std::vector<bool> used(c, false);
    for (std::size_t p : predicted) {
        if (p >= c) throw DataError("class index out of range");
        if (used[p]) throw DataError("duplicate class in prediction");
        used[p] = true;
    }
    const auto sum = detail::summed_probs(records, c);
    const double n = static_cast<double>(records.size());
    double conf = 0.0;
    for (std::size_t p : predicted) conf += sum[p] / n;
    return std::min(conf, 1.0);
}

inline bool correctness(std::span<const std::size_t> predicted, std::size_t label) {
    return std::find(predicted.begin(), predicted.end(), label) != predicted.end();
}

/// Full scoring of one image: prediction in `mode`, confidence averaged over
/// every record for the predicted class(es), plus the MSR baseline.
inline ConfidenceResult score_image(std::span<const SoftmaxRecord> records, PredictionMode mode, TaskMode task) {
    ConfidenceResult r;
    r.image_id = detail::identity_record(records).image_id;
    r.predicted = predict(records, mode, task);
    r.confidence = topk_confidence(records, r.predicted);
    r.msr_baseline = msr_baseline(detail::identity_record(records), task);
    return r;
}

/// Groups records by image id (sorted) with each group sorted by variant.
/// Duplicate (image, variant) pairs are rejected.
inline std::map<std::string, std::vector<SoftmaxRecord>> group_by_image(std::vector<SoftmaxRecord> records) {
    std::map<std::string, std::vector<SoftmaxRecord>> groups;
    for (auto& r : records) groups[r.image_id].push_back(std::move(r));
    for (auto& [id, g] : groups) {
        std::sort(g.begin(), g.end(),
                  [](const SoftmaxRecord& a, const SoftmaxRecord& b) { return a.variant_id < b.variant_id; });
        for (std::size_t i = 1; i < g.size(); ++i)
            if (g[i].variant_id == g[i - 1].variant_id)
                throw DataError("duplicate variant " + std::to_string(g[i].variant_id) + " for '" + id + "'");
    }
    return groups;
}

}  // namespace tta
