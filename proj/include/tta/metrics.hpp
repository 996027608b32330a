#pragma once

// Selective-classification metrics over a confidence ranking.
//
// Everything here consumes predictions already ordered by decreasing
// confidence. Accepting the top k of N gives coverage k/N and risk equal to
// the error rate among those k.

#include <algorithm>
#include <cstdint>
#include <numeric>
#include <span>
#include <string>
#include <unordered_set>
#include <vector>

#include "tta/error.hpp"

namespace tta {

/// Correctness flags in ranking order (position 0 most confident).
class CorrectnessVector {
public:
    struct Entry {
        std::string image_id;
        bool correct;
    };

    explicit CorrectnessVector(std::vector<Entry> entries) : entries_(std::move(entries)) {
        if (entries_.empty()) throw DataError("correctness vector must be nonempty");
        std::unordered_set<std::string> ids;
        for (const auto& e : entries_) {
            if (!ids.insert(e.image_id).second) throw DataError("duplicate image id '" + e.image_id + "'");
            flags_.push_back(e.correct);
        }
    }

    /// Synthesizes ids "0", "1", ... for a bare flag sequence.
    static CorrectnessVector from_flags(const std::vector<bool>& flags) {
        std::vector<Entry> e;
        for (std::size_t i = 0; i < flags.size(); ++i) e.push_back({std::to_string(i), flags[i]});
        return CorrectnessVector(std::move(e));
    }

    std::vector<bool> flags() const { return {flags_.begin(), flags_.end()}; }

    const std::vector<Entry>& entries() const noexcept { return entries_; }
    std::size_t size() const noexcept { return entries_.size(); }
    bool correct(std::size_t i) const noexcept { return flags_[i] != 0; }
    std::size_t errors() const noexcept {
        return static_cast<std::size_t>(std::count(flags_.begin(), flags_.end(), std::uint8_t{0}));
    }

    /// Same ids, correct entries first (best possible ranking).
    CorrectnessVector oracle() const { return reordered(true); }
    /// Same ids, errors first (worst possible ranking).
    CorrectnessVector worst() const { return reordered(false); }

private:
    CorrectnessVector reordered(bool correct_first) const {
        auto e = entries_;
        std::stable_partition(e.begin(), e.end(), [&](const Entry& x) { return x.correct == correct_first; });
        return CorrectnessVector(std::move(e));
    }

    std::vector<Entry> entries_;
    std::vector<std::uint8_t> flags_;
};

struct RCPoint {
    double coverage;
    double risk;
};

using RCCurve = std::vector<RCPoint>;

inline double accuracy(const CorrectnessVector& v) {
    return 1.0 - static_cast<double>(v.errors()) / static_cast<double>(v.size());
}

/// Point k-1 sits at coverage k/N with risk = errors among the top k / k.
inline RCCurve rc_curve(const CorrectnessVector& v) {
    RCCurve curve;
    curve.reserve(v.size());
    const double n = static_cast<double>(v.size());
    std::size_t errors = 0;
    for (std::size_t k = 1; k <= v.size(); ++k) {
        if (!v.correct(k - 1)) ++errors;
        curve.push_back({static_cast<double>(k) / n, static_cast<double>(errors) / static_cast<double>(k)});
    }
    return curve;
}

/// Mean risk over the N coverage points.
inline double aurc(const RCCurve& curve) {
    if (curve.empty()) throw DataError("empty risk-coverage curve");
    double s = 0.0;
    for (const auto& p : curve) s += p.risk;
    return s / static_cast<double>(curve.size());
}

inline double aurc(const CorrectnessVector& v) { return aurc(rc_curve(v)); }

/// Excess AURC over the oracle ranking of the same outcomes.
inline double eaurc(const CorrectnessVector& v) { return aurc(v) - aurc(v.oracle()); }

inline bool is_degenerate(const CorrectnessVector& v) {
    return v.errors() == 0 || v.errors() == v.size();
}

/// Area over the RC curve, normalized so the worst ranking scores 0 and the
/// oracle ranking scores 1. Undefined when all outcomes are equal.
inline double aorc(const CorrectnessVector& v) {
    if (is_degenerate(v)) throw DegenerateMetricError("AORC undefined: degenerate correctness");
    const double worst = aurc(v.worst());
    const double best = aurc(v.oracle());
    return std::clamp((worst - aurc(v)) / (worst - best), 0.0, 1.0);
}

/// Probability that a correct prediction outscores an error, ties counted
/// half, via the Mann-Whitney rank sum. Doubled mid-ranks keep the
/// arithmetic in integers.
inline double auroc(std::span<const double> scores, const std::vector<bool>& correct) {
    if (scores.size() != correct.size()) throw DataError("scores and correctness differ in length");
    const std::size_t n = scores.size();
    std::size_t n_pos = 0;
    for (bool c : correct) n_pos += c ? 1 : 0;
    const std::size_t n_neg = n - n_pos;
    if (n_pos == 0 || n_neg == 0) throw DegenerateMetricError("AUROC undefined: degenerate correctness");

    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return scores[a] < scores[b]; });

    // Sum over correct items of 2 * mid-rank (1-based).
    unsigned long long twice_rank_sum = 0;
    for (std::size_t i = 0; i < n;) {
        std::size_t j = i;
        while (j < n && scores[order[j]] == scores[order[i]]) ++j;
        const unsigned long long twice_mid = (i + 1) + j;
        for (std::size_t t = i; t < j; ++t)
            if (correct[order[t]]) twice_rank_sum += twice_mid;
        i = j;
    }
    const unsigned long long twice_u = twice_rank_sum - static_cast<unsigned long long>(n_pos) * (n_pos + 1);
    return static_cast<double>(twice_u) / (2.0 * static_cast<double>(n_pos) * static_cast<double>(n_neg));
}

/// Average precision for detecting errors, ranking by ascending confidence.
/// Tied confidences form one group and are credited together.
inline double aupr(std::span<const double> scores, const std::vector<bool>& correct) {
    if (scores.size() != correct.size()) throw DataError("scores and correctness differ in length");
    const std::size_t n = scores.size();
    std::size_t n_err = 0;
    for (bool c : correct) n_err += c ? 0 : 1;
    if (n_err == 0) throw DegenerateMetricError("AUPR undefined: no errors");

    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return scores[a] < scores[b]; });

    double ap = 0.0;
    std::size_t seen = 0, hits = 0;
    for (std::size_t i = 0; i < n;) {
        std::size_t j = i, group_hits = 0;
        while (j < n && scores[order[j]] == scores[order[i]]) {
            if (!correct[order[j]]) ++group_hits;
            ++j;
        }
        seen += j - i;
        hits += group_hits;
        ap += static_cast<double>(group_hits) / static_cast<double>(n_err) *
              (static_cast<double>(hits) / static_cast<double>(seen));
        i = j;
    }
    return ap;
}

/// Largest coverage whose risk is at most `target_risk`; 0 if none.
inline double coverage_at_risk(const RCCurve& curve, double target_risk) {
    if (!(target_risk >= 0.0 && target_risk <= 1.0)) throw UsageError("target risk must be in [0, 1]");
    double best = 0.0;
    for (const auto& p : curve)
        if (p.risk <= target_risk) best = std::max(best, p.coverage);
    return best;
}

/// Risk at the smallest coverage >= `target_coverage`.
inline double risk_at_coverage(const RCCurve& curve, double target_coverage) {
    if (!(target_coverage >= 0.0 && target_coverage <= 1.0)) throw UsageError("target coverage must be in [0, 1]");
    for (const auto& p : curve)
        if (p.coverage >= target_coverage) return p.risk;
    return curve.empty() ? 0.0 : curve.back().risk;
}

enum class DegenerateConvention { Error, One };

struct MetricReport {
    double accuracy = 0.0;
    double aurc = 0.0;
    double eaurc = 0.0;
    double aorc = 0.0;
    double auroc = 0.0;
    double aupr = 0.0;
    std::size_t n = 0;
    std::size_t n_errors = 0;
};

/// All metrics for one ranking. `scores[i]` is the confidence of entry i of
/// `v`. Under DegenerateConvention::One, metrics undefined because every
/// outcome is equal are reported as 1.0; otherwise they throw.
inline MetricReport report(const CorrectnessVector& v, std::span<const double> scores,
                           DegenerateConvention convention = DegenerateConvention::Error) {
    if (scores.size() != v.size()) throw DataError("scores and correctness differ in length");
    const std::vector<bool> correct = v.flags();

    MetricReport r;
    r.n = v.size();
    r.n_errors = v.errors();
    r.accuracy = accuracy(v);
    r.aurc = aurc(v);
    r.eaurc = std::max(0.0, eaurc(v));
    const bool degenerate = is_degenerate(v);
    if (degenerate && convention == DegenerateConvention::Error)
        throw DegenerateMetricError("AORC undefined: degenerate correctness");
    r.aorc = degenerate ? 1.0 : aorc(v);
    r.auroc = degenerate ? 1.0 : auroc(scores, correct);
    r.aupr = r.n_errors == 0 ? 1.0 : aupr(scores, correct);
    return r;
}

}  // namespace tta
