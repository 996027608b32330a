#pragma once

// Whole-dataset stages: score every image, bootstrap-rank, evaluate a
// ranking against labels. These are what the command-line verbs run.

#include <map>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "tta/bootstrap.hpp"
#include "tta/confidence.hpp"
#include "tta/error.hpp"
#include "tta/metrics.hpp"

namespace tta::pipeline {

struct ScoreOptions {
    PredictionMode mode = PredictionMode::SingleImage;
    std::size_t k = 1;
    bool strict_variants = true;
};

using Groups = std::map<std::string, std::vector<SoftmaxRecord>>;

/// Groups the records and checks the class count against `k`. Images
/// without an identity variant abort in strict mode and are dropped (with a
/// note on `warn`) otherwise.
inline Groups prepare(std::vector<SoftmaxRecord> records, const ScoreOptions& opt, std::ostream* warn = nullptr) {
    if (records.empty()) throw DataError("no softmax records");
    const std::size_t c = records.front().probs.size();
    for (const auto& r : records)
        if (r.probs.size() != c) throw DataError("inconsistent class count for '" + r.image_id + "'");
    TaskMode::checked(opt.k, c);
    auto groups = group_by_image(std::move(records));
    for (auto it = groups.begin(); it != groups.end();) {
        if (it->second.front().variant_id == 0) {
            ++it;
            continue;
        }
        if (opt.strict_variants) throw DataError("missing variant 0 for '" + it->first + "'");
        if (warn) *warn << "warning: skipping '" << it->first << "' (no variant 0)\n";
        it = groups.erase(it);
    }
    if (groups.empty()) throw DataError("no scorable images");
    return groups;
}

inline std::vector<ConfidenceResult> score_all(const Groups& groups, const ScoreOptions& opt) {
    std::vector<ConfidenceResult> out;
    out.reserve(groups.size());
    for (const auto& [id, recs] : groups) out.push_back(score_image(recs, opt.mode, TaskMode{opt.k}));
    return out;
}

inline std::map<std::string, double> confidence_map(const std::vector<ConfidenceResult>& results, bool use_msr = false) {
    std::map<std::string, double> m;
    for (const auto& r : results) m[r.image_id] = use_msr ? r.msr_baseline : r.confidence;
    return m;
}

struct BootstrapRun {
    std::vector<BootstrapScores> scores;
    RankedList ranking;
    std::size_t n_bs = 0;
    std::size_t w_bs = 0;
};

/// Bootstraps every image with its predicted classes frozen from the full
/// record set, then ranks with the sliding-window plurality rule. Defaults
/// for n_bs use the largest |D_chi| among the images.
inline BootstrapRun bootstrap_rank(const Groups& groups, const ScoreOptions& opt, const BootstrapConfig& cfg) {
    std::size_t max_variants = 0;
    for (const auto& [id, recs] : groups) max_variants = std::max(max_variants, recs.size());
    const auto resolved = resolve(cfg, max_variants);
    BootstrapRun run;
    run.n_bs = resolved.n_bs;
    run.w_bs = resolved.w_bs;
    for (const auto& [id, recs] : groups) {
        const auto predicted = predict(recs, opt.mode, TaskMode{opt.k});
        run.scores.push_back(bootstrap_scores(recs, predicted, run.n_bs, cfg.seed));
    }
    run.ranking = plurality_rank(run.scores, run.w_bs);
    return run;
}

struct Evaluation {
    CorrectnessVector correctness;
    std::vector<double> scores;  // aligned with the ranking
    RCCurve curve;
    MetricReport report;
};

/// Scores a ranking. Without explicit confidences an entry's score is its
/// negated rank position, which preserves the ordering for AUROC/AUPR. All
/// ranked ids missing a label or prediction are reported together.
inline Evaluation evaluate(const RankedList& ranking, const std::map<std::string, std::vector<std::size_t>>& predictions,
                           const std::map<std::string, std::size_t>& labels,
                           const std::map<std::string, double>* confidences, DegenerateConvention convention) {
    if (ranking.entries.empty()) throw DataError("empty ranking");
    std::string missing;
    for (const auto& id : ranking.entries) {
        if (!labels.contains(id)) missing += " " + id + "(label)";
        if (!predictions.contains(id)) missing += " " + id + "(prediction)";
        if (confidences && !confidences->contains(id)) missing += " " + id + "(score)";
    }
    if (!missing.empty()) throw DataError("ids missing from inputs:" + missing);

    std::vector<CorrectnessVector::Entry> entries;
    std::vector<double> scores;
    for (std::size_t i = 0; i < ranking.entries.size(); ++i) {
        const auto& id = ranking.entries[i];
        entries.push_back({id, correctness(predictions.at(id), labels.at(id))});
        scores.push_back(confidences ? confidences->at(id) : -static_cast<double>(i));
    }
    CorrectnessVector v(std::move(entries));
    auto curve = rc_curve(v);
    auto rep = report(v, scores, convention);
    return Evaluation{std::move(v), std::move(scores), std::move(curve), rep};
}

inline std::map<std::string, std::vector<std::size_t>> prediction_map(const std::vector<ConfidenceResult>& results) {
    std::map<std::string, std::vector<std::size_t>> m;
    for (const auto& r : results) m[r.image_id] = r.predicted;
    return m;
}

}  // namespace tta::pipeline
