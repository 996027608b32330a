#pragma once

// Seeded end-to-end run on synthetic data: train the centroid classifier,
// augment every test image, then compare four confidence configurations.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "tta/bootstrap.hpp"
#include "tta/confidence.hpp"
#include "tta/csv_io.hpp"
#include "tta/image.hpp"
#include "tta/metrics.hpp"
#include "tta/netpbm.hpp"
#include "tta/pipeline.hpp"
#include "tta/toy_classifier.hpp"
#include "tta/transform_dsl.hpp"

namespace tta::demo {

inline constexpr std::uint64_t kDefaultSeed = 7;

inline constexpr std::string_view kChainSet =
    "name: demo\n"
    "right1\nright2\nleft1\nleft2\nup1\nup2\ndown1\ndown2\nhflip\ngamma0.8\ngamma1.2\n";

struct Config {
    std::uint64_t seed = kDefaultSeed;
    std::size_t size = 16;
    double noise_sigma = 0.55;
    std::size_t jitter_px = 3;
    std::size_t train_per_class = 10;
    std::size_t test_per_class = 100;
    double beta = 40.0;
};

struct MethodRow {
    std::string name;
    pipeline::Evaluation eval;
};

struct Result {
    std::vector<MethodRow> rows;
    std::string table;
};

inline std::string format_table(const std::vector<MethodRow>& rows) {
    std::string out;
    char buf[160];
    std::snprintf(buf, sizeof buf, "%-12s %9s %9s %9s %9s %9s\n", "method", "accuracy", "AORC", "eAURC", "AUROC", "AUPR");
    out += buf;
    for (const auto& r : rows) {
        const auto& m = r.eval.report;
        std::snprintf(buf, sizeof buf, "%-12s %9.4f %9.4f %9.4f %9.4f %9.4f\n", r.name.c_str(), m.accuracy, m.aorc,
                      m.eaurc, m.auroc, m.aupr);
        out += buf;
    }
    return out;
}

namespace detail {

inline void write_file(const std::filesystem::path& p, const std::string& content) {
    std::ofstream os(p, std::ios::binary);
    if (!os) throw DataError("cannot write '" + p.string() + "'");
    os << content;
}

template <class Fn>
void write_with(const std::filesystem::path& p, Fn&& fn) {
    std::ofstream os(p, std::ios::binary);
    if (!os) throw DataError("cannot write '" + p.string() + "'");
    fn(os);
}

}  // namespace detail

/// Runs the full pipeline. When `out_dir` is set, every intermediate
/// artifact is written there alongside `comparison.txt`.
inline Result run(const Config& cfg, const std::optional<std::filesystem::path>& out_dir = std::nullopt) {
    namespace fs = std::filesystem;
    if (out_dir) {
        if (fs::exists(*out_dir) && !fs::is_directory(*out_dir))
            throw DataError("'" + out_dir->string() + "' exists and is not a directory");
        fs::create_directories(*out_dir / "images");
    }

    SyntheticSpec spec;
    spec.width = spec.height = cfg.size;
    spec.classes = {ShapeKind::HBar, ShapeKind::VBar, ShapeKind::Diagonal, ShapeKind::Disc};
    spec.noise_sigma = cfg.noise_sigma;
    spec.jitter_px = cfg.jitter_px;

    spec.per_class_count = cfg.train_per_class;
    spec.seed = cfg.seed * 2 + 1;
    const auto train = generate_dataset(spec);
    const auto model = train_centroids(train, spec.classes.size(), cfg.beta);

    spec.per_class_count = cfg.test_per_class;
    spec.seed = cfg.seed * 2 + 2;
    const auto test = generate_dataset(spec);

    const auto chains = parse_set_file(kChainSet);
    std::vector<SoftmaxRecord> records;
    std::map<std::string, std::size_t> labels;
    for (const auto& item : test) {
        labels[item.id] = item.label;
        const auto variants = generate_variants(item.image, chains);
        for (std::size_t v = 0; v < variants.size(); ++v)
            records.push_back(make_record(item.id, v, model.classify(variants[v])));
        if (out_dir) write_netpbm_file((*out_dir / "images" / (item.id + ".pgm")).string(), item.image);
    }

    const pipeline::ScoreOptions single{PredictionMode::SingleImage, 1, true};
    const pipeline::ScoreOptions augmented{PredictionMode::Augmented, 1, true};
    const auto groups = pipeline::prepare(records, single);

    const auto single_scores = pipeline::score_all(groups, single);
    const auto aug_scores = pipeline::score_all(groups, augmented);
    const auto single_pred = pipeline::prediction_map(single_scores);
    const auto aug_pred = pipeline::prediction_map(aug_scores);

    const auto msr_x = pipeline::confidence_map(single_scores, true);
    const auto msr_d = pipeline::confidence_map(single_scores);
    const auto aug_conf = pipeline::confidence_map(aug_scores);

    BootstrapConfig bs;
    bs.seed = cfg.seed;
    const auto boot = pipeline::bootstrap_rank(groups, single, bs);

    const auto conv = DegenerateConvention::Error;
    Result result;
    result.rows.push_back({"MSR(x)", pipeline::evaluate(rank_from_scores(msr_x), single_pred, labels, &msr_x, conv)});
    result.rows.push_back({"MSR(D_chi)", pipeline::evaluate(rank_from_scores(msr_d), single_pred, labels, &msr_d, conv)});
    result.rows.push_back({"BS(D_chi)", pipeline::evaluate(boot.ranking, single_pred, labels, nullptr, conv)});
    result.rows.push_back({"TTA(D_chi)", pipeline::evaluate(rank_from_scores(aug_conf), aug_pred, labels, &aug_conf, conv)});
    result.table = format_table(result.rows);

    if (out_dir) {
        const auto& dir = *out_dir;
        detail::write_with(dir / "model.txt", [&](std::ostream& os) { write_model(os, model); });
        detail::write_file(dir / "transforms.txt", format_set_file(chains));
        detail::write_with(dir / "labels.csv", [&](std::ostream& os) { csv::write_labels(os, labels); });
        detail::write_with(dir / "softmax.csv", [&](std::ostream& os) { csv::write_softmax(os, records); });
        detail::write_with(dir / "scores_single.csv", [&](std::ostream& os) { csv::write_confidence(os, single_scores); });
        detail::write_with(dir / "scores_augmented.csv", [&](std::ostream& os) { csv::write_confidence(os, aug_scores); });
        detail::write_with(dir / "bootstrap_scores.csv", [&](std::ostream& os) { csv::write_bootstrap(os, boot.scores); });
        const char* slugs[] = {"msr_x", "msr_dchi", "bs_dchi", "tta_dchi"};
        for (std::size_t i = 0; i < result.rows.size(); ++i) {
            const auto& ev = result.rows[i].eval;
            RankedList ranking;
            for (const auto& e : ev.correctness.entries()) ranking.entries.push_back(e.image_id);
            detail::write_with(dir / ("ranking_" + std::string(slugs[i]) + ".csv"),
                               [&](std::ostream& os) { csv::write_ranking(os, ranking); });
            detail::write_with(dir / ("rc_" + std::string(slugs[i]) + ".csv"),
                               [&](std::ostream& os) { csv::write_rc_curve(os, ev.curve); });
            detail::write_file(dir / ("report_" + std::string(slugs[i]) + ".txt"), csv::format_report(ev.report));
        }
        detail::write_file(dir / "comparison.txt", result.table);
    }
    return result;
}

}  // namespace tta::demo
