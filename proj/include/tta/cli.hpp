#pragma once

// Command-line front end. Verbs: transform, score, rank, evaluate, demo.
// Exit codes: 0 ok, 2 usage, 3 data, 4 degenerate metric.

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "tta/bootstrap.hpp"
#include "tta/confidence.hpp"
#include "tta/csv_io.hpp"
#include "tta/demo.hpp"
#include "tta/error.hpp"
#include "tta/image.hpp"
#include "tta/metrics.hpp"
#include "tta/netpbm.hpp"
#include "tta/pipeline.hpp"
#include "tta/transform_dsl.hpp"

namespace tta::cli {

enum ExitCode : int { kOk = 0, kUsage = 2, kData = 3, kDegenerate = 4 };

struct GlobalOptions {
    std::optional<std::uint64_t> seed;
    bool strict_variants = true;
    std::string degenerate_aorc = "error";

    DegenerateConvention convention() const {
        return degenerate_aorc == "one" ? DegenerateConvention::One : DegenerateConvention::Error;
    }
};

namespace detail {

inline std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot open '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

/// Writes via `fn` to `path`, or to `out` when path is "-".
template <class Fn>
void emit(const std::string& path, std::ostream& out, Fn&& fn) {
    if (path == "-") {
        fn(out);
        return;
    }
    std::ofstream os(path, std::ios::binary);
    if (!os) throw DataError("cannot write '" + path + "'");
    fn(os);
    if (!os) throw DataError("write failed for '" + path + "'");
}

inline PredictionMode parse_mode(const std::string& s) {
    if (s == "single") return PredictionMode::SingleImage;
    if (s == "augmented") return PredictionMode::Augmented;
    throw UsageError("mode must be 'single' or 'augmented'");
}

inline std::vector<SoftmaxRecord> load_softmax(const std::string& path) {
    std::istringstream is(slurp(path));
    return csv::read_softmax(is, path);
}

}  // namespace detail

struct TransformArgs {
    std::string input;
    std::string spec;
    std::string preset;
    std::string set_file;
    std::string out;
};

inline void cmd_transform(const TransformArgs& a, const GlobalOptions& g, std::ostream& err) {
    const int sources = !a.spec.empty() + !a.preset.empty() + !a.set_file.empty();
    if (sources != 1) throw UsageError("exactly one of --spec, --preset, --set-file is required");
    const RasterImage image = read_netpbm_file(a.input);

    if (!a.spec.empty()) {
        TransformChain chain;
        try {
            chain = parse_chain(a.spec);
        } catch (const ParseError& e) {
            throw UsageError(std::string("--spec: ") + e.what());
        }
        write_netpbm_file(a.out, apply_chain(image, chain));
        return;
    }

    const TransformSet set = !a.preset.empty() ? builtin_preset(a.preset)
                                               : parse_set_file(detail::slurp(a.set_file), a.set_file);
    namespace fs = std::filesystem;
    const fs::path dir(a.out);
    if (fs::exists(dir) && !fs::is_directory(dir)) throw DataError("'" + a.out + "' is not a directory");
    fs::create_directories(dir);
    const std::string stem = fs::path(a.input).stem().string();
    const std::string ext = image.channels() == 3 ? ".ppm" : ".pgm";
    auto name = [&](std::size_t k) { return (dir / (stem + "_v" + std::to_string(k) + ext)).string(); };

    write_netpbm_file(name(0), image);
    for (std::size_t i = 0; i < set.chains.size(); ++i) {
        try {
            write_netpbm_file(name(i + 1), apply_chain(image, set.chains[i]));
        } catch (const TransformError& e) {
            const std::string msg = "chain " + std::to_string(i) + " '" + format_chain(set.chains[i]) + "': " + e.what();
            if (g.strict_variants) throw DataError(msg);
            err << "warning: skipping " << msg << "\n";
        }
    }
}

struct ScoreArgs {
    std::string softmax;
    std::string mode = "single";
    std::size_t topk = 1;
    std::string out = "-";
};

inline void cmd_score(const ScoreArgs& a, const GlobalOptions& g, std::ostream& out, std::ostream& err) {
    const pipeline::ScoreOptions opt{detail::parse_mode(a.mode), a.topk, g.strict_variants};
    const auto groups = pipeline::prepare(detail::load_softmax(a.softmax), opt, &err);
    const auto results = pipeline::score_all(groups, opt);
    detail::emit(a.out, out, [&](std::ostream& os) { csv::write_confidence(os, results); });
}

struct RankArgs {
    std::string scores;
    std::string softmax;
    bool bootstrap = false;
    std::optional<std::size_t> n_bs;
    std::optional<std::size_t> w_bs;
    std::string mode = "single";
    std::size_t topk = 1;
    std::string scores_out;
    std::string out = "-";
};

inline void cmd_rank(const RankArgs& a, const GlobalOptions& g, std::ostream& out, std::ostream& err) {
    if (a.scores.empty() == a.softmax.empty()) throw UsageError("exactly one of --scores, --softmax is required");
    if (a.bootstrap && !g.seed) throw UsageError("--seed is required with --bootstrap");
    if (!a.bootstrap && (a.n_bs || a.w_bs)) throw UsageError("--n-bs/--w-bs require --bootstrap");

    RankedList ranking;
    const pipeline::ScoreOptions opt{detail::parse_mode(a.mode), a.topk, g.strict_variants};
    if (!a.softmax.empty()) {
        const auto groups = pipeline::prepare(detail::load_softmax(a.softmax), opt, &err);
        if (a.bootstrap) {
            const auto run = pipeline::bootstrap_rank(groups, opt, BootstrapConfig{a.n_bs, a.w_bs, *g.seed});
            if (!a.scores_out.empty())
                detail::emit(a.scores_out, out, [&](std::ostream& os) { csv::write_bootstrap(os, run.scores); });
            ranking = run.ranking;
        } else {
            ranking = rank_from_scores(pipeline::confidence_map(pipeline::score_all(groups, opt)));
        }
    } else {
        const std::string text = detail::slurp(a.scores);
        std::istringstream is(text);
        if (text.starts_with("image_id,b,score")) {
            if (!a.bootstrap) throw UsageError("bootstrap score files require --bootstrap");
            const auto all = csv::read_bootstrap(is, a.scores);
            if (all.empty()) throw DataError(a.scores + ": no scores");
            const std::size_t n = all.front().scores.size();
            if (a.n_bs && *a.n_bs != n) throw UsageError("--n-bs does not match the score file");
            ranking = plurality_rank(all, a.w_bs.value_or(n));
        } else {
            if (a.bootstrap) throw UsageError("--bootstrap needs --softmax or a bootstrap score file");
            ranking = rank_from_scores(pipeline::confidence_map(csv::read_confidence(is, a.scores)));
        }
    }
    detail::emit(a.out, out, [&](std::ostream& os) { csv::write_ranking(os, ranking); });
}

struct EvaluateArgs {
    std::string ranking;
    std::string scores;
    std::string labels;
    std::string predictions;
    std::string rc_out;
    std::string report_out = "-";
};

inline void cmd_evaluate(const EvaluateArgs& a, const GlobalOptions& g, std::ostream& out) {
    if (a.ranking.empty() == a.scores.empty()) throw UsageError("exactly one of --ranking, --scores is required");
    if (a.predictions.empty() && a.scores.empty()) throw UsageError("--predictions is required with --ranking");

    std::istringstream label_is(detail::slurp(a.labels));
    const auto labels = csv::read_labels(label_is, a.labels);

    std::map<std::string, std::vector<std::size_t>> predictions;
    if (!a.predictions.empty()) {
        std::istringstream is(detail::slurp(a.predictions));
        predictions = pipeline::prediction_map(csv::read_confidence(is, a.predictions));
    }

    pipeline::Evaluation ev = [&] {
        if (!a.scores.empty()) {
            std::istringstream is(detail::slurp(a.scores));
            const auto rows = csv::read_confidence(is, a.scores);
            if (predictions.empty()) predictions = pipeline::prediction_map(rows);
            const auto conf = pipeline::confidence_map(rows);
            return pipeline::evaluate(rank_from_scores(conf), predictions, labels, &conf, g.convention());
        }
        std::istringstream is(detail::slurp(a.ranking));
        return pipeline::evaluate(csv::read_ranking(is, a.ranking), predictions, labels, nullptr, g.convention());
    }();

    if (!a.rc_out.empty()) detail::emit(a.rc_out, out, [&](std::ostream& os) { csv::write_rc_curve(os, ev.curve); });
    detail::emit(a.report_out, out, [&](std::ostream& os) { os << csv::format_report(ev.report); });
}

inline void cmd_demo(const std::string& out_dir, const GlobalOptions& g, std::ostream& out) {
    demo::Config cfg;
    cfg.seed = g.seed.value_or(demo::kDefaultSeed);
    const auto result = demo::run(cfg, std::filesystem::path(out_dir));
    out << result.table;
}

/// Parses `args` (without the program name) and runs the selected verb.
inline int run(const std::vector<std::string>& args, std::ostream& out = std::cout, std::ostream& err = std::cerr) {
    CLI::App app{"Test-time augmentation confidence estimation and selective-classification metrics", "tta"};
    app.require_subcommand(1);

    GlobalOptions g;
    app.add_option("--seed", g.seed, "Seed for bootstrap resampling and the demo");
    app.add_flag("--strict-variants,!--no-strict-variants", g.strict_variants,
                 "Abort when a variant cannot be produced or is missing (default on)");
    app.add_option("--degenerate-aorc", g.degenerate_aorc, "How to report metrics on all-correct/all-wrong inputs")
        ->check(CLI::IsMember({"error", "one"}));

    TransformArgs ta;
    auto* transform = app.add_subcommand("transform", "Apply a chain or a transformation set to a Netpbm image");
    transform->add_option("input", ta.input, "Input P5/P6 image")->required();
    transform->add_option("--spec", ta.spec, "Single chain, e.g. hflip+right2");
    transform->add_option("--preset", ta.preset, "Built-in set name");
    transform->add_option("--set-file", ta.set_file, "Transformation set file");
    transform->add_option("--out", ta.out, "Output image (--spec) or directory (set)")->required();

    ScoreArgs sa;
    auto* score = app.add_subcommand("score", "Compute predictions and confidences from a softmax CSV");
    score->add_option("--softmax", sa.softmax)->required();
    score->add_option("--mode", sa.mode)->check(CLI::IsMember({"single", "augmented"}));
    score->add_option("--topk", sa.topk)->check(CLI::IsMember({1, 5}));
    score->add_option("--out", sa.out);

    RankArgs ra;
    auto* rank = app.add_subcommand("rank", "Rank images by confidence, optionally via bootstrap plurality");
    rank->add_option("--scores", ra.scores, "Confidence CSV or bootstrap score CSV");
    rank->add_option("--softmax", ra.softmax);
    rank->add_flag("--bootstrap", ra.bootstrap);
    rank->add_option("--n-bs", ra.n_bs)->check(CLI::Range(1, 1'000'000));
    rank->add_option("--w-bs", ra.w_bs)->check(CLI::PositiveNumber);
    rank->add_option("--mode", ra.mode)->check(CLI::IsMember({"single", "augmented"}));
    rank->add_option("--topk", ra.topk)->check(CLI::IsMember({1, 5}));
    rank->add_option("--scores-out", ra.scores_out, "Write bootstrap scores here");
    rank->add_option("--out", ra.out);

    EvaluateArgs ea;
    auto* evaluate = app.add_subcommand("evaluate", "Selective-classification metrics for a ranking");
    evaluate->add_option("--ranking", ea.ranking);
    evaluate->add_option("--scores", ea.scores, "Confidence CSV (ranked by its confidence column)");
    evaluate->add_option("--labels", ea.labels)->required();
    evaluate->add_option("--predictions", ea.predictions, "Confidence CSV supplying predicted classes");
    evaluate->add_option("--rc-out", ea.rc_out);
    evaluate->add_option("--report-out", ea.report_out);

    std::string demo_out;
    auto* demo = app.add_subcommand("demo", "Seeded end-to-end run on synthetic data");
    demo->add_option("--out", demo_out)->required();

    for (auto* sub : {transform, score, rank, evaluate, demo}) sub->fallthrough();

    std::vector<const char*> argv{"tta"};
    for (const auto& s : args) argv.push_back(s.c_str());
    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return e.get_exit_code() == 0 ? code : kUsage;
    }

    try {
        if (transform->parsed()) cmd_transform(ta, g, err);
        else if (score->parsed()) cmd_score(sa, g, out, err);
        else if (rank->parsed()) cmd_rank(ra, g, out, err);
        else if (evaluate->parsed()) cmd_evaluate(ea, g, out);
        else if (demo->parsed()) cmd_demo(demo_out, g, out);
        return kOk;
    } catch (const UsageError& e) {
        err << "error: " << e.what() << "\n";
        return kUsage;
    } catch (const DegenerateMetricError& e) {
        err << "error: " << e.what() << " (use --degenerate-aorc=one to report 1.0)\n";
        return kDegenerate;
    } catch (const Error& e) {
        err << "error: " << e.what() << "\n";
        return kData;
    } catch (const std::filesystem::filesystem_error& e) {
        err << "error: " << e.what() << "\n";
        return kData;
    }
}

}  // namespace tta::cli
