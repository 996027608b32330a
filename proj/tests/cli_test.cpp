#include "tta/cli.hpp"

#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

namespace tta::cli {
namespace {

namespace fs = std::filesystem;

class CliTest : public ::testing::Test {
protected:
    void SetUp() override {
        dir_ = fs::temp_directory_path() /
               ("tta_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
        fs::remove_all(dir_);
        fs::create_directories(dir_);
    }
    void TearDown() override { fs::remove_all(dir_); }

    std::string path(const std::string& name) const { return (dir_ / name).string(); }

    std::string write(const std::string& name, const std::string& content) const {
        std::ofstream(path(name), std::ios::binary) << content;
        return path(name);
    }

    static std::string read(const std::string& p) {
        std::ifstream in(p, std::ios::binary);
        std::stringstream ss;
        ss << in.rdbuf();
        return ss.str();
    }

    int call(const std::vector<std::string>& args) {
        out_.str("");
        err_.str("");
        return run(args, out_, err_);
    }

    fs::path dir_;
    std::ostringstream out_, err_;
};

// Three images; predictions 0, 1, 0 against labels 0, 0, 0 and confidences
// 0.9, 0.8, 0.7 give the [correct, wrong, correct] ranking.
const char* kTftSoftmax =
    "image_id,variant_id,p0,p1\n"
    "a,0,0.9,0.1\n"
    "b,0,0.2,0.8\n"
    "c,0,0.7,0.3\n";
const char* kTftLabels = "image_id,label\na,0\nb,0\nc,0\n";

std::map<std::string, std::string> report_fields(const std::string& text) {
    std::map<std::string, std::string> out;
    std::istringstream is(text);
    for (std::string line; std::getline(is, line);) {
        const auto eq = line.find('=');
        if (eq != std::string::npos) out[line.substr(0, eq)] = line.substr(eq + 1);
    }
    return out;
}

TEST_F(CliTest, UsageErrors) {
    EXPECT_EQ(call({}), 2);
    EXPECT_EQ(call({"frobnicate"}), 2);
    EXPECT_EQ(call({"score"}), 2);
    EXPECT_EQ(call({"--help"}), 0);
}

TEST_F(CliTest, TransformSingleSpec) {
    const auto in = write("in.pgm", std::string("P5\n2 1\n255\n") + '\x10' + '\xf0');
    EXPECT_EQ(call({"transform", in, "--spec", "hflip", "--out", path("o.pgm")}), 0);
    EXPECT_EQ(read(path("o.pgm")), std::string("P5\n2 1\n255\n") + '\xf0' + '\x10');
    EXPECT_EQ(call({"transform", in, "--spec", "diag3", "--out", path("o.pgm")}), 2);
    EXPECT_NE(err_.str().find("offset 0"), std::string::npos);
}

TEST_F(CliTest, TransformBgrOnGrayscaleIsDataError) {
    const auto in = write("in.pgm", std::string("P5\n2 1\n255\n") + '\x10' + '\xf0');
    EXPECT_EQ(call({"transform", in, "--spec", "bgr", "--out", path("o.pgm")}), 3);
}

TEST_F(CliTest, TransformPresetWritesAllVariants) {
    std::string px;
    for (int i = 0; i < 32 * 32 * 3; ++i) px += static_cast<char>(i * 7);
    const auto in = write("in.ppm", "P6\n32 32\n255\n" + px);
    ASSERT_EQ(call({"transform", in, "--preset", "svhn", "--out", path("variants")}), 0) << err_.str();
    std::size_t n = 0;
    for (const auto& e : fs::directory_iterator(path("variants"))) {
        EXPECT_EQ(e.path().extension(), ".ppm");
        ++n;
    }
    EXPECT_EQ(n, 17u);
    EXPECT_EQ(read(path("variants/in_v0.ppm")), read(in));
}

TEST_F(CliTest, TransformGrayscaleSetSkipsBadChainsWhenLenient) {
    const auto in = write("in.pgm", "P5\n4 4\n255\n" + std::string(16, '\x40'));
    const auto set = write("set.txt", "hflip\nbgr\nright1\n");
    EXPECT_EQ(call({"transform", in, "--set-file", set, "--out", path("v")}), 3);
    fs::remove_all(path("v"));
    EXPECT_EQ(call({"--no-strict-variants", "transform", in, "--set-file", set, "--out", path("v")}), 0);
    EXPECT_TRUE(fs::exists(path("v/in_v3.pgm")));
    EXPECT_FALSE(fs::exists(path("v/in_v2.pgm")));
}

TEST_F(CliTest, TopkMustBeBelowClassCount) {
    std::string csv = "image_id,variant_id,p0,p1,p2,p3,p4\na,0,0.2,0.2,0.2,0.2,0.2\n";
    const auto sm = write("sm.csv", csv);
    EXPECT_EQ(call({"score", "--softmax", sm, "--topk", "5"}), 2);
    EXPECT_NE(err_.str().find("topk must be < C"), std::string::npos);
}

TEST_F(CliTest, BootstrapRequiresSeed) {
    const auto sm = write("sm.csv", kTftSoftmax);
    EXPECT_EQ(call({"rank", "--softmax", sm, "--bootstrap"}), 2);
    EXPECT_EQ(call({"rank", "--softmax", sm, "--n-bs", "10"}), 2);
}

TEST_F(CliTest, SeededBootstrapIsByteIdentical) {
    const auto sm = write("sm.csv",
                          "image_id,variant_id,p0,p1\n"
                          "a,0,0.9,0.1\na,1,0.6,0.4\na,2,0.7,0.3\n"
                          "b,0,0.2,0.8\nb,1,0.4,0.6\nb,2,0.1,0.9\n");
    for (const char* name : {"r1.csv", "r2.csv"})
        ASSERT_EQ(call({"--seed", "11", "rank", "--softmax", sm, "--bootstrap", "--out", path(name), "--scores-out",
                        path(std::string("s") + name)}),
                  0)
            << err_.str();
    EXPECT_EQ(read(path("r1.csv")), read(path("r2.csv")));
    EXPECT_EQ(read(path("sr1.csv")), read(path("sr2.csv")));
    ASSERT_EQ(call({"--seed", "11", "rank", "--scores", path("sr1.csv"), "--bootstrap", "--out", path("r3.csv")}), 0) << err_.str();
    EXPECT_EQ(read(path("r3.csv")), read(path("r1.csv")));
}

TEST_F(CliTest, NonBootstrapRanking) {
    const auto sc = write("sc.csv", "image_id,predicted,confidence,msr_baseline\nA,0,0.6,0.6\nB,1,0.9,0.9\n");
    EXPECT_EQ(call({"rank", "--scores", sc}), 0);
    EXPECT_EQ(out_.str(), "rank,image_id\n1,B\n2,A\n");
}

TEST_F(CliTest, EvaluateTrueFalseTrueFixture) {
    const auto sm = write("sm.csv", kTftSoftmax);
    const auto lb = write("labels.csv", kTftLabels);
    ASSERT_EQ(call({"score", "--softmax", sm, "--out", path("scores.csv")}), 0);
    ASSERT_EQ(call({"evaluate", "--scores", path("scores.csv"), "--labels", lb, "--rc-out", path("rc.csv")}), 0)
        << err_.str();
    const std::string report = out_.str();
    EXPECT_NE(report.find("aorc=0.666666667"), std::string::npos) << report;
    EXPECT_NE(report.find("aurc=0.277777778"), std::string::npos) << report;
    EXPECT_EQ(read(path("rc.csv")), "coverage,risk\n0.333333333,0\n0.666666667,0.5\n1,0.333333333\n");
}

TEST_F(CliTest, EvaluateOracleFixture) {
    const auto sm = write("sm.csv", "image_id,variant_id,p0,p1\na,0,0.9,0.1\nb,0,0.8,0.2\nc,0,0.3,0.7\n");
    const auto lb = write("labels.csv", kTftLabels);
    ASSERT_EQ(call({"score", "--softmax", sm, "--out", path("scores.csv")}), 0);
    ASSERT_EQ(call({"evaluate", "--scores", path("scores.csv"), "--labels", lb}), 0) << err_.str();
    EXPECT_NE(out_.str().find("eaurc=0.000000000"), std::string::npos);
    EXPECT_NE(out_.str().find("aorc=1.000000000"), std::string::npos);
}

TEST_F(CliTest, EvaluateMissingLabelNamesTheId) {
    const auto sm = write("sm.csv", kTftSoftmax);
    const auto lb = write("labels.csv", "image_id,label\na,0\nc,0\n");
    ASSERT_EQ(call({"score", "--softmax", sm, "--out", path("scores.csv")}), 0);
    EXPECT_EQ(call({"evaluate", "--scores", path("scores.csv"), "--labels", lb}), 3);
    EXPECT_NE(err_.str().find("b(label)"), std::string::npos) << err_.str();
}

TEST_F(CliTest, DegenerateMetricsExitFourUnlessConventionSet) {
    const auto sm = write("sm.csv", "image_id,variant_id,p0,p1\na,0,0.9,0.1\nb,0,0.8,0.2\n");
    const auto lb = write("labels.csv", "image_id,label\na,0\nb,0\n");
    ASSERT_EQ(call({"score", "--softmax", sm, "--out", path("scores.csv")}), 0);
    EXPECT_EQ(call({"evaluate", "--scores", path("scores.csv"), "--labels", lb}), 4);
    EXPECT_EQ(call({"--degenerate-aorc", "one", "evaluate", "--scores", path("scores.csv"), "--labels", lb}), 0);
    EXPECT_NE(out_.str().find("aorc=1.000000000"), std::string::npos);
    EXPECT_EQ(call({"--degenerate-aorc", "maybe", "evaluate", "--scores", path("scores.csv"), "--labels", lb}), 2);
}

TEST_F(CliTest, FileCompositionMatchesInProcess) {
    std::string csv = "image_id,variant_id,p0,p1,p2\n";
    std::map<std::string, std::size_t> labels;
    for (int i = 0; i < 12; ++i) {
        const std::string id = "im" + std::to_string(10 + i);
        for (int v = 0; v < 3; ++v) {
            const double a = 0.1 + 0.05 * ((i * 7 + v * 3) % 11), b = (1.0 - a) * (0.3 + 0.1 * ((i + v) % 4));
            csv += id + "," + std::to_string(v) + "," + csv::decimal(a) + "," + csv::decimal(b) + "," +
                   csv::decimal(1.0 - a - b) + "\n";
        }
        labels[id] = static_cast<std::size_t>(i % 3);
    }
    const auto sm = write("sm.csv", csv);
    std::ostringstream lbs;
    csv::write_labels(lbs, labels);
    const auto lb = write("labels.csv", lbs.str());

    ASSERT_EQ(call({"score", "--softmax", sm, "--mode", "augmented", "--out", path("scores.csv")}), 0);
    ASSERT_EQ(call({"rank", "--scores", path("scores.csv"), "--out", path("ranking.csv")}), 0);
    ASSERT_EQ(call({"evaluate", "--ranking", path("ranking.csv"), "--predictions", path("scores.csv"), "--labels", lb,
                    "--report-out", path("report.txt")}),
              0)
        << err_.str();

    std::istringstream is(csv);
    const pipeline::ScoreOptions opt{PredictionMode::Augmented, 1, true};
    const auto results = pipeline::score_all(pipeline::prepare(csv::read_softmax(is), opt), opt);
    const auto ranking = rank_from_scores(pipeline::confidence_map(results));
    const auto conf = pipeline::confidence_map(results);
    const auto ev = pipeline::evaluate(ranking, pipeline::prediction_map(results), labels, &conf,
                                       DegenerateConvention::Error);
    std::ostringstream rk;
    csv::write_ranking(rk, ranking);
    EXPECT_EQ(read(path("ranking.csv")), rk.str());
    // The ranking-only path has no confidences, so AUROC and AUPR use rank order
    // instead; the ranking-derived metrics must agree exactly.
    const auto text = read(path("report.txt"));
    const auto full = csv::format_report(ev.report);
    const auto got = report_fields(read(path("report.txt")));
    const auto want = report_fields(csv::format_report(ev.report));
    for (const char* key : {"accuracy", "aurc", "eaurc", "aorc", "n", "n_errors"}) EXPECT_EQ(got.at(key), want.at(key)) << key;
}

TEST_F(CliTest, DemoOutMustBeDirectory) {
    const auto f = write("file.txt", "x");
    EXPECT_EQ(call({"demo", "--out", f}), 3);
}

}  // namespace
}  // namespace tta::cli
