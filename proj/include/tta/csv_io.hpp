#pragma once

// File schemas shared by the command-line pipeline. All files are UTF-8 with
// LF line endings and a mandatory header row; decimals carry 9 significant
// digits.
//
//   softmax      image_id,variant_id,p0,...,p{C-1}
//   labels       image_id,label
//   confidence   image_id,predicted,confidence,msr_baseline   (predicted "|"-joined for top-5)
//   bootstrap    image_id,b,score
//   ranking      rank,image_id                                 (rank is 1-based)
//   rc curve     coverage,risk

#include <charconv>
#include <cstdio>
#include <istream>
#include <map>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

#include "tta/bootstrap.hpp"
#include "tta/confidence.hpp"
#include "tta/error.hpp"
#include "tta/metrics.hpp"

namespace tta::csv {

inline std::string decimal(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.9g", v);
    return buf;
}

inline std::vector<std::string_view> split(std::string_view line, char sep = ',') {
    std::vector<std::string_view> out;
    for (;;) {
        const auto p = line.find(sep);
        out.push_back(line.substr(0, p));
        if (p == std::string_view::npos) break;
        line.remove_prefix(p + 1);
    }
    return out;
}

/// Line reader that tracks 1-based line numbers for error messages.
class Reader {
public:
    Reader(std::istream& is, std::string source) : is_(is), source_(std::move(source)) {}

    bool next(std::string& line) {
        if (!std::getline(is_, line)) return false;
        ++line_no_;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        return true;
    }

    [[noreturn]] void fail(const std::string& what) const {
        throw DataError(source_ + ":" + std::to_string(line_no_) + ": " + what);
    }

    std::vector<std::string_view> header(std::string& storage) {
        if (!next(storage)) fail("missing header row");
        return split(storage);
    }

    double to_double(std::string_view s) const {
        double v = 0.0;
        auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
        if (ec != std::errc{} || p != s.data() + s.size()) fail("malformed decimal '" + std::string(s) + "'");
        return v;
    }

    std::size_t to_index(std::string_view s) const {
        std::size_t v = 0;
        auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
        if (ec != std::errc{} || p != s.data() + s.size() || s.empty())
            fail("malformed integer '" + std::string(s) + "'");
        return v;
    }

    std::size_t line_no() const noexcept { return line_no_; }

private:
    std::istream& is_;
    std::string source_;
    std::size_t line_no_ = 0;
};

inline void expect_header(Reader& r, const std::vector<std::string_view>& got,
                          std::initializer_list<std::string_view> want) {
    if (got.size() != want.size() || !std::equal(want.begin(), want.end(), got.begin())) {
        std::string w;
        for (auto s : want) w += (w.empty() ? "" : ",") + std::string(s);
        r.fail("expected header '" + w + "'");
    }
}

// --- softmax -----------------------------------------------------------------

inline std::vector<SoftmaxRecord> read_softmax(std::istream& is, const std::string& source = "softmax") {
    Reader r(is, source);
    std::string head;
    const auto cols = r.header(head);
    if (cols.size() < 4 || cols[0] != "image_id" || cols[1] != "variant_id")
        r.fail("expected header 'image_id,variant_id,p0,...'");
    const std::size_t c = cols.size() - 2;
    for (std::size_t j = 0; j < c; ++j)
        if (cols[j + 2] != "p" + std::to_string(j)) r.fail("expected column p" + std::to_string(j));

    std::vector<SoftmaxRecord> out;
    std::string line;
    while (r.next(line)) {
        if (line.empty()) continue;
        const auto f = split(line);
        if (f.size() != c + 2) r.fail("expected " + std::to_string(c + 2) + " fields, got " + std::to_string(f.size()));
        if (f[0].empty()) r.fail("empty image_id");
        std::vector<double> probs(c);
        for (std::size_t j = 0; j < c; ++j) probs[j] = r.to_double(f[j + 2]);
        try {
            out.push_back(make_record(std::string(f[0]), r.to_index(f[1]), std::move(probs)));
        } catch (const DataError& e) {
            r.fail(e.what());
        }
    }
    return out;
}

inline void write_softmax(std::ostream& os, const std::vector<SoftmaxRecord>& records) {
    if (records.empty()) throw DataError("no softmax records to write");
    const std::size_t c = records.front().probs.size();
    os << "image_id,variant_id";
    for (std::size_t j = 0; j < c; ++j) os << ",p" << j;
    os << '\n';
    for (const auto& rec : records) {
        os << rec.image_id << ',' << rec.variant_id;
        for (double p : rec.probs) os << ',' << decimal(p);
        os << '\n';
    }
}

// --- labels ------------------------------------------------------------------

inline std::map<std::string, std::size_t> read_labels(std::istream& is, const std::string& source = "labels") {
    Reader r(is, source);
    std::string head;
    expect_header(r, r.header(head), {"image_id", "label"});
    std::map<std::string, std::size_t> out;
    std::string line;
    while (r.next(line)) {
        if (line.empty()) continue;
        const auto f = split(line);
        if (f.size() != 2) r.fail("expected 2 fields");
        if (!out.emplace(std::string(f[0]), r.to_index(f[1])).second) r.fail("duplicate image_id '" + std::string(f[0]) + "'");
    }
    return out;
}

inline void write_labels(std::ostream& os, const std::map<std::string, std::size_t>& labels) {
    os << "image_id,label\n";
    for (const auto& [id, l] : labels) os << id << ',' << l << '\n';
}

// --- confidence ----------------------------------------------------------------

inline std::string join_classes(const std::vector<std::size_t>& cls) {
    std::string s;
    for (std::size_t i = 0; i < cls.size(); ++i) s += (i ? "|" : "") + std::to_string(cls[i]);
    return s;
}

inline void write_confidence(std::ostream& os, const std::vector<ConfidenceResult>& rows) {
    os << "image_id,predicted,confidence,msr_baseline\n";
    for (const auto& r : rows)
        os << r.image_id << ',' << join_classes(r.predicted) << ',' << decimal(r.confidence) << ','
           << decimal(r.msr_baseline) << '\n';
}

inline std::vector<ConfidenceResult> read_confidence(std::istream& is, const std::string& source = "scores") {
    Reader r(is, source);
    std::string head;
    expect_header(r, r.header(head), {"image_id", "predicted", "confidence", "msr_baseline"});
    std::vector<ConfidenceResult> out;
    std::string line;
    while (r.next(line)) {
        if (line.empty()) continue;
        const auto f = split(line);
        if (f.size() != 4) r.fail("expected 4 fields");
        ConfidenceResult c;
        c.image_id = std::string(f[0]);
        for (auto p : split(f[1], '|')) c.predicted.push_back(r.to_index(p));
        c.confidence = r.to_double(f[2]);
        c.msr_baseline = r.to_double(f[3]);
        out.push_back(std::move(c));
    }
    return out;
}

// --- bootstrap scores ----------------------------------------------------------

inline void write_bootstrap(std::ostream& os, const std::vector<BootstrapScores>& all) {
    os << "image_id,b,score\n";
    for (const auto& s : all)
        for (std::size_t b = 0; b < s.scores.size(); ++b) os << s.image_id << ',' << b << ',' << decimal(s.scores[b]) << '\n';
}

/// Rows may appear in any order; each image needs b = 0..n-1 exactly once.
inline std::vector<BootstrapScores> read_bootstrap(std::istream& is, const std::string& source = "bootstrap") {
    Reader r(is, source);
    std::string head;
    expect_header(r, r.header(head), {"image_id", "b", "score"});
    std::map<std::string, std::map<std::size_t, double>> rows;
    std::string line;
    while (r.next(line)) {
        if (line.empty()) continue;
        const auto f = split(line);
        if (f.size() != 3) r.fail("expected 3 fields");
        if (!rows[std::string(f[0])].emplace(r.to_index(f[1]), r.to_double(f[2])).second)
            r.fail("duplicate bootstrap index");
    }
    std::vector<BootstrapScores> out;
    for (auto& [id, m] : rows) {
        BootstrapScores s{id, {}};
        std::size_t expect = 0;
        for (auto& [b, v] : m) {
            if (b != expect++) throw DataError(source + ": bootstrap indices for '" + id + "' are not contiguous");
            s.scores.push_back(v);
        }
        out.push_back(std::move(s));
    }
    return out;
}

// --- ranking -----------------------------------------------------------------

inline void write_ranking(std::ostream& os, const RankedList& ranking) {
    os << "rank,image_id\n";
    for (std::size_t i = 0; i < ranking.entries.size(); ++i) os << i + 1 << ',' << ranking.entries[i] << '\n';
}

inline RankedList read_ranking(std::istream& is, const std::string& source = "ranking") {
    Reader r(is, source);
    std::string head;
    expect_header(r, r.header(head), {"rank", "image_id"});
    std::map<std::size_t, std::string> rows;
    std::string line;
    while (r.next(line)) {
        if (line.empty()) continue;
        const auto f = split(line);
        if (f.size() != 2) r.fail("expected 2 fields");
        if (!rows.emplace(r.to_index(f[0]), std::string(f[1])).second) r.fail("duplicate rank");
    }
    RankedList out;
    std::size_t expect = 1;
    for (auto& [rank, id] : rows) {
        if (rank != expect++) throw DataError(source + ": ranks must be 1..N without gaps");
        out.entries.push_back(std::move(id));
    }
    return out;
}

// --- metrics -----------------------------------------------------------------

inline void write_rc_curve(std::ostream& os, const RCCurve& curve) {
    os << "coverage,risk\n";
    for (const auto& p : curve) os << decimal(p.coverage) << ',' << decimal(p.risk) << '\n';
}

/// `name=value` lines in fixed order; decimals with 9 digits after the point.
inline std::string format_report(const MetricReport& r) {
    auto fixed = [](double v) {
        char buf[40];
        std::snprintf(buf, sizeof buf, "%.9f", v);
        return std::string(buf);
    };
    return "accuracy=" + fixed(r.accuracy) + "\naurc=" + fixed(r.aurc) + "\neaurc=" + fixed(r.eaurc) +
           "\naorc=" + fixed(r.aorc) + "\nauroc=" + fixed(r.auroc) + "\naupr=" + fixed(r.aupr) +
           "\nn=" + std::to_string(r.n) + "\nn_errors=" + std::to_string(r.n_errors) + "\n";
}

}  // namespace tta::csv
