#pragma once

// Text notation for image transformation chains and named chain sets.
//
//   chain := "id" | prim ("+" prim)*
//   prim  := "hflip" | "vflip" | "bgr"
//          | ("left" | "right" | "up" | "down") INT
//          | ("rotcw" | "rotccw") DEC
//          | "zoom" DEC | "gamma" DEC
//
// INT is a positive integer without leading zeros, DEC a positive decimal
// ("0.8", "1.1", "10"). No whitespace is allowed inside a chain.

#include <algorithm>
#include <array>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <string>
#include <string_view>
#include <type_traits>
#include <unordered_set>
#include <variant>
#include <vector>

#include "tta/error.hpp"

namespace tta {

struct HFlip {
    bool operator==(const HFlip&) const = default;
};
struct VFlip {
    bool operator==(const VFlip&) const = default;
};
struct ChannelReverse {
    bool operator==(const ChannelReverse&) const = default;
};
struct Identity {
    bool operator==(const Identity&) const = default;
};

/// Translation in pixels. Positive dx moves content right, positive dy up.
struct Shift {
    int dx = 0;
    int dy = 0;
    bool operator==(const Shift&) const = default;
};

/// Rotation about the image center; positive degrees are clockwise.
struct Rotate {
    double degrees = 0.0;
    bool operator==(const Rotate&) const = default;
};

/// Magnification by `factor` followed by a center crop back to the original size.
struct Zoom {
    double factor = 1.0;
    bool operator==(const Zoom&) const = default;
};

/// Per-pixel power law v -> v^gamma.
struct Gamma {
    double gamma = 1.0;
    bool operator==(const Gamma&) const = default;
};

using PrimitiveTransform =
    std::variant<HFlip, VFlip, ChannelReverse, Shift, Rotate, Zoom, Gamma, Identity>;

/// Ordered sequence of primitives applied left to right. Empty means identity.
struct TransformChain {
    std::vector<PrimitiveTransform> primitives;

    bool is_identity() const noexcept { return primitives.empty(); }
    bool operator==(const TransformChain&) const = default;
};

/// Named collection of non-identity chains. The identity variant is implicit
/// and always sits at variant index 0, so chain i maps to variant i + 1.
struct TransformSet {
    std::string name;
    std::vector<TransformChain> chains;

    std::size_t variant_count() const noexcept { return chains.size() + 1; }
};

/// Throws DataError if `t` violates the field constraints of its kind.
inline void validate_primitive(const PrimitiveTransform& t) {
    std::visit(
        [](const auto& p) {
            using P = std::decay_t<decltype(p)>;
            if constexpr (std::is_same_v<P, Shift>) {
                if (p.dx == 0 && p.dy == 0) throw DataError("shift must move at least one axis");
            } else if constexpr (std::is_same_v<P, Rotate>) {
                if (!(p.degrees > -360.0 && p.degrees < 360.0) || p.degrees == 0.0)
                    throw DataError("rotation must lie in (-360, 360) and be nonzero");
            } else if constexpr (std::is_same_v<P, Zoom>) {
                if (!(p.factor > 1.0) || !std::isfinite(p.factor))
                    throw DataError("zoom factor must be > 1");
            } else if constexpr (std::is_same_v<P, Gamma>) {
                if (!(p.gamma > 0.0) || !std::isfinite(p.gamma))
                    throw DataError("gamma must be > 0");
            }
        },
        t);
}

namespace detail {

inline std::string format_decimal(double v) {
    std::array<char, 64> buf{};
    auto [end, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v);
    return std::string(buf.data(), end);
}

class ChainParser {
public:
    explicit ChainParser(std::string_view text) : text_(text) {}

    TransformChain parse() {
        TransformChain chain;
        if (text_.empty()) throw ParseError("empty chain expression", 0);
        if (text_ == "id") return chain;
        for (;;) {
            parse_primitive(chain);
            if (pos_ == text_.size()) break;
            if (text_[pos_] != '+') throw ParseError("expected '+' between primitives", pos_);
            ++pos_;
        }
        return chain;
    }

private:
    bool consume(std::string_view word) {
        if (text_.substr(pos_, word.size()) != word) return false;
        pos_ += word.size();
        return true;
    }

    // Returns the digits-and-dot span starting at pos_ and validates its shape.
    std::string_view number(bool allow_fraction) {
        const std::size_t start = pos_;
        while (pos_ < text_.size() && (std::isdigit(static_cast<unsigned char>(text_[pos_])) ||
                                       (allow_fraction && text_[pos_] == '.')))
            ++pos_;
        std::string_view tok = text_.substr(start, pos_ - start);
        if (tok.empty()) throw ParseError("missing magnitude", start);
        const auto dot = tok.find('.');
        const std::string_view int_part = tok.substr(0, dot);
        if (int_part.empty()) throw ParseError("decimal must start with a digit", start);
        if (int_part.size() > 1 && int_part[0] == '0') throw ParseError("leading zeros are not allowed", start);
        if (dot != std::string_view::npos) {
            if (tok.find('.', dot + 1) != std::string_view::npos)
                throw ParseError("malformed decimal", start);
            if (dot + 1 == tok.size()) throw ParseError("decimal must not end with '.'", start);
        }
        return tok;
    }

    int parse_int() {
        const std::size_t start = pos_;
        std::string_view tok = number(false);
        int value = 0;
        auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), value);
        if (ec != std::errc{} || value > 1'000'000) throw ParseError("magnitude out of range", start);
        if (value == 0) throw ParseError("zero magnitude", start);
        return value;
    }

    double parse_dec() {
        const std::size_t start = pos_;
        std::string_view tok = number(true);
        double value = 0.0;
        auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), value);
        if (ec != std::errc{} || !std::isfinite(value)) throw ParseError("magnitude out of range", start);
        if (value == 0.0) throw ParseError("zero magnitude", start);
        return value;
    }

    void parse_primitive(TransformChain& chain) {
        const std::size_t start = pos_;
        auto& out = chain.primitives;
        if (consume("hflip")) {
            out.emplace_back(HFlip{});
        } else if (consume("vflip")) {
            out.emplace_back(VFlip{});
        } else if (consume("bgr")) {
            out.emplace_back(ChannelReverse{});
        } else if (consume("left")) {
            out.emplace_back(Shift{-parse_int(), 0});
        } else if (consume("right")) {
            out.emplace_back(Shift{parse_int(), 0});
        } else if (consume("up")) {
            out.emplace_back(Shift{0, parse_int()});
        } else if (consume("down")) {
            out.emplace_back(Shift{0, -parse_int()});
        } else if (consume("rotcw")) {
            const double deg = parse_dec();
            if (deg >= 360.0) throw ParseError("rotation must be below 360 degrees", start);
            out.emplace_back(Rotate{deg});
        } else if (consume("rotccw")) {
            const double deg = parse_dec();
            if (deg >= 360.0) throw ParseError("rotation must be below 360 degrees", start);
            out.emplace_back(Rotate{-deg});
        } else if (consume("zoom")) {
            const double f = parse_dec();
            if (!(f > 1.0)) throw ParseError("zoom factor must be > 1", start);
            out.emplace_back(Zoom{f});
        } else if (consume("gamma")) {
            out.emplace_back(Gamma{parse_dec()});
        } else {
            throw ParseError("unknown token", start);
        }
    }

    std::string_view text_;
    std::size_t pos_ = 0;
};

}  // namespace detail

/// Parses a chain expression. Throws ParseError carrying the byte offset of
/// the first offending character.
inline TransformChain parse_chain(std::string_view text) {
    return detail::ChainParser(text).parse();
}

inline std::string format_primitive(const PrimitiveTransform& t) {
    return std::visit(
        [](const auto& p) -> std::string {
            using P = std::decay_t<decltype(p)>;
            if constexpr (std::is_same_v<P, HFlip>) {
                return "hflip";
            } else if constexpr (std::is_same_v<P, VFlip>) {
                return "vflip";
            } else if constexpr (std::is_same_v<P, ChannelReverse>) {
                return "bgr";
            } else if constexpr (std::is_same_v<P, Identity>) {
                return "id";
            } else if constexpr (std::is_same_v<P, Shift>) {
                // A two-axis shift has no single token; it renders as two.
                std::string s;
                if (p.dx != 0) s += (p.dx > 0 ? "right" : "left") + std::to_string(std::abs(p.dx));
                if (p.dy != 0) {
                    if (!s.empty()) s += '+';
                    s += (p.dy > 0 ? "up" : "down") + std::to_string(std::abs(p.dy));
                }
                return s;
            } else if constexpr (std::is_same_v<P, Rotate>) {
                return (p.degrees >= 0 ? "rotcw" : "rotccw") + detail::format_decimal(std::abs(p.degrees));
            } else if constexpr (std::is_same_v<P, Zoom>) {
                return "zoom" + detail::format_decimal(p.factor);
            } else {
                return "gamma" + detail::format_decimal(p.gamma);
            }
        },
        t);
}

/// Canonical rendering: lowercase, "+"-joined, shortest round-trip decimals,
/// "id" for the empty chain.
inline std::string format_chain(const TransformChain& chain) {
    if (chain.primitives.empty()) return "id";
    std::string out;
    for (const auto& p : chain.primitives) {
        if (!out.empty()) out += '+';
        out += format_primitive(p);
    }
    return out;
}

/// Parses a set file: one chain per line, '#' comments, blank lines ignored,
/// optional "name: <id>" as the first meaningful line.
inline TransformSet parse_set_file(std::string_view text, std::string default_name = {}) {
    TransformSet set;
    set.name = std::move(default_name);
    std::unordered_set<std::string> seen;
    bool first = true;
    std::size_t line_no = 0;
    while (!text.empty()) {
        ++line_no;
        const auto nl = text.find('\n');
        std::string_view line = text.substr(0, nl);
        text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
        if (!line.empty() && line.back() == '\r') line.remove_suffix(1);

        const auto first_char = line.find_first_not_of(" \t");
        if (first_char == std::string_view::npos || line[first_char] == '#') continue;

        if (first && line.starts_with("name:")) {
            std::string_view name = line.substr(5);
            const auto b = name.find_first_not_of(" \t");
            const auto e = name.find_last_not_of(" \t");
            if (b == std::string_view::npos) throw ParseError("empty set name", 5, line_no);
            set.name = std::string(name.substr(b, e - b + 1));
            first = false;
            continue;
        }
        first = false;

        if (line == "id") throw ParseError("identity is implicit and must not be listed", 0, line_no);
        TransformChain chain;
        try {
            chain = parse_chain(line);
        } catch (const ParseError& e) {
            throw ParseError(e.message(), e.offset(), line_no);
        }
        auto canonical = format_chain(chain);
        if (!seen.insert(canonical).second)
            throw ParseError("duplicate chain '" + canonical + "'", 0, line_no);
        set.chains.push_back(std::move(chain));
    }
    return set;
}

inline std::string format_set_file(const TransformSet& set) {
    std::string out;
    if (!set.name.empty()) out += "name: " + set.name + "\n";
    for (const auto& c : set.chains) out += format_chain(c) + "\n";
    return out;
}

namespace detail {

struct PresetEntry {
    std::string_view name;
    std::string_view body;
};

// Transliterated from the published per-dataset transformation lists.
inline constexpr std::array<PresetEntry, 6> kPresets{{
    {"cifar10",
     "hflip+left2+down1\nhflip+down1\nhflip+up1\nhflip+right1+down2\nhflip+right2\nleft1\n"
     "left3\nleft3+up1\ndown1\nright1+down1\nright1\nright1+up1\n"},
    {"cifar100",
     "hflip\nhflip+left3\nhflip+left5+down3\nhflip+down2\nhflip+down3\nhflip+down5\nhflip+up2\n"
     "hflip+up5\nhflip+right11+down11\nhflip+right12+up12\nhflip+right14+up14\nhflip+right1+down3\n"
     "hflip+right1\nhflip+right2+down3\nhflip+right2\nhflip+right2+up1\nhflip+right2+up2\n"
     "hflip+right4\nhflip+right4+up4\nhflip+right5+down11\nhflip+right5+down5\nhflip+right6\n"
     "hflip+right7\nrotcw3\nleft11+down9\nleft1+down1\nleft1+down2\nleft1\ndown1\ndown2\ndown3\n"
     "up1\nup5\nright10+up10\nright14+up14\nright1+up2\nright1+up3\nright2+up1\nright9+up11\n"},
    {"svhn",
     "left3+down5\nleft5+down3\nright10\nright10+up10\nright11\nright12+up12\nright13+up13\n"
     "right14+up14\nright4\nright5\nright5+up2\nright5+up4\nright8\nright8+up8\nright9\n"
     "right9+up9\n"},
    {"imagenet",
     "gamma0.6\ngamma0.8\ngamma0.9\nhflip+rotccw10\nhflip+left1+up2\nhflip+left5+up1\n"
     "hflip+down10\nhflip+up1\nhflip+up10\nhflip+up5\nhflip+right1\nhflip+right2\nhflip+zoom1.1\n"
     "rotcw1\nrotcw4\nrotcw5\nrotcw7\nleft3\ndown10\nup1\nup2\nzoom1.1\nzoom1.1+gamma0.8\n"},
    {"stl10_wrn",
     "gamma0.6\ngamma0.8\nhflip+gamma0.6\nhflip+rotccw1\nhflip+rotccw7\nhflip+rotcw1\n"
     "hflip+left3+up6\nhflip+left4+down2\nhflip+left4+up6\nhflip+up12\nhflip+right12\n"
     "hflip+right12+up12\nhflip+right13\nhflip+right14\nhflip+right19\nhflip+right4+up1\n"
     "hflip+right4+up6\nhflip+right5+down2\nhflip+right5+up6\nhflip+right6+down3\n"
     "hflip+right7+down4\nhflip+right7\nrotcw1\nleft4+up6\nleft6+up6\nleft9+up9\nup10\nup12\n"
     "up14\nup18\nup22\nright14+up14\nright22+up22\n"},
    {"stl10_elu",
     "gamma1.2\nhflip+down1\nhflip+down5\nhflip+right1+up1\nhflip+zoom1.1\nrotcw5\ndown1\n"
     "down5\ndown7\nright1\nzoom1.1\nzoom1.1+up5\n"},
}};

}  // namespace detail

inline std::vector<std::string> builtin_preset_names() {
    std::vector<std::string> names;
    for (const auto& p : detail::kPresets) names.emplace_back(p.name);
    return names;
}

/// Built-in per-dataset transformation sets: cifar10, cifar100, svhn,
/// imagenet, stl10_wrn, stl10_elu. Throws UsageError for unknown names.
inline TransformSet builtin_preset(std::string_view name) {
    for (const auto& p : detail::kPresets)
        if (p.name == name) return parse_set_file(p.body, std::string(p.name));
    throw UsageError("unknown preset '" + std::string(name) + "'");
}

}  // namespace tta
