#include "tta/netpbm.hpp"

#include <gtest/gtest.h>

#include <random>
#include <string>

namespace tta {
namespace {

std::vector<std::uint8_t> bytes(const std::string& header, std::vector<std::uint8_t> payload) {
    std::vector<std::uint8_t> out(header.begin(), header.end());
    out.insert(out.end(), payload.begin(), payload.end());
    return out;
}

TEST(Netpbm, LoadsGraymap) {
    const auto img = load_netpbm(bytes("P5\n2 1\n255\n", {0, 255}));
    EXPECT_EQ(img.width(), 2u);
    EXPECT_EQ(img.channels(), 1u);
    EXPECT_EQ(img.at(0, 0), 0.0);
    EXPECT_EQ(img.at(1, 0), 1.0);
}

TEST(Netpbm, LoadsPixmapWithCommentsAndLowMaxval) {
    const auto img = load_netpbm(bytes("P6 # rgb\n1  1\n# c\n15\n", {15, 0, 5}));
    EXPECT_EQ(img.channels(), 3u);
    EXPECT_DOUBLE_EQ(img.at(0, 0, 0), 1.0);
    EXPECT_DOUBLE_EQ(img.at(0, 0, 2), 5.0 / 15.0);
}

TEST(Netpbm, SavesCanonicalHeader) {
    const auto out = save_netpbm(RasterImage(2, 1, 1, std::vector<double>{0.0, 1.0}));
    EXPECT_EQ(out, bytes("P5\n2 1\n255\n", {0, 255}));
    const auto rgb = save_netpbm(RasterImage(1, 1, 3, std::vector<double>{0.5, 0.2, 1.0}));
    EXPECT_EQ(rgb, bytes("P6\n1 1\n255\n", {128, 51, 255}));
}

TEST(Netpbm, Errors) {
    EXPECT_THROW(load_netpbm(bytes("P7\n2 1\n255\n", {0, 0})), DataError);
    EXPECT_THROW(load_netpbm(bytes("Q5\n2 1\n255\n", {0, 0})), DataError);
    EXPECT_THROW(load_netpbm(bytes("P5\n2 1\n255\n", {0})), DataError);
    EXPECT_THROW(load_netpbm(bytes("P5\n2 1\n65535\n", {0, 0, 0, 0})), DataError);
    EXPECT_THROW(load_netpbm(bytes("P5\n2\n", {})), DataError);
    EXPECT_THROW(load_netpbm(bytes("P5\n0 1\n255\n", {})), DataError);
    try {
        load_netpbm(bytes("P7\n", {}));
    } catch (const DataError& e) {
        EXPECT_NE(std::string(e.what()).find("unsupported format"), std::string::npos);
    }
}

TEST(Netpbm, ByteExactRoundTripAtMaxval255) {
    std::mt19937 rng(11);
    for (int ch : {1, 3}) {
        std::vector<std::uint8_t> payload(5 * 4 * ch);
        for (auto& b : payload) b = static_cast<std::uint8_t>(rng());
        const auto original = bytes(std::string(ch == 1 ? "P5" : "P6") + "\n5 4\n255\n", payload);
        EXPECT_EQ(save_netpbm(load_netpbm(original)), original);
    }
}

}  // namespace
}  // namespace tta
