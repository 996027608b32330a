#include "tta/image.hpp"

#include <gtest/gtest.h>

#include <random>

namespace tta {
namespace {

RasterImage random_image(std::mt19937_64& rng, std::size_t w, std::size_t h, std::size_t ch) {
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::vector<double> px(w * h * ch);
    for (double& v : px) v = u(rng);
    return RasterImage(w, h, ch, std::move(px));
}

RasterImage row(std::vector<double> v) {
    const std::size_t w = v.size();
    return RasterImage(w, 1, 1, std::move(v));
}

TEST(RasterImage, RejectsInvalidConstruction) {
    EXPECT_THROW(RasterImage(0, 1, 1), DataError);
    EXPECT_THROW(RasterImage(1, 1, 2), DataError);
    EXPECT_THROW(RasterImage(2, 1, 1, std::vector<double>{0.5}), DataError);
    EXPECT_THROW(RasterImage(1, 1, 1, std::vector<double>{1.5}), DataError);
}

TEST(ApplyPrimitive, HFlipMirrorsColumns) {
    const auto out = apply_primitive(row({0.1, 0.9}), HFlip{});
    EXPECT_EQ(out, row({0.9, 0.1}));
}

TEST(ApplyPrimitive, VFlipMirrorsRows) {
    const RasterImage img(1, 3, 1, std::vector<double>{0.1, 0.2, 0.3});
    EXPECT_EQ(apply_primitive(img, VFlip{}), RasterImage(1, 3, 1, std::vector<double>{0.3, 0.2, 0.1}));
}

TEST(ApplyPrimitive, GammaRaisesToPower) {
    const auto out = apply_primitive(row({0.25, 0.25}), Gamma{0.5});
    EXPECT_DOUBLE_EQ(out.at(0, 0), 0.5);
}

TEST(ApplyPrimitive, ShiftReplicatesEdge) {
    EXPECT_EQ(apply_primitive(row({0.2, 0.7}), Shift{1, 0}), row({0.2, 0.2}));
    EXPECT_EQ(apply_primitive(row({0.2, 0.7}), Shift{-1, 0}), row({0.7, 0.7}));
}

TEST(ApplyPrimitive, ShiftUpMovesContentTowardRowZero) {
    const RasterImage img(1, 3, 1, std::vector<double>{0.1, 0.2, 0.3});
    EXPECT_EQ(apply_primitive(img, Shift{0, 1}), RasterImage(1, 3, 1, std::vector<double>{0.2, 0.3, 0.3}));
    EXPECT_EQ(apply_primitive(img, Shift{0, -1}), RasterImage(1, 3, 1, std::vector<double>{0.1, 0.1, 0.2}));
}

TEST(ApplyPrimitive, ShiftOutOfFrameIsAnError) {
    EXPECT_THROW(apply_primitive(row({0.2, 0.7}), Shift{2, 0}), DataError);
    EXPECT_THROW(apply_primitive(row({0.2, 0.7}), Shift{0, 1}), DataError);
}

TEST(ApplyPrimitive, ChannelReverse) {
    const RasterImage img(1, 1, 3, std::vector<double>{0.1, 0.2, 0.3});
    EXPECT_EQ(apply_primitive(img, ChannelReverse{}), RasterImage(1, 1, 3, std::vector<double>{0.3, 0.2, 0.1}));
    EXPECT_THROW(apply_primitive(row({0.1, 0.2}), ChannelReverse{}), DataError);
}

TEST(ApplyPrimitive, RotateQuarterTurnClockwise) {
    // 3x3 with a bright pixel at the top middle; a clockwise quarter turn
    // moves it to the right middle.
    std::vector<double> px(9, 0.0);
    px[1] = 1.0;
    const auto out = apply_primitive(RasterImage(3, 3, 1, px), Rotate{90.0});
    EXPECT_NEAR(out.at(2, 1), 1.0, 1e-12);
    EXPECT_NEAR(out.at(1, 0), 0.0, 1e-12);
    const auto back = apply_primitive(RasterImage(3, 3, 1, px), Rotate{-90.0});
    EXPECT_NEAR(back.at(0, 1), 1.0, 1e-12);
}

TEST(ApplyPrimitive, RotateByZeroIsIdentityWithinRounding) {
    std::mt19937_64 rng(3);
    const auto img = random_image(rng, 9, 7, 3);
    const auto out = detail::rotate(img, 0.0);
    for (std::size_t i = 0; i < img.pixels().size(); ++i) EXPECT_NEAR(out.pixels()[i], img.pixels()[i], 1e-15);
}

TEST(ApplyPrimitive, ZoomFactorOneIsIdentity) {
    std::mt19937_64 rng(4);
    const auto img = random_image(rng, 8, 5, 1);
    const auto out = detail::zoom(img, 1.0);
    for (std::size_t i = 0; i < img.pixels().size(); ++i) EXPECT_NEAR(out.pixels()[i], img.pixels()[i], 1e-15);
}

TEST(ApplyPrimitive, ZoomMagnifiesAboutCenter) {
    // Left half dark, right half bright: zooming keeps the step at the center
    // and keeps the outer columns saturated.
    std::vector<double> px;
    for (int x = 0; x < 8; ++x) px.push_back(x < 4 ? 0.0 : 1.0);
    const auto out = apply_primitive(RasterImage(8, 1, 1, px), Zoom{2.0});
    EXPECT_DOUBLE_EQ(out.at(0, 0), 0.0);
    EXPECT_DOUBLE_EQ(out.at(7, 0), 1.0);
    EXPECT_NEAR(out.at(3, 0) + out.at(4, 0), 1.0, 1e-12);
    EXPECT_LT(out.at(3, 0), 0.5);
}

TEST(ApplyPrimitive, PreservesShapeAndRange) {
    std::mt19937_64 rng(5);
    const std::vector<PrimitiveTransform> all{HFlip{}, VFlip{}, ChannelReverse{}, Shift{2, -1},
                                              Rotate{17.0}, Zoom{1.3}, Gamma{0.6}, Identity{}};
    for (int i = 0; i < 20; ++i) {
        const auto img = random_image(rng, 11, 6, 3);
        for (const auto& t : all) {
            const auto out = apply_primitive(img, t);
            ASSERT_TRUE(out.same_shape(img));
            for (double v : out.pixels()) ASSERT_TRUE(v >= 0.0 && v <= 1.0);
        }
    }
}

TEST(ApplyChain, InvolutionsAndIdentity) {
    std::mt19937_64 rng(6);
    for (int i = 0; i < 50; ++i) {
        const auto img = random_image(rng, 7, 5, 3);
        EXPECT_EQ(apply_chain(img, parse_chain("hflip+hflip")), img);
        EXPECT_EQ(apply_chain(img, parse_chain("vflip+vflip")), img);
        EXPECT_EQ(apply_chain(img, parse_chain("bgr+bgr")), img);
        EXPECT_EQ(apply_chain(img, parse_chain("gamma1")), img);
        EXPECT_EQ(apply_chain(img, parse_chain("id")), img);
    }
}

TEST(ApplyChain, ShiftUnshiftOnInterior) {
    std::mt19937_64 rng(7);
    const auto img = random_image(rng, 12, 10, 1);
    const auto out = apply_chain(img, parse_chain("right3+left3+up2+down2"));
    for (std::size_t y = 2; y + 2 < 10; ++y)
        for (std::size_t x = 3; x + 3 < 12; ++x) EXPECT_EQ(out.at(x, y), img.at(x, y));
}

TEST(ApplyChain, ErrorCarriesPrimitiveIndex) {
    try {
        apply_chain(row({0.1, 0.2}), parse_chain("hflip+bgr"));
        FAIL();
    } catch (const TransformError& e) {
        EXPECT_EQ(e.index(), 1u);
    }
}

TEST(GenerateVariants, EmptySetYieldsInputOnly) {
    const auto img = row({0.3, 0.4});
    const auto v = generate_variants(img, TransformSet{});
    ASSERT_EQ(v.size(), 1u);
    EXPECT_EQ(v[0], img);
}

TEST(GenerateVariants, Cifar10PresetOnRgb32) {
    std::mt19937_64 rng(8);
    const auto img = random_image(rng, 32, 32, 3);
    const auto set = builtin_preset("cifar10");
    const auto v = generate_variants(img, set);
    ASSERT_EQ(v.size(), 13u);
    EXPECT_EQ(v[0], img);
    EXPECT_EQ(v[6], apply_chain(img, set.chains[5]));
}

TEST(GenerateVariants, ErrorCarriesChainIndex) {
    const auto set = parse_set_file("hflip\nright1\nbgr\n");
    try {
        generate_variants(RasterImage(4, 4, 1), set);
        FAIL();
    } catch (const TransformError& e) {
        EXPECT_EQ(e.index(), 2u);
    }
}

TEST(GenerateVariants, Deterministic) {
    std::mt19937_64 rng(9);
    const auto img = random_image(rng, 24, 24, 3);
    const auto set = builtin_preset("imagenet");
    EXPECT_EQ(generate_variants(img, set), generate_variants(img, set));
}

}  // namespace
}  // namespace tta
