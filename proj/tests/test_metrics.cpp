#include <doctest.h>

#include <cmath>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "oracles.hpp"
#include "statecast/error.hpp"
#include "statecast/metrics.hpp"
#include "test_util.hpp"

using namespace statecast;

TEST_CASE("psnr: identical frames hit the 99 dB cap") {
    RgbFrame a = oracle::noise_frame(32, 24, 1);
    CHECK(psnr(a, a) == 99.0);
}

TEST_CASE("psnr: maximal difference scores 0 dB") {
    RgbFrame black(16, 16, 0);
    RgbFrame white(16, 16, 255);
    CHECK(psnr(black, white) == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("psnr: uniform offset of 16 matches the closed form") {
    RgbFrame a(20, 20, 100);
    RgbFrame b(20, 20, 116);
    double expect = 10.0 * std::log10(65025.0 / 256.0);
    CHECK(psnr(a, b) == doctest::Approx(expect).epsilon(1e-12));
}

TEST_CASE("psnr: symmetric and invariant under a common shift") {
    RgbFrame a = oracle::noise_frame(48, 32, 2);
    RgbFrame b = oracle::noise_frame(48, 32, 3);
    for (auto& v : a.pixels) v = uint8_t(v % 201); // headroom: +50 cannot clip
    for (auto& v : b.pixels) v = uint8_t(v % 201);
    CHECK(psnr(a, b) == psnr(b, a));
    RgbFrame a2 = a, b2 = b;
    for (auto& v : a2.pixels) v = uint8_t(v + 50);
    for (auto& v : b2.pixels) v = uint8_t(v + 50);
    CHECK(psnr(a2, b2) == psnr(a, b)); // same per-pixel diffs, bit-equal MSE
}

TEST_CASE("psnr: size mismatch is rejected") {
    RgbFrame a(16, 16), b(16, 8);
    CHECK_THROWS_AS((void)psnr(a, b), Error);
}

TEST_CASE("ssim: identical frames score 1") {
    RgbFrame a = oracle::noise_frame(32, 32, 4);
    CHECK(ssim(a, a) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("ssim: small uniform bias stays close to 1") {
    RgbFrame a = oracle::noise_frame(48, 48, 5);
    for (auto& v : a.pixels) v = uint8_t(v % 241);
    RgbFrame b = a;
    for (auto& v : b.pixels) v = uint8_t(v + 10);
    double s = ssim(a, b);
    CHECK(s > 0.9);
    CHECK(s < 1.0);
}

TEST_CASE("ssim: independent noise decorrelates") {
    RgbFrame a = oracle::noise_frame(64, 64, 6);
    RgbFrame b = oracle::noise_frame(64, 64, 7);
    CHECK(std::abs(ssim(a, b)) < 0.2);
}

TEST_CASE("ssim: stays within [-1, 1] on random pairs") {
    for (uint64_t seed = 0; seed < 6; ++seed) {
        RgbFrame a = oracle::noise_frame(24, 40, 100 + seed);
        RgbFrame b = oracle::noise_frame(24, 40, 200 + seed);
        double s = ssim(a, b);
        CHECK(s >= -1.0);
        CHECK(s <= 1.0);
    }
}

TEST_CASE("ssim: inputs below the window size are rejected") {
    RgbFrame a(10, 16), b(10, 16);
    CHECK_THROWS_AS((void)ssim(a, b), Error);
}

TEST_CASE("charbonnier: near zero on identical frames, counts a lone diff") {
    RgbFrame a = oracle::noise_frame(32, 32, 8);
    CHECK(charbonnier(a, a) < 1e-3);
    RgbFrame b = a;
    b.pixels[123] = uint8_t(b.pixels[123] + 3);
    CHECK(charbonnier(a, b) == doctest::Approx(3.0).epsilon(1e-6));
}

TEST_CASE("charbonnier: agrees with a scalar re-summation") {
    RgbFrame a = oracle::noise_frame(40, 28, 9);
    RgbFrame b = oracle::noise_frame(40, 28, 10);
    CHECK(charbonnier(a, b) == doctest::Approx(oracle::charbonnier_scalar(a, b)).epsilon(1e-9));
}

TEST_CASE("score CSV has the fixed header and six-decimal rows") {
    std::vector<FrameScore> rows;
    rows.push_back({0, 31.25, 0.9125, 0.0});
    rows.push_back({7, 99.0, 1.0, 0.4375});
    std::string path = test_path("scores.csv");
    save_scores_csv(rows, "recover", path);

    std::ifstream in(path);
    REQUIRE(in.good());
    std::string line;
    REQUIRE(std::getline(in, line));
    CHECK(line == "frame_index,scheme,psnr_db,ssim,pixel_loss");
    REQUIRE(std::getline(in, line));
    CHECK(line == "0,recover,31.250000,0.912500,0.000000");
    REQUIRE(std::getline(in, line));
    CHECK(line == "7,recover,99.000000,1.000000,0.437500");
    CHECK(!std::getline(in, line));
}
