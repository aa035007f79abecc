#pragma once

#include <string>
#include <vector>

#include "statecast/image.hpp"

namespace statecast {

// PSNR caps at 99 dB so identical frames stay finite for averaging.
inline constexpr double kPsnrCap = 99.0;

// 10*log10(255^2 / MSE) with the MSE taken over every pixel and channel.
double psnr(const RgbFrame& a, const RgbFrame& b);

// Mean SSIM over all fully-interior 11x11 windows of the BT.601 luma plane,
// Gaussian-weighted (sigma 1.5), C1 = (0.01*255)^2, C2 = (0.03*255)^2.
// Inputs must be at least 11x11.
double ssim(const RgbFrame& a, const RgbFrame& b);

// Sum over pixels and channels of sqrt(diff^2 + eps^2), eps = 1e-12.
inline constexpr double kCharbonnierEps = 1e-12;
double charbonnier(const RgbFrame& a, const RgbFrame& b);

struct FrameScore {
    int frame_index = 0;
    double psnr_db = 0.0;
    double ssim = 0.0;
    double pixel_loss = 0.0;
};

// CSV with the fixed header frame_index,scheme,psnr_db,ssim,pixel_loss.
void save_scores_csv(const std::vector<FrameScore>& scores, const std::string& scheme,
                     const std::string& path);

} // namespace statecast
