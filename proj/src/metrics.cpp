#include "statecast/metrics.hpp"

#include <cmath>
#include <cstdio>

#include "statecast/error.hpp"
#include "statecast/image_io.hpp"

namespace statecast {

double psnr(const RgbFrame& a, const RgbFrame& b) {
    if (!a.same_size(b)) fail("psnr: frame size mismatch");
    double se = 0.0;
    for (size_t i = 0; i < a.pixels.size(); ++i) {
        double d = double(a.pixels[i]) - double(b.pixels[i]);
        se += d * d;
    }
    double mse = se / double(a.pixels.size());
    if (mse == 0.0) return kPsnrCap;
    double v = 10.0 * std::log10(255.0 * 255.0 / mse);
    return std::min(v, kPsnrCap);
}

namespace {

constexpr int kSsimWindow = 11;

// Separable pass of an 11-tap kernel; border handling is irrelevant because
// only fully-interior window positions are consumed.
GrayImage convolve_separable(const GrayImage& img, const double* kernel) {
    int r = kSsimWindow / 2;
    GrayImage tmp(img.width, img.height), out(img.width, img.height);
    for (int y = 0; y < img.height; ++y)
        for (int x = 0; x < img.width; ++x) {
            double s = 0.0;
            for (int k = -r; k <= r; ++k) s += kernel[k + r] * img.at_clamped(x + k, y);
            tmp.at(x, y) = float(s);
        }
    for (int y = 0; y < img.height; ++y)
        for (int x = 0; x < img.width; ++x) {
            double s = 0.0;
            for (int k = -r; k <= r; ++k) s += kernel[k + r] * tmp.at_clamped(x, y + k);
            out.at(x, y) = float(s);
        }
    return out;
}

} // namespace

double ssim(const RgbFrame& a, const RgbFrame& b) {
    if (!a.same_size(b)) fail("ssim: frame size mismatch");
    if (a.width < kSsimWindow || a.height < kSsimWindow)
        fail("ssim: frames must be at least 11x11");

    double kernel[kSsimWindow];
    {
        double sum = 0.0;
        int r = kSsimWindow / 2;
        for (int i = 0; i < kSsimWindow; ++i) {
            double d = i - r;
            kernel[i] = std::exp(-(d * d) / (2.0 * 1.5 * 1.5));
            sum += kernel[i];
        }
        for (double& kv : kernel) kv /= sum;
    }

    GrayImage x = to_luma(a), y = to_luma(b);
    GrayImage xx(x.width, x.height), yy(x.width, x.height), xy(x.width, x.height);
    for (size_t i = 0; i < x.data.size(); ++i) {
        xx.data[i] = x.data[i] * x.data[i];
        yy.data[i] = y.data[i] * y.data[i];
        xy.data[i] = x.data[i] * y.data[i];
    }

    GrayImage mx = convolve_separable(x, kernel);
    GrayImage my = convolve_separable(y, kernel);
    GrayImage mxx = convolve_separable(xx, kernel);
    GrayImage myy = convolve_separable(yy, kernel);
    GrayImage mxy = convolve_separable(xy, kernel);

    const double c1 = (0.01 * 255) * (0.01 * 255);
    const double c2 = (0.03 * 255) * (0.03 * 255);
    int r = kSsimWindow / 2;
    double total = 0.0;
    long count = 0;
    for (int py = r; py < x.height - r; ++py)
        for (int px = r; px < x.width - r; ++px) {
            double ux = mx.at(px, py), uy = my.at(px, py);
            double vx = mxx.at(px, py) - ux * ux;
            double vy = myy.at(px, py) - uy * uy;
            double cov = mxy.at(px, py) - ux * uy;
            double num = (2 * ux * uy + c1) * (2 * cov + c2);
            double den = (ux * ux + uy * uy + c1) * (vx + vy + c2);
            total += num / den;
            ++count;
        }
    return total / double(count);
}

double charbonnier(const RgbFrame& a, const RgbFrame& b) {
    if (!a.same_size(b)) fail("charbonnier: frame size mismatch");
    double sum = 0.0;
    for (size_t i = 0; i < a.pixels.size(); ++i) {
        double d = double(a.pixels[i]) - double(b.pixels[i]);
        sum += std::sqrt(d * d + kCharbonnierEps * kCharbonnierEps);
    }
    return sum;
}

void save_scores_csv(const std::vector<FrameScore>& scores, const std::string& scheme,
                     const std::string& path) {
    std::string out = "frame_index,scheme,psnr_db,ssim,pixel_loss\n";
    char buf[160];
    for (const auto& s : scores) {
        std::snprintf(buf, sizeof buf, "%d,%s,%.6f,%.6f,%.6f\n", s.frame_index, scheme.c_str(),
                      s.psnr_db, s.ssim, s.pixel_loss);
        out += buf;
    }
    write_file_bytes(path, out);
}

} // namespace statecast
