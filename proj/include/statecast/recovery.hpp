#pragma once

#include <array>
#include <cmath>
#include <optional>

#include "statecast/codec.hpp"
#include "statecast/gamestate.hpp"
#include "statecast/image.hpp"
#include "statecast/metrics.hpp"

namespace statecast {

// Dense motion field in pixels of its own resolution; u is +x, v is +y, and
// the field describes content displacement from the previous frame into the
// current one. The backward warp therefore samples the previous frame at
// (x - u, y - v).
struct FlowField {
    int width = 0;
    int height = 0;
    std::vector<float> u, v;

    FlowField() = default;
    FlowField(int w, int h)
        : width(w), height(h), u(size_t(w) * h, 0.f), v(size_t(w) * h, 0.f) {}

    size_t idx(int x, int y) const { return size_t(y) * width + x; }
};

using CoverageMask = PixelMask; // 1 where the warp sampled fully in-bounds

// Per-channel affine correction applied to the warped frame; (1, 0) is the
// identity. b is in 8-bit pixel units.
struct EnhanceParams {
    std::array<double, 3> a{1.0, 1.0, 1.0};
    std::array<double, 3> b{0.0, 0.0, 0.0};
};

struct EnhanceConfig {
    double lr = 0.01;     // initial step per iteration (normalized pixel units)
    int iterations = 100;
};

struct RecoverConfig {
    int flow_levels = 3;
    int lk_iterations = 3;
    int inpaint_iterations = 50;
    EnhanceConfig enhance;
};

// Scalar Charbonnier penalty and its derivative; eps matches the image
// metric so the fitted loss and the reported one agree.
inline double charbonnier_rho(double x) {
    return std::sqrt(x * x + kCharbonnierEps * kCharbonnierEps);
}
inline double charbonnier_drho(double x) {
    return x / std::sqrt(x * x + kCharbonnierEps * kCharbonnierEps);
}

// Coarse-to-fine iterative Lucas-Kanade (5x5 window) on Gaussian-blurred
// (sigma 1.5) luma pyramids with x2 downsampling. levels >= 1 and the top
// level must still be at least 8x8. Pixels whose structure tensor is
// singular keep the flow inherited from the coarser level.
FlowField estimate_flow_luma(const GrayImage& prev, const GrayImage& curr, int levels,
                             int iterations = 3);

// Same estimator, fed with state_to_image renderings of two game states.
FlowField estimate_flow(const GameStateFrame& prev, const GameStateFrame& curr,
                        const Palette& palette, int levels, int iterations = 3);

// Bilinear resize to the target geometry with vectors scaled by the
// resolution ratio (target_w / w, target_h / h).
FlowField upsample_flow(const FlowField& flow, int target_w, int target_h);

struct WarpOutput {
    RgbFrame frame;
    CoverageMask coverage;
};

// Backward warp with bilinear sampling. A pixel is covered only when every
// tap with nonzero weight is in-bounds; uncovered pixels are black.
WarpOutput warp_frame(const RgbFrame& prev, const FlowField& flow);

// Minimizes the mean Charbonnier error of a*warped + b against partial over
// the overlap pixels, per channel, images normalized to [0, 1] internally.
// Gradient descent from (1, 0) where each iteration starts at cfg.lr and
// halves until the loss does not increase, so the loss trace is monotone.
// An empty overlap returns the identity exactly.
EnhanceParams fit_enhance(const RgbFrame& warped, const RgbFrame& partial,
                          const PixelMask& overlap, const EnhanceConfig& cfg);

// Fills hole pixels: cells that the (optional) game state marks occupied are
// seeded with their palette color, the rest relax by Jacobi diffusion over
// non-hole and already-filled 4-neighbors. Pixels no diffusion front ever
// reaches come out mid-gray.
RgbFrame inpaint(const RgbFrame& composite, const PixelMask& hole, const GameStateFrame* state,
                 const Palette* palette, int iterations);

struct RecoveryInput {
    const GameStateFrame* prev_state = nullptr;
    const GameStateFrame* curr_state = nullptr;
    const Palette* palette = nullptr;
    const RgbFrame* prev_frame = nullptr;
    const RgbFrame* partial_frame = nullptr;     // optional, paired with mask
    const CorruptionMask* partial_mask = nullptr;
};

struct RecoveryResult {
    RgbFrame frame;
    CoverageMask coverage;
    EnhanceParams enhance;
    double coverage_fraction = 0.0;
};

// Full pipeline: state flow -> upsample -> warp -> enhance fit on
// coverage AND partial-valid pixels -> enhance where covered -> inpaint the
// rest -> overwrite pixels whose partial 4x4 cell is valid with the partial
// frame verbatim.
RecoveryResult recover(const RecoveryInput& input, const RecoverConfig& cfg);

// Variant without game states: flow comes from the two previous frames
// (downscaled to the state grid) extrapolated one step, and inpainting has
// no seeds. Used as an ablation baseline.
RecoveryResult recover_from_frames(const RgbFrame& prev_prev_frame, const RgbFrame& prev_frame,
                                   const RgbFrame* partial_frame,
                                   const CorruptionMask* partial_mask, int state_w, int state_h,
                                   const RecoverConfig& cfg);

} // namespace statecast
