#include "statecast/recovery.hpp"

#include <algorithm>
#include <cmath>

#include "statecast/error.hpp"

namespace statecast {

namespace {

GrayImage gaussian_blur(const GrayImage& img, double sigma) {
    int radius = int(std::ceil(3.0 * sigma));
    std::vector<double> kernel(size_t(2 * radius + 1));
    double sum = 0.0;
    for (int i = -radius; i <= radius; ++i) {
        kernel[size_t(i + radius)] = std::exp(-(double(i) * i) / (2.0 * sigma * sigma));
        sum += kernel[size_t(i + radius)];
    }
    for (double& k : kernel) k /= sum;

    GrayImage tmp(img.width, img.height), out(img.width, img.height);
    for (int y = 0; y < img.height; ++y)
        for (int x = 0; x < img.width; ++x) {
            double s = 0.0;
            for (int i = -radius; i <= radius; ++i)
                s += kernel[size_t(i + radius)] * img.at_clamped(x + i, y);
            tmp.at(x, y) = float(s);
        }
    for (int y = 0; y < img.height; ++y)
        for (int x = 0; x < img.width; ++x) {
            double s = 0.0;
            for (int i = -radius; i <= radius; ++i)
                s += kernel[size_t(i + radius)] * tmp.at_clamped(x, y + i);
            out.at(x, y) = float(s);
        }
    return out;
}

GrayImage downsample2(const GrayImage& img) {
    int w = (img.width + 1) / 2, h = (img.height + 1) / 2;
    GrayImage out(w, h);
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x) {
            double s = img.at_clamped(2 * x, 2 * y) + img.at_clamped(2 * x + 1, 2 * y) +
                       img.at_clamped(2 * x, 2 * y + 1) + img.at_clamped(2 * x + 1, 2 * y + 1);
            out.at(x, y) = float(s * 0.25);
        }
    return out;
}

float bilinear_clamped(const GrayImage& img, double x, double y) {
    x = std::clamp(x, 0.0, double(img.width - 1));
    y = std::clamp(y, 0.0, double(img.height - 1));
    int x0 = int(std::floor(x)), y0 = int(std::floor(y));
    double fx = x - x0, fy = y - y0;
    int x1 = std::min(x0 + 1, img.width - 1), y1 = std::min(y0 + 1, img.height - 1);
    double v00 = img.at(x0, y0), v10 = img.at(x1, y0);
    double v01 = img.at(x0, y1), v11 = img.at(x1, y1);
    return float((1 - fx) * (1 - fy) * v00 + fx * (1 - fy) * v10 + (1 - fx) * fy * v01 +
                 fx * fy * v11);
}

// Bilinear resize of a flow field with explicit component scaling.
FlowField resize_flow(const FlowField& flow, int tw, int th, double su, double sv) {
    FlowField out(tw, th);
    for (int y = 0; y < th; ++y)
        for (int x = 0; x < tw; ++x) {
            double sx = (x + 0.5) * double(flow.width) / tw - 0.5;
            double sy = (y + 0.5) * double(flow.height) / th - 0.5;
            sx = std::clamp(sx, 0.0, double(flow.width - 1));
            sy = std::clamp(sy, 0.0, double(flow.height - 1));
            int x0 = int(std::floor(sx)), y0 = int(std::floor(sy));
            double fx = sx - x0, fy = sy - y0;
            int x1 = std::min(x0 + 1, flow.width - 1), y1 = std::min(y0 + 1, flow.height - 1);
            auto lerp2 = [&](const std::vector<float>& c) {
                double v00 = c[flow.idx(x0, y0)], v10 = c[flow.idx(x1, y0)];
                double v01 = c[flow.idx(x0, y1)], v11 = c[flow.idx(x1, y1)];
                return (1 - fx) * (1 - fy) * v00 + fx * (1 - fy) * v10 +
                       (1 - fx) * fy * v01 + fx * fy * v11;
            };
            out.u[out.idx(x, y)] = float(lerp2(flow.u) * su);
            out.v[out.idx(x, y)] = float(lerp2(flow.v) * sv);
        }
    return out;
}

constexpr double kDetEps = 1e-9;
constexpr double kMaxStepPx = 2.0; // per-iteration update clamp, for stability

void lk_refine_level(const GrayImage& prev, const GrayImage& curr, FlowField& flow,
                     int iterations) {
    GrayImage gx(prev.width, prev.height), gy(prev.width, prev.height);
    for (int y = 0; y < prev.height; ++y)
        for (int x = 0; x < prev.width; ++x) {
            gx.at(x, y) = 0.5f * (prev.at_clamped(x + 1, y) - prev.at_clamped(x - 1, y));
            gy.at(x, y) = 0.5f * (prev.at_clamped(x, y + 1) - prev.at_clamped(x, y - 1));
        }

    for (int iter = 0; iter < iterations; ++iter) {
        for (int y = 0; y < curr.height; ++y) {
            for (int x = 0; x < curr.width; ++x) {
                double u = flow.u[flow.idx(x, y)];
                double v = flow.v[flow.idx(x, y)];
                double axx = 0, axy = 0, ayy = 0, bx = 0, by = 0;
                for (int wy = -2; wy <= 2; ++wy) {
                    for (int wx = -2; wx <= 2; ++wx) {
                        double cxp = x + wx, cyp = y + wy;
                        double pxp = cxp - u, pyp = cyp - v;
                        double g1 = bilinear_clamped(gx, pxp, pyp);
                        double g2 = bilinear_clamped(gy, pxp, pyp);
                        double e = bilinear_clamped(prev, pxp, pyp) -
                                   curr.at_clamped(int(cxp), int(cyp));
                        axx += g1 * g1;
                        axy += g1 * g2;
                        ayy += g2 * g2;
                        bx += g1 * e;
                        by += g2 * e;
                    }
                }
                double det = axx * ayy - axy * axy;
                if (det <= kDetEps) continue; // singular: keep inherited flow
                double du = (ayy * bx - axy * by) / det;
                double dv = (axx * by - axy * bx) / det;
                du = std::clamp(du, -kMaxStepPx, kMaxStepPx);
                dv = std::clamp(dv, -kMaxStepPx, kMaxStepPx);
                flow.u[flow.idx(x, y)] = float(u + du);
                flow.v[flow.idx(x, y)] = float(v + dv);
            }
        }
    }
}

} // namespace

FlowField estimate_flow_luma(const GrayImage& prev, const GrayImage& curr, int levels,
                             int iterations) {
    if (prev.width != curr.width || prev.height != curr.height)
        fail("estimate_flow: image size mismatch");
    if (levels < 1) fail("estimate_flow: levels must be >= 1");

    std::vector<GrayImage> pyr_prev, pyr_curr;
    pyr_prev.push_back(gaussian_blur(prev, 1.5));
    pyr_curr.push_back(gaussian_blur(curr, 1.5));
    for (int l = 1; l < levels; ++l) {
        pyr_prev.push_back(downsample2(pyr_prev.back()));
        pyr_curr.push_back(downsample2(pyr_curr.back()));
    }
    if (pyr_prev.back().width < 8 || pyr_prev.back().height < 8)
        fail("estimate_flow: degenerate resolution, pyramid top below 8x8");

    FlowField flow(pyr_prev.back().width, pyr_prev.back().height);
    for (int l = levels - 1; l >= 0; --l) {
        if (l != levels - 1) {
            // Move to the finer level: resample and double the vectors.
            flow = resize_flow(flow, pyr_prev[size_t(l)].width, pyr_prev[size_t(l)].height,
                               2.0, 2.0);
        }
        lk_refine_level(pyr_prev[size_t(l)], pyr_curr[size_t(l)], flow, iterations);
    }
    return flow;
}

FlowField estimate_flow(const GameStateFrame& prev, const GameStateFrame& curr,
                        const Palette& palette, int levels, int iterations) {
    if (prev.width != curr.width || prev.height != curr.height)
        fail("estimate_flow: state size mismatch");
    GrayImage a = to_luma(state_to_image(prev, palette));
    GrayImage b = to_luma(state_to_image(curr, palette));
    // Scale to [0, 1] so solver thresholds are resolution independent.
    for (auto& v : a.data) v /= 255.f;
    for (auto& v : b.data) v /= 255.f;
    return estimate_flow_luma(a, b, levels, iterations);
}

FlowField upsample_flow(const FlowField& flow, int target_w, int target_h) {
    if (flow.width < 1 || flow.height < 1) fail("upsample_flow: empty field");
    if (target_w < 1 || target_h < 1) fail("upsample_flow: bad target size");
    return resize_flow(flow, target_w, target_h, double(target_w) / flow.width,
                       double(target_h) / flow.height);
}

WarpOutput warp_frame(const RgbFrame& prev, const FlowField& flow) {
    if (flow.width != prev.width || flow.height != prev.height)
        fail("warp_frame: flow resolution must match the frame");
    int W = prev.width, H = prev.height;
    WarpOutput out{RgbFrame(W, H), CoverageMask(W, H, 0)};

    for (int y = 0; y < H; ++y) {
        for (int x = 0; x < W; ++x) {
            double px = x - double(flow.u[flow.idx(x, y)]);
            double py = y - double(flow.v[flow.idx(x, y)]);
            double fx0 = std::floor(px), fy0 = std::floor(py);
            int x0 = int(fx0), y0 = int(fy0);
            double fx = px - fx0, fy = py - fy0;
            bool need_x1 = fx > 0.0, need_y1 = fy > 0.0;

            // Only taps with nonzero weight count toward coverage, so an
            // exactly-integer sample at the frame border is still covered.
            bool ok = x0 >= 0 && x0 < W && y0 >= 0 && y0 < H;
            if (need_x1) ok = ok && (x0 + 1 < W);
            if (need_y1) ok = ok && (y0 + 1 < H);
            if (!ok) continue;

            out.coverage.at(x, y) = 1;
            const uint8_t* p00 = prev.at(x0, y0);
            const uint8_t* p10 = need_x1 ? prev.at(x0 + 1, y0) : p00;
            const uint8_t* p01 = need_y1 ? prev.at(x0, y0 + 1) : p00;
            const uint8_t* p11 = (need_x1 && need_y1) ? prev.at(x0 + 1, y0 + 1) : p00;
            uint8_t* dst = out.frame.at(x, y);
            for (int c = 0; c < 3; ++c) {
                double val = (1 - fx) * (1 - fy) * p00[c];
                if (need_x1) val += fx * (1 - fy) * p10[c];
                if (need_y1) val += (1 - fx) * fy * p01[c];
                if (need_x1 && need_y1) val += fx * fy * p11[c];
                dst[c] = clamp_u8(val);
            }
        }
    }
    return out;
}

EnhanceParams fit_enhance(const RgbFrame& warped, const RgbFrame& partial,
                          const PixelMask& overlap, const EnhanceConfig& cfg) {
    if (!warped.same_size(partial)) fail("fit_enhance: frame size mismatch");
    if (overlap.width != warped.width || overlap.height != warped.height)
        fail("fit_enhance: overlap mask size mismatch");

    EnhanceParams params;
    for (int c = 0; c < 3; ++c) {
        // Gather the overlap samples once, normalized to [0, 1].
        std::vector<float> w, p;
        for (int y = 0; y < warped.height; ++y)
            for (int x = 0; x < warped.width; ++x)
                if (overlap.at(x, y)) {
                    w.push_back(warped.at(x, y)[c] / 255.f);
                    p.push_back(partial.at(x, y)[c] / 255.f);
                }
        if (w.empty()) continue; // identity for this channel

        const size_t n = w.size();
        auto loss_at = [&](double a, double b) {
            double s = 0.0;
            for (size_t i = 0; i < n; ++i) s += charbonnier_rho(a * w[i] + b - p[i]);
            return s / double(n);
        };

        double a = 1.0, b = 0.0;
        double cur = loss_at(a, b);
        for (int iter = 0; iter < cfg.iterations; ++iter) {
            double ga = 0.0, gb = 0.0;
            for (size_t i = 0; i < n; ++i) {
                double d = charbonnier_drho(a * w[i] + b - p[i]);
                ga += d * w[i];
                gb += d;
            }
            ga /= double(n);
            gb /= double(n);
            if (std::abs(ga) + std::abs(gb) < 1e-14) break;

            // Halving line search keeps the loss non-increasing and lets the
            // step shrink automatically near the optimum.
            double step = cfg.lr;
            bool stepped = false;
            double before = cur;
            for (int tries = 0; tries < 40; ++tries) {
                double na = a - step * ga, nb = b - step * gb;
                double nl = loss_at(na, nb);
                if (nl <= cur) {
                    a = na;
                    b = nb;
                    cur = nl;
                    stepped = true;
                    break;
                }
                step *= 0.5;
            }
            // Converged: no step helps, or the win is below double noise.
            // Burning the remaining iterations would change nothing.
            if (!stepped || before - cur < 1e-15) break;
        }
        params.a[size_t(c)] = a;
        params.b[size_t(c)] = b * 255.0;
    }
    return params;
}

RgbFrame inpaint(const RgbFrame& composite, const PixelMask& hole, const GameStateFrame* state,
                 const Palette* palette, int iterations) {
    if (hole.width != composite.width || hole.height != composite.height)
        fail("inpaint: hole mask size mismatch");
    int W = composite.width, H = composite.height;
    RgbFrame out = composite;

    // 0 = fixed (non-hole or seeded), 1 = assigned by diffusion, 2 = open.
    std::vector<uint8_t> status(size_t(W) * H, 0);
    std::vector<double> val(size_t(W) * H * 3, 0.0);
    size_t open_count = 0;
    for (int y = 0; y < H; ++y)
        for (int x = 0; x < W; ++x) {
            size_t i = size_t(y) * W + x;
            const uint8_t* px = out.at(x, y);
            val[i * 3] = px[0];
            val[i * 3 + 1] = px[1];
            val[i * 3 + 2] = px[2];
            if (!hole.at(x, y)) continue;

            // Occupied state cells seed their palette color into the hole.
            bool seeded = false;
            if (state && palette && state->width > 0 && state->height > 0) {
                int cx = int(size_t(x) * state->width / W);
                int cy = int(size_t(y) * state->height / H);
                if (state->cell_occupied(cx, cy)) {
                    auto it = palette->find(state->color_index[state->idx(cx, cy)]);
                    if (it == palette->end())
                        fail("inpaint: unknown color index in game state");
                    val[i * 3] = it->second[0];
                    val[i * 3 + 1] = it->second[1];
                    val[i * 3 + 2] = it->second[2];
                    seeded = true;
                }
            }
            if (!seeded) {
                status[i] = 2;
                ++open_count;
            }
        }

    if (open_count > 0) {
        std::vector<uint8_t> next_status = status;
        std::vector<double> next_val = val;
        const int dx[4] = {1, -1, 0, 0};
        const int dy[4] = {0, 0, 1, -1};
        for (int it = 0; it < iterations; ++it) {
            for (int y = 0; y < H; ++y)
                for (int x = 0; x < W; ++x) {
                    size_t i = size_t(y) * W + x;
                    if (status[i] == 0 && next_status[i] == 0) continue;
                    if (status[i] == 0) continue;
                    double sr = 0, sg = 0, sb = 0;
                    int cnt = 0;
                    for (int k = 0; k < 4; ++k) {
                        int nx = x + dx[k], ny = y + dy[k];
                        if (nx < 0 || nx >= W || ny < 0 || ny >= H) continue;
                        size_t j = size_t(ny) * W + nx;
                        if (status[j] == 2) continue; // neighbor still empty
                        sr += val[j * 3];
                        sg += val[j * 3 + 1];
                        sb += val[j * 3 + 2];
                        ++cnt;
                    }
                    if (cnt == 0) continue; // front has not reached this pixel
                    next_val[i * 3] = sr / cnt;
                    next_val[i * 3 + 1] = sg / cnt;
                    next_val[i * 3 + 2] = sb / cnt;
                    next_status[i] = 1;
                }
            val.swap(next_val);
            status.swap(next_status);
            next_val = val;
            next_status = status;
        }
    }

    for (int y = 0; y < H; ++y)
        for (int x = 0; x < W; ++x) {
            size_t i = size_t(y) * W + x;
            if (!hole.at(x, y)) continue;
            uint8_t* px = out.at(x, y);
            if (status[i] == 2) {
                // Never reached by any information: fall back to mid-gray.
                px[0] = px[1] = px[2] = 128;
            } else {
                px[0] = clamp_u8(val[i * 3]);
                px[1] = clamp_u8(val[i * 3 + 1]);
                px[2] = clamp_u8(val[i * 3 + 2]);
            }
        }
    return out;
}

namespace {

// Shared tail of the recovery pipeline once a state-resolution flow exists.
RecoveryResult run_recovery(const FlowField& state_flow, const RgbFrame& prev_frame,
                            const RgbFrame* partial_frame, const CorruptionMask* partial_mask,
                            const GameStateFrame* seed_state, const Palette* palette,
                            const RecoverConfig& cfg) {
    if ((partial_frame == nullptr) != (partial_mask == nullptr))
        fail("recover: partial frame and mask must be provided together");
    int W = prev_frame.width, H = prev_frame.height;
    if (partial_frame && !partial_frame->same_size(prev_frame))
        fail("recover: partial frame size mismatch");
    if (partial_mask &&
        (partial_mask->cells_w != W / kCellSize || partial_mask->cells_h != H / kCellSize))
        fail("recover: partial mask geometry mismatch");

    FlowField flow = upsample_flow(state_flow, W, H);
    WarpOutput warp = warp_frame(prev_frame, flow);

    EnhanceParams params;
    if (partial_frame) {
        PixelMask overlap(W, H, 0);
        for (int y = 0; y < H; ++y)
            for (int x = 0; x < W; ++x)
                if (warp.coverage.at(x, y) &&
                    !partial_mask->at(x / kCellSize, y / kCellSize))
                    overlap.at(x, y) = 1;
        params = fit_enhance(warp.frame, *partial_frame, overlap, cfg.enhance);
    }

    RgbFrame composed(W, H);
    PixelMask hole(W, H, 0);
    for (int y = 0; y < H; ++y)
        for (int x = 0; x < W; ++x) {
            if (warp.coverage.at(x, y)) {
                const uint8_t* s = warp.frame.at(x, y);
                uint8_t* d = composed.at(x, y);
                for (int c = 0; c < 3; ++c)
                    d[c] = clamp_u8(params.a[size_t(c)] * s[c] + params.b[size_t(c)]);
            } else {
                hole.at(x, y) = 1;
            }
        }

    RecoveryResult result;
    result.frame = inpaint(composed, hole, seed_state, palette, cfg.inpaint_iterations);
    result.coverage = warp.coverage;
    result.enhance = params;
    result.coverage_fraction =
        double(warp.coverage.count_set()) / (double(W) * double(H));

    if (partial_frame) {
        // Correctly received sub-blocks are authoritative.
        for (int y = 0; y < H; ++y)
            for (int x = 0; x < W; ++x)
                if (!partial_mask->at(x / kCellSize, y / kCellSize)) {
                    const uint8_t* s = partial_frame->at(x, y);
                    uint8_t* d = result.frame.at(x, y);
                    d[0] = s[0];
                    d[1] = s[1];
                    d[2] = s[2];
                }
    }
    return result;
}

GrayImage downscale_luma(const RgbFrame& frame, int tw, int th) {
    GrayImage src = to_luma(frame);
    GrayImage out(tw, th);
    for (int y = 0; y < th; ++y)
        for (int x = 0; x < tw; ++x) {
            double sx = (x + 0.5) * double(src.width) / tw - 0.5;
            double sy = (y + 0.5) * double(src.height) / th - 0.5;
            out.at(x, y) = bilinear_clamped(src, sx, sy) / 255.f;
        }
    return out;
}

} // namespace

RecoveryResult recover(const RecoveryInput& input, const RecoverConfig& cfg) {
    if (!input.prev_state || !input.curr_state || !input.palette || !input.prev_frame)
        fail("recover: states, palette and previous frame are required");
    FlowField flow = estimate_flow(*input.prev_state, *input.curr_state, *input.palette,
                                   cfg.flow_levels, cfg.lk_iterations);
    return run_recovery(flow, *input.prev_frame, input.partial_frame, input.partial_mask,
                        input.curr_state, input.palette, cfg);
}

RecoveryResult recover_from_frames(const RgbFrame& prev_prev_frame, const RgbFrame& prev_frame,
                                   const RgbFrame* partial_frame,
                                   const CorruptionMask* partial_mask, int state_w, int state_h,
                                   const RecoverConfig& cfg) {
    if (!prev_prev_frame.same_size(prev_frame)) fail("recover: previous frames size mismatch");
    GrayImage a = downscale_luma(prev_prev_frame, state_w, state_h);
    GrayImage b = downscale_luma(prev_frame, state_w, state_h);
    // The t-2 -> t-1 motion stands in for t-1 -> t (constant velocity).
    FlowField flow = estimate_flow_luma(a, b, cfg.flow_levels, cfg.lk_iterations);
    return run_recovery(flow, prev_frame, partial_frame, partial_mask, nullptr, nullptr, cfg);
}

} // namespace statecast
