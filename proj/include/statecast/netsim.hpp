#pragma once

// Trace-driven session simulator. A network trace (generated from a profile
// or loaded from CSV) drives per-packet loss draws and per-frame timing; the
// scheduler decides, frame by frame, whether the decoded frame is displayed,
// a recovery runs, or the previous frame is reused. Four schemes share the
// loop: "recover" (game-state guided), "no-states" (flow from the two
// previous displayed frames), "reuse" (drop corrupt frames, keep the last
// good one), and "fec:<pct>" (redundancy repairs up to a budget of lost
// packets at a byte cost).

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "statecast/codec.hpp"
#include "statecast/gamestate.hpp"
#include "statecast/metrics.hpp"
#include "statecast/recovery.hpp"
#include "statecast/scene.hpp"

namespace statecast {

struct TraceRow {
    double t_ms = 0.0;
    double throughput_mbps = 0.0;
    double loss_rate = 0.0;
    double rtt_ms = 0.0;
};

struct NetworkTrace {
    std::string name;
    uint64_t seed = 0;
    std::vector<TraceRow> rows;

    // Row whose interval covers time t. Fails with "trace shorter than
    // session" when t runs past the last row.
    const TraceRow& row_at(double t_ms) const;
    double row_spacing_ms() const;
};

struct NetworkProfile {
    std::string name;
    double throughput_mbps = 0.0;
    double loss_rate = 0.0;
    double rtt_ms = 0.0;
};

// 4G, 5G, WiFi, LEO (case-insensitive). Fails on anything else.
const NetworkProfile& profile_by_name(const std::string& name);
const std::vector<NetworkProfile>& all_profiles();

// Two-state bursty loss process: rows alternate between a low-loss good
// state and a high-loss bad state; expected bad-state dwell time is
// 1/exit_prob rows. The entry probability is derived so the stationary mean
// hits the profile's loss rate, and the generated rows are then rescaled so
// the sample mean lands on the target as well.
struct GilbertConfig {
    double good_loss = 0.005;
    double bad_loss = 0.9;
    double exit_prob = 1.0 / 3.0;
};

NetworkTrace generate_trace(const std::string& profile, double duration_s, uint64_t seed,
                            const GilbertConfig& gilbert = {});

// CSV with header: t_ms,throughput_mbps,loss_rate,rtt_ms
void save_trace_csv(const NetworkTrace& trace, const std::string& path);
NetworkTrace load_trace_csv(const std::string& path);

// Fixed per-stage latencies, in milliseconds. The RTT comes from the trace.
struct LatencyModel {
    double t_server_render_ms = 3.6;
    double t_server_encode_ms = 4.5;
    double t_client_decode_ms = 7.2;
    double t_inference_ms = 22.0;
    double t_gs_ms = 7.0;
};

struct SchedulerConfig {
    double budget_ms = 80.0;
    double frame_interval_ms = 33.33;
    // Recovery starts when this expires; defaults to budget minus inference
    // so the recovered frame still lands inside the budget.
    std::optional<double> timeout_ms;
    // Default redundancy for the FEC scheme when the scheme string itself
    // does not carry one.
    std::optional<double> fec_overhead;

    double timeout(const LatencyModel& lat) const {
        return timeout_ms ? *timeout_ms : budget_ms - lat.t_inference_ms;
    }
    double deadline_ms() const { return budget_ms + frame_interval_ms; }
};

enum class FrameStatus {
    Delivered,             // clean decode shown before the timeout
    PartialRecovered,      // some real pixels plus recovered or concealed ones
    Predicted,             // nothing usable arrived; fully recovered or reused
    DeliveredLateDiscarded // complete frame, but too late to be useful
};

const char* to_string(FrameStatus status);

struct Scheme {
    enum class Kind { Recover, NoStates, Reuse, Fec };
    Kind kind = Kind::Recover;
    double fec_overhead = 0.0;

    // Accepts "recover", "no-states", "reuse", "fec:<percent>".
    static Scheme parse(const std::string& text);
    std::string label() const;
    bool uses_recovery() const { return kind == Kind::Recover || kind == Kind::NoStates; }
};

struct FrameRecord {
    int frame_index = 0;
    FrameStatus status = FrameStatus::Delivered;
    double arrival_ms = 0.0;
    double display_ms = 0.0;
    bool extraction_triggered = false;
    int packets_total = 0;
    int packets_lost = 0;
    double bytes_sent = 0.0;     // includes redundancy bytes for FEC
    double bytes_overhead = 0.0; // redundancy share of bytes_sent
    double pixel_loss = 0.0;
    double psnr_db = 0.0;
    double ssim = 0.0;
    double psnr_lossless_db = 0.0; // codec reconstruction vs ground truth
};

struct SessionAggregates {
    int frames = 0;
    int delivered = 0;
    int partial_recovered = 0;
    int predicted = 0;
    int late_discarded = 0;
    double mean_psnr_db = 0.0;
    double mean_ssim = 0.0;
    double mean_pixel_loss = 0.0;
    // P(frame not delivered | previous frame not delivered).
    double conditional_loss = 0.0;
    double bytes_sent = 0.0;
    double bytes_overhead = 0.0;
};

SessionAggregates compute_aggregates(const std::vector<FrameRecord>& rows);

struct SessionReport {
    std::string scheme;
    std::string trace_name;
    uint64_t seed = 0;
    std::vector<FrameRecord> rows;
    SessionAggregates aggregates;
};

// Everything about a session that does not depend on the trace, the seed or
// the scheme. Preparing it once lets many simulations share the rendering,
// extraction and encoding work.
struct SessionAssets {
    int width = 0;
    int height = 0;
    int state_width = 0;
    int state_height = 0;
    int frame_count = 0;
    CodecConfig codec;
    Palette palette;
    std::vector<RgbFrame> gt;
    std::vector<GameStateFrame> states;
    EncodeResult enc;
    std::vector<std::vector<Packet>> packets; // per frame, lost flags clear
    std::vector<double> frame_bytes;
    std::vector<double> lossless_psnr;
};

SessionAssets prepare_session_assets(const SceneModel& scene, const CodecConfig& codec,
                                     int downsample_k = 1);

// Replays one session over the trace. The decoder keeps its own reference
// chain: every frame is decoded from the packets that survived, and the mask
// tracks both fresh losses and corruption inherited through references until
// an I frame resets it. Recovery schemes repair the display side only, and
// each displayed frame becomes the warp source for the next recovery.
// capture_frames receives the displayed frame per index; capture_masks the
// validity of its real (non-recovered, non-reused) pixels.
SessionReport simulate_session(const SessionAssets& assets, const NetworkTrace& trace,
                               const SchedulerConfig& sched, const Scheme& scheme,
                               uint64_t seed, const LatencyModel& latency = {},
                               const RecoverConfig& recover_cfg = {},
                               std::vector<RgbFrame>* capture_frames = nullptr,
                               std::vector<CorruptionMask>* capture_masks = nullptr);

SessionReport simulate_session(const SceneModel& scene, const CodecConfig& codec,
                               const NetworkTrace& trace, const SchedulerConfig& sched,
                               const Scheme& scheme, uint64_t seed, int downsample_k = 1,
                               const LatencyModel& latency = {},
                               const RecoverConfig& recover_cfg = {},
                               std::vector<RgbFrame>* capture_frames = nullptr,
                               std::vector<CorruptionMask>* capture_masks = nullptr);

SessionReport fec_baseline(const SessionAssets& assets, const NetworkTrace& trace,
                           const SchedulerConfig& sched, double overhead, uint64_t seed,
                           const LatencyModel& latency = {});

struct BurstRow {
    int run_length = 0;
    int count = 0;
    double mean_psnr_drop = 0.0; // vs the lossless per-frame baseline
};

// Run-length histogram of consecutive non-delivered frames.
std::vector<BurstRow> burst_report(const SessionReport& report);

void save_report_csv(const SessionReport& report, const std::string& path);
void save_report_json(const SessionReport& report, const std::string& path);
void save_burst_csv(const std::vector<BurstRow>& rows, const std::string& path);

} // namespace statecast
