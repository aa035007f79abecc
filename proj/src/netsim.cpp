#include "statecast/netsim.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>

#include "statecast/error.hpp"
#include "statecast/image_io.hpp"
#include "statecast/rng.hpp"

#include <json.hpp>

namespace statecast {

const TraceRow& NetworkTrace::row_at(double t) const {
    if (rows.empty()) fail("trace is empty");
    if (t < rows.front().t_ms) fail("trace starts after the requested time");
    if (t >= rows.back().t_ms + row_spacing_ms()) fail("trace shorter than session");
    size_t lo = 0, hi = rows.size() - 1;
    while (lo < hi) {
        size_t mid = (lo + hi + 1) / 2;
        if (rows[mid].t_ms <= t)
            lo = mid;
        else
            hi = mid - 1;
    }
    return rows[lo];
}

double NetworkTrace::row_spacing_ms() const {
    if (rows.size() < 2) return 100.0;
    return rows[1].t_ms - rows[0].t_ms;
}

const std::vector<NetworkProfile>& all_profiles() {
    static const std::vector<NetworkProfile> profiles = {
        {"4G", 32.5, 0.032, 36.0},
        {"5G", 61.7, 0.023, 30.0},
        {"WiFi", 72.8, 0.009, 15.0},
        {"LEO", 28.9, 0.094, 42.0},
    };
    return profiles;
}

const NetworkProfile& profile_by_name(const std::string& name) {
    auto lower = [](std::string s) {
        for (char& c : s) c = char(std::tolower(uint8_t(c)));
        return s;
    };
    std::string want = lower(name);
    for (const NetworkProfile& p : all_profiles())
        if (lower(p.name) == want) return p;
    fail("unknown profile '" + name + "' (expected 4G, 5G, WiFi or LEO)");
}

NetworkTrace generate_trace(const std::string& profile_name, double duration_s, uint64_t seed,
                            const GilbertConfig& gilbert) {
    const NetworkProfile& prof = profile_by_name(profile_name);
    if (duration_s < 10.0) fail("trace duration must be at least 10 seconds");
    if (!(gilbert.bad_loss > gilbert.good_loss))
        fail("gilbert bad-state loss must exceed the good-state loss");

    size_t profile_tag = 0;
    for (size_t i = 0; i < all_profiles().size(); ++i)
        if (all_profiles()[i].name == prof.name) profile_tag = i + 1;
    Rng rng(hash_mix(seed, 0x747261636564ULL, uint64_t(profile_tag)));

    // Stationary bad-state probability that makes the chain's mean loss hit
    // the profile target, then the matching entry probability.
    double p_bad = (prof.loss_rate - gilbert.good_loss) / (gilbert.bad_loss - gilbert.good_loss);
    p_bad = std::clamp(p_bad, 0.0, 0.99);
    double p_enter = p_bad > 0 ? gilbert.exit_prob * p_bad / (1.0 - p_bad) : 0.0;
    p_enter = std::clamp(p_enter, 0.0, 1.0);

    NetworkTrace trace;
    trace.name = prof.name;
    trace.seed = seed;
    int n = int(std::llround(duration_s * 10.0));
    trace.rows.reserve(size_t(n));

    bool bad = rng.uniform01() < p_bad;
    for (int i = 0; i < n; ++i) {
        TraceRow row;
        row.t_ms = 100.0 * i;
        row.throughput_mbps = std::max(0.1, rng.lognormal_mean_cv(prof.throughput_mbps, 0.3));
        row.rtt_ms = std::max(1.0, rng.lognormal_mean_cv(prof.rtt_ms, 0.1));
        row.loss_rate = bad ? gilbert.bad_loss : gilbert.good_loss;
        trace.rows.push_back(row);
        if (bad)
            bad = !(rng.uniform01() < gilbert.exit_prob);
        else
            bad = rng.uniform01() < p_enter;
    }

    // Finite samples of a bursty chain wander off the target mean. Rescaling
    // every row would drag the quiet rows away from their nominal rate and
    // distort per-frame behavior, so instead flip whole rows between the two
    // states until the mean lands on the target, letting one boundary row
    // absorb the fractional remainder. Flip order is a seeded hash so the
    // choice is deterministic but varies with the seed.
    {
        double mean = 0.0;
        for (const TraceRow& r : trace.rows) mean += r.loss_rate;
        mean /= double(n);
        double span = gilbert.bad_loss - gilbert.good_loss;
        double want = (prof.loss_rate - mean) * double(n) / span;  // signed row count
        std::vector<int> order(trace.rows.size());
        for (int i = 0; i < n; ++i) order[size_t(i)] = i;
        std::sort(order.begin(), order.end(), [&](int a, int b) {
            double ha = hash_uniform01(seed, uint64_t(a), 0x666c6970ULL);
            double hb = hash_uniform01(seed, uint64_t(b), 0x666c6970ULL);
            if (ha != hb) return ha < hb;
            return a < b;
        });
        double from = want > 0 ? gilbert.good_loss : gilbert.bad_loss;
        double to = want > 0 ? gilbert.bad_loss : gilbert.good_loss;
        double remain = std::abs(want);
        for (int idx : order) {
            if (remain <= 0.0) break;
            TraceRow& row = trace.rows[size_t(idx)];
            if (row.loss_rate != from) continue;
            if (remain >= 1.0) {
                row.loss_rate = to;
                remain -= 1.0;
            } else {
                row.loss_rate = from + (to - from) * remain;
                remain = 0.0;
            }
        }
    }
    return trace;
}

void save_trace_csv(const NetworkTrace& trace, const std::string& path) {
    std::string out = "t_ms,throughput_mbps,loss_rate,rtt_ms\n";
    char buf[160];
    for (const TraceRow& r : trace.rows) {
        std::snprintf(buf, sizeof buf, "%.3f,%.6f,%.6f,%.6f\n", r.t_ms, r.throughput_mbps,
                      r.loss_rate, r.rtt_ms);
        out += buf;
    }
    write_file_bytes(path, out);
}

NetworkTrace load_trace_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) fail("cannot open trace file " + path);
    std::string line;
    if (!std::getline(in, line)) fail(path + ": empty trace file");
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line != "t_ms,throughput_mbps,loss_rate,rtt_ms")
        fail(path + ":1: unexpected trace header '" + line + "'");

    NetworkTrace trace;
    size_t slash = path.find_last_of('/');
    std::string stem = slash == std::string::npos ? path : path.substr(slash + 1);
    size_t dot = stem.find_last_of('.');
    trace.name = dot == std::string::npos ? stem : stem.substr(0, dot);

    int lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        TraceRow row;
        double* fields[4] = {&row.t_ms, &row.throughput_mbps, &row.loss_rate, &row.rtt_ms};
        std::stringstream ss(line);
        std::string cell;
        for (int i = 0; i < 4; ++i) {
            if (!std::getline(ss, cell, ','))
                fail(path + ":" + std::to_string(lineno) + ": expected 4 columns");
            try {
                *fields[i] = std::stod(cell);
            } catch (const std::exception&) {
                fail(path + ":" + std::to_string(lineno) + ": bad number '" + cell + "'");
            }
        }
        if (!trace.rows.empty() && row.t_ms <= trace.rows.back().t_ms)
            fail(path + ":" + std::to_string(lineno) + ": timestamps must be strictly increasing");
        if (row.loss_rate < 0.0 || row.loss_rate > 1.0)
            fail(path + ":" + std::to_string(lineno) + ": loss rate out of [0, 1]");
        if (row.throughput_mbps <= 0.0)
            fail(path + ":" + std::to_string(lineno) + ": throughput must be positive");
        trace.rows.push_back(row);
    }
    if (trace.rows.empty()) fail(path + ": trace has no rows");
    return trace;
}

const char* to_string(FrameStatus status) {
    switch (status) {
    case FrameStatus::Delivered: return "DELIVERED";
    case FrameStatus::PartialRecovered: return "PARTIAL_RECOVERED";
    case FrameStatus::Predicted: return "PREDICTED";
    case FrameStatus::DeliveredLateDiscarded: return "DELIVERED_LATE_DISCARDED";
    }
    return "?";
}

Scheme Scheme::parse(const std::string& text) {
    if (text == "recover") return {Kind::Recover, 0.0};
    if (text == "no-states") return {Kind::NoStates, 0.0};
    if (text == "reuse") return {Kind::Reuse, 0.0};
    if (text.rfind("fec:", 0) == 0) {
        std::string pct = text.substr(4);
        double value = 0.0;
        try {
            size_t used = 0;
            value = std::stod(pct, &used);
            if (used != pct.size()) throw std::invalid_argument(pct);
        } catch (const std::exception&) {
            fail("bad FEC overhead '" + pct + "' in scheme '" + text + "'");
        }
        if (value < 0.0 || value > 100.0)
            fail("FEC overhead must be between 0 and 100 percent");
        return {Kind::Fec, value / 100.0};
    }
    fail("unknown scheme '" + text + "' (expected recover, no-states, reuse or fec:<percent>)");
}

std::string Scheme::label() const {
    switch (kind) {
    case Kind::Recover: return "recover";
    case Kind::NoStates: return "no-states";
    case Kind::Reuse: return "reuse";
    case Kind::Fec: {
        char buf[48];
        double pct = fec_overhead * 100.0;
        if (std::abs(pct - std::round(pct)) < 1e-9)
            std::snprintf(buf, sizeof buf, "fec:%d", int(std::lround(pct)));
        else
            std::snprintf(buf, sizeof buf, "fec:%g", pct);
        return buf;
    }
    }
    return "?";
}

SessionAggregates compute_aggregates(const std::vector<FrameRecord>& rows) {
    SessionAggregates agg;
    agg.frames = int(rows.size());
    int cond_base = 0, cond_hits = 0;
    for (size_t i = 0; i < rows.size(); ++i) {
        const FrameRecord& r = rows[i];
        switch (r.status) {
        case FrameStatus::Delivered: ++agg.delivered; break;
        case FrameStatus::PartialRecovered: ++agg.partial_recovered; break;
        case FrameStatus::Predicted: ++agg.predicted; break;
        case FrameStatus::DeliveredLateDiscarded: ++agg.late_discarded; break;
        }
        agg.mean_psnr_db += r.psnr_db;
        agg.mean_ssim += r.ssim;
        agg.mean_pixel_loss += r.pixel_loss;
        agg.bytes_sent += r.bytes_sent;
        agg.bytes_overhead += r.bytes_overhead;
        if (i > 0 && rows[i - 1].status != FrameStatus::Delivered) {
            ++cond_base;
            if (r.status != FrameStatus::Delivered) ++cond_hits;
        }
    }
    if (!rows.empty()) {
        agg.mean_psnr_db /= double(rows.size());
        agg.mean_ssim /= double(rows.size());
        agg.mean_pixel_loss /= double(rows.size());
    }
    agg.conditional_loss = cond_base > 0 ? double(cond_hits) / cond_base : 0.0;
    return agg;
}

SessionAssets prepare_session_assets(const SceneModel& scene, const CodecConfig& codec,
                                     int downsample_k) {
    if (scene.camera_path.empty()) fail("scene has no camera path");
    SessionAssets assets;
    assets.width = scene.rgb_width;
    assets.height = scene.rgb_height;
    assets.state_width = scene.state_width;
    assets.state_height = scene.state_height;
    assets.frame_count = int(scene.camera_path.size());
    assets.codec = codec;
    assets.palette = scene.palette;

    assets.gt.reserve(size_t(assets.frame_count));
    assets.states.reserve(size_t(assets.frame_count));
    for (int f = 0; f < assets.frame_count; ++f) {
        assets.gt.push_back(render_ground_truth(scene, f));
        assets.states.push_back(
            extract_state(scene, f, downsample_k, scene.state_width, scene.state_height));
    }

    assets.enc = encode(assets.gt, codec);
    assets.packets.resize(size_t(assets.frame_count));
    assets.frame_bytes.resize(size_t(assets.frame_count), 0.0);
    assets.lossless_psnr.resize(size_t(assets.frame_count), 0.0);
    for (int f = 0; f < assets.frame_count; ++f) {
        assets.packets[size_t(f)] = packetize(assets.enc.frames[size_t(f)], codec.mtu);
        double bytes = 0.0;
        for (const Packet& p : assets.packets[size_t(f)]) bytes += p.payload_bytes;
        assets.frame_bytes[size_t(f)] = bytes;
        assets.lossless_psnr[size_t(f)] =
            psnr(assets.enc.reconstructions[size_t(f)], assets.gt[size_t(f)]);
    }
    return assets;
}

namespace {

struct FrameTiming {
    double arrival_ms = 0.0;
    double tx_ms = 0.0;
    const TraceRow* row = nullptr;
};

FrameTiming frame_timing(const SessionAssets& assets, const NetworkTrace& trace,
                         const SchedulerConfig& sched, const LatencyModel& lat, int f,
                         double fec_overhead) {
    FrameTiming t;
    double send_ms = sched.frame_interval_ms * f;
    t.row = &trace.row_at(send_ms);
    double bytes = assets.frame_bytes[size_t(f)] * (1.0 + fec_overhead);
    t.tx_ms = bytes * 8.0 / (t.row->throughput_mbps * 1e6) * 1000.0;
    t.arrival_ms = t.row->rtt_ms / 2.0 + lat.t_server_render_ms + lat.t_server_encode_ms +
                   t.tx_ms + lat.t_client_decode_ms;
    return t;
}

} // namespace

SessionReport simulate_session(const SessionAssets& assets, const NetworkTrace& trace,
                               const SchedulerConfig& sched, const Scheme& scheme,
                               uint64_t seed, const LatencyModel& latency,
                               const RecoverConfig& recover_cfg,
                               std::vector<RgbFrame>* capture_frames,
                               std::vector<CorruptionMask>* capture_masks) {
    if (assets.frame_count <= 0) fail("session has no frames");
    double timeout = sched.timeout(latency);
    double deadline = sched.deadline_ms();
    if (!(timeout > 0.0 && timeout < sched.budget_ms))
        fail("timeout must lie strictly inside the latency budget");
    double fec_overhead = 0.0;
    if (scheme.kind == Scheme::Kind::Fec) {
        fec_overhead = scheme.fec_overhead;
        if (fec_overhead == 0.0 && sched.fec_overhead) fec_overhead = *sched.fec_overhead;
        if (fec_overhead < 0.0 || fec_overhead > 1.0)
            fail("FEC overhead must be within [0, 1]");
    }

    SessionReport report;
    report.scheme = scheme.label();
    report.trace_name = trace.name;
    report.seed = seed;
    report.rows.reserve(size_t(assets.frame_count));
    if (capture_frames) {
        capture_frames->clear();
        capture_frames->reserve(size_t(assets.frame_count));
    }
    if (capture_masks) {
        capture_masks->clear();
        capture_masks->reserve(size_t(assets.frame_count));
    }

    MaskCache cache;
    RgbFrame ref_frame;           // decoder's own reference for the next frame
    CorruptionMask ref_mask;      // its validity, corruption inheritance included
    RgbFrame displayed;           // what the viewer saw last
    bool have_ref = false;

    const int W = assets.width, H = assets.height;
    RgbFrame prev_displayed;      // one frame older than `displayed`

    for (int f = 0; f < assets.frame_count; ++f) {
        const EncodedFrame& ef = assets.enc.frames[size_t(f)];
        FrameTiming timing = frame_timing(assets, trace, sched, latency, f, fec_overhead);

        // Loss draws depend only on (seed, frame, packet), so every scheme
        // sees the same loss pattern for a given trace seed.
        std::vector<Packet> packets = assets.packets[size_t(f)];
        int lost = 0;
        for (Packet& p : packets) {
            p.lost = hash_uniform01(seed, uint64_t(f), uint64_t(p.packet_id)) <
                     timing.row->loss_rate;
            lost += p.lost ? 1 : 0;
        }
        int total = int(packets.size());

        FrameRecord rec;
        rec.frame_index = f;
        rec.arrival_ms = timing.arrival_ms;
        rec.packets_total = total;
        rec.packets_lost = lost;
        rec.bytes_sent = assets.frame_bytes[size_t(f)] * (1.0 + fec_overhead);
        rec.bytes_overhead = assets.frame_bytes[size_t(f)] * fec_overhead;
        rec.psnr_lossless_db = assets.lossless_psnr[size_t(f)];
        rec.extraction_triggered = scheme.uses_recovery() && f > 0 &&
                                   report.rows.back().status != FrameStatus::Delivered;

        RgbFrame shown;
        CorruptionMask shown_mask = CorruptionMask::for_frame(W, H, true);

        if (scheme.uses_recovery()) {
            bool all_lost = lost == total;
            bool on_time = timing.arrival_ms <= timeout;
            bool by_deadline = timing.arrival_ms <= deadline;
            double recovery_display =
                std::max(std::min(timeout, all_lost ? timeout : timing.arrival_ms),
                         latency.t_gs_ms) +
                latency.t_inference_ms;

            const RgbFrame* dec_ref = have_ref ? &ref_frame : nullptr;
            const CorruptionMask* dec_mask = have_ref ? &ref_mask : nullptr;

            auto recover_displayed = [&](const RgbFrame* partial,
                                         const CorruptionMask* pmask) -> RgbFrame {
                if (f == 0) {
                    // Nothing to warp from yet. The concealed decode already
                    // equals background gray in its corrupt regions, so a
                    // broken first frame degrades to that.
                    return partial ? *partial : RgbFrame(W, H, kBackgroundGray);
                }
                if (scheme.kind == Scheme::Kind::Recover) {
                    RecoveryInput in;
                    in.prev_state = &assets.states[size_t(f - 1)];
                    in.curr_state = &assets.states[size_t(f)];
                    in.palette = &assets.palette;
                    in.prev_frame = &displayed;
                    in.partial_frame = partial;
                    in.partial_mask = pmask;
                    return recover(in, recover_cfg).frame;
                }
                const RgbFrame& older = f >= 2 ? prev_displayed : displayed;
                return recover_from_frames(older, displayed, partial, pmask,
                                           assets.state_width, assets.state_height,
                                           recover_cfg)
                    .frame;
            };

            // The decoder always chews through whatever packets survived and
            // keeps its own reference chain; the mask carries both this
            // frame's losses and corruption inherited from earlier ones.
            // Recovery only ever touches the display side.
            DecodeOutput out =
                decode_with_mask(ef, packets, dec_ref, dec_mask, assets.codec.q, cache);
            bool clean = lost == 0 && out.mask.all_valid();

            if (clean && on_time) {
                shown = out.frame;
                shown_mask = out.mask;
                rec.status = FrameStatus::Delivered;
                rec.display_ms = timing.arrival_ms;
                rec.pixel_loss = 0.0;
            } else if (!all_lost && on_time) {
                // Corrupt by the timeout, either from this frame's own losses
                // or inherited through the reference. Valid regions are kept
                // verbatim by the recovery composite.
                rec.pixel_loss = pixel_loss_rate(out.mask);
                shown = recover_displayed(&out.frame, &out.mask);
                shown_mask = out.mask;
                rec.status = FrameStatus::PartialRecovered;
                rec.display_ms = recovery_display;
            } else if (!all_lost && !on_time && by_deadline) {
                // Recovery ran at the timeout; pixels landing before the
                // deadline replace the recovered ones where valid.
                rec.pixel_loss = pixel_loss_rate(out.mask);
                shown = recover_displayed(nullptr, nullptr);
                for (int y = 0; y < H; ++y)
                    for (int x = 0; x < W; ++x)
                        if (!out.mask.at(x / kCellSize, y / kCellSize)) {
                            const uint8_t* s = out.frame.at(x, y);
                            uint8_t* d = shown.at(x, y);
                            d[0] = s[0];
                            d[1] = s[1];
                            d[2] = s[2];
                        }
                shown_mask = out.mask;
                rec.status = FrameStatus::PartialRecovered;
                rec.display_ms = recovery_display;
            } else {
                // Complete loss, or everything arrived after the deadline.
                shown = recover_displayed(nullptr, nullptr);
                rec.pixel_loss = 1.0;
                rec.status = clean ? FrameStatus::DeliveredLateDiscarded
                                   : FrameStatus::Predicted;
                rec.display_ms = recovery_display;
            }

            ref_frame = std::move(out.frame);
            ref_mask = std::move(out.mask);
            have_ref = true;
        } else {
            // Reuse and FEC: no recovery stage. FEC repairs up to
            // floor(overhead * packets) losses at the price of inflated
            // transmission time; an unrepairable or late frame keeps the
            // previous image on screen. Without a recovery fallback there is
            // nothing on screen to upgrade after the fact, so the frame must
            // be complete within the display budget itself; the post-timeout
            // grace window only exists for the recovery path. The decoder
            // still consumes whatever it has, so its reference chain degrades
            // exactly as the masks describe and heals at the next I frame.
            int allowed = int(std::floor(fec_overhead * total));
            bool repairable = lost <= allowed;
            bool by_deadline = timing.arrival_ms <= sched.budget_ms;

            std::vector<Packet> seen = packets;
            if (repairable)
                for (Packet& p : seen) p.lost = false;
            DecodeOutput out =
                decode_with_mask(ef, seen, have_ref ? &ref_frame : nullptr,
                                 have_ref ? &ref_mask : nullptr, assets.codec.q, cache);

            if (repairable && by_deadline) {
                shown = out.frame;
                shown_mask = out.mask;
                rec.pixel_loss = pixel_loss_rate(out.mask);
                rec.status = out.mask.all_valid() ? FrameStatus::Delivered
                                                  : FrameStatus::PartialRecovered;
                rec.display_ms = timing.arrival_ms;
            } else {
                shown = have_ref ? displayed : RgbFrame(W, H, kBackgroundGray);
                rec.pixel_loss = 1.0;
                rec.status = repairable ? FrameStatus::DeliveredLateDiscarded
                                        : FrameStatus::Predicted;
                rec.display_ms = sched.budget_ms;
            }
            ref_frame = std::move(out.frame);
            ref_mask = std::move(out.mask);
            have_ref = true;
        }

        rec.psnr_db = psnr(shown, assets.gt[size_t(f)]);
        rec.ssim = ssim(shown, assets.gt[size_t(f)]);
        report.rows.push_back(rec);

        prev_displayed = std::move(displayed);
        displayed = std::move(shown);
        if (capture_frames) capture_frames->push_back(displayed);
        if (capture_masks) capture_masks->push_back(std::move(shown_mask));
    }

    report.aggregates = compute_aggregates(report.rows);
    return report;
}

SessionReport simulate_session(const SceneModel& scene, const CodecConfig& codec,
                               const NetworkTrace& trace, const SchedulerConfig& sched,
                               const Scheme& scheme, uint64_t seed, int downsample_k,
                               const LatencyModel& latency, const RecoverConfig& recover_cfg,
                               std::vector<RgbFrame>* capture_frames,
                               std::vector<CorruptionMask>* capture_masks) {
    SessionAssets assets = prepare_session_assets(scene, codec, downsample_k);
    return simulate_session(assets, trace, sched, scheme, seed, latency, recover_cfg,
                            capture_frames, capture_masks);
}

SessionReport fec_baseline(const SessionAssets& assets, const NetworkTrace& trace,
                           const SchedulerConfig& sched, double overhead, uint64_t seed,
                           const LatencyModel& latency) {
    if (overhead < 0.0 || overhead > 1.0) fail("FEC overhead must be within [0, 1]");
    Scheme scheme{Scheme::Kind::Fec, overhead};
    return simulate_session(assets, trace, sched, scheme, seed, latency);
}

std::vector<BurstRow> burst_report(const SessionReport& report) {
    // Gather maximal runs of consecutive non-delivered frames.
    std::map<int, std::pair<int, double>> buckets; // length -> (count, drop sum)
    size_t i = 0;
    const auto& rows = report.rows;
    while (i < rows.size()) {
        if (rows[i].status == FrameStatus::Delivered) {
            ++i;
            continue;
        }
        size_t j = i;
        double drop = 0.0;
        while (j < rows.size() && rows[j].status != FrameStatus::Delivered) {
            drop += rows[j].psnr_lossless_db - rows[j].psnr_db;
            ++j;
        }
        int len = int(j - i);
        auto& bucket = buckets[len];
        bucket.first += 1;
        bucket.second += drop / len;
        i = j;
    }

    std::vector<BurstRow> out;
    for (const auto& [len, data] : buckets)
        out.push_back({len, data.first, data.second / data.first});
    return out;
}

void save_report_csv(const SessionReport& report, const std::string& path) {
    std::string out =
        "frame_index,scheme,status,arrival_ms,display_ms,extraction_triggered,"
        "packets_total,packets_lost,bytes_sent,pixel_loss,psnr_db,ssim,psnr_lossless_db\n";
    char buf[320];
    for (const FrameRecord& r : report.rows) {
        std::snprintf(buf, sizeof buf, "%d,%s,%s,%.6f,%.6f,%d,%d,%d,%.1f,%.6f,%.6f,%.6f,%.6f\n",
                      r.frame_index, report.scheme.c_str(), to_string(r.status), r.arrival_ms,
                      r.display_ms, r.extraction_triggered ? 1 : 0, r.packets_total,
                      r.packets_lost, r.bytes_sent, r.pixel_loss, r.psnr_db, r.ssim,
                      r.psnr_lossless_db);
        out += buf;
    }
    write_file_bytes(path, out);
}

void save_report_json(const SessionReport& report, const std::string& path) {
    nlohmann::json j;
    j["scheme"] = report.scheme;
    j["trace"] = report.trace_name;
    j["seed"] = report.seed;
    j["frames"] = report.aggregates.frames;
    j["status_counts"] = {
        {"DELIVERED", report.aggregates.delivered},
        {"PARTIAL_RECOVERED", report.aggregates.partial_recovered},
        {"PREDICTED", report.aggregates.predicted},
        {"DELIVERED_LATE_DISCARDED", report.aggregates.late_discarded},
    };
    j["mean_psnr_db"] = report.aggregates.mean_psnr_db;
    j["mean_ssim"] = report.aggregates.mean_ssim;
    j["mean_pixel_loss"] = report.aggregates.mean_pixel_loss;
    j["conditional_loss"] = report.aggregates.conditional_loss;
    j["bytes_sent"] = report.aggregates.bytes_sent;
    j["bytes_overhead"] = report.aggregates.bytes_overhead;
    std::string text = j.dump(2);
    text += '\n';
    write_file_bytes(path, text);
}

void save_burst_csv(const std::vector<BurstRow>& rows, const std::string& path) {
    std::string out = "run_length,count,mean_psnr_drop_db\n";
    char buf[96];
    for (const BurstRow& r : rows) {
        std::snprintf(buf, sizeof buf, "%d,%d,%.6f\n", r.run_length, r.count, r.mean_psnr_drop);
        out += buf;
    }
    write_file_bytes(path, out);
}

} // namespace statecast
