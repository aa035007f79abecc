#include "statecast/codec.hpp"

#include <algorithm>
#include <climits>
#include <cmath>
#include <cstring>

#include "statecast/error.hpp"
#include "statecast/image_io.hpp"

namespace statecast {

namespace {

// SAD over a 16x16 RGB block with an early-out once the running sum reaches
// `limit` (the result is only compared against limit, so cutting short never
// changes a comparison outcome).
int sad_block(const RgbFrame& a, int ax, int ay, const RgbFrame& b, int bx, int by, int limit) {
    int sad = 0;
    for (int y = 0; y < kMbSize; ++y) {
        const uint8_t* pa = a.at(ax, ay + y);
        const uint8_t* pb = b.at(bx, by + y);
        for (int i = 0; i < kMbSize * 3; ++i) sad += std::abs(int(pa[i]) - int(pb[i]));
        if (sad >= limit) return sad;
    }
    return sad;
}

int16_t quantize(int value, int q) {
    return int16_t(std::lround(double(value) / q));
}

void rebuild_macroblock(const EncodedFrame& ef, int mb_index, const RgbFrame* ref, int q,
                        RgbFrame& out) {
    const Macroblock& mb = ef.macroblocks[mb_index];
    int bx = mb_index % ef.mb_cols;
    int by = mb_index / ef.mb_cols;
    int px0 = bx * kMbSize;
    int py0 = by * kMbSize;

    if (mb.mode == MbMode::Intra) {
        for (int y = 0; y < kMbSize; ++y) {
            uint8_t* dst = out.at(px0, py0 + y);
            const int16_t* res = &mb.residual[size_t(y) * kMbSize * 3];
            for (int i = 0; i < kMbSize * 3; ++i) dst[i] = clamp_u8(double(res[i]) * q);
        }
        return;
    }

    int rx0 = px0 - (mb.mode == MbMode::Inter ? mb.mv_dx : 0);
    int ry0 = py0 - (mb.mode == MbMode::Inter ? mb.mv_dy : 0);
    for (int y = 0; y < kMbSize; ++y) {
        uint8_t* dst = out.at(px0, py0 + y);
        const uint8_t* src = ref->at(rx0, ry0 + y);
        if (mb.mode == MbMode::Skip) {
            std::memcpy(dst, src, kMbSize * 3);
        } else {
            const int16_t* res = &mb.residual[size_t(y) * kMbSize * 3];
            for (int i = 0; i < kMbSize * 3; ++i)
                dst[i] = clamp_u8(double(src[i]) + double(res[i]) * q);
        }
    }
}

} // namespace

RgbFrame reconstruct_frame(const EncodedFrame& ef, const RgbFrame* ref, int q, int width,
                           int height) {
    if (ef.kind == 'P' && !ref) fail("reconstruct: P frame without a reference");
    RgbFrame out(width, height);
    for (size_t i = 0; i < ef.macroblocks.size(); ++i)
        rebuild_macroblock(ef, int(i), ref, q, out);
    return out;
}

EncodeResult encode(const std::vector<RgbFrame>& frames, const CodecConfig& cfg) {
    if (frames.empty()) fail("encode: no frames");
    if (cfg.gop < 1) fail("encode: gop must be >= 1");
    if (cfg.q < 1) fail("encode: q must be >= 1");
    if (cfg.search_range < 0 || cfg.search_range > 127)
        fail("encode: search range out of range");
    int W = frames[0].width, H = frames[0].height;
    if (W % kMbSize || H % kMbSize || W == 0 || H == 0)
        fail("encode: frame size must be a positive multiple of 16");
    for (const auto& f : frames)
        if (f.width != W || f.height != H) fail("encode: frames differ in size");

    EncodeResult result;
    result.width = W;
    result.height = H;
    int mb_cols = W / kMbSize, mb_rows = H / kMbSize;

    const RgbFrame* prev_recon = nullptr;
    for (size_t fi = 0; fi < frames.size(); ++fi) {
        const RgbFrame& src = frames[fi];
        EncodedFrame ef;
        ef.frame_index = int(fi);
        ef.kind = (fi % size_t(cfg.gop) == 0) ? 'I' : 'P';
        ef.mb_cols = mb_cols;
        ef.mb_rows = mb_rows;
        ef.macroblocks.resize(size_t(mb_cols) * mb_rows);

        for (int by = 0; by < mb_rows; ++by) {
            for (int bx = 0; bx < mb_cols; ++bx) {
                Macroblock& mb = ef.macroblocks[size_t(by) * mb_cols + bx];
                int px0 = bx * kMbSize, py0 = by * kMbSize;

                if (ef.kind == 'I') {
                    mb.mode = MbMode::Intra;
                    mb.residual.resize(size_t(kMbSize) * kMbSize * 3);
                    for (int y = 0; y < kMbSize; ++y) {
                        const uint8_t* p = src.at(px0, py0 + y);
                        int16_t* res = &mb.residual[size_t(y) * kMbSize * 3];
                        for (int i = 0; i < kMbSize * 3; ++i) res[i] = quantize(p[i], cfg.q);
                    }
                    continue;
                }

                int zero_sad = sad_block(src, px0, py0, *prev_recon, px0, py0, INT_MAX);
                if (zero_sad <= cfg.skip_threshold) {
                    mb.mode = MbMode::Skip;
                    continue;
                }

                // Full search over in-bounds reference regions; the
                // zero-motion candidate seeds the search so ties resolve
                // toward no motion, then scan order breaks the rest.
                int best_sad = zero_sad, best_dx = 0, best_dy = 0;
                int R = cfg.search_range;
                int dx_lo = std::max(-R, px0 - (W - kMbSize)), dx_hi = std::min(R, px0);
                int dy_lo = std::max(-R, py0 - (H - kMbSize)), dy_hi = std::min(R, py0);
                for (int dy = dy_lo; dy <= dy_hi; ++dy) {
                    for (int dx = dx_lo; dx <= dx_hi; ++dx) {
                        if (dx == 0 && dy == 0) continue;
                        int sad = sad_block(src, px0, py0, *prev_recon, px0 - dx, py0 - dy,
                                            best_sad);
                        if (sad < best_sad) {
                            best_sad = sad;
                            best_dx = dx;
                            best_dy = dy;
                        }
                    }
                }

                mb.mode = MbMode::Inter;
                mb.mv_dx = int8_t(best_dx);
                mb.mv_dy = int8_t(best_dy);
                mb.residual.resize(size_t(kMbSize) * kMbSize * 3);
                for (int y = 0; y < kMbSize; ++y) {
                    const uint8_t* p = src.at(px0, py0 + y);
                    const uint8_t* r = prev_recon->at(px0 - best_dx, py0 - best_dy + y);
                    int16_t* res = &mb.residual[size_t(y) * kMbSize * 3];
                    for (int i = 0; i < kMbSize * 3; ++i)
                        res[i] = quantize(int(p[i]) - int(r[i]), cfg.q);
                }
            }
        }

        result.reconstructions.push_back(reconstruct_frame(ef, prev_recon, cfg.q, W, H));
        result.frames.push_back(std::move(ef));
        prev_recon = &result.reconstructions.back();
    }
    return result;
}

int macroblock_cost(const Macroblock& mb) {
    int cost = 4;
    if (mb.mode == MbMode::Inter) cost += 2;
    if (!mb.residual.empty()) {
        int nonzero_pixels = 0;
        for (int p = 0; p < kMbSize * kMbSize; ++p) {
            const int16_t* v = &mb.residual[size_t(p) * 3];
            if (v[0] || v[1] || v[2]) ++nonzero_pixels;
        }
        cost += 2 * nonzero_pixels;
    }
    return cost;
}

std::vector<Packet> packetize(EncodedFrame& frame, int mtu, int first_packet_id) {
    if (mtu < 64) fail("packetize: mtu must be >= 64");
    frame.packet_map.clear();
    std::vector<Packet> packets;

    int current_bytes = 0;
    int range_start = 0;
    auto flush = [&](int end_mb) {
        if (end_mb == range_start) return;
        Packet pkt;
        pkt.packet_id = first_packet_id + int(packets.size());
        pkt.frame_index = frame.frame_index;
        pkt.payload_bytes = current_bytes;
        frame.packet_map.push_back({pkt.packet_id, range_start, end_mb - range_start});
        packets.push_back(pkt);
        range_start = end_mb;
        current_bytes = 0;
    };

    for (size_t i = 0; i < frame.macroblocks.size(); ++i) {
        int cost = macroblock_cost(frame.macroblocks[i]);
        if (cost > mtu)
            fail("packetize: macroblock too large (" + std::to_string(cost) + " bytes > mtu " +
                 std::to_string(mtu) + ")");
        if (current_bytes + cost > mtu) flush(int(i));
        current_bytes += cost;
    }
    flush(int(frame.macroblocks.size()));
    return packets;
}

double pixel_loss_rate(const CorruptionMask& mask) {
    if (mask.corrupt.empty()) return 0.0;
    return double(mask.corrupt_count()) / double(mask.corrupt.size());
}

void save_mask(const CorruptionMask& mask, const std::string& path) {
    std::vector<uint8_t> gray(mask.corrupt.size());
    for (size_t i = 0; i < gray.size(); ++i) gray[i] = mask.corrupt[i] ? 0 : 255;
    save_pgm(gray, mask.cells_w, mask.cells_h, path);
}

CorruptionMask load_mask(const std::string& path) {
    int w = 0, h = 0;
    auto gray = load_pgm(path, w, h);
    CorruptionMask mask(w, h);
    for (size_t i = 0; i < gray.size(); ++i) mask.corrupt[i] = gray[i] == 0 ? 1 : 0;
    return mask;
}

void MaskCache::push(int frame_index, CorruptionMask mask) {
    entries_.emplace_back(frame_index, std::move(mask));
    while (int(entries_.size()) > capacity_) entries_.pop_front();
}

const CorruptionMask* MaskCache::find(int frame_index) const {
    for (const auto& [idx, mask] : entries_)
        if (idx == frame_index) return &mask;
    return nullptr;
}

std::vector<int> MaskCache::cached_frames() const {
    std::vector<int> out;
    for (const auto& [idx, mask] : entries_) out.push_back(idx);
    std::sort(out.begin(), out.end());
    return out;
}

DecodeOutput decode_with_mask(const EncodedFrame& ef, const std::vector<Packet>& packets,
                              const RgbFrame* ref_frame, const CorruptionMask* ref_mask,
                              int q, MaskCache& cache) {
    if (ef.packet_map.empty() && !ef.macroblocks.empty())
        fail("decode: frame was not packetized");
    if (ef.kind == 'P' && !ref_frame) fail("decode: P frame without a reference");

    int W = ef.mb_cols * kMbSize, H = ef.mb_rows * kMbSize;
    DecodeOutput out{RgbFrame(W, H), CorruptionMask::for_frame(W, H)};

    // Resolve per-macroblock packet loss through the packet map.
    std::vector<uint8_t> mb_lost(ef.macroblocks.size(), 0);
    for (const auto& range : ef.packet_map) {
        const Packet* pkt = nullptr;
        for (const auto& p : packets)
            if (p.packet_id == range.packet_id) {
                pkt = &p;
                break;
            }
        if (!pkt) fail("decode: packet " + std::to_string(range.packet_id) + " missing");
        if (pkt->lost)
            for (int i = 0; i < range.mb_count; ++i) mb_lost[size_t(range.first_mb) + i] = 1;
    }

    const int cells_per_mb = kMbSize / kCellSize;
    for (size_t mi = 0; mi < ef.macroblocks.size(); ++mi) {
        const Macroblock& mb = ef.macroblocks[mi];
        int bx = int(mi) % ef.mb_cols;
        int by = int(mi) / ef.mb_cols;
        int px0 = bx * kMbSize, py0 = by * kMbSize;

        bool corrupt = mb_lost[mi] != 0;
        if (!corrupt && ef.kind == 'P' && mb.mode != MbMode::Intra && ref_mask) {
            // The reference region is corrupt if any 4x4 cell it overlaps is.
            int rx0 = px0 - (mb.mode == MbMode::Inter ? mb.mv_dx : 0);
            int ry0 = py0 - (mb.mode == MbMode::Inter ? mb.mv_dy : 0);
            int cx0 = std::max(0, rx0 / kCellSize);
            int cy0 = std::max(0, ry0 / kCellSize);
            int cx1 = std::min(ref_mask->cells_w - 1, (rx0 + kMbSize - 1) / kCellSize);
            int cy1 = std::min(ref_mask->cells_h - 1, (ry0 + kMbSize - 1) / kCellSize);
            for (int cy = cy0; cy <= cy1 && !corrupt; ++cy)
                for (int cx = cx0; cx <= cx1; ++cx)
                    if (ref_mask->at(cx, cy)) {
                        corrupt = true;
                        break;
                    }
        }

        if (!corrupt) {
            rebuild_macroblock(ef, int(mi), ref_frame, q, out.frame);
            continue;
        }

        for (int cy = 0; cy < cells_per_mb; ++cy)
            for (int cx = 0; cx < cells_per_mb; ++cx)
                out.mask.at(bx * cells_per_mb + cx, by * cells_per_mb + cy) = 1;

        // Placeholder content: co-located reference pixels, or mid-gray when
        // there is no reference to borrow from.
        for (int y = 0; y < kMbSize; ++y) {
            uint8_t* dst = out.frame.at(px0, py0 + y);
            if (ef.kind == 'P' && ref_frame) {
                std::memcpy(dst, ref_frame->at(px0, py0 + y), kMbSize * 3);
            } else {
                std::memset(dst, 128, kMbSize * 3);
            }
        }
    }

    cache.push(ef.frame_index, out.mask);
    return out;
}

// ---------------------------------------------------------------------------
// Bitstream container

namespace {

void put_u32(std::string& s, uint32_t v) {
    s.push_back(char(v & 0xff));
    s.push_back(char((v >> 8) & 0xff));
    s.push_back(char((v >> 16) & 0xff));
    s.push_back(char((v >> 24) & 0xff));
}
void put_u16(std::string& s, uint16_t v) {
    s.push_back(char(v & 0xff));
    s.push_back(char((v >> 8) & 0xff));
}

struct Reader {
    const std::string& s;
    size_t pos = 0;
    explicit Reader(const std::string& bytes) : s(bytes) {}

    void need(size_t n) const {
        if (pos + n > s.size()) fail("bitstream: truncated");
    }
    uint8_t u8() {
        need(1);
        return uint8_t(s[pos++]);
    }
    uint16_t u16() {
        need(2);
        uint16_t v = uint16_t(uint8_t(s[pos])) | uint16_t(uint8_t(s[pos + 1])) << 8;
        pos += 2;
        return v;
    }
    uint32_t u32() {
        need(4);
        uint32_t v = uint32_t(uint8_t(s[pos])) | uint32_t(uint8_t(s[pos + 1])) << 8 |
                     uint32_t(uint8_t(s[pos + 2])) << 16 | uint32_t(uint8_t(s[pos + 3])) << 24;
        pos += 4;
        return v;
    }
};

} // namespace

void save_bitstream(const EncodeResult& enc, int gop, int q, const std::string& path) {
    std::string out = "SCV1";
    put_u32(out, uint32_t(enc.width));
    put_u32(out, uint32_t(enc.height));
    put_u32(out, uint32_t(gop));
    put_u32(out, uint32_t(q));
    put_u32(out, uint32_t(enc.frames.size()));
    for (const auto& ef : enc.frames) {
        put_u32(out, uint32_t(ef.frame_index));
        out.push_back(ef.kind);
        put_u32(out, uint32_t(ef.mb_cols));
        put_u32(out, uint32_t(ef.mb_rows));
        for (const auto& mb : ef.macroblocks) {
            out.push_back(char(uint8_t(mb.mode)));
            if (mb.mode == MbMode::Inter) {
                out.push_back(char(mb.mv_dx));
                out.push_back(char(mb.mv_dy));
            }
            if (mb.mode != MbMode::Skip) {
                uint16_t nz = 0;
                for (int16_t v : mb.residual) nz += (v != 0);
                put_u16(out, nz);
                for (size_t i = 0; i < mb.residual.size(); ++i)
                    if (mb.residual[i]) {
                        put_u16(out, uint16_t(i));
                        put_u16(out, uint16_t(mb.residual[i]));
                    }
            }
        }
        put_u32(out, uint32_t(ef.packet_map.size()));
        for (const auto& range : ef.packet_map) {
            put_u32(out, uint32_t(range.packet_id));
            put_u32(out, uint32_t(range.first_mb));
            put_u32(out, uint32_t(range.mb_count));
        }
    }
    write_file_bytes(path, out);
}

Bitstream load_bitstream(const std::string& path) {
    std::string bytes = read_file_bytes(path);
    Reader rd(bytes);
    rd.need(4);
    if (bytes.compare(0, 4, "SCV1") != 0) fail("bitstream: bad magic: " + path);
    rd.pos = 4;

    Bitstream bs;
    bs.width = int(rd.u32());
    bs.height = int(rd.u32());
    bs.gop = int(rd.u32());
    bs.q = int(rd.u32());
    uint32_t frame_count = rd.u32();
    for (uint32_t f = 0; f < frame_count; ++f) {
        EncodedFrame ef;
        ef.frame_index = int(rd.u32());
        ef.kind = char(rd.u8());
        if (ef.kind != 'I' && ef.kind != 'P') fail("bitstream: bad frame kind");
        ef.mb_cols = int(rd.u32());
        ef.mb_rows = int(rd.u32());
        size_t mb_count = size_t(ef.mb_cols) * ef.mb_rows;
        ef.macroblocks.resize(mb_count);
        for (auto& mb : ef.macroblocks) {
            uint8_t mode = rd.u8();
            if (mode > 2) fail("bitstream: bad macroblock mode");
            mb.mode = MbMode(mode);
            if (mb.mode == MbMode::Inter) {
                mb.mv_dx = int8_t(rd.u8());
                mb.mv_dy = int8_t(rd.u8());
            }
            if (mb.mode != MbMode::Skip) {
                mb.residual.assign(size_t(kMbSize) * kMbSize * 3, 0);
                uint16_t nz = rd.u16();
                for (uint16_t i = 0; i < nz; ++i) {
                    uint16_t pos = rd.u16();
                    int16_t val = int16_t(rd.u16());
                    if (pos >= mb.residual.size()) fail("bitstream: residual index range");
                    mb.residual[pos] = val;
                }
            }
        }
        uint32_t ranges = rd.u32();
        for (uint32_t i = 0; i < ranges; ++i) {
            PacketRange range;
            range.packet_id = int(rd.u32());
            range.first_mb = int(rd.u32());
            range.mb_count = int(rd.u32());
            ef.packet_map.push_back(range);
        }
        bs.frames.push_back(std::move(ef));
    }
    return bs;
}

} // namespace statecast
