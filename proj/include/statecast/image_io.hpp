#pragma once

#include <string>
#include <vector>

#include "statecast/image.hpp"

namespace statecast {

// Binary PPM (P6) / PGM (P5) with maxval 255. Writers always emit the
// canonical "P6\n<w> <h>\n255\n" header so identical frames produce
// identical files; the readers accept arbitrary whitespace and comments.

void save_ppm(const RgbFrame& frame, const std::string& path);
RgbFrame load_ppm(const std::string& path);

void save_pgm(const std::vector<uint8_t>& data, int width, int height, const std::string& path);
std::vector<uint8_t> load_pgm(const std::string& path, int& width, int& height);

// Raw little-endian float32 payloads (depth sidecars).
void save_f32(const std::vector<float>& data, const std::string& path);
std::vector<float> load_f32(const std::string& path, size_t expected_count);

std::string read_file_bytes(const std::string& path);
void write_file_bytes(const std::string& path, const std::string& bytes);

} // namespace statecast
