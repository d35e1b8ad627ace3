#pragma once

#include <cstdint>
#include <string>

#include "sgpad/grid.hpp"

namespace sgpad {

// 8-bit single-channel image files. Colour inputs are converted to gray.
Image load_gray(const std::string& path);
void save_gray(const Image& img, const std::string& path);

// Unsigned 8-bit levels as stored in the file, without the /255 scaling.
Grid load_gray_levels(const std::string& path);

std::uint8_t quantize(double v);

// Writes to a sibling temp file then renames over `path`.
void write_file_atomic(const std::string& path, const std::string& contents);
std::string read_file(const std::string& path);

}  // namespace sgpad
