#pragma once

#include <string>

#include "svcmimo/frame.hpp"

namespace svcmimo {

/// Reads a raw planar YUV 4:2:0 file (concatenated Y, Cb, Cr planes per
/// frame; no container). The file size must be a whole number of frames.
FrameSeq read_yuv(const std::string& path, int width, int height);

void write_yuv(const FrameSeq& frames, const std::string& path);

}  // namespace svcmimo
