#pragma once

#include <cstdint>
#include <vector>

namespace svcmimo {

/// One planar 8-bit YUV 4:2:0 frame. Chroma planes are half resolution in
/// both directions, so dimensions must be even.
struct Frame {
  int width = 0;
  int height = 0;
  std::vector<std::uint8_t> y;
  std::vector<std::uint8_t> cb;
  std::vector<std::uint8_t> cr;

  static Frame solid(int width, int height, std::uint8_t luma, std::uint8_t chroma = 128);

  bool same_size(const Frame& other) const {
    return width == other.width && height == other.height;
  }

  /// Throws ValidationError when plane sizes do not match the dimensions.
  void validate() const;
};

using FrameSeq = std::vector<Frame>;

/// The layered clip: per-layer reconstructions plus the pristine reference.
/// base_frames run on the base timeline; enh_frames and ref_frames share the
/// enhancement timeline and resolution.
struct LayeredVideo {
  FrameSeq base_frames;
  FrameSeq enh_frames;
  FrameSeq ref_frames;

  void validate() const;
};

/// Bilinear resize of all three planes (half-pixel-center sampling, edge
/// clamped). Used to substitute an upsampled base frame for a lost
/// enhancement frame.
Frame resize_bilinear(const Frame& src, int width, int height);

/// Box 2x2 downsample; destination dimensions are half the source.
Frame downsample2x2(const Frame& src);

}  // namespace svcmimo
