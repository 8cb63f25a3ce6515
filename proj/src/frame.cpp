#include "svcmimo/frame.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "svcmimo/errors.hpp"

namespace svcmimo {

Frame Frame::solid(int width, int height, std::uint8_t luma, std::uint8_t chroma) {
  Frame f;
  f.width = width;
  f.height = height;
  f.y.assign(static_cast<std::size_t>(width) * height, luma);
  f.cb.assign(static_cast<std::size_t>(width / 2) * (height / 2), chroma);
  f.cr = f.cb;
  f.validate();
  return f;
}

void Frame::validate() const {
  if (width < 2 || height < 2 || width % 2 != 0 || height % 2 != 0)
    throw ValidationError("Frame: dimensions must be even and >= 2 (4:2:0 chroma)");
  if (y.size() != static_cast<std::size_t>(width) * height)
    throw ValidationError("Frame: luma plane size does not match dimensions");
  const std::size_t chroma_size = static_cast<std::size_t>(width / 2) * (height / 2);
  if (cb.size() != chroma_size || cr.size() != chroma_size)
    throw ValidationError("Frame: chroma plane size does not match dimensions");
}

namespace {

void check_uniform(const FrameSeq& seq, const char* name) {
  for (const Frame& f : seq) {
    f.validate();
    if (!f.same_size(seq.front()))
      throw ValidationError(std::string("LayeredVideo: ") + name +
                            " frames do not share dimensions");
  }
}

void resize_plane(const std::uint8_t* src, int sw, int sh, std::uint8_t* dst, int dw,
                  int dh) {
  const double x_scale = double(sw) / dw;
  const double y_scale = double(sh) / dh;
  for (int yd = 0; yd < dh; ++yd) {
    double sy = (yd + 0.5) * y_scale - 0.5;
    sy = std::clamp(sy, 0.0, double(sh - 1));
    const int y0 = static_cast<int>(sy);
    const int y1 = std::min(y0 + 1, sh - 1);
    const double fy = sy - y0;
    for (int xd = 0; xd < dw; ++xd) {
      double sx = (xd + 0.5) * x_scale - 0.5;
      sx = std::clamp(sx, 0.0, double(sw - 1));
      const int x0 = static_cast<int>(sx);
      const int x1 = std::min(x0 + 1, sw - 1);
      const double fx = sx - x0;
      const double top = (1.0 - fx) * src[y0 * sw + x0] + fx * src[y0 * sw + x1];
      const double bot = (1.0 - fx) * src[y1 * sw + x0] + fx * src[y1 * sw + x1];
      const double v = (1.0 - fy) * top + fy * bot;
      dst[yd * dw + xd] = static_cast<std::uint8_t>(std::lround(std::clamp(v, 0.0, 255.0)));
    }
  }
}

}  // namespace

void LayeredVideo::validate() const {
  if (base_frames.empty() || enh_frames.empty() || ref_frames.empty())
    throw ValidationError("LayeredVideo: all three sequences must be non-empty");
  check_uniform(base_frames, "base");
  check_uniform(enh_frames, "enhancement");
  check_uniform(ref_frames, "reference");
  if (ref_frames.size() != enh_frames.size())
    throw ValidationError("LayeredVideo: reference frame count must match enhancement");
  if (!ref_frames.front().same_size(enh_frames.front()))
    throw ValidationError("LayeredVideo: reference resolution must match enhancement");
  if (base_frames.front().width > enh_frames.front().width ||
      base_frames.front().height > enh_frames.front().height)
    throw ValidationError(
        "LayeredVideo: base resolution must not exceed enhancement resolution");
}

Frame resize_bilinear(const Frame& src, int width, int height) {
  src.validate();
  Frame dst;
  dst.width = width;
  dst.height = height;
  dst.y.resize(static_cast<std::size_t>(width) * height);
  dst.cb.resize(static_cast<std::size_t>(width / 2) * (height / 2));
  dst.cr.resize(dst.cb.size());
  dst.validate();
  resize_plane(src.y.data(), src.width, src.height, dst.y.data(), width, height);
  resize_plane(src.cb.data(), src.width / 2, src.height / 2, dst.cb.data(), width / 2,
               height / 2);
  resize_plane(src.cr.data(), src.width / 2, src.height / 2, dst.cr.data(), width / 2,
               height / 2);
  return dst;
}

namespace {

void box_down(const std::uint8_t* src, int sw, int sh, std::uint8_t* dst) {
  const int dw = sw / 2;
  for (int y = 0; y < sh / 2; ++y) {
    for (int x = 0; x < dw; ++x) {
      const int s = src[2 * y * sw + 2 * x] + src[2 * y * sw + 2 * x + 1] +
                    src[(2 * y + 1) * sw + 2 * x] + src[(2 * y + 1) * sw + 2 * x + 1];
      dst[y * dw + x] = static_cast<std::uint8_t>((s + 2) / 4);
    }
  }
}

}  // namespace

Frame downsample2x2(const Frame& src) {
  src.validate();
  if (src.width % 4 != 0 || src.height % 4 != 0)
    throw ValidationError("downsample2x2: source dimensions must be multiples of 4");
  Frame dst;
  dst.width = src.width / 2;
  dst.height = src.height / 2;
  dst.y.resize(static_cast<std::size_t>(dst.width) * dst.height);
  dst.cb.resize(static_cast<std::size_t>(dst.width / 2) * (dst.height / 2));
  dst.cr.resize(dst.cb.size());
  box_down(src.y.data(), src.width, src.height, dst.y.data());
  box_down(src.cb.data(), src.width / 2, src.height / 2, dst.cb.data());
  box_down(src.cr.data(), src.width / 2, src.height / 2, dst.cr.data());
  return dst;
}

}  // namespace svcmimo
