#include "svcmimo/yuv_io.hpp"

#include <fstream>

#include "svcmimo/errors.hpp"
#include "svcmimo/io_util.hpp"

namespace svcmimo {

FrameSeq read_yuv(const std::string& path, int width, int height) {
  if (width < 2 || height < 2 || width % 2 != 0 || height % 2 != 0)
    throw ValidationError("read_yuv: dimensions must be even and >= 2");
  std::ifstream in(path, std::ios::binary | std::ios::ate);
  if (!in) throw ParseError("cannot open video file: " + path);
  const std::streamoff size = in.tellg();
  in.seekg(0);

  const std::size_t luma = std::size_t(width) * height;
  const std::size_t chroma = std::size_t(width / 2) * (height / 2);
  const std::size_t frame_bytes = luma + 2 * chroma;
  if (size == 0 || std::size_t(size) % frame_bytes != 0)
    throw ParseError("video file " + path + " is not a whole number of " +
                     std::to_string(width) + "x" + std::to_string(height) + " 4:2:0 frames");

  FrameSeq frames(std::size_t(size) / frame_bytes);
  for (Frame& f : frames) {
    f.width = width;
    f.height = height;
    f.y.resize(luma);
    f.cb.resize(chroma);
    f.cr.resize(chroma);
    in.read(reinterpret_cast<char*>(f.y.data()), std::streamsize(luma));
    in.read(reinterpret_cast<char*>(f.cb.data()), std::streamsize(chroma));
    in.read(reinterpret_cast<char*>(f.cr.data()), std::streamsize(chroma));
    if (!in) throw ParseError("short read from video file: " + path);
  }
  return frames;
}

void write_yuv(const FrameSeq& frames, const std::string& path) {
  AtomicFile file(path);
  auto& out = file.stream();
  for (const Frame& f : frames) {
    f.validate();
    out.write(reinterpret_cast<const char*>(f.y.data()), std::streamsize(f.y.size()));
    out.write(reinterpret_cast<const char*>(f.cb.data()), std::streamsize(f.cb.size()));
    out.write(reinterpret_cast<const char*>(f.cr.data()), std::streamsize(f.cr.size()));
  }
  file.commit();
}

}  // namespace svcmimo
