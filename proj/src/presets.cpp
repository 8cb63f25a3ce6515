#include "svcmimo/presets.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "svcmimo/errors.hpp"
#include "svcmimo/rng.hpp"

namespace svcmimo {

namespace {

// Static fine texture in [-1, 1], hashed per pixel so downsampling averages
// it away while a frame copy preserves it.
double texture_at(std::uint64_t seed, int x, int y) {
  return 2.0 * uniform_u01(seed, std::uint64_t(y) + 1, std::uint64_t(x)) - 1.0;
}

}  // namespace

LayeredVideo synth_video(const VideoSynthParams& params) {
  if (params.n_base_frames < 1)
    throw std::invalid_argument("synth_video: n_base_frames must be >= 1");
  if (params.fps_ratio < 1)
    throw std::invalid_argument("synth_video: fps_ratio must be >= 1");
  const int enh_w = params.base_width * 2;
  const int enh_h = params.base_height * 2;
  const int n_out = params.n_base_frames * params.fps_ratio;

  constexpr double kWaveX = 23.0;
  constexpr double kWaveY = 17.0;
  const double two_pi = 2.0 * std::numbers::pi;

  LayeredVideo video;
  video.enh_frames.reserve(std::size_t(n_out));
  for (int t = 0; t < n_out; ++t) {
    Frame f = Frame::solid(enh_w, enh_h, 128, 128);
    const double shift = params.motion_px * t;
    for (int y = 0; y < enh_h; ++y) {
      for (int x = 0; x < enh_w; ++x) {
        const double moving = std::sin(two_pi * (x + shift) / kWaveX) *
                              std::cos(two_pi * y / kWaveY);
        const double v = 128.0 + params.motion_amp * moving +
                         params.detail_amp * texture_at(params.seed, x, y);
        f.y[std::size_t(y) * enh_w + x] =
            std::uint8_t(std::lround(std::clamp(v, 0.0, 255.0)));
      }
    }
    video.enh_frames.push_back(std::move(f));
  }
  video.ref_frames = video.enh_frames;
  video.base_frames.reserve(std::size_t(params.n_base_frames));
  for (int j = 0; j < params.n_base_frames; ++j)
    video.base_frames.push_back(downsample2x2(video.enh_frames[std::size_t(j) * params.fps_ratio]));
  video.validate();
  return video;
}

const std::vector<std::string>& preset_names() {
  static const std::vector<std::string> names = {"base-heavy", "enh-heavy", "balanced"};
  return names;
}

bool is_preset(const std::string& name) {
  const auto& names = preset_names();
  return std::find(names.begin(), names.end(), name) != names.end();
}

namespace {

struct PresetDef {
  std::int64_t base_mean_bits;
  std::int64_t enh_mean_bits;
  double dispersion;
  std::uint64_t trace_seed;
  VideoSynthParams video;
};

PresetDef preset_def(const std::string& name) {
  VideoSynthParams video;
  video.n_base_frames = 120;
  video.motion_amp = 36.0;
  if (name == "base-heavy") {
    // Big base packets and fast motion: losing the base layer hurts most.
    video.motion_px = 4.5;
    video.detail_amp = 12.0;
    video.seed = 101;
    return {36000, 6000, 0.2, 201, video};
  }
  if (name == "enh-heavy") {
    // Small base packets, slow motion, heavy fine texture: the enhancement
    // layer carries the value.
    video.motion_px = 1.0;
    video.detail_amp = 20.0;
    video.seed = 102;
    return {4000, 24000, 0.2, 202, video};
  }
  if (name == "balanced") {
    // Prev-copy and upsampling costs measured equal at these settings, so
    // the equal split stays optimal for equal packet sizes.
    video.motion_px = 1.5;
    video.detail_amp = 14.0;
    video.seed = 103;
    return {12000, 12000, 0.2, 203, video};
  }
  throw std::invalid_argument("unknown preset '" + name + "' (expected base-heavy, enh-heavy or balanced)");
}

}  // namespace

PacketTrace preset_trace(const std::string& name) {
  const PresetDef def = preset_def(name);
  return synth_trace(def.video.n_base_frames, def.base_mean_bits, def.enh_mean_bits,
                     def.dispersion, def.trace_seed);
}

LayeredVideo preset_video(const std::string& name) {
  return synth_video(preset_def(name).video);
}

}  // namespace svcmimo
