#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "svcmimo/frame.hpp"
#include "svcmimo/svc_trace.hpp"

namespace svcmimo {

/// Parameters of the synthetic clip generator. Content is a slow-moving
/// low-frequency pattern (costly to replace with a stale copy) over a static
/// fine texture (lost when the base layer is upsampled), so the two
/// concealment paths have independently tunable costs.
struct VideoSynthParams {
  int n_base_frames = 120;
  int base_width = 176;
  int base_height = 144;
  int fps_ratio = 2;
  double motion_amp = 40.0;    ///< amplitude of the moving component
  double motion_px = 2.0;      ///< horizontal speed, pixels per output frame
  double detail_amp = 24.0;    ///< amplitude of the static fine texture
  std::uint64_t seed = 1;
};

/// Deterministic synthetic LayeredVideo: the reference equals the full
/// enhancement reconstruction; the base layer is its 2x2 box downsample on
/// the base timeline (enhancement resolution is twice the base).
LayeredVideo synth_video(const VideoSynthParams& params);

/// Names of the bundled synthetic scenarios: "base-heavy" (large base
/// packets, high motion), "enh-heavy" (small base packets, low motion) and
/// "balanced" (comparable packet sizes and concealment costs).
const std::vector<std::string>& preset_names();
bool is_preset(const std::string& name);

PacketTrace preset_trace(const std::string& name);
LayeredVideo preset_video(const std::string& name);

}  // namespace svcmimo
